#pragma once

// Precarity index over categorical state sequences.
//
// States are ranks 0..|S|-1 where 0 is the most precarious state. The index
// combines the precariousness of the starting state, the weighted net decline
// of the trajectory and its variability (normalized entropy and turbulence):
//
//   p = lambda * r_start + (1 - lambda) * c^alpha * (1 + q)^gamma

#include <cstddef>
#include <span>
#include <vector>

namespace precarity {

class StateSequence {
 public:
  StateSequence(std::vector<int> states, int state_space_size);

  std::span<const int> states() const noexcept { return states_; }
  int state_space_size() const noexcept { return state_space_size_; }
  std::size_t size() const noexcept { return states_.size(); }
  int operator[](std::size_t i) const { return states_[i]; }

  void push_back(int state);

 private:
  std::vector<int> states_;
  int state_space_size_;
};

struct PrecarityParams {
  double lambda = 0.2;
  double alpha = 1.0;
  double gamma = 1.2;
  // Same-state pairs enter the denominator of the decline proportions when set.
  bool count_stays = false;

  void validate() const;
  /// Largest value the index can take: lambda + (1 - lambda) * 2^gamma.
  double upper_bound() const;
};

struct NetDecline {
  double q_neg = 0.0;
  double q_pos = 0.0;
  double q = 0.0;
};

struct Variability {
  double h_norm = 0.0;
  double t_norm = 0.0;
  double c = 0.0;
};

struct SequenceStats {
  double q_neg = 0.0;
  double q_pos = 0.0;
  double q = 0.0;
  double h_norm = 0.0;
  double t_norm = 0.0;
  double c = 0.0;
  double r_start = 0.0;
};

// The span overloads validate ranks against state_space_size and are the
// entry points used on stored trajectories (prefixes without copies).

double start_quality(std::span<const int> states, int state_space_size);
NetDecline net_decline(std::span<const int> states, int state_space_size, bool count_stays = false);
Variability variability(std::span<const int> states, int state_space_size);
double precarity_index(std::span<const int> states, int state_space_size,
                       const PrecarityParams& params = {});
SequenceStats sequence_stats(std::span<const int> states, int state_space_size,
                             bool count_stays = false);

inline double start_quality(const StateSequence& seq) {
  return start_quality(seq.states(), seq.state_space_size());
}
inline NetDecline net_decline(const StateSequence& seq, bool count_stays = false) {
  return net_decline(seq.states(), seq.state_space_size(), count_stays);
}
inline Variability variability(const StateSequence& seq) {
  return variability(seq.states(), seq.state_space_size());
}
inline double precarity_index(const StateSequence& seq, const PrecarityParams& params = {}) {
  return precarity_index(seq.states(), seq.state_space_size(), params);
}
inline SequenceStats sequence_stats(const StateSequence& seq, bool count_stays = false) {
  return sequence_stats(seq.states(), seq.state_space_size(), count_stays);
}

}  // namespace precarity
