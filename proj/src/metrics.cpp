#include "precarity/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "precarity/error.hpp"

namespace precarity {

namespace {

void check_sequence(std::span<const int> states, int state_space_size) {
  if (state_space_size < 2) {
    throw DomainError("state space must have at least 2 states, got " +
                      std::to_string(state_space_size));
  }
  if (states.empty()) throw DomainError("empty state sequence");
  for (int s : states) {
    if (s < 0 || s >= state_space_size) {
      throw DomainError("state rank " + std::to_string(s) + " outside [0, " +
                        std::to_string(state_space_size - 1) + "]");
    }
  }
}

}  // namespace

StateSequence::StateSequence(std::vector<int> states, int state_space_size)
    : states_(std::move(states)), state_space_size_(state_space_size) {
  check_sequence(states_, state_space_size_);
}

void StateSequence::push_back(int state) {
  if (state < 0 || state >= state_space_size_) {
    throw DomainError("state rank " + std::to_string(state) + " outside the state space");
  }
  states_.push_back(state);
}

void PrecarityParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("precarity lambda must lie in [0, 1]");
  if (!(alpha > 0.0)) throw ConfigError("precarity alpha must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("precarity gamma must be > 0");
}

double PrecarityParams::upper_bound() const {
  return lambda + (1.0 - lambda) * std::pow(2.0, gamma);
}

double start_quality(std::span<const int> states, int state_space_size) {
  check_sequence(states, state_space_size);
  const int top = state_space_size - 1;
  return static_cast<double>(top - states.front()) / static_cast<double>(top);
}

NetDecline net_decline(std::span<const int> states, int state_space_size, bool count_stays) {
  check_sequence(states, state_space_size);
  NetDecline out;
  if (states.size() < 2) return out;

  // Weight of a transition: 1 + hops from its destination to the best state seen.
  const int best = *std::max_element(states.begin(), states.end());
  double negative = 0.0;
  double positive = 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const int from = states[i - 1];
    const int to = states[i];
    if (from == to && !count_stays) continue;
    const double w = 1.0 + static_cast<double>(best - to);
    total += w;
    if (to < from) negative += w;
    else if (to > from) positive += w;
  }
  if (total == 0.0) return out;
  out.q_neg = negative / total;
  out.q_pos = positive / total;
  out.q = out.q_neg - out.q_pos;
  return out;
}

Variability variability(std::span<const int> states, int state_space_size) {
  check_sequence(states, state_space_size);
  if (states.size() < 2) {
    throw DomainError("variability needs at least 2 states, got " + std::to_string(states.size()));
  }

  std::vector<std::size_t> counts(static_cast<std::size_t>(state_space_size), 0);
  for (int s : states) ++counts[static_cast<std::size_t>(s)];

  const double n = static_cast<double>(states.size());
  double entropy = 0.0;
  for (std::size_t k : counts) {
    if (k == 0) continue;
    const double p = static_cast<double>(k) / n;
    entropy -= p * std::log(p);
  }

  std::size_t changes = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i] != states[i - 1]) ++changes;
  }

  Variability out;
  out.h_norm = std::clamp(entropy / std::log(static_cast<double>(state_space_size)), 0.0, 1.0);
  out.t_norm = static_cast<double>(changes) / (n - 1.0);
  out.c = std::sqrt(out.h_norm * out.t_norm);
  return out;
}

double precarity_index(std::span<const int> states, int state_space_size,
                       const PrecarityParams& params) {
  const double r = start_quality(states, state_space_size);
  if (states.size() < 2) return params.lambda * r;

  const NetDecline decline = net_decline(states, state_space_size, params.count_stays);
  const Variability var = variability(states, state_space_size);
  const double dynamic =
      std::pow(var.c, params.alpha) * std::pow(std::max(0.0, 1.0 + decline.q), params.gamma);
  return params.lambda * r + (1.0 - params.lambda) * dynamic;
}

SequenceStats sequence_stats(std::span<const int> states, int state_space_size,
                             bool count_stays) {
  SequenceStats out;
  out.r_start = start_quality(states, state_space_size);
  const NetDecline decline = net_decline(states, state_space_size, count_stays);
  out.q_neg = decline.q_neg;
  out.q_pos = decline.q_pos;
  out.q = decline.q;
  if (states.size() >= 2) {
    const Variability var = variability(states, state_space_size);
    out.h_norm = var.h_norm;
    out.t_norm = var.t_norm;
    out.c = var.c;
  }
  return out;
}

}  // namespace precarity
