#pragma once

// Decision-maker side: a fixed income-threshold classifier and the two
// interventions (a monthly stimulus for rejected households and resistance
// against moves to poorer states after a rejection).

#include <Eigen/Dense>
#include <span>
#include <variant>

#include "precarity/error.hpp"
#include "precarity/mdp.hpp"
#include "precarity/population.hpp"

namespace precarity {

struct ClassifierPolicy {
  double threshold_income = 0.0;
  double acceptance_quantile = 0.5;
};

/// Linear-interpolation sample quantile (R type 7): (1,2,3,4) at 0.5 gives 2.5.
double quantile(std::span<const double> values, double q);

/// Threshold fixed at the q-quantile of the initial incomes.
ClassifierPolicy calibrate_threshold(std::span<const Household> population, double q);

/// Positive iff market income >= threshold.
Outcome classify(const Household& hh, const ClassifierPolicy& policy);

struct NoIntervention {};
struct FixedStimulus {
  double amount = 1500.0;
};
struct PrecarityResistance {
  double negative_prob_scale = 1.0;
};

struct InterventionConfig {
  std::variant<NoIntervention, FixedStimulus, PrecarityResistance> kind;
  int start_round = 1;

  bool active(int round) const { return round >= start_round; }
  void validate() const;
};

/// Stimulus owed this round: the configured amount when active and the
/// household's market income is below the threshold, otherwise 0.
double stimulus_amount(const Household& hh, const InterventionConfig& cfg,
                       const ClassifierPolicy& policy, int round);

/// Sets the round's transfer (stimulus_amount) on the household.
void apply_stimulus(Household& hh, const InterventionConfig& cfg, const ClassifierPolicy& policy,
                    int round);

/// Scales every inferior-action probability of the negative-outcome rows and
/// moves the freed mass to Stay.
TransitionTable apply_resistance(const TransitionTable& table, double scale);

/// Scales every entry of P that leads to a state with lower income than the
/// current one and moves the freed mass to the diagonal.
template <typename Derived, typename IncomeVec>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> apply_resistance(
    const Eigen::MatrixBase<Derived>& P, const Eigen::MatrixBase<IncomeVec>& income,
    typename Derived::Scalar scale) {
  using Scalar = typename Derived::Scalar;
  if (!(scale >= Scalar(0) && scale <= Scalar(1))) {
    throw DomainError("resistance scale must lie in [0, 1]");
  }
  if (P.rows() != P.cols() || P.rows() != income.size()) {
    throw DomainError("transition matrix and income vector disagree in size");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = P;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    Scalar freed = Scalar(0);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (income(j) < income(i)) {
        const Scalar kept = out(i, j) * scale;
        freed += out(i, j) - kept;
        out(i, j) = kept;
      }
    }
    out(i, i) += freed;
  }
  return out;
}

}  // namespace precarity
