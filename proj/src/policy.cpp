#include "precarity/policy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace precarity {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = q * double(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

ClassifierPolicy calibrate_threshold(std::span<const Household> population, double q) {
  std::vector<double> incomes;
  incomes.reserve(population.size());
  for (const Household& hh : population) incomes.push_back(hh.income);
  return {quantile(incomes, q), q};
}

Outcome classify(const Household& hh, const ClassifierPolicy& policy) {
  return hh.income >= policy.threshold_income ? Outcome::Positive : Outcome::Negative;
}

void InterventionConfig::validate() const {
  if (start_round < 1) throw ConfigError("intervention start_round must be >= 1");
  if (const auto* s = std::get_if<FixedStimulus>(&kind)) {
    if (!(s->amount >= 0.0)) throw ConfigError("stimulus amount must be >= 0");
  }
  if (const auto* r = std::get_if<PrecarityResistance>(&kind)) {
    if (!(r->negative_prob_scale >= 0.0 && r->negative_prob_scale <= 1.0)) {
      throw ConfigError("negative_prob_scale must lie in [0, 1]");
    }
  }
}

double stimulus_amount(const Household& hh, const InterventionConfig& cfg,
                       const ClassifierPolicy& policy, int round) {
  const auto* s = std::get_if<FixedStimulus>(&cfg.kind);
  if (s == nullptr || !cfg.active(round)) return 0.0;
  return hh.income < policy.threshold_income ? s->amount : 0.0;
}

void apply_stimulus(Household& hh, const InterventionConfig& cfg, const ClassifierPolicy& policy,
                    int round) {
  hh.transfer = stimulus_amount(hh, cfg, policy, round);
}

TransitionTable apply_resistance(const TransitionTable& table, double scale) {
  if (!(scale >= 0.0 && scale <= 1.0)) throw DomainError("resistance scale must lie in [0, 1]");
  TransitionTable out = table;
  for (IncomeClass c : {IncomeClass::Low, IncomeClass::Middle, IncomeClass::High}) {
    TransitionRow row = table.row(c, Outcome::Negative);
    double freed = 0.0;
    for (std::size_t k = 1; k < row.size(); ++k) {
      const double kept = row[k] * scale;
      freed += row[k] - kept;
      row[k] = kept;
    }
    row[0] += freed;
    out.set_row(c, Outcome::Negative, row);
  }
  return out;
}

}  // namespace precarity
