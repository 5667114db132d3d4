#include "precarity/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "precarity/error.hpp"
#include "precarity/io.hpp"
#include "precarity/rng.hpp"

namespace precarity {

std::string_view to_string(IncomeClass c) {
  switch (c) {
    case IncomeClass::Low: return "low";
    case IncomeClass::Middle: return "middle";
    case IncomeClass::High: return "high";
  }
  return "?";
}

void HealthModel::validate() const {
  if (!std::isfinite(mean_health)) throw ConfigError("health mean must be finite");
  if (!(eta > 0.0)) throw ConfigError("health eta must be > 0");
  if (!(sigma_h > 0.0)) throw ConfigError("health sigma must be > 0");
}

double update_health(double income, double group_mean_income, const HealthModel& model) {
  const double d = income - group_mean_income;
  return model.mean_health + model.eta * d - model.sigma_h * d * d;
}

double update_health(const Household& hh, double group_mean_income, const HealthModel& model) {
  return update_health(hh.disposable_income(), group_mean_income, model);
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw DomainError("lookup table needs equally many knots and values");
  if (x_.empty()) throw DomainError("lookup table is empty");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("lookup table knots must be strictly increasing");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (x_.empty()) throw DomainError("lookup in an empty table");
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - x_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - x_[lo]) / (x_[hi] - x_[lo]);
  return y_[lo] + t * (y_[hi] - y_[lo]);
}

void PopulationSpec::validate() const {
  if (n == 0) throw ConfigError("population size n must be positive");
  double total = 0.0;
  for (double f : class_cutoffs) {
    if (!(f >= 0.0)) throw ConfigError("class cutoff fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("class cutoff fractions must sum to 1");
  if (net_worth_by_percentile.empty()) throw ConfigError("net worth table is empty");
  if (!(net_worth_dispersion >= 0.0)) throw ConfigError("net worth dispersion must be >= 0");
  for (double e : expenses_by_decile) {
    if (!(e >= 0.0)) throw ConfigError("expenditures must be non-negative");
  }
  if (const auto* s = std::get_if<SyntheticIncome>(&source)) {
    if (!std::isfinite(s->log_mean) || !(s->log_sd >= 0.0)) {
      throw ConfigError("synthetic income needs a finite log_mean and log_sd >= 0");
    }
  }
  health.validate();
}

// Median household net worth by income percentile and annual expenditures by
// income decile, in dollars.
PiecewiseLinear default_net_worth_table() {
  return PiecewiseLinear({10, 30, 50, 70, 85, 95}, {6450, 36000, 81200, 197300, 397400, 1589300});
}

std::array<double, 10> default_expenditure_table() {
  std::array<double, 10> annual{26000, 32000, 38500, 45000, 52000,
                                59000, 66000, 76000, 94000, 145000};
  for (double& v : annual) v /= 12.0;
  return annual;
}

PopulationSpec default_population_spec() {
  PopulationSpec spec;
  spec.net_worth_by_percentile = default_net_worth_table();
  spec.expenses_by_decile = default_expenditure_table();
  return spec;
}

namespace {

std::vector<double> draw_incomes(const PopulationSpec& spec, Rng& rng) {
  std::vector<double> out(spec.n);
  if (const auto* s = std::get_if<SyntheticIncome>(&spec.source)) {
    std::lognormal_distribution<double> dist(s->log_mean, s->log_sd);
    for (double& v : out) v = dist(rng);
    return out;
  }
  const auto& file = std::get<IncomeFile>(spec.source);
  const std::vector<double> rows = io::read_income_file(file.path);
  if (rows.size() == spec.n) return rows;
  // Resample with replacement to the requested size.
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  for (double& v : out) v = rows[pick(rng)];
  return out;
}

// rank[i] = number of households with strictly smaller income, so tied
// households share rank, percentile, decile and class.
std::vector<std::size_t> min_ranks(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> rank(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rank[i] = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
  }
  return rank;
}

}  // namespace

std::vector<Household> build_population(const PopulationSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_stream(seed, StreamPurpose::Population);
  const std::vector<double> income = draw_incomes(spec, rng);
  const std::size_t n = income.size();

  const std::vector<std::size_t> rank = min_ranks(income);
  const std::vector<int> decile = assign_deciles(income);
  const auto low_end = static_cast<std::size_t>(std::llround(spec.class_cutoffs[0] * double(n)));
  const auto mid_end = static_cast<std::size_t>(
      std::llround((spec.class_cutoffs[0] + spec.class_cutoffs[1]) * double(n)));

  std::normal_distribution<double> spread(0.0, 1.0);
  std::vector<Household> pop(n);
  for (std::size_t i = 0; i < n; ++i) {
    Household& hh = pop[i];
    hh.id = static_cast<int>(i);
    hh.income = income[i];
    if (!(hh.income >= 0.0) || !std::isfinite(hh.income)) {
      throw DomainError("household income must be finite and non-negative");
    }
    const double pct = 100.0 * (double(rank[i]) + 0.5) / double(n);
    hh.net_worth = spec.net_worth_by_percentile(pct);
    if (spec.net_worth_dispersion > 0.0) {
      hh.net_worth *= std::exp(spec.net_worth_dispersion * spread(rng));
    }
    hh.health = spec.health.mean_health;
    hh.expenses = spec.expenses_by_decile[static_cast<std::size_t>(decile[i])];
    hh.income_class = rank[i] < low_end   ? IncomeClass::Low
                      : rank[i] < mid_end ? IncomeClass::Middle
                                          : IncomeClass::High;
    hh.z = decile[i];
  }
  return pop;
}

std::vector<int> assign_deciles(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto below = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    out[i] = static_cast<int>(10 * below / n);
  }
  return out;
}

std::vector<DecileState> assign_deciles(std::span<const Household> population) {
  if (population.empty()) throw DomainError("cannot assign deciles to an empty population");
  std::vector<double> income, worth, health;
  income.reserve(population.size());
  worth.reserve(population.size());
  health.reserve(population.size());
  for (const Household& hh : population) {
    income.push_back(hh.income);
    worth.push_back(hh.net_worth);
    health.push_back(hh.health);
  }
  const auto di = assign_deciles(income);
  const auto dw = assign_deciles(worth);
  const auto dh = assign_deciles(health);
  std::vector<DecileState> out(population.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {di[i], dw[i], dh[i]};
  return out;
}

DecileBinner::DecileBinner(std::span<const double> reference, BinningMode mode)
    : reference_(reference.begin(), reference.end()), mode_(mode) {
  if (reference_.empty()) throw DomainError("decile binner needs a non-empty reference");
  std::sort(reference_.begin(), reference_.end());
}

std::vector<int> DecileBinner::assign(std::span<const double> values) const {
  if (mode_ == BinningMode::Relative) return assign_deciles(values);
  const std::size_t n = reference_.size();
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto below = static_cast<std::size_t>(
        std::lower_bound(reference_.begin(), reference_.end(), values[i]) - reference_.begin());
    out[i] = std::min(9, static_cast<int>(10 * below / n));
  }
  return out;
}

IncomeClass ClassBoundaries::classify(double income) const noexcept {
  if (income >= high_from) return IncomeClass::High;
  if (income >= middle_from) return IncomeClass::Middle;
  return IncomeClass::Low;
}

ClassBoundaries class_boundaries(std::span<const Household> population) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ClassBoundaries b{inf, inf};
  for (const Household& hh : population) {
    if (hh.income_class == IncomeClass::Middle) b.middle_from = std::min(b.middle_from, hh.income);
    if (hh.income_class == IncomeClass::High) b.high_from = std::min(b.high_from, hh.income);
  }
  b.middle_from = std::min(b.middle_from, b.high_from);
  return b;
}

}  // namespace precarity
