#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace precarity {

enum class IncomeClass { Low = 0, Middle = 1, High = 2 };

std::string_view to_string(IncomeClass c);

struct Household {
  int id = 0;
  double income = 0.0;    // market income, currency/month
  double transfer = 0.0;  // stimulus received this round
  double net_worth = 0.0;
  double health = 0.0;
  double health_adjustment = 0.0;  // cumulative score changes from agent actions
  double expenses = 0.0;           // basic monthly expenditures
  IncomeClass income_class = IncomeClass::Middle;
  int z = 0;  // exogenous income state (rational agents)
  bool insolvent = false;

  double disposable_income() const noexcept { return income + transfer; }
};

struct DecileState {
  int income = 0;
  int net_worth = 0;
  int health = 0;
};

struct HealthModel {
  double mean_health = 2.3;  // population mean health index h-bar
  double eta = 1.0;
  double sigma_h = 1e-20;

  void validate() const;
};

/// h-bar + eta (w_i - w_g) - sigma_h (w_i - w_g)^2
double update_health(double income, double group_mean_income, const HealthModel& model);
double update_health(const Household& hh, double group_mean_income, const HealthModel& model);

/// Piecewise-linear lookup over increasing knots, clamped at both ends.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  std::span<const double> knots() const noexcept { return x_; }
  std::span<const double> values() const noexcept { return y_; }
  bool empty() const noexcept { return x_.empty(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

struct SyntheticIncome {
  double log_mean = 8.6526;  // log of the median monthly household income (~$5,725)
  double log_sd = 0.9;
};

struct IncomeFile {
  std::filesystem::path path;
};

struct PopulationSpec {
  std::size_t n = 10000;
  std::variant<SyntheticIncome, IncomeFile> source = SyntheticIncome{};
  /// Median net worth by income percentile (percentile in [0, 100]).
  PiecewiseLinear net_worth_by_percentile;
  /// Log-normal dispersion of net worth around the percentile median; 0 = none.
  double net_worth_dispersion = 0.5;
  std::array<double, 10> expenses_by_decile{};
  std::array<double, 3> class_cutoffs{0.29, 0.52, 0.19};
  HealthModel health;

  void validate() const;
};

PiecewiseLinear default_net_worth_table();
std::array<double, 10> default_expenditure_table();
PopulationSpec default_population_spec();

std::vector<Household> build_population(const PopulationSpec& spec, std::uint64_t seed);

/// Equal-frequency deciles; a value's decile is floor(10 * #{strictly smaller
/// values} / n), so tied values share the decile of the lowest-ranked member.
std::vector<int> assign_deciles(std::span<const double> values);
std::vector<DecileState> assign_deciles(std::span<const Household> population);

enum class BinningMode {
  Initial,   // cut points frozen at the initial population's distribution
  Relative,  // re-ranked against the current population every round
};

class DecileBinner {
 public:
  DecileBinner(std::span<const double> reference, BinningMode mode);

  std::vector<int> assign(std::span<const double> values) const;
  BinningMode mode() const noexcept { return mode_; }

 private:
  std::vector<double> reference_;  // sorted
  BinningMode mode_;
};

/// Income levels at which the initial Middle and High classes begin.
struct ClassBoundaries {
  double middle_from = 0.0;
  double high_from = 0.0;

  IncomeClass classify(double income) const noexcept;
};

ClassBoundaries class_boundaries(std::span<const Household> population);

}  // namespace precarity
