#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "precarity/engine.hpp"

namespace precarity {

inline constexpr int kHistogramBins = 40;

enum class Stratum { All, Low, Middle, High };
inline constexpr std::array<Stratum, 4> kStrata{Stratum::All, Stratum::Low, Stratum::Middle,
                                                Stratum::High};
std::string_view to_string(Stratum s);

struct SummaryRow {
  std::string scenario;
  int round = 0;
  Attribute attribute = Attribute::Income;
  Stratum stratum = Stratum::All;
  std::size_t n = 0;
  double mean = 0.0;  // NaN for an empty stratum
  double median = 0.0;
  std::array<std::size_t, kHistogramBins> counts{};
};

/// Per (round, attribute, stratum) precarity distributions for one scenario.
/// Histograms use equal-width bins over [0, upper_bound]; rounds run 1..R.
struct ScenarioReport {
  std::string scenario;
  double upper_bound = 0.0;
  std::vector<SummaryRow> rows;

  std::vector<double> bin_edges() const;
};

ScenarioReport summarize(const TrajectoryRecord& record, const std::string& scenario,
                         const PrecarityParams& params);

/// Median with the midpoint rule for even sizes; NaN when empty.
double median(std::vector<double> values);

/// Values at or above min + 0.75 (max - min) of the pooled range of a and b.
std::pair<std::size_t, std::size_t> top_quartile_counts(std::span<const double> a,
                                                        std::span<const double> b);

void write_report_csv(const std::filesystem::path& path, const ScenarioReport& report);
/// upper_bound is not stored in the file and is left at 0.
ScenarioReport read_report_csv(const std::filesystem::path& path);

struct ComparisonRow {
  std::string scenario;  // B
  std::string baseline;  // A
  int round = 0;
  Attribute attribute = Attribute::Income;
  Stratum stratum = Stratum::All;
  double delta_mean = 0.0;
  double delta_median = 0.0;
  long long delta_top_quartile = 0;
};

/// Deltas B - A per stratum. The top-quartile count uses the histogram: the
/// occupied range of both reports is pooled and bins whose lower edge lies in
/// its top quarter are counted. Mismatched strata are an error.
std::vector<ComparisonRow> compare(const ScenarioReport& a, const ScenarioReport& b);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ComparisonRow>& rows);

}  // namespace precarity
