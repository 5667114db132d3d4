#include "precarity/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "precarity/error.hpp"
#include "precarity/io.hpp"

namespace precarity {

std::string_view to_string(Stratum s) {
  switch (s) {
    case Stratum::All: return "all";
    case Stratum::Low: return "low";
    case Stratum::Middle: return "middle";
    case Stratum::High: return "high";
  }
  return "?";
}

namespace {

bool in_stratum(IncomeClass c, Stratum s) {
  switch (s) {
    case Stratum::All: return true;
    case Stratum::Low: return c == IncomeClass::Low;
    case Stratum::Middle: return c == IncomeClass::Middle;
    case Stratum::High: return c == IncomeClass::High;
  }
  return false;
}

template <typename E, std::size_t N>
E parse_enum(const std::array<E, N>& all, const std::string& text, const io::Table& t,
             std::size_t row) {
  for (E e : all) {
    if (to_string(e) == text) return e;
  }
  throw IngestionError(t.path.string(), t.line_numbers[row], "unknown label '" + text + "'");
}

std::string number(double v) { return std::isnan(v) ? "nan" : fmt::format("{:.17g}", v); }

}  // namespace

std::vector<double> ScenarioReport::bin_edges() const {
  std::vector<double> edges(kHistogramBins + 1);
  for (int k = 0; k <= kHistogramBins; ++k) edges[k] = upper_bound * k / kHistogramBins;
  return edges;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::pair<std::size_t, std::size_t> top_quartile_counts(std::span<const double> a,
                                                        std::span<const double> b) {
  if (a.empty() && b.empty()) return {0, 0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto s : {a, b}) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double cut = lo + 0.75 * (hi - lo);
  auto count = [cut](std::span<const double> s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [cut](double v) { return v >= cut; }));
  };
  return {count(a), count(b)};
}

ScenarioReport summarize(const TrajectoryRecord& record, const std::string& scenario,
                         const PrecarityParams& params) {
  ScenarioReport rep;
  rep.scenario = scenario;
  rep.upper_bound = params.upper_bound();
  const double width = rep.upper_bound / kHistogramBins;
  for (int round = 1; round <= record.rounds_completed(); ++round) {
    for (Attribute attr : kAttributes) {
      const auto& values = record.precarity[static_cast<std::size_t>(round)][static_cast<std::size_t>(attr)];
      for (Stratum s : kStrata) {
        SummaryRow row;
        row.scenario = scenario;
        row.round = round;
        row.attribute = attr;
        row.stratum = s;
        std::vector<double> members;
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (in_stratum(record.income_class[i], s)) members.push_back(values[i]);
        }
        row.n = members.size();
        row.mean = members.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : std::accumulate(members.begin(), members.end(), 0.0) /
                                         double(members.size());
        for (double v : members) {
          const int bin = std::clamp(static_cast<int>(std::floor(v / width)), 0, kHistogramBins - 1);
          ++row.counts[static_cast<std::size_t>(bin)];
        }
        row.median = median(std::move(members));
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

void write_report_csv(const std::filesystem::path& path, const ScenarioReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report " + path.string());
  out << "scenario,round,attribute,stratum,n,mean,median";
  for (int k = 0; k < kHistogramBins; ++k) out << fmt::format(",bin{:02d}", k);
  out << '\n';
  for (const SummaryRow& r : report.rows) {
    out << r.scenario << ',' << r.round << ',' << to_string(r.attribute) << ','
        << to_string(r.stratum) << ',' << r.n << ',' << number(r.mean) << ',' << number(r.median);
    for (std::size_t c : r.counts) out << ',' << c;
    out << '\n';
  }
  if (!out) throw Error("failed writing report " + path.string());
}

ScenarioReport read_report_csv(const std::filesystem::path& path) {
  const io::Table t = io::read_table(path);
  const std::size_t c_scenario = t.column("scenario");
  const std::size_t c_round = t.column("round");
  const std::size_t c_attr = t.column("attribute");
  const std::size_t c_stratum = t.column("stratum");
  const std::size_t c_n = t.column("n");
  const std::size_t c_mean = t.column("mean");
  const std::size_t c_median = t.column("median");
  std::array<std::size_t, kHistogramBins> c_bins{};
  for (int k = 0; k < kHistogramBins; ++k) c_bins[k] = t.column(fmt::format("bin{:02d}", k));

  ScenarioReport rep;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    SummaryRow row;
    row.scenario = t.rows[r][c_scenario];
    row.round = static_cast<int>(t.number(r, c_round));
    row.attribute = parse_enum(kAttributes, t.rows[r][c_attr], t, r);
    row.stratum = parse_enum(kStrata, t.rows[r][c_stratum], t, r);
    row.n = static_cast<std::size_t>(t.number(r, c_n));
    auto maybe_nan = [&](std::size_t c) {
      return t.rows[r][c] == "nan" ? std::numeric_limits<double>::quiet_NaN() : t.number(r, c);
    };
    row.mean = maybe_nan(c_mean);
    row.median = maybe_nan(c_median);
    std::size_t total = 0;
    for (int k = 0; k < kHistogramBins; ++k) {
      row.counts[k] = static_cast<std::size_t>(t.number(r, c_bins[k]));
      total += row.counts[k];
    }
    if (total != row.n) {
      throw IngestionError(path.string(), t.line_numbers[r], "histogram counts do not sum to n");
    }
    if (rep.scenario.empty()) rep.scenario = row.scenario;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<ComparisonRow> compare(const ScenarioReport& a, const ScenarioReport& b) {
  using Key = std::tuple<int, Attribute, Stratum>;
  auto key = [](const SummaryRow& r) { return Key{r.round, r.attribute, r.stratum}; };
  std::map<Key, const SummaryRow*> index_b;
  for (const SummaryRow& r : b.rows) index_b[key(r)] = &r;
  if (a.rows.size() != b.rows.size()) {
    throw DomainError(fmt::format("reports cover different strata ({} vs {} rows)", a.rows.size(),
                                  b.rows.size()));
  }

  std::vector<ComparisonRow> out;
  out.reserve(a.rows.size());
  for (const SummaryRow& ra : a.rows) {
    const auto it = index_b.find(key(ra));
    if (it == index_b.end()) {
      throw DomainError(fmt::format("stratum (round {}, {}, {}) missing from '{}'", ra.round,
                                    to_string(ra.attribute), to_string(ra.stratum), b.scenario));
    }
    const SummaryRow& rb = *it->second;

    int lo = kHistogramBins;
    int hi = -1;
    for (int k = 0; k < kHistogramBins; ++k) {
      if (ra.counts[k] > 0 || rb.counts[k] > 0) {
        lo = std::min(lo, k);
        hi = std::max(hi, k);
      }
    }
    long long top_a = 0;
    long long top_b = 0;
    if (hi >= 0) {
      const double cut = lo + 0.75 * double(hi + 1 - lo);
      for (int k = 0; k < kHistogramBins; ++k) {
        if (double(k) >= cut) {
          top_a += static_cast<long long>(ra.counts[k]);
          top_b += static_cast<long long>(rb.counts[k]);
        }
      }
    }

    ComparisonRow row;
    row.scenario = b.scenario;
    row.baseline = a.scenario;
    row.round = ra.round;
    row.attribute = ra.attribute;
    row.stratum = ra.stratum;
    row.delta_mean = rb.mean - ra.mean;
    row.delta_median = rb.median - ra.median;
    row.delta_top_quartile = top_b - top_a;
    out.push_back(row);
  }
  return out;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "scenario,baseline,round,attribute,stratum,delta_mean,delta_median,delta_top_quartile\n";
  for (const ComparisonRow& r : rows) {
    out << r.scenario << ',' << r.baseline << ',' << r.round << ',' << to_string(r.attribute)
        << ',' << to_string(r.stratum) << ',' << number(r.delta_mean) << ','
        << number(r.delta_median) << ',' << r.delta_top_quartile << '\n';
  }
}

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ComparisonRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write comparison " + path.string());
  write_comparison_csv(out, rows);
}

}  // namespace precarity
