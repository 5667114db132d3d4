#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "precarity/error.hpp"
#include "precarity/report.hpp"

using namespace precarity;
namespace fs = std::filesystem;

namespace {

// Four households (two low, one middle, one high) over two rounds with
// hand-picked precarity values.
TrajectoryRecord toy_record() {
  TrajectoryRecord rec;
  rec.income_class = {IncomeClass::Low, IncomeClass::Low, IncomeClass::Middle, IncomeClass::High};
  for (auto& seqs : rec.sequences) {
    for (int i = 0; i < 4; ++i) seqs.emplace_back(std::vector<int>{i, i, i}, 10);
  }
  for (int r = 0; r <= 2; ++r) {
    std::array<std::vector<double>, 3> snap;
    for (int a = 0; a < 3; ++a) snap[a] = {0.1 * r, 0.2 * r + 0.01 * a, 0.5, 2.4};
    rec.precarity.push_back(snap);
  }
  return rec;
}

}  // namespace

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("top quartile of the pooled range") {
  const std::vector<double> a{0, 1, 2, 3};
  const std::vector<double> b{4};
  const auto [ca, cb] = top_quartile_counts(a, b);
  CHECK(ca == 1);  // cut at 3
  CHECK(cb == 1);
  const auto [ea, eb] = top_quartile_counts(std::vector<double>{}, std::vector<double>{});
  CHECK(ea + eb == 0);
}

TEST_CASE("summaries per round, attribute and stratum") {
  const PrecarityParams params;
  const ScenarioReport rep = summarize(toy_record(), "toy", params);
  CHECK(rep.rows.size() == 2 * 3 * 4);
  CHECK(rep.upper_bound == doctest::Approx(0.2 + 0.8 * std::pow(2.0, 1.2)));
  const auto edges = rep.bin_edges();
  CHECK(edges.size() == kHistogramBins + 1);
  CHECK(edges.front() == 0.0);
  CHECK(edges.back() == rep.upper_bound);

  for (const SummaryRow& r : rep.rows) {
    std::size_t total = 0;
    for (std::size_t c : r.counts) total += c;
    CHECK(total == r.n);
    const std::size_t want = r.stratum == Stratum::All ? 4 : r.stratum == Stratum::Low ? 2 : 1;
    CHECK(r.n == want);
  }
  // Round 2, income, low stratum: values 0.2 and 0.4.
  const SummaryRow& low = rep.rows[4 * 3 + 1];
  CHECK(low.round == 2);
  CHECK(low.attribute == Attribute::Income);
  CHECK(low.stratum == Stratum::Low);
  CHECK(low.mean == doctest::Approx(0.3));
  CHECK(low.median == doctest::Approx(0.3));
  // The largest value 2.4 falls into the last bin, not past it.
  CHECK(rep.rows[0].counts[kHistogramBins - 1] == 1);
}

TEST_CASE("report files round-trip") {
  const ScenarioReport rep = summarize(toy_record(), "toy", PrecarityParams{});
  const fs::path dir = fs::temp_directory_path() / "precarity_unit";
  fs::create_directories(dir);
  const fs::path p = dir / "toy.csv";
  write_report_csv(p, rep);
  const ScenarioReport back = read_report_csv(p);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(back.rows[i].mean == rep.rows[i].mean);  // 17 significant digits round-trip exactly
    CHECK(back.rows[i].median == rep.rows[i].median);
    CHECK(back.rows[i].counts == rep.rows[i].counts);
  }

  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("scenario,round,attribute,stratum,n,mean,median,bin00,", 0) == 0);
  CHECK(header.substr(header.size() - 6) == ",bin39");

  std::ofstream(dir / "bad.csv") << header << "\ntoy,1,income,all,5,0.1,0.1" << std::string(39, ',')
                                 << ",0\n";
  CHECK_THROWS_AS(read_report_csv(dir / "bad.csv"), IngestionError);
}

TEST_CASE("comparisons") {
  const ScenarioReport rep = summarize(toy_record(), "toy", PrecarityParams{});
  for (const ComparisonRow& r : compare(rep, rep)) {
    CHECK(r.delta_mean == 0.0);
    CHECK(r.delta_median == 0.0);
    CHECK(r.delta_top_quartile == 0);
  }

  TrajectoryRecord shifted = toy_record();
  for (auto& snap : shifted.precarity) {
    for (auto& v : snap) v[0] = 0.0;  // household 0 becomes less precarious
  }
  const ScenarioReport b = summarize(shifted, "calmer", PrecarityParams{});
  const auto rows = compare(rep, b);
  CHECK(rows.size() == rep.rows.size());
  CHECK(rows[4 * 3].delta_mean == doctest::Approx(-0.2 / 4));
  CHECK(rows[4 * 3].scenario == "calmer");
  CHECK(rows[4 * 3].baseline == "toy");

  std::ostringstream out;
  write_comparison_csv(out, rows);
  CHECK(out.str().rfind("scenario,baseline,round,attribute,stratum,delta_mean", 0) == 0);

  ScenarioReport truncated = rep;
  truncated.rows.pop_back();
  CHECK_THROWS_AS(compare(rep, truncated), DomainError);
  ScenarioReport relabeled = rep;
  relabeled.rows.back().round = 7;
  CHECK_THROWS_AS(compare(rep, relabeled), DomainError);
}
