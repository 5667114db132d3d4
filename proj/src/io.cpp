#include "precarity/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "precarity/error.hpp"

namespace precarity::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  const char delim = line.find('\t') != std::string::npos && line.find(',') == std::string::npos
                         ? '\t'
                         : ',';
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string(), 0, "cannot open file");
  Table t;
  t.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split(body);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw IngestionError(path.string(), lineno,
                           "expected " + std::to_string(t.header.size()) + " fields, found " +
                               std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw IngestionError(path.string(), 0, "missing header row");
  return t;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw IngestionError(path.string(), 0, "missing column '" + name + "'");
}

double Table::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows[row][col];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw IngestionError(path.string(), line_numbers[row],
                         "column '" + header[col] + "': not a number: '" + s + "'");
  }
  return v;
}

std::vector<double> read_income_file(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const std::size_t col = t.column("income");
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double v = t.number(r, col);
    if (v < 0.0) throw IngestionError(path.string(), t.line_numbers[r], "negative income");
    out.push_back(v);
  }
  if (out.empty()) throw IngestionError(path.string(), 0, "no income rows");
  return out;
}

PiecewiseLinear read_net_worth_table(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const std::size_t pc = t.column("percentile");
  const std::size_t vc = t.column("net_worth");
  std::vector<double> x, y;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double p = t.number(r, pc);
    if (p < 0.0 || p > 100.0) {
      throw IngestionError(path.string(), t.line_numbers[r], "percentile outside [0, 100]");
    }
    if (!x.empty() && !(p > x.back())) {
      throw IngestionError(path.string(), t.line_numbers[r], "percentiles must be increasing");
    }
    x.push_back(p);
    y.push_back(t.number(r, vc));
  }
  if (x.empty()) throw IngestionError(path.string(), 0, "no net worth rows");
  return PiecewiseLinear(std::move(x), std::move(y));
}

std::array<double, 10> read_expenditure_table(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const std::size_t dc = t.column("income_decile");
  const std::size_t ec = t.column("monthly_expenses");
  std::array<double, 10> out{};
  std::array<bool, 10> seen{};
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double d = t.number(r, dc);
    if (d != std::floor(d) || d < 0 || d > 9) {
      throw IngestionError(path.string(), t.line_numbers[r], "income_decile must be 0..9");
    }
    const auto k = static_cast<std::size_t>(d);
    if (seen[k]) throw IngestionError(path.string(), t.line_numbers[r], "duplicate income_decile");
    const double e = t.number(r, ec);
    if (e < 0.0) throw IngestionError(path.string(), t.line_numbers[r], "negative expenses");
    seen[k] = true;
    out[k] = e;
  }
  for (std::size_t k = 0; k < 10; ++k) {
    if (!seen[k]) {
      throw IngestionError(path.string(), 0, "income_decile " + std::to_string(k) + " missing");
    }
  }
  return out;
}

}  // namespace precarity::io
