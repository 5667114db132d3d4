#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "precarity/population.hpp"

namespace precarity::io {

/// A delimited text table with a header row. Comma or tab separated; blank
/// lines and lines starting with '#' are skipped. Row line numbers are kept
/// for diagnostics.
struct Table {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

Table read_table(const std::filesystem::path& path);

/// Column `income` (currency/month), one row per household.
std::vector<double> read_income_file(const std::filesystem::path& path);

/// Columns `percentile` in [0, 100] (strictly increasing) and `net_worth`.
PiecewiseLinear read_net_worth_table(const std::filesystem::path& path);

/// Columns `income_decile` (each of 0..9 exactly once) and `monthly_expenses`.
std::array<double, 10> read_expenditure_table(const std::filesystem::path& path);

}  // namespace precarity::io
