#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace precarity {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing input data; carries the offending file and line.
class IngestionError : public Error {
 public:
  IngestionError(std::string file, std::size_t line, const std::string& what)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(double distance, int iterations)
      : Error("consumption policy did not converge after " + std::to_string(iterations) +
              " iterations (last sup-norm distance " + std::to_string(distance) + ")"),
        distance_(distance),
        iterations_(iterations) {}

  double distance() const noexcept { return distance_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double distance_;
  int iterations_;
};

/// A household step failed; the run is aborted.
class SimulationError : public Error {
 public:
  SimulationError(int household_id, int round, const std::string& what)
      : Error("household " + std::to_string(household_id) + ", round " + std::to_string(round) +
              ": " + what),
        household_id_(household_id),
        round_(round) {}

  int household_id() const noexcept { return household_id_; }
  int round() const noexcept { return round_; }

 private:
  int household_id_;
  int round_;
};

}  // namespace precarity
