#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "precarity/ifp.hpp"
#include "precarity/mdp.hpp"
#include "precarity/metrics.hpp"
#include "precarity/policy.hpp"
#include "precarity/population.hpp"

namespace precarity {

enum class AgentModel { Mdp, Ifp };

std::string_view to_string(AgentModel m);

enum class Attribute { Income = 0, NetWorth = 1, Health = 2 };
inline constexpr std::array<Attribute, 3> kAttributes{Attribute::Income, Attribute::NetWorth,
                                                      Attribute::Health};
std::string_view to_string(Attribute a);

struct BinningConfig {
  BinningMode income = BinningMode::Initial;
  BinningMode net_worth = BinningMode::Initial;
  BinningMode health = BinningMode::Relative;
};

/// Which income class selects a household's transition row each round.
enum class ClassRule {
  Current,  // class of this round's disposable income against the initial class boundaries
  Initial,  // label assigned at population build
};

struct IfpSettings {
  double beta = 0.99;
  double gamma_c = 2.0;
  double a_r = 0.0;
  double b_r = 0.0;
  int grid_points = 100;
  double grid_extent = 20.0;  // savings grid top, in median annual incomes
  double tol = 1e-6;
  int max_iter = 5000;
  int quadrature_nodes = 5;
};

struct SimulationConfig {
  int rounds = 10;
  AgentModel agent_model = AgentModel::Mdp;
  std::uint64_t seed = 0;
  PopulationSpec population = default_population_spec();
  double acceptance_quantile = 0.5;
  InterventionConfig intervention;
  PrecarityParams precarity;
  TransitionTable table = default_transition_table();
  BinningConfig binning;
  ClassRule class_rule = ClassRule::Current;
  double shock_fraction = 0.1;
  IfpSettings ifp;
  int threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

struct TrajectoryRecord {
  /// sequences[attribute][household]; length = rounds completed + 1.
  std::array<std::vector<StateSequence>, 3> sequences;
  /// precarity[k][attribute][household]: index of the first k + 1 states.
  std::vector<std::array<std::vector<double>, 3>> precarity;
  /// Class labels assigned at build time, used for stratified summaries.
  std::vector<IncomeClass> income_class;

  std::size_t households() const { return income_class.size(); }
  int rounds_completed() const { return static_cast<int>(precarity.size()) - 1; }
};

struct IfpSolution {
  IfpModel<double> model;            // money in units of `unit`
  ConsumptionPolicy<double> policy;  // same units
  double unit = 1.0;                 // median initial income
  MatrixX<double> P;                 // exogenous process the policy was solved under
  double distance = 0.0;
  int iterations = 0;
};

struct SimulationState {
  SimulationConfig cfg;
  std::vector<Household> population;
  ClassifierPolicy classifier;
  ClassBoundaries boundaries;
  std::array<std::optional<DecileBinner>, 3> binners;
  TrajectoryRecord record;
  /// [0] solved under the plain process, [1] under resistance (when configured).
  std::array<std::optional<IfpSolution>, 2> ifp;
  int round = 0;
};

SimulationState init_simulation(const SimulationConfig& cfg);
SimulationState init_simulation(const SimulationConfig& cfg, std::vector<Household> population);

/// Advances every household by one decision round and records the new states
/// and prefix precarity indices. round_idx must be state.round + 1.
void run_round(SimulationState& state, int round_idx);

TrajectoryRecord run_simulation(const SimulationConfig& cfg);

/// Builds the exogenous income-state process of the rational agents: one state
/// per initial income decile, moving one state up (down) after a positive
/// (negative) outcome with the table's move probability for that state.
IfpSolution build_ifp(const SimulationConfig& cfg, std::span<const Household> population,
                      const ClassifierPolicy& classifier, const ClassBoundaries& boundaries,
                      double resistance_scale);

/// Move probabilities of the exogenous process: P(z, z + 1) and P(z, z - 1).
MatrixX<double> exogenous_process(std::span<const double> income_of_state,
                                  const ClassifierPolicy& classifier,
                                  const ClassBoundaries& boundaries, const TransitionTable& table);

}  // namespace precarity
