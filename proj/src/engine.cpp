#include "precarity/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <spdlog/spdlog.h>

#include "parallel.hpp"
#include "precarity/error.hpp"
#include "precarity/rng.hpp"

namespace precarity {

std::string_view to_string(AgentModel m) { return m == AgentModel::Mdp ? "mdp" : "ifp"; }

std::string_view to_string(Attribute a) {
  switch (a) {
    case Attribute::Income: return "income";
    case Attribute::NetWorth: return "net_worth";
    case Attribute::Health: return "health";
  }
  return "?";
}

void SimulationConfig::validate() const {
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (!(acceptance_quantile >= 0.0 && acceptance_quantile <= 1.0)) {
    throw ConfigError("acceptance_quantile must lie in [0, 1]");
  }
  if (!(shock_fraction >= 0.0 && shock_fraction < 1.0)) {
    throw ConfigError("shock_fraction must lie in [0, 1)");
  }
  if (ifp.grid_points < 2) throw ConfigError("ifp grid_points must be >= 2");
  if (!(ifp.grid_extent > 0.0)) throw ConfigError("ifp grid_extent must be > 0");
  if (!(ifp.tol > 0.0)) throw ConfigError("ifp tol must be > 0");
  if (ifp.max_iter < 1) throw ConfigError("ifp max_iter must be >= 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  population.validate();
  intervention.validate();
  precarity.validate();
  table.validate();
}

namespace {

constexpr int kAttr = 3;
constexpr int kIncomeStates = 10;

double attribute_value(const Household& hh, Attribute a) {
  switch (a) {
    case Attribute::Income: return hh.income;
    case Attribute::NetWorth: return hh.net_worth;
    case Attribute::Health: return hh.health;
  }
  return 0.0;
}

std::vector<double> column(std::span<const Household> pop, Attribute a) {
  std::vector<double> out;
  out.reserve(pop.size());
  for (const Household& hh : pop) out.push_back(attribute_value(hh, a));
  return out;
}

BinningMode mode_for(const BinningConfig& b, Attribute a) {
  switch (a) {
    case Attribute::Income: return b.income;
    case Attribute::NetWorth: return b.net_worth;
    case Attribute::Health: return b.health;
  }
  return BinningMode::Relative;
}

const PrecarityResistance* resistance_of(const InterventionConfig& cfg) {
  return std::get_if<PrecarityResistance>(&cfg.kind);
}

void record_precarity(SimulationState& s) {
  auto& rec = s.record;
  const std::size_t n = s.population.size();
  std::array<std::vector<double>, 3> snapshot;
  for (auto& v : snapshot) v.resize(n);
  detail::parallel_for(n, s.cfg.threads, [&](std::size_t i) {
    for (int a = 0; a < kAttr; ++a) {
      snapshot[a][i] = precarity_index(rec.sequences[a][i], s.cfg.precarity);
    }
  });
  rec.precarity.push_back(std::move(snapshot));
}

}  // namespace

MatrixX<double> exogenous_process(std::span<const double> income_of_state,
                                  const ClassifierPolicy& classifier,
                                  const ClassBoundaries& boundaries, const TransitionTable& table) {
  const auto nz = static_cast<Eigen::Index>(income_of_state.size());
  MatrixX<double> P = MatrixX<double>::Identity(nz, nz);
  for (Eigen::Index z = 0; z < nz; ++z) {
    const double y = income_of_state[static_cast<std::size_t>(z)];
    const Outcome o = y >= classifier.threshold_income ? Outcome::Positive : Outcome::Negative;
    const Eigen::Index target = o == Outcome::Positive ? z + 1 : z - 1;
    if (target < 0 || target >= nz) continue;
    const double move = 1.0 - table.stay(boundaries.classify(y), o);
    P(z, target) = move;
    P(z, z) = 1.0 - move;
  }
  return P;
}

IfpSolution build_ifp(const SimulationConfig& cfg, std::span<const Household> population,
                      const ClassifierPolicy& classifier, const ClassBoundaries& boundaries,
                      double resistance_scale) {
  std::array<double, kIncomeStates> sum{};
  std::array<std::size_t, kIncomeStates> count{};
  for (const Household& hh : population) {
    sum[static_cast<std::size_t>(hh.z)] += hh.income;
    ++count[static_cast<std::size_t>(hh.z)];
  }
  // Empty states (tiny populations) borrow the income of the nearest state below,
  // or above for leading gaps.
  std::vector<double> income(kIncomeStates, std::numeric_limits<double>::quiet_NaN());
  for (int z = 0; z < kIncomeStates; ++z) {
    if (count[z] > 0) income[z] = sum[z] / double(count[z]);
    else if (z > 0) income[z] = income[z - 1];
  }
  for (int z = kIncomeStates - 2; z >= 0; --z) {
    if (std::isnan(income[z])) income[z] = income[z + 1];
  }

  IfpSolution sol;
  const std::vector<double> incomes = column(population, Attribute::Income);
  sol.unit = quantile(incomes, 0.5);
  if (!(sol.unit > 0.0)) sol.unit = 1.0;

  const MatrixX<double> plain = exogenous_process(income, classifier, boundaries, cfg.table);
  const Eigen::Map<const VectorX<double>> y(income.data(), kIncomeStates);
  sol.P = apply_resistance(plain, y, resistance_scale);

  IfpModel<double>& m = sol.model;
  m.beta = cfg.ifp.beta;
  m.gamma_c = cfg.ifp.gamma_c;
  m.a_r = cfg.ifp.a_r;
  m.b_r = cfg.ifp.b_r;
  m.P = sol.P;
  m.income = y / sol.unit;
  m.savings_grid = geometric_grid(12.0 * cfg.ifp.grid_extent, cfg.ifp.grid_points);
  m.quadrature_nodes = cfg.ifp.quadrature_nodes;

  SolveResult<double> solved = solve_policy(m, cfg.ifp.tol, cfg.ifp.max_iter);
  sol.policy = std::move(solved.policy);
  sol.distance = solved.distance;
  sol.iterations = solved.iterations;
  spdlog::debug("ifp policy solved: scale {}, {} iterations, distance {:.3g}", resistance_scale,
                sol.iterations, sol.distance);
  return sol;
}

SimulationState init_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  return init_simulation(cfg, build_population(cfg.population, cfg.seed));
}

SimulationState init_simulation(const SimulationConfig& cfg, std::vector<Household> population) {
  cfg.validate();
  if (population.empty()) throw DomainError("population is empty");
  SimulationState s;
  s.cfg = cfg;
  s.population = std::move(population);
  s.classifier = calibrate_threshold(s.population, cfg.acceptance_quantile);
  s.boundaries = class_boundaries(s.population);

  const std::vector<double> initial_income = column(s.population, Attribute::Income);
  const std::vector<int> income_decile = assign_deciles(initial_income);
  for (std::size_t i = 0; i < s.population.size(); ++i) s.population[i].z = income_decile[i];

  auto& rec = s.record;
  rec.income_class.reserve(s.population.size());
  for (const Household& hh : s.population) rec.income_class.push_back(hh.income_class);
  for (Attribute a : kAttributes) {
    const auto k = static_cast<std::size_t>(a);
    const std::vector<double> values = column(s.population, a);
    s.binners[k].emplace(values, mode_for(cfg.binning, a));
    const std::vector<int> states = s.binners[k]->assign(values);
    rec.sequences[k].reserve(s.population.size());
    for (int st : states) rec.sequences[k].emplace_back(std::vector<int>{st}, kIncomeStates);
  }
  record_precarity(s);

  if (cfg.agent_model == AgentModel::Ifp) {
    s.ifp[0] = build_ifp(cfg, s.population, s.classifier, s.boundaries, 1.0);
    if (const auto* r = resistance_of(cfg.intervention)) {
      s.ifp[1] = build_ifp(cfg, s.population, s.classifier, s.boundaries, r->negative_prob_scale);
    }
  }
  return s;
}

void run_round(SimulationState& s, int round_idx) {
  if (round_idx != s.round + 1) {
    throw DomainError("run_round expects round " + std::to_string(s.round + 1) + ", got " +
                      std::to_string(round_idx));
  }
  const SimulationConfig& cfg = s.cfg;
  const std::size_t n = s.population.size();

  const PrecarityResistance* resist = resistance_of(cfg.intervention);
  const bool resisting = resist != nullptr && cfg.intervention.active(round_idx);
  const TransitionTable table =
      resisting ? apply_resistance(cfg.table, resist->negative_prob_scale) : cfg.table;
  const IfpSolution* ifp = nullptr;
  if (cfg.agent_model == AgentModel::Ifp) ifp = &*s.ifp[resisting ? 1 : 0];

  auto step = [&](std::size_t i) {
    Household& hh = s.population[i];
    try {
      Rng rng = make_stream(cfg.seed, StreamPurpose::Household, static_cast<std::uint64_t>(hh.id),
                            static_cast<std::uint64_t>(round_idx));
      const Outcome outcome = classify(hh, s.classifier);
      apply_stimulus(hh, cfg.intervention, s.classifier, round_idx);
      const IncomeClass cls = cfg.class_rule == ClassRule::Current
                                  ? s.boundaries.classify(hh.disposable_income())
                                  : hh.income_class;

      if (cfg.agent_model == AgentModel::Mdp) {
        const MdpAction action = sample_action(cls, outcome, table, rng);
        apply_action(hh, action, cfg.shock_fraction * hh.income);
        return;
      }

      const double u = uniform01(rng);
      const double zeta = std::normal_distribution<double>(0.0, 1.0)(rng);
      const int target = hh.z + (outcome == Outcome::Positive ? 1 : -1);
      if (u < 1.0 - table.stay(cls, outcome) && target >= 0 && target < kIncomeStates) {
        hh.z = target;
        hh.income *= outcome == Outcome::Positive ? 1.0 + cfg.shock_fraction
                                                  : 1.0 - cfg.shock_fraction;
      }
      const double unit = ifp->unit;
      const int z_path[1] = {hh.z};
      const double y_path[1] = {hh.disposable_income() / unit};
      const double r_path[1] = {std::exp(ifp->model.a_r * zeta + ifp->model.b_r)};
      const auto path = simulate_path<double>(hh.net_worth / unit, hh.expenses / unit, ifp->policy,
                                              z_path, y_path, r_path, ifp->model);
      hh.net_worth = path.assets.back() * unit;
      hh.insolvent = hh.insolvent || path.insolvent;
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(hh.id, round_idx, e.what());
    }
  };
  detail::parallel_for(n, cfg.threads, step);

  // Health against the mean disposable income of the start-of-round income decile.
  const auto& income_seq = s.record.sequences[static_cast<std::size_t>(Attribute::Income)];
  std::array<double, kIncomeStates> group_sum{};
  std::array<std::size_t, kIncomeStates> group_n{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(income_seq[i].states().back());
    group_sum[g] += s.population[i].disposable_income();
    ++group_n[g];
  }
  for (std::size_t i = 0; i < n; ++i) {
    Household& hh = s.population[i];
    const auto g = static_cast<std::size_t>(income_seq[i].states().back());
    const double w_g = group_sum[g] / double(group_n[g]);
    hh.health = update_health(hh, w_g, cfg.population.health) + hh.health_adjustment;
    if (!std::isfinite(hh.health) || !std::isfinite(hh.net_worth) || !std::isfinite(hh.income)) {
      throw SimulationError(hh.id, round_idx, "non-finite household attribute");
    }
  }

  for (Attribute a : kAttributes) {
    const auto k = static_cast<std::size_t>(a);
    const std::vector<int> states = s.binners[k]->assign(column(s.population, a));
    for (std::size_t i = 0; i < n; ++i) s.record.sequences[k][i].push_back(states[i]);
  }
  record_precarity(s);
  s.round = round_idx;
}

TrajectoryRecord run_simulation(const SimulationConfig& cfg) {
  SimulationState s = init_simulation(cfg);
  for (int r = 1; r <= cfg.rounds; ++r) run_round(s, r);
  return std::move(s.record);
}

}  // namespace precarity
