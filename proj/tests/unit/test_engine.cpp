#include <doctest.h>

#include "precarity/engine.hpp"
#include "precarity/error.hpp"

using namespace precarity;

namespace {

SimulationConfig small_config(AgentModel model, std::size_t n, int rounds) {
  SimulationConfig cfg;
  cfg.agent_model = model;
  cfg.population.n = n;
  cfg.rounds = rounds;
  cfg.seed = 11;
  cfg.ifp.grid_points = 40;
  return cfg;
}

bool same_record(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.income_class != b.income_class || a.precarity.size() != b.precarity.size()) return false;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < a.households(); ++i) {
      const auto sa = a.sequences[k][i].states();
      const auto sb = b.sequences[k][i].states();
      if (!std::equal(sa.begin(), sa.end(), sb.begin(), sb.end())) return false;
    }
  }
  for (std::size_t r = 0; r < a.precarity.size(); ++r) {
    if (a.precarity[r] != b.precarity[r]) return false;  // bitwise
  }
  return true;
}

}  // namespace

TEST_CASE("zero rounds leave only the starting term") {
  for (AgentModel model : {AgentModel::Mdp, AgentModel::Ifp}) {
    const SimulationConfig cfg = small_config(model, 200, 0);
    const TrajectoryRecord rec = run_simulation(cfg);
    CHECK(rec.rounds_completed() == 0);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < rec.households(); ++i) {
        const auto& seq = rec.sequences[k][i];
        CHECK(seq.size() == 1);
        CHECK(rec.precarity[0][k][i] == cfg.precarity.lambda * start_quality(seq));
      }
    }
  }
}

TEST_CASE("a household that always stays keeps its states") {
  SimulationConfig cfg = small_config(AgentModel::Mdp, 1, 10);
  for (IncomeClass c : {IncomeClass::Low, IncomeClass::Middle, IncomeClass::High}) {
    for (Outcome o : {Outcome::Negative, Outcome::Positive}) cfg.table.set_row(c, o, {1, 0, 0, 0});
  }
  const TrajectoryRecord rec = run_simulation(cfg);
  REQUIRE(rec.households() == 1);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto s = rec.sequences[k][0].states();
    CHECK(s.size() == 11);
    for (int v : s) CHECK(v == s[0]);
    const double want = 0.2 * start_quality(rec.sequences[k][0]);
    for (int r = 0; r <= 10; ++r) CHECK(rec.precarity[r][k][0] == doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("replay and thread count do not change the record") {
  for (AgentModel model : {AgentModel::Mdp, AgentModel::Ifp}) {
    const SimulationConfig cfg = small_config(model, 100, 10);
    CHECK(same_record(run_simulation(cfg), run_simulation(cfg)));

    SimulationConfig seq = small_config(model, 1500, 6);
    SimulationConfig par = seq;
    par.threads = 4;
    CHECK(same_record(run_simulation(seq), run_simulation(par)));
  }
}

TEST_CASE("recorded precarity equals the index of each prefix") {
  for (AgentModel model : {AgentModel::Mdp, AgentModel::Ifp}) {
    const SimulationConfig cfg = small_config(model, 300, 10);
    const TrajectoryRecord rec = run_simulation(cfg);
    CHECK(rec.rounds_completed() == 10);
    CHECK(rec.precarity.size() == 11);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(rec.sequences[k].size() == 300);  // nobody enters or leaves
      for (std::size_t i = 0; i < rec.households(); ++i) {
        const auto s = rec.sequences[k][i].states();
        REQUIRE(s.size() == 11);
        for (std::size_t r = 0; r <= 10; ++r) {
          CHECK(rec.precarity[r][k][i] == precarity_index(s.first(r + 1), 10, cfg.precarity));
        }
      }
    }
  }
}

TEST_CASE("both agent models see the same first-round decisions") {
  const SimulationState mdp = init_simulation(small_config(AgentModel::Mdp, 400, 1));
  const SimulationState ifp = init_simulation(small_config(AgentModel::Ifp, 400, 1));
  CHECK(mdp.classifier.threshold_income == ifp.classifier.threshold_income);
  for (std::size_t i = 0; i < 400; ++i) {
    CHECK(classify(mdp.population[i], mdp.classifier) == classify(ifp.population[i], ifp.classifier));
  }
}

TEST_CASE("round bookkeeping") {
  SimulationState s = init_simulation(small_config(AgentModel::Mdp, 50, 3));
  CHECK_THROWS_AS(run_round(s, 2), DomainError);
  run_round(s, 1);
  CHECK(s.round == 1);
  CHECK(s.population.size() == 50);
  CHECK(s.record.sequences[0][0].size() == 2);
}

TEST_CASE("resistance solves a second policy for rational agents") {
  SimulationConfig cfg = small_config(AgentModel::Ifp, 300, 2);
  cfg.intervention = {PrecarityResistance{0.5}, 1};
  const SimulationState s = init_simulation(cfg);
  REQUIRE(s.ifp[0].has_value());
  REQUIRE(s.ifp[1].has_value());
  CHECK(!s.ifp[0]->P.isApprox(s.ifp[1]->P));
  CHECK(s.ifp[0]->unit > 0.0);
}

TEST_CASE("the exogenous process moves one state at a time") {
  std::vector<double> y(10);
  for (int z = 0; z < 10; ++z) y[z] = 1000.0 * (z + 1);
  const ClassifierPolicy classifier{5500.0, 0.5};
  const ClassBoundaries bounds{3000.0, 8500.0};
  const auto P = exogenous_process(y, classifier, bounds, default_transition_table());
  CHECK(((P.rowwise().sum().array() - 1.0).abs() < 1e-12).all());
  CHECK(P(0, 0) == 1.0);  // negative outcome at the bottom cannot move
  CHECK(P(9, 9) == 1.0);  // positive outcome at the top cannot move
  CHECK(P(1, 0) == doctest::Approx(8.0 / 9.0));
  CHECK(P(4, 3) == doctest::Approx(0.5));
  CHECK(P(5, 6) == doctest::Approx(0.5));
  CHECK(P(8, 9) == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("a failing household aborts with its id and round") {
  SimulationConfig cfg = small_config(AgentModel::Mdp, 20, 2);
  std::vector<Household> pop = build_population(cfg.population, cfg.seed);
  pop[19].income = 1e300;
  pop[18].income = 1e299;  // same income decile: the squared health gap overflows
  SimulationState s = init_simulation(cfg, pop);
  try {
    run_round(s, 1);
    FAIL("expected a simulation error");
  } catch (const SimulationError& e) {
    CHECK((e.household_id() == 18 || e.household_id() == 19));
    CHECK(e.round() == 1);
  }
}
