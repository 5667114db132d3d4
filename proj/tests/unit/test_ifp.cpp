#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles/vfi_oracle.hpp"
#include "precarity/error.hpp"
#include "precarity/ifp.hpp"

using namespace precarity;

namespace {

IfpModel<double> single_state(double beta, double y, Eigen::VectorXd grid) {
  IfpModel<double> m;
  m.beta = beta;
  m.gamma_c = 2.0;
  m.P = Eigen::MatrixXd::Ones(1, 1);
  m.income = Eigen::VectorXd::Constant(1, y);
  m.savings_grid = std::move(grid);
  return m;
}

IfpModel<double> two_state(int grid_points) {
  IfpModel<double> m;
  m.beta = 0.95;
  m.gamma_c = 2.0;
  m.P.resize(2, 2);
  m.P << 0.8, 0.2, 0.2, 0.8;
  m.income.resize(2);
  m.income << 0.6, 1.4;
  m.savings_grid = geometric_grid(16.0, grid_points);
  return m;
}

// Independent piecewise-linear evaluation of a policy curve.
double replay_policy(const Eigen::VectorXd& a, const Eigen::VectorXd& c, double x) {
  if (x <= a(0)) return x;
  for (Eigen::Index i = 1; i < a.size(); ++i) {
    if (x <= a(i)) return std::min(x, c(i - 1) + (c(i) - c(i - 1)) * (x - a(i - 1)) / (a(i) - a(i - 1)));
  }
  const Eigen::Index n = a.size();
  return std::min(x, c(n - 1) + (c(n - 1) - c(n - 2)) * (x - a(n - 1)) / (a(n - 1) - a(n - 2)));
}

}  // namespace

TEST_CASE("CRRA utility") {
  CHECK(crra(1.0, 2.0) == -1.0);
  CHECK(crra_marginal(1.0, 2.0) == 1.0);
  CHECK(crra_marginal(2.0, 2.0) == 0.25);
  CHECK(crra(std::exp(1.0), 1.0) == doctest::Approx(1.0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> c(1e-3, 1e3);
  for (int i = 0; i < 200; ++i) {
    const double x = c(rng);
    for (double g : {0.5, 2.0, 5.0}) {
      CHECK(crra_marginal_inverse(crra_marginal(x, g), g) == doctest::Approx(x).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(crra(0.0, 2.0), DomainError);
  CHECK_THROWS_AS(crra_marginal(-1.0, 2.0), DomainError);
  CHECK_THROWS_AS(crra_marginal_inverse(0.0, 2.0), DomainError);
}

TEST_CASE("Gauss-Hermite rule reproduces normal moments") {
  const auto [x, w] = gauss_hermite<double>(5);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((w.array() * x.array()).sum() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((w.array() * x.array().square()).sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK((w.array() * x.array().pow(4)).sum() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK((w.array() * x.array().pow(8)).sum() == doctest::Approx(105.0).epsilon(1e-11));
  CHECK(x.maxCoeff() == doctest::Approx(2.8569700138728056).epsilon(1e-12));
}

TEST_CASE("geometric savings grid") {
  const Eigen::VectorXd g = geometric_grid(240.0, 100);
  CHECK(g.size() == 100);
  CHECK(g(0) == 0.0);
  CHECK(g(99) == 240.0);
  for (int i = 1; i < 100; ++i) CHECK(g(i) > g(i - 1));
  // Spacing grows with the level.
  CHECK(g(2) - g(1) < g(99) - g(98));
}

TEST_CASE("first EGM iterate from consume-all on a three-point grid") {
  const IfpModel<double> m = single_state(0.9, 1.0, Eigen::Vector3d(0.0, 1.0, 2.0));
  const auto start = ConsumptionPolicy<double>::consume_all(1, 2.0);
  const auto next = egm_step(start, m);
  const Eigen::VectorXd& c = next.consumption(0);
  const Eigen::VectorXd& a = next.assets(0);
  REQUIRE(c.size() == 4);
  CHECK(c(0) == 0.0);
  CHECK(a(0) == 0.0);
  const double expected[] = {1.0540925533894598, 2.1081851067789197, 3.1622776601683795};
  for (int i = 0; i < 3; ++i) {
    CHECK(c(i + 1) == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(a(i + 1) == doctest::Approx(expected[i] + i).epsilon(1e-15));
  }
}

TEST_CASE("zero patience consumes everything") {
  const IfpModel<double> m = single_state(1e-12, 1.0, geometric_grid(50.0, 40));
  const auto sol = solve_policy(m);
  for (double a = 0.05; a < 100.0; a *= 1.3) CHECK(sol.policy(a, 0) == doctest::Approx(a));
}

TEST_CASE("converged policy satisfies the Euler equation on interior grid points") {
  const IfpModel<double> m = single_state(0.96, 1.0, geometric_grid(30.0, 120));
  const auto sol = solve_policy(m, 1e-12, 20000);
  const auto& a = sol.policy.assets(0);
  const auto& c = sol.policy.consumption(0);
  int checked = 0;
  for (Eigen::Index i = 1; i < a.size(); ++i) {
    const double s = a(i) - c(i);
    if (s <= 0.0) continue;  // constrained point
    const double next = sol.policy(s + 1.0, 0);
    const double lhs = crra_marginal(c(i), 2.0);
    const double rhs = 0.96 * crra_marginal(next, 2.0);
    CHECK(std::abs(lhs - rhs) / lhs <= 1e-8);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("solver behaviour") {
  const IfpModel<double> m = two_state(60);
  const auto sol = solve_policy(m);
  CHECK(sol.distance < 1e-6);
  CHECK(sol.history.size() == static_cast<std::size_t>(sol.iterations));

  SUBCASE("policy is monotone and feasible") {
    for (Eigen::Index z = 0; z < 2; ++z) {
      const auto& c = sol.policy.consumption(z);
      for (Eigen::Index i = 1; i < c.size(); ++i) CHECK(c(i) >= c(i - 1));
      for (double a = 0.01; a < 40.0; a *= 1.1) {
        const double x = sol.policy(a, z);
        CHECK(x > 0.0);
        CHECK(x <= a);
      }
    }
  }
  SUBCASE("successive distances eventually shrink") {
    const auto& h = sol.history;
    for (std::size_t i = h.size() / 5 + 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] * (1 + 1e-9));
  }
  SUBCASE("a loose tolerance stops after one step") {
    const auto one = solve_policy(m, 1e9);
    CHECK(one.iterations == 1);
  }
  SUBCASE("non-convergence reports the last distance") {
    try {
      solve_policy(m, 1e-14, 3);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(e.iterations() == 3);
      CHECK(e.distance() > 1e-14);
    }
  }
  SUBCASE("invalid models are rejected") {
    IfpModel<double> bad = m;
    bad.P(0, 0) = 0.5;
    CHECK_THROWS_AS(solve_policy(bad), ConfigError);
    bad = m;
    bad.beta = 1.0;
    CHECK_THROWS_AS(solve_policy(bad), ConfigError);
    bad = m;
    bad.savings_grid(3) = bad.savings_grid(2);
    CHECK_THROWS_AS(solve_policy(bad), ConfigError);
  }
}

TEST_CASE("stochastic returns use quadrature") {
  IfpModel<double> m = two_state(60);
  m.a_r = 0.1;
  m.b_r = -0.01;
  const auto sol = solve_policy(m);
  CHECK(sol.distance < 1e-6);
  // Riskier returns than the deterministic model change the policy.
  const auto plain = solve_policy(two_state(60));
  CHECK(std::abs(sol.policy(5.0, 0) - plain.policy(5.0, 0)) > 1e-6);
}

TEST_CASE("EGM agrees with value function iteration") {
  const IfpModel<double> m = two_state(200);
  const auto egm = solve_policy(m, 1e-10, 20000);
  oracle::VfiProblem p;
  p.beta = m.beta;
  p.gamma = m.gamma_c;
  p.income = {0.6, 1.4};
  p.P = {{0.8, 0.2}, {0.2, 0.8}};
  p.a_max = 20.0;
  p.grid_points = 1500;
  p.tol = 1e-9;
  const oracle::Vfi vfi(p);
  double worst = 0, mean_c = 0;
  int count = 0;
  for (int z = 0; z < 2; ++z) {
    for (int k = 0; k < 30; ++k) {
      const double a = 0.7 + 0.25 * k;
      const double ce = egm.policy(a, z);
      const double cv = vfi.consumption(a, static_cast<std::size_t>(z));
      worst = std::max(worst, std::abs(ce - cv));
      mean_c += ce;
      ++count;
    }
  }
  mean_c /= count;
  CHECK(worst <= 1e-3 * mean_c);
}

TEST_CASE("consumption paths") {
  const IfpModel<double> m = two_state(80);
  const auto sol = solve_policy(m);

  SUBCASE("nothing in, nothing out") {
    const std::vector<int> z(6, 0);
    const std::vector<double> y(6, 0.0);
    const auto path = simulate_path<double>(0.0, 0.0, sol.policy, z, y, {}, m);
    for (double c : path.consumption) CHECK(c == 0.0);
    for (double a : path.assets) CHECK(a == 0.0);
  }

  SUBCASE("budget identity, feasibility and replay") {
    std::mt19937_64 rng(17);
    std::vector<int> z(10);
    std::vector<double> y(10);
    for (int t = 0; t < 10; ++t) {
      z[t] = static_cast<int>(rng() % 2);
      y[t] = m.income(z[t]);
    }
    const double basic = 0.3;
    const auto path = simulate_path<double>(3.0, basic, sol.policy, z, y, {}, m);
    REQUIRE(path.assets.size() == 11);
    double a = 3.0;
    for (int t = 0; t < 10; ++t) {
      const double c = path.consumption[t];
      CHECK(c >= 0.0);
      CHECK(c <= path.assets[t]);
      CHECK(path.assets[t + 1] - path.assets[t] == doctest::Approx(y[t] - c).epsilon(1e-12));
      // Replay from the stored policy table.
      double want = replay_policy(sol.policy.assets(z[t]), sol.policy.consumption(z[t]), a);
      want = std::min(a, std::max(want, basic));
      CHECK(c == doctest::Approx(want).epsilon(1e-14));
      a = a - want + y[t];
    }
    CHECK(!path.insolvent);
    const auto again = simulate_path<double>(3.0, basic, sol.policy, z, y, {}, m);
    CHECK(again.assets == path.assets);
    CHECK(again.consumption == path.consumption);
  }

  SUBCASE("basic needs floor and insolvency") {
    const std::vector<int> z{1};
    const std::vector<double> y{1.0};
    const auto rich = simulate_path<double>(10.0, 5.0, sol.policy, z, y, {}, m);
    CHECK(rich.consumption[0] >= 5.0);
    const auto poor = simulate_path<double>(2.0, 5.0, sol.policy, z, y, {}, m);
    CHECK(poor.consumption[0] == 2.0);
    CHECK(poor.insolvent);
    const auto broke = simulate_path<double>(-1.0, 0.5, sol.policy, z, y, {}, m);
    CHECK(broke.consumption[0] == 0.0);
    CHECK(broke.insolvent);
  }
}

TEST_CASE("policy dump") {
  const IfpModel<double> m = two_state(20);
  const auto sol = solve_policy(m);
  const auto path = std::filesystem::temp_directory_path() / "precarity_policy.csv";
  write_policy_table(path, sol.policy, 2.0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "z,a,c");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 2 * 21);
}
