#pragma once

// Income fluctuations problem: an infinitely lived household chooses
// consumption c_t in [0, a_t] to maximize E sum beta^t u(c_t) subject to
//
//   a_{t+1} = R_{t+1} (a_t - c_t) + Y_{t+1},  R = exp(a_r zeta + b_r),  Y = Y(Z)
//
// with Z a finite Markov chain. The policy is found with the endogenous grid
// method: for each savings level s_i the Euler equation is inverted for c_i
// and the asset level that makes s_i optimal is a_i = c_i + s_i.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "precarity/error.hpp"

namespace precarity {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Scalar crra(Scalar c, Scalar gamma) {
  if (!(c > Scalar(0))) throw DomainError("utility needs positive consumption");
  if (gamma == Scalar(1)) return std::log(c);
  return std::pow(c, Scalar(1) - gamma) / (Scalar(1) - gamma);
}

template <typename Scalar>
Scalar crra_marginal(Scalar c, Scalar gamma) {
  if (!(c > Scalar(0))) throw DomainError("marginal utility needs positive consumption");
  return std::pow(c, -gamma);
}

template <typename Scalar>
Scalar crra_marginal_inverse(Scalar m, Scalar gamma) {
  if (!(m > Scalar(0))) throw DomainError("inverse marginal utility needs a positive argument");
  return std::pow(m, Scalar(-1) / gamma);
}

/// Gauss-Hermite rule for E f(zeta), zeta ~ N(0, 1): nodes are the
/// eigenvalues of the Jacobi matrix of the probabilists' Hermite recurrence,
/// weights the squared first components of its normalized eigenvectors.
template <typename Scalar>
std::pair<VectorX<Scalar>, VectorX<Scalar>> gauss_hermite(int n) {
  if (n < 1) throw DomainError("quadrature needs at least one node");
  MatrixX<Scalar> jacobi = MatrixX<Scalar>::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(Scalar(k));
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(jacobi);
  VectorX<Scalar> weights = eig.eigenvectors().row(0).transpose().array().square();
  return {eig.eigenvalues(), weights / weights.sum()};
}

/// n points on [0, max]: zero followed by n-1 geometrically spaced points
/// from max * 1e-4 to max.
template <typename Scalar>
VectorX<Scalar> geometric_grid(Scalar max, int n) {
  if (n < 2) throw DomainError("savings grid needs at least 2 points");
  if (!(max > Scalar(0))) throw DomainError("savings grid extent must be positive");
  VectorX<Scalar> g(n);
  g(0) = Scalar(0);
  const Scalar lo = max * Scalar(1e-4);
  for (int i = 1; i < n; ++i) {
    const Scalar t = n == 2 ? Scalar(1) : Scalar(i - 1) / Scalar(n - 2);
    g(i) = lo * std::pow(max / lo, t);
  }
  g(n - 1) = max;
  return g;
}

template <typename Scalar>
struct IfpModel {
  Scalar beta = Scalar(0.99);
  Scalar gamma_c = Scalar(2);
  Scalar a_r = Scalar(0);
  Scalar b_r = Scalar(0);
  MatrixX<Scalar> P;            // P(z, z') = Pr(Z' = z' | Z = z)
  VectorX<Scalar> income;       // Y(z)
  VectorX<Scalar> savings_grid;  // s_0 = 0 < s_1 < ...
  int quadrature_nodes = 5;

  Eigen::Index num_states() const { return income.size(); }

  void validate() const {
    if (!(beta > Scalar(0) && beta < Scalar(1))) throw ConfigError("beta must lie in (0, 1)");
    if (!(gamma_c > Scalar(0))) throw ConfigError("gamma_c must be > 0");
    if (!(a_r >= Scalar(0))) throw ConfigError("a_r must be >= 0");
    const Eigen::Index n = income.size();
    if (n == 0) throw ConfigError("IFP model needs at least one exogenous state");
    if (P.rows() != n || P.cols() != n) throw ConfigError("P must be |Z| x |Z|");
    if ((P.array() < Scalar(0)).any()) throw ConfigError("P entries must be non-negative");
    if (((P.rowwise().sum().array() - Scalar(1)).abs() > Scalar(1e-12)).any()) {
      throw ConfigError("rows of P must sum to 1");
    }
    if ((income.array() < Scalar(0)).any()) throw ConfigError("state incomes must be >= 0");
    if (savings_grid.size() < 2 || savings_grid(0) != Scalar(0)) {
      throw ConfigError("savings grid must start at 0 and have at least 2 points");
    }
    for (Eigen::Index i = 1; i < savings_grid.size(); ++i) {
      if (!(savings_grid(i) > savings_grid(i - 1))) {
        throw ConfigError("savings grid must be strictly increasing");
      }
    }
    if (quadrature_nodes < 1) throw ConfigError("quadrature_nodes must be >= 1");
  }
};

/// Consumption as a function of assets, one piecewise-linear curve per z.
/// Each curve runs through the origin; below its first point the household
/// consumes everything and above its last point the final segment is extended.
template <typename Scalar>
class ConsumptionPolicy {
 public:
  ConsumptionPolicy() = default;
  ConsumptionPolicy(std::vector<VectorX<Scalar>> assets, std::vector<VectorX<Scalar>> consumption)
      : a_(std::move(assets)), c_(std::move(consumption)) {
    if (a_.size() != c_.size() || a_.empty()) throw DomainError("policy needs matching curves");
    for (std::size_t z = 0; z < a_.size(); ++z) {
      if (a_[z].size() != c_[z].size() || a_[z].size() < 2) {
        throw DomainError("policy curve needs at least 2 matching points");
      }
    }
  }

  /// Consume-all policy c(a) = a for every state.
  static ConsumptionPolicy consume_all(Eigen::Index num_states, Scalar a_max) {
    VectorX<Scalar> pts(2);
    pts << Scalar(0), a_max;
    return ConsumptionPolicy(std::vector<VectorX<Scalar>>(num_states, pts),
                             std::vector<VectorX<Scalar>>(num_states, pts));
  }

  Eigen::Index num_states() const { return static_cast<Eigen::Index>(a_.size()); }
  const VectorX<Scalar>& assets(Eigen::Index z) const { return a_[z]; }
  const VectorX<Scalar>& consumption(Eigen::Index z) const { return c_[z]; }

  Scalar operator()(Scalar a, Eigen::Index z) const {
    if (!(a > Scalar(0))) return Scalar(0);
    const VectorX<Scalar>& xs = a_[z];
    const VectorX<Scalar>& ys = c_[z];
    const Eigen::Index n = xs.size();
    Eigen::Index hi = static_cast<Eigen::Index>(std::upper_bound(xs.data(), xs.data() + n, a) -
                                                xs.data());
    hi = std::clamp<Eigen::Index>(hi, 1, n - 1);
    const Eigen::Index lo = hi - 1;
    const Scalar t = (a - xs(lo)) / (xs(hi) - xs(lo));
    return std::min(a, ys(lo) + t * (ys(hi) - ys(lo)));
  }

 private:
  std::vector<VectorX<Scalar>> a_;
  std::vector<VectorX<Scalar>> c_;
};

namespace detail {

template <typename Scalar>
std::pair<VectorX<Scalar>, VectorX<Scalar>> return_nodes(const IfpModel<Scalar>& m) {
  if (m.a_r == Scalar(0)) {
    VectorX<Scalar> r(1), w(1);
    r << std::exp(m.b_r);
    w << Scalar(1);
    return {r, w};
  }
  auto [zeta, w] = gauss_hermite<Scalar>(m.quadrature_nodes);
  VectorX<Scalar> r = (m.a_r * zeta.array() + m.b_r).exp();
  return {r, w};
}

}  // namespace detail

/// One Coleman-Reffett update via the endogenous grid method.
template <typename Scalar>
ConsumptionPolicy<Scalar> egm_step(const ConsumptionPolicy<Scalar>& sigma,
                                   const IfpModel<Scalar>& m) {
  const Eigen::Index nz = m.num_states();
  const Eigen::Index ns = m.savings_grid.size();
  const auto [R, w] = detail::return_nodes(m);

  // Expected discounted marginal value of each savings level, per next state.
  MatrixX<Scalar> marginal(ns, nz);
  for (Eigen::Index zn = 0; zn < nz; ++zn) {
    for (Eigen::Index i = 0; i < ns; ++i) {
      Scalar acc = Scalar(0);
      for (Eigen::Index q = 0; q < R.size(); ++q) {
        const Scalar c_next = sigma(R(q) * m.savings_grid(i) + m.income(zn), zn);
        acc += w(q) * R(q) * crra_marginal(c_next, m.gamma_c);
      }
      marginal(i, zn) = acc;
    }
  }
  const MatrixX<Scalar> expected = marginal * m.P.transpose();  // (s_i, z)

  std::vector<VectorX<Scalar>> a(nz), c(nz);
  for (Eigen::Index z = 0; z < nz; ++z) {
    a[z].resize(ns + 1);
    c[z].resize(ns + 1);
    a[z](0) = c[z](0) = Scalar(0);
    for (Eigen::Index i = 0; i < ns; ++i) {
      const Scalar rhs = m.beta * expected(i, z);
      if (!(rhs > Scalar(0)) || !std::isfinite(rhs)) {
        throw DomainError("expected marginal utility is not positive and finite");
      }
      c[z](i + 1) = crra_marginal_inverse(rhs, m.gamma_c);
      a[z](i + 1) = c[z](i + 1) + m.savings_grid(i);
    }
  }
  return ConsumptionPolicy<Scalar>(std::move(a), std::move(c));
}

template <typename Scalar>
struct SolveResult {
  ConsumptionPolicy<Scalar> policy;
  Scalar distance = Scalar(0);
  int iterations = 0;
  std::vector<Scalar> history;  // sup-norm distance after each step
};

template <typename Scalar>
SolveResult<Scalar> solve_policy(const IfpModel<Scalar>& m, Scalar tol = Scalar(1e-6),
                                 int max_iter = 5000) {
  m.validate();
  if (!(tol > Scalar(0))) throw DomainError("tolerance must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");

  SolveResult<Scalar> out;
  ConsumptionPolicy<Scalar> sigma = ConsumptionPolicy<Scalar>::consume_all(
      m.num_states(), m.savings_grid(m.savings_grid.size() - 1));
  Scalar distance = std::numeric_limits<Scalar>::infinity();
  int it = 0;
  while (it < max_iter) {
    ConsumptionPolicy<Scalar> next = egm_step(sigma, m);
    distance = Scalar(0);
    for (Eigen::Index z = 0; z < m.num_states(); ++z) {
      const VectorX<Scalar>& c_new = next.consumption(z);
      if (it == 0) {
        // The starting policy has no c-grid of its own: measure it at the new points.
        for (Eigen::Index i = 0; i < c_new.size(); ++i) {
          distance = std::max(distance, std::abs(c_new(i) - sigma(next.assets(z)(i), z)));
        }
      } else {
        distance = std::max(distance, (c_new - sigma.consumption(z)).cwiseAbs().maxCoeff());
      }
    }
    sigma = std::move(next);
    ++it;
    out.history.push_back(distance);
    if (distance < tol) break;
  }
  if (!(distance < tol)) throw ConvergenceError(static_cast<double>(distance), it);
  out.policy = std::move(sigma);
  out.distance = distance;
  out.iterations = it;
  return out;
}

template <typename Scalar>
struct ConsumptionPath {
  std::vector<Scalar> assets;       // a_0 .. a_T
  std::vector<Scalar> consumption;  // c_0 .. c_{T-1}
  bool insolvent = false;
};

/// Month t consumes c_t = policy(a_t, z_t), raised to the basic-needs level b
/// when a_t >= b and capped at a_t, then a_{t+1} = R_{t+1}(a_t - c_t) + Y_{t+1}.
/// Assets below b trigger consume-all and the insolvency flag; negative assets
/// consume nothing. `returns` may be empty, meaning R = exp(b_r) every month.
template <typename Scalar>
ConsumptionPath<Scalar> simulate_path(Scalar a0, Scalar basic_needs,
                                      const ConsumptionPolicy<Scalar>& policy,
                                      std::span<const int> z_path,
                                      std::span<const Scalar> income_path,
                                      std::span<const Scalar> returns,
                                      const IfpModel<Scalar>& m) {
  if (income_path.size() != z_path.size()) {
    throw DomainError("income path and z path must have the same length");
  }
  if (!returns.empty() && returns.size() != z_path.size()) {
    throw DomainError("return path must be empty or match the z path");
  }
  ConsumptionPath<Scalar> out;
  out.assets.reserve(z_path.size() + 1);
  out.consumption.reserve(z_path.size());
  Scalar a = a0;
  out.assets.push_back(a);
  for (std::size_t t = 0; t < z_path.size(); ++t) {
    const int z = z_path[t];
    if (z < 0 || z >= policy.num_states()) throw DomainError("z state outside the policy");
    Scalar c;
    if (a < Scalar(0)) {
      out.insolvent = true;
      c = Scalar(0);
    } else if (a < basic_needs) {
      out.insolvent = true;
      c = a;
    } else {
      c = std::min(a, std::max(policy(a, z), basic_needs));
    }
    const Scalar R = returns.empty() ? std::exp(m.b_r) : returns[t];
    a = R * (a - c) + income_path[t];
    out.consumption.push_back(c);
    out.assets.push_back(a);
  }
  return out;
}

/// Writes the policy as a delimited table with columns z, a, c.
template <typename Scalar>
void write_policy_table(const std::filesystem::path& path, const ConsumptionPolicy<Scalar>& policy,
                        Scalar unit = Scalar(1)) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write policy table " + path.string());
  out.precision(17);
  out << "z,a,c\n";
  for (Eigen::Index z = 0; z < policy.num_states(); ++z) {
    for (Eigen::Index i = 0; i < policy.assets(z).size(); ++i) {
      out << z << ',' << policy.assets(z)(i) * unit << ',' << policy.consumption(z)(i) * unit
          << '\n';
    }
  }
}

}  // namespace precarity
