#pragma once

// Gauss-Hermite rules for the weight exp(-t^2).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fcwave/error.hpp"
#include "fcwave/hermite.hpp"

namespace fcwave {

inline constexpr int kMaxQuadratureOrder = 2048;

// Nodes ascending and symmetric about 0. Weights include exp(-t^2). For
// orders above ~350 the outermost weights are below the double range and
// are stored as 0.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// One Newton polish of a Hermite zero plus its weight, 1 / (n p_{n-1}(t)^2)
// with p orthonormal.
inline std::pair<double, double> polish_hermite_zero(int order, double t, int node_index) {
  constexpr int kMaxIter = 30;
  const auto n = static_cast<ModeIndex>(order);
  for (int it = 0; it < kMaxIter; ++it) {
    const auto s = orthonormal_hermite(n, t);
    const double step = s.current / (std::sqrt(2.0 * order) * s.previous);
    t -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) {
      const auto f = orthonormal_hermite(n, t);
      const double log_w = -std::log(static_cast<double>(order)) -
                           2.0 * (std::log(std::abs(f.previous)) + f.log_scale);
      return {t, std::exp(log_w)};
    }
  }
  throw ConvergenceError("Gauss-Hermite Newton iteration did not converge for node " +
                         std::to_string(node_index) + " of order " + std::to_string(order));
}

}  // namespace detail

// Golub-Welsch eigenvalues of the Jacobi matrix seed the nodes; Newton on the
// orthonormal recurrence polishes each one.
inline QuadratureRule gauss_hermite(int order) {
  if (order < 1 || order > kMaxQuadratureOrder)
    throw DomainError("Gauss-Hermite order must be in [1, " + std::to_string(kMaxQuadratureOrder) + "], got " +
                      std::to_string(order));
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  if (order == 1) {
    rule.weights[0] = std::sqrt(std::numbers::pi);
    return rule;
  }

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("Jacobi matrix eigenvalue solver failed");
  const Eigen::VectorXd& guess = solver.eigenvalues();  // ascending

  // Polish the non-negative half, then mirror.
  const int half = order / 2;
  for (int i = 0; i < half; ++i) {
    const int idx = order - 1 - i;
    const auto [t, w] = detail::polish_hermite_zero(order, std::abs(guess[idx]), idx);
    rule.nodes[idx] = t;
    rule.nodes[i] = -t;
    rule.weights[idx] = w;
    rule.weights[i] = w;
  }
  if (order % 2 == 1) {
    const auto [t, w] = detail::polish_hermite_zero(order, 0.0, half);
    rule.nodes[half] = 0.0;
    rule.weights[half] = w;
    (void)t;
  }
  return rule;
}

// Integral of f(x) exp(-((x - shift)/scale)^2) dx under x = shift + scale t,
// dx = scale dt: returns scale * sum_i w_i f(shift + scale t_i). The caller
// passes f with the Gaussian weight already divided out.
template <class F>
double integrate(const QuadratureRule& rule, F&& f, double shift = 0.0, double scale = 1.0) {
  if (!(scale > 0.0)) throw DomainError("integration scale must be > 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    if (rule.weights[i] == 0.0) continue;
    sum += rule.weights[i] * f(shift + scale * rule.nodes[i]);
  }
  return scale * sum;
}

}  // namespace fcwave
