#pragma once

// Planar (1D) mode-connection coefficients between two quadratic-index
// channels: closed form, quadrature oracle, probability spectra, the full
// coupling matrix and the semiclassical vertical-transition estimate.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fcwave/error.hpp"
#include "fcwave/hermite.hpp"
#include "fcwave/quadrature.hpp"

namespace fcwave {

inline constexpr double kDefaultEpsilon = 1e-8;

// psi(x, n, source) -> psi(x, n', target). The displacement is
// target.center - source.center.
struct Transition1D {
  OscillatorFrame source;
  OscillatorFrame target;
  ModeIndex n = 0;

  double displacement() const { return target.center - source.center; }

  void validate(ModeIndex cap = kModeCap) const {
    source.validate();
    target.validate();
    check_mode_index(n, cap);
  }
};

namespace detail {

// The closed form prints y with the opposite sign to the one that matches
// the oscillator convention; flipping y multiplies H^R_{nm} by (-1)^{n+m}.
inline double parity_sign(ModeIndex n, ModeIndex m) { return ((n + m) % 2 == 0) ? 1.0 : -1.0; }

inline double amplitude_origin(const OverlapKernel& kernel) {
  if (kernel.prefactor < DBL_MIN)
    throw NumericOverflow("overlap prefactor underflows (log prefactor " + std::to_string(kernel.log_prefactor) +
                          "); displacement too large");
  return kernel.prefactor;
}

}  // namespace detail

// <n|n'> = prefactor * h[n][n'], sign fixed so that amplitudes agree with the
// direct integral of the two eigenfunctions.
inline double overlap_closed(const Transition1D& t, ModeIndex n_prime, ModeIndex cap = kModeCap) {
  t.validate(cap);
  check_mode_index(n_prime, cap);
  const auto kernel = build_kernel(t.source, t.target);
  HermiteColumnStream stream(kernel, t.n, detail::amplitude_origin(kernel), cap);
  std::span<const double> col;
  for (ModeIndex m = 0; m <= n_prime; ++m) col = stream.next();
  return detail::parity_sign(t.n, n_prime) * col[t.n];
}

// Gauss-Hermite order that integrates an (n, n') overlap exactly, with margin.
inline int oracle_order(ModeIndex n, ModeIndex n_prime) { return static_cast<int>((n + n_prime + 1) / 2) + 8; }

// Oracle route: integrate psi_n(source) * psi_n'(target) after completing the
// square. The product is exp(-(x - xbar)^2 / (2 s^2)) times a polynomial of
// degree n + n', with xbar = d l^2 / (l^2 + l'^2), s = l l' / sqrt(l^2 + l'^2).
inline double overlap_quad(const Transition1D& t, ModeIndex n_prime, const QuadratureRule& rule,
                           ModeIndex cap = kModeCap) {
  t.validate(cap);
  check_mode_index(n_prime, cap);
  if (rule.order < oracle_order(t.n, n_prime) - 8)
    throw DomainError("quadrature order " + std::to_string(rule.order) + " too low for overlap (" +
                      std::to_string(t.n) + ", " + std::to_string(n_prime) + ")");
  const double l = t.source.length();
  const double lp = t.target.length();
  const double c0 = t.source.center;
  const double c1 = t.target.center;
  const double d = c1 - c0;
  const double sum = l * l + lp * lp;
  const double xbar = c0 + d * l * l / sum;
  const double width = l * lp / std::sqrt(sum);
  const double log_const = -d * d / (2.0 * sum) - 0.5 * std::log(l * lp);
  auto f = [&](double x) {
    const auto a = detail::orthonormal_hermite(t.n, (x - c0) / l);
    const auto b = detail::orthonormal_hermite(n_prime, (x - c1) / lp);
    const double mant = a.current * b.current;
    if (mant == 0.0) return 0.0;
    return mant * std::exp(a.log_scale + b.log_scale + log_const);
  };
  return integrate(rule, f, xbar, std::numbers::sqrt2 * width);
}

inline double overlap_quad(const Transition1D& t, ModeIndex n_prime, ModeIndex cap = kModeCap) {
  check_mode_index(t.n, cap);
  check_mode_index(n_prime, cap);
  return overlap_quad(t, n_prime, gauss_hermite(oracle_order(t.n, n_prime)), cap);
}

struct SpectrumEntry {
  ModeIndex n_prime = 0;
  double amplitude = 0.0;
  double probability = 0.0;
};

// P_n^{n'} for n' = 0..cutoff with the running captured mass.
struct Spectrum {
  std::vector<SpectrumEntry> entries;
  double captured_mass = 0.0;
  ModeIndex cutoff = 0;
  double epsilon = kDefaultEpsilon;

  // Smallest n' among the maximal probabilities.
  ModeIndex argmax() const {
    if (entries.empty()) throw DomainError("argmax of an empty spectrum");
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i)
      if (entries[i].probability > entries[best].probability) best = i;
    return entries[best].n_prime;
  }
};

// Walks n' upward on one column stream until the captured mass reaches
// 1 - epsilon. Throws CapReached<Spectrum> if n' would pass `cap` first.
inline Spectrum spectrum1d(const Transition1D& t, double epsilon = kDefaultEpsilon, ModeIndex cap = kModeCap) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must be in (0, 1)");
  t.validate(cap);
  const auto kernel = build_kernel(t.source, t.target);
  HermiteColumnStream stream(kernel, t.n, detail::amplitude_origin(kernel), cap);
  Spectrum s;
  s.epsilon = epsilon;
  for (ModeIndex m = 0;; ++m) {
    if (m > cap) {
      s.cutoff = cap;
      throw CapReached<Spectrum>("mode cap " + std::to_string(cap) + " reached with captured mass " +
                                     std::to_string(s.captured_mass),
                                 s);
    }
    const auto col = stream.next();
    const double a = detail::parity_sign(t.n, m) * col[t.n];
    s.entries.push_back({m, a, a * a});
    s.captured_mass += a * a;
    s.cutoff = m;
    if (s.captured_mass >= 1.0 - epsilon) break;
  }
  return s;
}

// Amplitudes <n|n'> for n = 0..rows-1, n' = 0..cols-1, plus the largest
// deviation of the row Gram matrix from the identity.
struct CouplingMatrix {
  ModeIndex rows = 0;
  ModeIndex cols = 0;
  std::vector<double> values;
  double orthogonality_defect = 0.0;
  std::vector<std::string> warnings;

  double operator()(ModeIndex n, ModeIndex n_prime) const { return values[std::size_t(n) * cols + n_prime]; }
};

// N and N_prime are the highest initial and final mode indices.
inline CouplingMatrix coupling_matrix(const OscillatorFrame& source, const OscillatorFrame& target, ModeIndex N,
                                      ModeIndex N_prime, ModeIndex cap = kModeCap) {
  check_mode_index(N, cap);
  check_mode_index(N_prime, cap);
  const auto kernel = build_kernel(source, target);
  const auto h = scaled_hermite_table(kernel, N, N_prime, FillOrder::column_first, detail::amplitude_origin(kernel),
                                      cap);
  CouplingMatrix c;
  c.rows = N + 1;
  c.cols = N_prime + 1;
  c.values.resize(std::size_t(c.rows) * c.cols);
  if (N > N_prime)
    c.warnings.push_back("N > N_prime: rows cannot all be complete; orthogonality defect will be large");
  for (ModeIndex n = 0; n <= N; ++n)
    for (ModeIndex m = 0; m <= N_prime; ++m) c.values[std::size_t(n) * c.cols + m] = detail::parity_sign(n, m) * h(n, m);

  double defect = 0.0;
  for (ModeIndex i = 0; i < c.rows; ++i) {
    for (ModeIndex j = i; j < c.rows; ++j) {
      double g = 0.0;
      for (ModeIndex m = 0; m < c.cols; ++m) g += c(i, m) * c(j, m);
      defect = std::max(defect, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  c.orthogonality_defect = defect;
  return c;
}

// Semiclassical vertical-transition estimate. The transition point is the
// source center for n = 0, otherwise the classical turning point nearer the
// target center; the level is round(U'(x*)/omega' - 1/2) with
// U'(x) = omega'^2 (x - d)^2 / 2, clamped at 0.
struct FcEstimate {
  ModeIndex level = 0;
  double transition_point = 0.0;
  // Unrounded level for each turning point (equal to each other for n = 0).
  double near_branch = 0.0;
  double far_branch = 0.0;
};

inline FcEstimate fc_estimate_detail(const Transition1D& t) {
  t.validate();
  const double wp = t.target.omega;
  const double d = t.target.center;
  auto level_at = [&](double x) { return 0.5 * wp * wp * (x - d) * (x - d) / wp - 0.5; };

  FcEstimate e;
  const double c0 = t.source.center;
  if (t.n == 0) {
    e.transition_point = c0;
    e.near_branch = e.far_branch = level_at(c0);
  } else {
    const double reach = std::sqrt((2.0 * t.n + 1.0) / t.source.omega);
    const double plus = c0 + reach;
    const double minus = c0 - reach;
    const bool plus_nearer = std::abs(plus - d) <= std::abs(minus - d);
    e.transition_point = plus_nearer ? plus : minus;
    e.near_branch = level_at(plus_nearer ? plus : minus);
    e.far_branch = level_at(plus_nearer ? minus : plus);
  }
  e.level = static_cast<ModeIndex>(std::max(0.0, std::round(e.near_branch)));
  return e;
}

inline ModeIndex fc_estimate(const Transition1D& t) { return fc_estimate_detail(t).level; }

}  // namespace fcwave
