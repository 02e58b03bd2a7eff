#pragma once

// Hermite polynomials, harmonic-oscillator eigenfunctions and the scaled
// two-index Hermite table behind the closed-form oscillator overlap.
//
// Units: hbar = m = 1, so a channel of frequency omega has potential
// omega^2 x^2 / 2 and characteristic length l = omega^(-1/2).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fcwave/error.hpp"

namespace fcwave {

using ModeIndex = std::uint32_t;

// Hard cap on any mode index. Beyond it the library refuses instead of
// silently losing precision.
inline constexpr ModeIndex kModeCap = 4096;

inline void check_mode_index(ModeIndex n, ModeIndex cap = kModeCap) {
  if (n > cap) throw IndexOverflow(n, cap);
}

// One transverse harmonic channel: frequency and center.
struct OscillatorFrame {
  double omega = 1.0;
  double center = 0.0;

  double length() const { return 1.0 / std::sqrt(omega); }

  void validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw DomainError("oscillator frequency must be finite and > 0, got " + std::to_string(omega));
    if (!std::isfinite(center)) throw DomainError("oscillator center must be finite");
  }
};

// Physicists' Hermite polynomial H_n(xi) by the three-term recurrence.
inline double hermite_phys(ModeIndex n, double xi, ModeIndex cap = kModeCap) {
  check_mode_index(n, cap);
  double prev = 0.0;
  double cur = 1.0;
  for (ModeIndex k = 0; k < n; ++k) {
    const double next = 2.0 * xi * cur - 2.0 * static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace detail {

inline constexpr double kPiQuarterInv = 0.75112554446494248286;  // pi^(-1/4)

// Orthonormal Hermite polynomials p_k with weight exp(-xi^2), p_0 = pi^(-1/4).
// Values are carried with a separate natural-log scale so large orders do not
// overflow: true p_n = current * exp(log_scale), same for previous = p_{n-1}.
struct ScaledHermite {
  double current = kPiQuarterInv;
  double previous = 0.0;
  double log_scale = 0.0;
};

inline ScaledHermite orthonormal_hermite(ModeIndex n, double xi) {
  constexpr double kBig = 1e150;
  constexpr double kLogBig = 345.38776394910684;  // ln(1e150)
  ScaledHermite s;
  for (ModeIndex k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = std::sqrt(2.0 / (kk + 1.0)) * xi * s.current - std::sqrt(kk / (kk + 1.0)) * s.previous;
    s.previous = s.current;
    s.current = next;
    if (std::abs(s.current) > kBig) {
      s.current /= kBig;
      s.previous /= kBig;
      s.log_scale += kLogBig;
    }
  }
  return s;
}

// Fills out[k] = p_k(xi) for k = 0..out.size()-1, unscaled.
inline void orthonormal_hermite_all(double xi, std::span<double> out) {
  if (out.empty()) return;
  out[0] = kPiQuarterInv;
  if (out.size() > 1) out[1] = std::numbers::sqrt2 * xi * out[0];
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = std::sqrt(2.0 / (kk + 1.0)) * xi * out[k] - std::sqrt(kk / (kk + 1.0)) * out[k - 1];
  }
}

}  // namespace detail

// Normalized oscillator eigenfunction psi(x, n, omega, d). The sign follows
// the positive leading coefficient of H_n.
inline double oscillator_psi(double x, ModeIndex n, const OscillatorFrame& frame, ModeIndex cap = kModeCap) {
  check_mode_index(n, cap);
  const double l = frame.length();
  const double xi = (x - frame.center) / l;
  const auto s = detail::orthonormal_hermite(n, xi);
  if (s.current == 0.0) return 0.0;
  return s.current * std::exp(s.log_scale - 0.5 * xi * xi) / std::sqrt(l);
}

// The matrix R, vector y and scalar prefactor of the two-variable Hermite
// representation of <n|n'> for source frame (l, center 0) and target frame
// (l', center d). R and y are stored exactly as the closed form prints them.
struct OverlapKernel {
  std::array<std::array<double, 2>, 2> R{};
  std::array<double, 2> y{};
  double prefactor = 1.0;
  double log_prefactor = 0.0;
  double l = 1.0;
  double l_prime = 1.0;
  double displacement = 0.0;

  std::array<double, 2> Ry() const {
    return {R[0][0] * y[0] + R[0][1] * y[1], R[1][0] * y[0] + R[1][1] * y[1]};
  }
};

inline OverlapKernel build_kernel(const OscillatorFrame& source, const OscillatorFrame& target) {
  source.validate();
  target.validate();
  OverlapKernel k;
  k.l = source.length();
  k.l_prime = target.length();
  k.displacement = target.center - source.center;
  const double l = k.l;
  const double lp = k.l_prime;
  const double d = k.displacement;
  const double sum = l * l + lp * lp;
  const double c = 2.0 / sum;
  k.R = {{{c * (l * l - lp * lp), c * (-2.0 * l * lp)}, {c * (-2.0 * l * lp), c * (-l * l + lp * lp)}}};
  const double s = -d * l / sum;
  k.y = {s, -s * lp / l};
  k.log_prefactor = 0.5 * std::log(2.0 * l * lp / sum) - d * d / (2.0 * sum);
  k.prefactor = std::exp(k.log_prefactor);
  return k;
}

enum class FillOrder { column_first, row_first };

namespace detail {

// Coefficients of the two three-term steps, kept in extended precision.
struct HermiteStep {
  using Real = long double;
  Real r11, r12, r22, a1, a2;

  explicit HermiteStep(const OverlapKernel& k)
      : r11(k.R[0][0]), r12(k.R[0][1]), r22(k.R[1][1]) {
    const Real y1 = k.y[0], y2 = k.y[1];
    a1 = r11 * y1 + r12 * y2;
    a2 = r12 * y1 + r22 * y2;
  }

  // h[n][m] for (n, m) != (0, 0), stepping along the larger index: the
  // m-step when n < m, the n-step otherwise. The cross term then carries
  // sqrt(min/max) <= 1; stepping along the smaller index amplifies rounding
  // by many orders of magnitude once n, m reach a few tens.
  // at(i, j) must return h[i][j] for the three predecessors and 0 for
  // negative indices.
  template <class At>
  Real operator()(long n, long m, const At& at) const {
    if (n < m) {
      const Real k = static_cast<Real>(m - 1);
      return (a2 * at(n, m - 1) - r22 * std::sqrt(k / 2) * at(n, m - 2) -
              r12 * std::sqrt(static_cast<Real>(n) / 2) * at(n - 1, m - 1)) /
             std::sqrt(2 * (k + 1));
    }
    const Real k = static_cast<Real>(n - 1);
    return (a1 * at(n - 1, m) - r11 * std::sqrt(k / 2) * at(n - 2, m) -
            r12 * std::sqrt(static_cast<Real>(m) / 2) * at(n - 1, m - 1)) /
           std::sqrt(2 * (k + 1));
  }
};

}  // namespace detail

// Streams the columns m = 0, 1, 2, ... of the scaled table
//   h[n][m] = H^R_{nm}(y) / sqrt(2^{n+m} n! m!),  n = 0..n_max,
// from the generating function exp(a^T R y - a^T R a / 2). Each column needs
// only its two predecessors, so a spectrum over growing m costs O(n_max)
// memory. `origin` is placed at h[0][0]; the recurrences are linear, so any
// origin scales the whole table.
class HermiteColumnStream {
 public:
  HermiteColumnStream(const OverlapKernel& kernel, ModeIndex n_max, double origin = 1.0,
                      ModeIndex cap = kModeCap)
      : step_(kernel),
        origin_(origin),
        cap_(cap),
        prev2_(n_max + 1, 0.0L),
        prev_(n_max + 1, 0.0L),
        cur_(n_max + 1, 0.0L),
        out_(n_max + 1, 0.0) {
    check_mode_index(n_max, cap);
  }

  // Index of the column returned by the most recent next(); -1 before the first call.
  long column_index() const { return column_; }
  ModeIndex n_max() const { return static_cast<ModeIndex>(out_.size() - 1); }

  std::span<const double> next() {
    ++column_;
    const long m = column_;
    check_mode_index(static_cast<ModeIndex>(m), cap_);
    prev2_.swap(prev_);
    prev_.swap(cur_);
    auto at = [&](long i, long j) -> Real {
      if (i < 0 || j < 0) return 0;
      if (j == m) return cur_[i];
      return j == m - 1 ? prev_[i] : prev2_[i];
    };
    for (long k = 0; k < static_cast<long>(cur_.size()); ++k) {
      cur_[k] = (k == 0 && m == 0) ? Real(origin_) : step_(k, m, at);
      out_[k] = static_cast<double>(cur_[k]);
      if (!std::isfinite(out_[k]))
        throw NumericOverflow("scaled Hermite table non-finite", static_cast<unsigned>(k),
                              static_cast<unsigned>(m));
    }
    return out_;
  }

 private:
  using Real = detail::HermiteStep::Real;
  detail::HermiteStep step_;
  double origin_;
  ModeIndex cap_;
  long column_ = -1;
  std::vector<Real> prev2_, prev_, cur_;
  std::vector<double> out_;
};

// Dense h[n][m] for n <= n_max, m <= m_max.
class ScaledHermiteTable {
 public:
  ScaledHermiteTable(ModeIndex n_max, ModeIndex m_max)
      : n_max_(n_max), m_max_(m_max), data_(std::size_t(n_max + 1) * (m_max + 1), 0.0) {}

  ModeIndex n_max() const { return n_max_; }
  ModeIndex m_max() const { return m_max_; }

  double operator()(ModeIndex n, ModeIndex m) const { return data_[index(n, m)]; }
  double& operator()(ModeIndex n, ModeIndex m) { return data_[index(n, m)]; }

  std::span<const double> row(ModeIndex n) const {
    return std::span<const double>(data_).subspan(std::size_t(n) * (m_max_ + 1), m_max_ + 1);
  }

 private:
  std::size_t index(ModeIndex n, ModeIndex m) const { return std::size_t(n) * (m_max_ + 1) + m; }

  ModeIndex n_max_;
  ModeIndex m_max_;
  std::vector<double> data_;
};

inline ScaledHermiteTable scaled_hermite_table(const OverlapKernel& kernel, ModeIndex n_max, ModeIndex m_max,
                                               FillOrder order = FillOrder::column_first, double origin = 1.0,
                                               ModeIndex cap = kModeCap) {
  check_mode_index(n_max, cap);
  check_mode_index(m_max, cap);
  ScaledHermiteTable h(n_max, m_max);
  if (order == FillOrder::column_first) {
    HermiteColumnStream stream(kernel, n_max, origin, cap);
    for (ModeIndex m = 0; m <= m_max; ++m) {
      const auto col = stream.next();
      for (ModeIndex n = 0; n <= n_max; ++n) h(n, m) = col[n];
    }
    return h;
  }

  // Row-first: same per-entry steps, visited row by row.
  const detail::HermiteStep step(kernel);
  const std::size_t cols = std::size_t(m_max) + 1;
  std::vector<detail::HermiteStep::Real> work(std::size_t(n_max + 1) * cols, 0.0L);
  auto at = [&](long i, long j) -> detail::HermiteStep::Real {
    return (i < 0 || j < 0) ? 0.0L : work[std::size_t(i) * cols + j];
  };
  for (long n = 0; n <= long(n_max); ++n) {
    for (long m = 0; m <= long(m_max); ++m) {
      auto& v = work[std::size_t(n) * cols + m];
      v = (n == 0 && m == 0) ? detail::HermiteStep::Real(origin) : step(n, m, at);
      h(n, m) = static_cast<double>(v);
      if (!std::isfinite(h(n, m)))
        throw NumericOverflow("scaled Hermite table non-finite", static_cast<unsigned>(n), static_cast<unsigned>(m));
    }
  }
  return h;
}

}  // namespace fcwave
