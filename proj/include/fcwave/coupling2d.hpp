#pragma once

// Elliptic (2D) waveguide transitions. Each waveguide has potential
//   U = (omega_x^2 x^2 + omega_y^2 y^2 + gamma x y) / 2
// about its center. With gamma = 0 the overlap factorizes into two 1D
// overlaps; otherwise both states are written in their own normal-mode frames
// and the 2D overlap is done by tensor Gauss-Hermite quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "fcwave/coupling1d.hpp"
#include "fcwave/error.hpp"
#include "fcwave/hermite.hpp"
#include "fcwave/quadrature.hpp"

namespace fcwave {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

struct Waveguide2D {
  double omega_x = 1.0;
  double omega_y = 1.0;
  double gamma = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;

  Vec2 center() const { return {center_x, center_y}; }

  // Matrix of the quadratic form, U = r^T A r / 2.
  Mat2 form() const { return {{{omega_x * omega_x, 0.5 * gamma}, {0.5 * gamma, omega_y * omega_y}}}; }

  void validate() const {
    for (double w : {omega_x, omega_y})
      if (!(w > 0.0) || !std::isfinite(w))
        throw DomainError("waveguide frequencies must be finite and > 0, got " + std::to_string(w));
    if (!std::isfinite(gamma) || !std::isfinite(center_x) || !std::isfinite(center_y))
      throw DomainError("waveguide gamma and center must be finite");
    if (!(gamma * gamma < 4.0 * omega_x * omega_x * omega_y * omega_y))
      throw DomainError("potential not positive definite: gamma^2 = " + std::to_string(gamma * gamma) +
                        " >= 4 omega_x^2 omega_y^2 = " +
                        std::to_string(4.0 * omega_x * omega_x * omega_y * omega_y));
  }
};

namespace detail {

// Rotation diagonalizing a symmetric 2x2 matrix with theta in (-pi/4, pi/4]:
// u = cos(theta) x + sin(theta) y, v = -sin(theta) x + cos(theta) y.
struct SymmetricEigen2 {
  double theta = 0.0;
  double lambda_u = 0.0;
  double lambda_v = 0.0;
  double residual = 0.0;  // |off-diagonal| of the rotated matrix
};

inline SymmetricEigen2 symmetric_eigen2(const Mat2& a) {
  const double diff = a[0][0] - a[1][1];
  const double b = a[0][1];
  SymmetricEigen2 e;
  if (b == 0.0)
    e.theta = 0.0;
  else if (diff == 0.0)
    e.theta = std::numbers::pi / 4.0;
  else
    e.theta = 0.5 * std::atan(2.0 * b / diff);
  const double c = std::cos(e.theta);
  const double s = std::sin(e.theta);
  e.lambda_u = a[0][0] * c * c + 2.0 * b * s * c + a[1][1] * s * s;
  e.lambda_v = a[0][0] * s * s - 2.0 * b * s * c + a[1][1] * c * c;
  e.residual = std::abs((a[1][1] - a[0][0]) * s * c + b * (c * c - s * s));
  return e;
}

}  // namespace detail

// Normal-mode frame of a waveguide. Omega_u and Omega_v are the frequencies
// along the rotated x and y axes; index 1 of a final 2D mode labels the u
// axis, index 2 the v axis, so gamma = 0 reduces to (x, y).
struct NormalModes {
  double theta = 0.0;
  double omega_u = 1.0;
  double omega_v = 1.0;
  double residual = 0.0;

  double omega_plus() const { return std::max(omega_u, omega_v); }
  double omega_minus() const { return std::min(omega_u, omega_v); }
  Vec2 axis_u() const { return {std::cos(theta), std::sin(theta)}; }
  Vec2 axis_v() const { return {-std::sin(theta), std::cos(theta)}; }

  // Inverse squared widths of the ground state: M = sum Omega_k e_k e_k^T.
  Mat2 precision() const {
    const auto u = axis_u();
    const auto v = axis_v();
    Mat2 m{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] = omega_u * u[i] * u[j] + omega_v * v[i] * v[j];
    return m;
  }
};

inline NormalModes normal_modes(const Waveguide2D& w) {
  w.validate();
  const auto a = w.form();
  const auto e = detail::symmetric_eigen2(a);
  const double scale = std::max({std::abs(a[0][0]), std::abs(a[1][1]), std::abs(a[0][1])});
  if (e.residual > 1e-12 * scale)
    throw NumericOverflow("normal-mode rotation residual " + std::to_string(e.residual) + " above tolerance");
  if (!(e.lambda_u > 0.0 && e.lambda_v > 0.0)) throw DomainError("quadratic form is not positive definite");
  return {e.theta, std::sqrt(e.lambda_u), std::sqrt(e.lambda_v), e.residual};
}

// Amplitudes over final modes (n'_1, n'_2) for a fixed initial (n_x, n_y).
struct CouplingTensor {
  ModeIndex nx = 0;
  ModeIndex ny = 0;
  ModeIndex rows = 0;  // count of n'_1 values
  ModeIndex cols = 0;  // count of n'_2 values
  std::vector<double> values;
  double captured_mass = 0.0;

  double at(ModeIndex i, ModeIndex j) const { return values[std::size_t(i) * cols + j]; }
  double probability(ModeIndex i, ModeIndex j) const { return at(i, j) * at(i, j); }

  // Smallest (n'_1, n'_2) in row-major order among the maximal probabilities.
  std::pair<ModeIndex, ModeIndex> argmax() const {
    if (values.empty()) throw DomainError("argmax of an empty tensor");
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
      if (values[k] * values[k] > values[best] * values[best]) best = k;
    return {static_cast<ModeIndex>(best / cols), static_cast<ModeIndex>(best % cols)};
  }
};

namespace detail {

// Growing 1D amplitude row <n|0..k> on one column stream.
class AmplitudeRow {
 public:
  AmplitudeRow(const OscillatorFrame& source, const OscillatorFrame& target, ModeIndex n, ModeIndex cap)
      : n_(n), stream_(make_stream(source, target, n, cap)) {
    grow();
  }

  void grow() {
    const auto col = stream_.next();
    const auto m = static_cast<ModeIndex>(values_.size());
    const double a = parity_sign(n_, m) * col[n_];
    values_.push_back(a);
    mass_ += a * a;
  }

  ModeIndex size() const { return static_cast<ModeIndex>(values_.size()); }
  double mass() const { return mass_; }
  const std::vector<double>& values() const { return values_; }

 private:
  static HermiteColumnStream make_stream(const OscillatorFrame& source, const OscillatorFrame& target, ModeIndex n,
                                         ModeIndex cap) {
    const auto kernel = build_kernel(source, target);
    return HermiteColumnStream(kernel, n, amplitude_origin(kernel), cap);
  }

  ModeIndex n_;
  HermiteColumnStream stream_;
  std::vector<double> values_;
  double mass_ = 0.0;
};

inline CouplingTensor outer_tensor(ModeIndex nx, ModeIndex ny, const AmplitudeRow& x, const AmplitudeRow& y) {
  CouplingTensor t;
  t.nx = nx;
  t.ny = ny;
  t.rows = x.size();
  t.cols = y.size();
  t.values.resize(std::size_t(t.rows) * t.cols);
  for (ModeIndex i = 0; i < t.rows; ++i)
    for (ModeIndex j = 0; j < t.cols; ++j) {
      const double a = x.values()[i] * y.values()[j];
      t.values[std::size_t(i) * t.cols + j] = a;
      t.captured_mass += a * a;
    }
  return t;
}

}  // namespace detail

// Product of the x- and y-channel 1D amplitudes. The index rectangle grows on
// the side whose marginal tail (1 - channel mass) is larger until the product
// mass reaches 1 - epsilon.
inline CouplingTensor spectrum2d_separable(const Waveguide2D& source, const Waveguide2D& target, ModeIndex nx,
                                           ModeIndex ny, double epsilon = kDefaultEpsilon, ModeIndex cap = kModeCap) {
  source.validate();
  target.validate();
  if (source.gamma != 0.0 || target.gamma != 0.0)
    throw DomainError("separable 2D spectrum requires gamma = 0 on both waveguides");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must be in (0, 1)");
  check_mode_index(nx, cap);
  check_mode_index(ny, cap);

  detail::AmplitudeRow x({source.omega_x, source.center_x}, {target.omega_x, target.center_x}, nx, cap);
  detail::AmplitudeRow y({source.omega_y, source.center_y}, {target.omega_y, target.center_y}, ny, cap);
  while (x.mass() * y.mass() < 1.0 - epsilon) {
    auto& side = (1.0 - x.mass() >= 1.0 - y.mass()) ? x : y;
    if (side.size() > cap) {
      throw CapReached<CouplingTensor>("mode cap " + std::to_string(cap) + " reached with captured mass " +
                                           std::to_string(x.mass() * y.mass()),
                                       detail::outer_tensor(nx, ny, x, y));
    }
    side.grow();
  }
  return detail::outer_tensor(nx, ny, x, y);
}

inline int coupled_order(ModeIndex nx, ModeIndex ny, ModeIndex n1, ModeIndex n2) {
  return static_cast<int>((nx + ny + n1 + n2 + 1) / 2) + 8;
}

namespace detail {

inline Vec2 apply(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// Amplitudes <nx,ny | k1,k2> for k1 <= n1_max, k2 <= n2_max by tensor
// quadrature in the eigenframe of the summed precision matrices, where the
// product of the two Gaussian envelopes is exp(-t1^2 - t2^2) times a constant.
inline CouplingTensor coupled_block(const Waveguide2D& source, const Waveguide2D& target, ModeIndex nx,
                                    ModeIndex ny, ModeIndex n1_max, ModeIndex n2_max) {
  const auto sm = normal_modes(source);
  const auto tm = normal_modes(target);
  const Mat2 ms = sm.precision();
  const Mat2 mt = tm.precision();
  const Vec2 cs = source.center();
  const Vec2 ct = target.center();

  Mat2 mc{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) mc[i][j] = ms[i][j] + mt[i][j];
  const Vec2 msc = apply(ms, cs);
  const Vec2 mtc = apply(mt, ct);
  const Vec2 b{msc[0] + mtc[0], msc[1] + mtc[1]};
  const double det = mc[0][0] * mc[1][1] - mc[0][1] * mc[1][0];
  const Vec2 rbar{(mc[1][1] * b[0] - mc[0][1] * b[1]) / det, (mc[0][0] * b[1] - mc[1][0] * b[0]) / det};
  const double log_const =
      -0.5 * (dot(cs, msc) + dot(ct, mtc) - dot(rbar, b)) +
      0.25 * std::log(sm.omega_u * sm.omega_v * tm.omega_u * tm.omega_v);

  const auto frame = symmetric_eigen2(mc);
  const Vec2 e1{std::cos(frame.theta), std::sin(frame.theta)};
  const Vec2 e2{-std::sin(frame.theta), std::cos(frame.theta)};
  const double s1 = std::sqrt(2.0 / frame.lambda_u);
  const double s2 = std::sqrt(2.0 / frame.lambda_v);
  const double jacobian = s1 * s2;

  const int order = coupled_order(nx, ny, n1_max, n2_max);
  const auto rule = gauss_hermite(order);

  const auto su = sm.axis_u(), sv = sm.axis_v();
  const auto tu = tm.axis_u(), tv = tm.axis_v();
  const double ssu = std::sqrt(sm.omega_u), ssv = std::sqrt(sm.omega_v);
  const double stu = std::sqrt(tm.omega_u), stv = std::sqrt(tm.omega_v);

  CouplingTensor t;
  t.nx = nx;
  t.ny = ny;
  t.rows = n1_max + 1;
  t.cols = n2_max + 1;
  t.values.assign(std::size_t(t.rows) * t.cols, 0.0);
  std::vector<double> p1(t.rows), p2(t.cols), weighted(t.cols);

  for (int i = 0; i < order; ++i) {
    if (rule.weights[i] == 0.0) continue;
    for (int j = 0; j < order; ++j) {
      if (rule.weights[j] == 0.0) continue;
      const double z1 = s1 * rule.nodes[i];
      const double z2 = s2 * rule.nodes[j];
      const Vec2 r{rbar[0] + z1 * e1[0] + z2 * e2[0], rbar[1] + z1 * e1[1] + z2 * e2[1]};
      const Vec2 rs{r[0] - cs[0], r[1] - cs[1]};
      const Vec2 rt{r[0] - ct[0], r[1] - ct[1]};

      const auto a = orthonormal_hermite(nx, ssu * dot(su, rs));
      const auto c = orthonormal_hermite(ny, ssv * dot(sv, rs));
      const double mant = a.current * c.current;
      if (mant == 0.0) continue;
      const double factor =
          rule.weights[i] * rule.weights[j] * jacobian * mant * std::exp(a.log_scale + c.log_scale + log_const);

      orthonormal_hermite_all(stu * dot(tu, rt), p1);
      orthonormal_hermite_all(stv * dot(tv, rt), p2);
      for (ModeIndex k2 = 0; k2 < t.cols; ++k2) weighted[k2] = factor * p2[k2];
      for (ModeIndex k1 = 0; k1 < t.rows; ++k1) {
        double* row = t.values.data() + std::size_t(k1) * t.cols;
        const double f1 = p1[k1];
        for (ModeIndex k2 = 0; k2 < t.cols; ++k2) row[k2] += f1 * weighted[k2];
      }
    }
  }
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    if (!std::isfinite(t.values[k]))
      throw NumericOverflow("coupled overlap non-finite", static_cast<unsigned>(k / t.cols),
                            static_cast<unsigned>(k % t.cols));
    t.captured_mass += t.values[k] * t.values[k];
  }
  return t;
}

}  // namespace detail

// <nx, ny | n1', n2'> between source and target eigenstates, each labelled in
// its own normal-mode frame.
inline double overlap_coupled(const Waveguide2D& source, const Waveguide2D& target, ModeIndex nx, ModeIndex ny,
                              ModeIndex n1_prime, ModeIndex n2_prime, ModeIndex cap = kModeCap) {
  for (ModeIndex n : {nx, ny, n1_prime, n2_prime}) check_mode_index(n, cap);
  const auto block = detail::coupled_block(source, target, nx, ny, n1_prime, n2_prime);
  return block.at(n1_prime, n2_prime);
}

// Full tensor for possibly cross-coupled waveguides. The rectangle starts at
// 8 x 8 and grows on the side whose outermost row/column carries more mass.
inline CouplingTensor coupled_tensor(const Waveguide2D& source, const Waveguide2D& target, ModeIndex nx,
                                     ModeIndex ny, double epsilon = kDefaultEpsilon, ModeIndex cap = kModeCap) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must be in (0, 1)");
  check_mode_index(nx, cap);
  check_mode_index(ny, cap);
  ModeIndex n1 = std::min<ModeIndex>(cap, 7);
  ModeIndex n2 = std::min<ModeIndex>(cap, 7);
  for (;;) {
    auto t = detail::coupled_block(source, target, nx, ny, n1, n2);
    if (t.captured_mass >= 1.0 - epsilon) return t;
    double row_edge = 0.0, col_edge = 0.0;
    for (ModeIndex j = 0; j < t.cols; ++j) row_edge += t.probability(n1, j);
    for (ModeIndex i = 0; i < t.rows; ++i) col_edge += t.probability(i, n2);
    const bool grow1 = row_edge >= col_edge || (row_edge == 0.0 && col_edge == 0.0);
    const bool grow2 = col_edge >= row_edge;
    const ModeIndex next1 = grow1 ? n1 + std::max<ModeIndex>(4, n1 / 4) : n1;
    const ModeIndex next2 = grow2 ? n2 + std::max<ModeIndex>(4, n2 / 4) : n2;
    if ((grow1 && n1 == cap) || (grow2 && n2 == cap) ||
        coupled_order(nx, ny, std::min(next1, cap), std::min(next2, cap)) > kMaxQuadratureOrder) {
      throw CapReached<CouplingTensor>(
          "mode cap reached with captured mass " + std::to_string(t.captured_mass), std::move(t));
    }
    n1 = std::min(next1, cap);
    n2 = std::min(next2, cap);
  }
}

// Singular values of the amplitude matrix and the entropy of their
// normalized squares.
struct SchmidtReport {
  std::vector<double> singular_values;  // descending
  double captured_mass = 0.0;
  double entropy = 0.0;
};

inline SchmidtReport schmidt_report(const CouplingTensor& t) {
  if (t.values.empty() || t.rows == 0 || t.cols == 0) throw DomainError("Schmidt report of an empty tensor");
  if (!(t.captured_mass > 0.0)) throw DomainError("Schmidt report needs captured mass > 0");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> m(t.values.data(), t.rows, t.cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();

  SchmidtReport r;
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  double total = 0.0;
  for (double s : r.singular_values) total += s * s;
  r.captured_mass = total;
  for (double s : r.singular_values) {
    const double p = s * s / total;
    if (p > 0.0) r.entropy -= p * std::log(p);
  }
  r.entropy = std::max(0.0, r.entropy);
  return r;
}

}  // namespace fcwave
