// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values that the exact computation does not
// reproduce are reported as failures with the computed numbers alongside.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fcwave/fcwave.hpp"

using namespace fcwave;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] AC%-2d %s :: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool close(double a, double b) { return std::abs(a - b) <= std::max(1e-10 * std::abs(b), 1e-13); }

// omega = 1 source at the origin; target by ratio and omega d^2.
Transition1D dimensionless(double ratio, double D, ModeIndex n) { return {{1.0, 0.0}, {ratio, std::sqrt(D)}, n}; }
Waveguide2D unit2d() { return {1.0, 1.0, 0.0, 0.0, 0.0}; }
Waveguide2D target2d(double rx, double ry, double Dx, double Dy) { return {rx, ry, 0.0, std::sqrt(Dx), std::sqrt(Dy)}; }

bool unordered_equal(std::pair<ModeIndex, ModeIndex> got, ModeIndex a, ModeIndex b) {
  return (got.first == a && got.second == b) || (got.first == b && got.second == a);
}

void ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = spectrum1d(dimensionless(3, 9, 0));
  const double elapsed = seconds_since(t0);
  const auto m = s.argmax();
  report(1, m == 13 && elapsed < 1.0, "ratio 3, omega d^2 9, n 0: argmax 13, < 1 s",
         fmt("argmax %u (P=%.12g), P(13)=%.12g, %.4f s", m, s.entries[m].probability, s.entries[13].probability,
             elapsed));
}

void ac2() {
  const auto t = dimensionless(3, 16, 3);
  const auto s = spectrum1d(t);
  const auto m = s.argmax();
  double worst = 0.0;
  bool agree = true;
  for (const auto& e : s.entries) {
    const double q = overlap_quad(t, e.n_prime);
    agree = agree && close(e.amplitude, q);
    worst = std::max(worst, std::abs(e.amplitude - q));
  }
  std::string detail = fmt("argmax %u; closed vs quadrature max |diff| %.3g over %zu levels", m, worst, s.entries.size());
  if (m != 5)
    detail += fmt("; discrepancy: P(%u)=%.12g vs P(5)=%.12g, gap %.3g", m, s.entries[m].probability,
                  s.entries[5].probability, s.entries[m].probability - s.entries[5].probability);
  report(2, m == 5 && agree, "ratio 3, omega d^2 16, n 3: argmax 5, dual paths agree", detail);
}

void ac3() {
  const auto t = spectrum2d_separable(unit2d(), target2d(2, 3, 9, 16), 0, 0);
  const auto m = t.argmax();
  report(3, unordered_equal(m, 23, 8), "separable 2D from (0,0): argmax pair {23, 8}",
         fmt("ordered (x, y) = (%u, %u), P=%.12g; P(8,23)=%.12g", m.first, m.second, t.probability(m.first, m.second),
             t.rows > 8 && t.cols > 23 ? t.probability(8, 23) : 0.0));
}

void ac4() {
  const auto t = spectrum2d_separable(unit2d(), target2d(2, 3, 16, 16), 2, 1);
  const auto m = t.argmax();
  report(4, unordered_equal(m, 8, 4), "separable 2D from (2,1): argmax pair {8, 4}",
         fmt("ordered (x, y) = (%u, %u), P=%.12g; P(8,4)=%.12g", m.first, m.second, t.probability(m.first, m.second),
             t.rows > 8 && t.cols > 4 ? t.probability(8, 4) : 0.0));
}

void ac5() {
  const auto base = fc_estimate(dimensionless(3, 9, 0));
  int within = 0;
  std::string misses;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double ratio = 1.5 + 2.5 * i / 3.0;
      const double D = 4.0 + 21.0 * j / 4.0;
      const auto t = dimensionless(ratio, D, 0);
      const long est = fc_estimate(t);
      const long peak = spectrum1d(t).argmax();
      if (std::abs(est - peak) <= 1)
        ++within;
      else
        misses += fmt(" (%.4g,%.4g):est %ld peak %ld", ratio, D, est, peak);
    }
  }
  report(5, base == 13 && within == 20, "fc_estimate 13 at ratio 3 / omega d^2 9; within 1 of argmax on 4x5 grid",
         fmt("estimate %u; %d/20 within 1;", base, within) + misses);
}

void ac6() {
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> ratio(0.2, 5.0), D(0.0, 25.0), omega(0.3, 3.0);
  std::uniform_int_distribution<int> level(0, 40);
  std::map<int, QuadratureRule> rules;
  const auto t0 = std::chrono::steady_clock::now();
  int bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double w = omega(rng);
    const Transition1D t{{w, 0.0}, {w * ratio(rng), std::sqrt(D(rng) / w)}, static_cast<ModeIndex>(level(rng))};
    const auto m = static_cast<ModeIndex>(level(rng));
    const int order = oracle_order(t.n, m);
    auto it = rules.find(order);
    if (it == rules.end()) it = rules.emplace(order, gauss_hermite(order)).first;
    const double a = overlap_closed(t, m);
    const double b = overlap_quad(t, m, it->second);
    if (!close(a, b)) ++bad;
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-3));
  }
  const double elapsed = seconds_since(t0);
  report(6, bad == 0 && elapsed < 10.0, "200 random transitions, closed vs quadrature, < 10 s",
         fmt("%d disagreements, worst scaled diff %.3g, %.3f s", bad, worst, elapsed));
}

void ac7() {
  const double eps = 1e-8;
  std::vector<double> masses{
      spectrum1d(dimensionless(3, 9, 0), eps).captured_mass,
      spectrum1d(dimensionless(3, 16, 3), eps).captured_mass,
      spectrum2d_separable(unit2d(), target2d(2, 3, 9, 16), 0, 0, eps).captured_mass,
      spectrum2d_separable(unit2d(), target2d(2, 3, 16, 16), 2, 1, eps).captured_mass,
  };
  bool ok = true;
  std::string detail;
  for (double m : masses) {
    ok = ok && m >= 1.0 - eps && m <= 1.0 + 1e-12;
    detail += fmt(" 1-mass=%.3g", 1.0 - m);
  }
  report(7, ok, "captured mass in [1 - 1e-8, 1 + 1e-12] on the four scenarios", detail);
}

void ac8() {
  const auto c = coupling_matrix({1.0, 0.0}, {3.0, 3.0}, 20, 400);
  report(8, c.orthogonality_defect < 1e-8, "Gram defect, N = 20, N' = 400", fmt("defect %.3g", c.orthogonality_defect));
}

void ac9() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> omega(0.3, 3.0), ratio(0.2, 5.0), D(0.0, 25.0), lambda(0.1, 10.0);
  std::uniform_int_distribution<int> level(0, 15);
  auto random_t = [&](ModeIndex n) {
    const double w = omega(rng);
    return Transition1D{{w, 0.0}, {w * ratio(rng), std::sqrt(D(rng) / w)}, n};
  };
  double parity = 0.0, exchange = 0.0, scale = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<ModeIndex>(level(rng));
    const auto m = static_cast<ModeIndex>(level(rng));
    const auto t = random_t(n);

    auto mirrored = t;
    mirrored.target.center = -t.target.center;
    const double sign = ((n + m) % 2) ? -1.0 : 1.0;
    parity = std::max(parity, std::abs(overlap_closed(mirrored, m) - sign * overlap_closed(t, m)));

    const Transition1D back{{t.target.omega, 0.0}, {t.source.omega, -t.target.center}, m};
    exchange = std::max(exchange, std::abs(overlap_closed(back, n) - overlap_closed(t, m)));

    const double l = lambda(rng);
    const Transition1D scaled{{t.source.omega * l, 0.0}, {t.target.omega * l, t.target.center / std::sqrt(l)}, n};
    scale = std::max(scale, std::abs(std::pow(overlap_closed(scaled, m), 2) - std::pow(overlap_closed(t, m), 2)));
  }
  report(9, parity <= 1e-12 && exchange <= 1e-12 && scale <= 1e-12, "parity, exchange, scale invariance (100 each)",
         fmt("max |diff| parity %.3g, exchange %.3g, scale %.3g", parity, exchange, scale));
}

void ac10() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(0.4, 3.0), c(-2.0, 2.0);
  std::uniform_int_distribution<int> level(0, 10);
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    const Waveguide2D s{w(rng), w(rng), 0.0, c(rng), c(rng)};
    const Waveguide2D t{w(rng), w(rng), 0.0, c(rng), c(rng)};
    const auto nx = ModeIndex(level(rng)), ny = ModeIndex(level(rng));
    const auto k1 = ModeIndex(level(rng)), k2 = ModeIndex(level(rng));
    const double want = overlap_closed({{s.omega_x, s.center_x}, {t.omega_x, t.center_x}, nx}, k1) *
                        overlap_closed({{s.omega_y, s.center_y}, {t.omega_y, t.center_y}, ny}, k2);
    if (!close(overlap_coupled(s, t, nx, ny, k1, k2), want)) ++bad;
  }
  const double flat = schmidt_report(coupled_tensor(unit2d(), target2d(2, 3, 1, 2), 0, 0)).entropy;
  const double flat_sep = schmidt_report(spectrum2d_separable(unit2d(), target2d(2, 3, 9, 16), 0, 0)).entropy;
  const double coupled =
      schmidt_report(coupled_tensor({1.0, 2.0, 0.0, 0.0, 0.0}, {2.0, 1.0, 0.5, 1.0, 1.0}, 0, 0)).entropy;
  report(10, bad == 0 && flat < 1e-10 && flat_sep < 1e-10 && coupled > 1e-10,
         "gamma = 0 reduction (50 cases), entropy 0 without coupling, > 0 with",
         fmt("%d disagreements; entropy %.3g / %.3g uncoupled, %.6g coupled", bad, flat, flat_sep, coupled));
}

void ac11() {
  int bad = 0;
  double worst = 0.0;
  for (int k : {1, 2, 8, 32, 128}) {
    const auto rule = gauss_hermite(k);
    for (int deg = 0; deg <= 2 * k - 1; ++deg) {
      const double got = integrate(rule, [&](double t) { return std::pow(t, deg); });
      double want = 0.0, ref = std::sqrt(std::numbers::pi);
      for (int j = 1; j <= (deg + 1) / 2; ++j) ref *= (2.0 * j - 1.0) / 2.0;
      if (deg % 2 == 0) want = ref;
      // odd moments vanish; measure against the neighbouring even moment
      const double err = std::abs(got - want) / ref;
      worst = std::max(worst, err);
      if (err > 1e-12) ++bad;
    }
  }
  report(11, bad == 0, "moment exactness, k in {1, 2, 8, 32, 128}", fmt("%d failures, worst relative %.3g", bad, worst));
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "exception", e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
