#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "fcwave/quadrature.hpp"
#include "oracles.hpp"

namespace fcwave {
namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

TEST(GaussHermite, OrderOne) {
  const auto r = gauss_hermite(1);
  ASSERT_EQ(r.nodes.size(), 1u);
  EXPECT_EQ(r.nodes[0], 0.0);
  EXPECT_NEAR(r.weights[0], kSqrtPi, 1e-15);
}

TEST(GaussHermite, OrderTwo) {
  const auto r = gauss_hermite(2);
  EXPECT_NEAR(r.nodes[0], -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.weights[0], kSqrtPi / 2.0, 1e-15);
  EXPECT_NEAR(r.weights[1], kSqrtPi / 2.0, 1e-15);
}

TEST(GaussHermite, TenthMomentOrderTwenty) {
  const auto r = gauss_hermite(20);
  const double m10 = integrate(r, [](double t) { return std::pow(t, 10); });
  EXPECT_NEAR(m10, 945.0 * kSqrtPi / 32.0, 1e-12 * m10);
  EXPECT_NEAR(m10, 52.34277, 1e-5);
}

TEST(GaussHermite, SymmetricAndNormalized) {
  for (int order : {1, 2, 3, 7, 8, 33, 64, 127, 300}) {
    const auto r = gauss_hermite(order);
    ASSERT_EQ(static_cast<int>(r.nodes.size()), order);
    for (int i = 0; i < order; ++i) {
      EXPECT_NEAR(r.nodes[i], -r.nodes[order - 1 - i], 1e-14);
      EXPECT_GT(r.weights[i], 0.0);
      if (i > 0) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
    }
    const double total = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    EXPECT_NEAR(total, kSqrtPi, 1e-13) << order;
  }
}

TEST(GaussHermite, NodesAreHermiteZeros) {
  for (int order : {5, 40, 200}) {
    const auto r = gauss_hermite(order);
    for (double t : r.nodes) {
      const auto s = detail::orthonormal_hermite(order, t);
      // relative to the size of the neighbouring polynomial value
      EXPECT_LT(std::abs(s.current), 1e-13 * std::abs(s.previous)) << order << " " << t;
    }
  }
}

TEST(GaussHermite, MomentExactness) {
  for (int k : {1, 2, 8, 32, 128}) {
    const auto r = gauss_hermite(k);
    for (int deg = 0; deg <= 2 * k - 1; ++deg) {
      const double got = integrate(r, [&](double t) { return std::pow(t, deg); });
      const double want = testing::gaussian_moment(deg);
      if (deg % 2 == 1) {
        EXPECT_NEAR(got, 0.0, 1e-13 * std::max(1.0, testing::gaussian_moment(deg + 1))) << k << " " << deg;
      } else {
        EXPECT_NEAR(got, want, 1e-12 * want) << k << " " << deg;
      }
    }
  }
}

TEST(GaussHermite, RandomPolynomialsExact) {
  for (int trial = 0; trial < 40; ++trial) {
    const int k = testing::uniform_int(1, 40);
    const int deg = testing::uniform_int(0, 2 * k - 1);
    std::vector<double> c(deg + 1);
    for (auto& x : c) x = testing::uniform(-1.0, 1.0);
    double want = 0.0, scale = 0.0;
    for (int j = 0; j <= deg; ++j) {
      want += c[j] * testing::gaussian_moment(j);
      scale += std::abs(c[j]) * testing::gaussian_moment(j + (j % 2));
    }
    const auto r = gauss_hermite(k);
    const double got = integrate(r, [&](double t) {
      double v = 0.0;
      for (int j = deg; j >= 0; --j) v = v * t + c[j];
      return v;
    });
    EXPECT_NEAR(got, want, 1e-12 * scale) << k << " " << deg;
  }
}

TEST(GaussHermite, OddMomentsVanish) {
  const auto r = gauss_hermite(31);
  for (int deg = 1; deg < 62; deg += 2) {
    const double got = integrate(r, [&](double t) { return std::pow(t, deg); });
    EXPECT_NEAR(got, 0.0, 1e-13 * std::max(1.0, testing::gaussian_moment(deg + 1)));
  }
  EXPECT_NEAR(integrate(r, [](double t) { return t; }), 0.0, 1e-13);
}

TEST(GaussHermite, RefinementStable) {
  // Gaussian times polynomial with the e^{-x^2} weight divided out:
  // exp(-1.5 (x - 0.3)^2) (1 + x^3 - x^6) / exp(-x^2).
  auto f = [](double x) { return std::exp(-0.5 * x * x + 0.9 * x - 0.135) * (1 + x * x * x - std::pow(x, 6)); };
  for (int k : {60, 80, 100}) {
    const double a = integrate(gauss_hermite(k), f);
    const double b = integrate(gauss_hermite(k + 8), f);
    EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
  }
  // Polynomial integrand: exact from k > degree / 2 onward.
  auto g = [](double x) { return 2.0 - 3.0 * x * x + std::pow(x, 8); };
  for (int k : {5, 9, 20}) EXPECT_NEAR(integrate(gauss_hermite(k), g), integrate(gauss_hermite(k + 8), g), 1e-12 * 100);
}

TEST(GaussHermite, LargestOrder) {
  const auto r = gauss_hermite(kMaxQuadratureOrder);
  double total = 0.0;
  for (int i = 0; i < kMaxQuadratureOrder; ++i) {
    EXPECT_TRUE(std::isfinite(r.nodes[i]));
    EXPECT_GE(r.weights[i], 0.0);
    EXPECT_EQ(r.nodes[i], -r.nodes[kMaxQuadratureOrder - 1 - i]);
    total += r.weights[i];
  }
  EXPECT_NEAR(total, kSqrtPi, 1e-12);
}

TEST(GaussHermite, OrderOutOfRange) {
  EXPECT_THROW(gauss_hermite(0), DomainError);
  EXPECT_THROW(gauss_hermite(-3), DomainError);
  EXPECT_THROW(gauss_hermite(kMaxQuadratureOrder + 1), DomainError);
}

TEST(Integrate, Examples) {
  const auto r = gauss_hermite(10);
  EXPECT_NEAR(integrate(r, [](double) { return 1.0; }), kSqrtPi, 1e-14);
  EXPECT_NEAR(integrate(r, [](double x) { return x * x; }), kSqrtPi / 2.0, 1e-14);
  const double mu = 1.7;
  EXPECT_NEAR(integrate(r, [](double x) { return x; }, mu, 1.0), mu * kSqrtPi, 1e-14);
}

TEST(Integrate, ScaleIsTheJacobian) {
  // integral of exp(-((x - 2)/3)^2) dx = 3 sqrt(pi)
  const auto r = gauss_hermite(4);
  EXPECT_NEAR(integrate(r, [](double) { return 1.0; }, 2.0, 3.0), 3.0 * kSqrtPi, 1e-14);
  EXPECT_THROW(integrate(r, [](double) { return 1.0; }, 0.0, 0.0), DomainError);
}

}  // namespace
}  // namespace fcwave
