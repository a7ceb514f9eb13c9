#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "thetawh/errors.hpp"
#include "thetawh/quadrature.hpp"
#include "thetawh/specfun.hpp"

using namespace thetawh;
using C = std::complex<double>;

namespace {
constexpr double kEuler = 0.57721566490153286061;
}

TEST(Theta, DirectSumAtOne) {
  // 1 + 2 sum exp(-n^2), 30-digit reference
  EXPECT_NEAR(theta_k(1.0, 0), 1.7726372048266521, 1e-15);
  EXPECT_NEAR(theta_k_direct(1.0, 0), 1.7726372048266521, 1e-15);
}

TEST(Theta, ModularAgreesWithDirect) {
  for (double x = 0.1; x <= 10.0; x *= 1.3) EXPECT_NEAR(theta_0_modular(x), theta_k_direct(x, 0), 1e-12) << x;
  for (double x : {0.5, 1.0, 2.0}) EXPECT_NEAR(theta_0_modular(x), theta_k_direct(x, 0), 1e-12);
}

TEST(Theta, PositiveAndDecreasing) {
  for (double k : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    double prev = INFINITY;
    for (double x = 0.05; x < 20; x *= 1.25) {
      const double v = theta_k(x, k);
      EXPECT_GT(v, 0) << k << " " << x;
      EXPECT_LT(v, prev) << k << " " << x;
      prev = v;
    }
  }
}

TEST(Theta, VanishesForLargeX) {
  EXPECT_LT(theta_k(60.0, 1), 1e-25);
  EXPECT_GT(theta_k(60.0, 1), 0);
}

TEST(Theta, IntegerOrderIsDerivative) {
  // Theta_1 = -Theta_0', Theta_2 = Theta_0''
  for (double x : {0.3, 1.0, 2.5}) {
    double prev_err = INFINITY;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      const double d1 = (theta_k(x + h, 0) - theta_k(x - h, 0)) / (2 * h);
      const double err = std::abs(-d1 - theta_k(x, 1));
      EXPECT_LT(err, prev_err);
      prev_err = err;
    }
    EXPECT_LT(prev_err, 1e-4 * theta_k(x, 1));
    const double h = 1e-3;
    const double d2 = (theta_k(x + h, 0) - 2 * theta_k(x, 0) + theta_k(x - h, 0)) / (h * h);
    EXPECT_NEAR(d2, theta_k(x, 2), 1e-4 * theta_k(x, 2));
  }
}

TEST(Theta, Errors) {
  EXPECT_THROW(theta_k(0.0, 0), DomainError);
  EXPECT_THROW(theta_k(-1.0, 1), DomainError);
  SeriesAccuracy tight;
  tight.max_terms = 3;
  EXPECT_THROW(theta_k_direct(1e-4, 2, tight), AccuracyError);
}

TEST(Digamma, KnownValues) {
  EXPECT_NEAR(digamma(1.0), -kEuler, 1e-15);
  EXPECT_NEAR(digamma(0.5), -1.963510026021423479, 1e-14);
  EXPECT_NEAR(digamma(2.5), 0.7031566406452431872, 1e-14);
  const C a = digamma(C(2, 3));
  EXPECT_NEAR(a.real(), 1.2079807107101508808, 1e-14);
  EXPECT_NEAR(a.imag(), 1.1041296805875762097, 1e-14);
  const C b = digamma(C(-2.5, 0.5));
  EXPECT_NEAR(b.real(), 1.1165080219699073014, 1e-13);
  EXPECT_NEAR(b.imag(), 2.7175825969005915157, 1e-13);
}

TEST(Digamma, PartialFractionSeries) {
  // -gamma - 1/x + x sum 1/(n(n+x)); remainder ~ x/(N + 1/2)
  for (double x : {0.5, 1.0, 2.5}) {
    long double s = 0;
    const long N = 2000000;
    for (long n = N; n >= 1; --n) s += 1.0L / (n * (n + x));
    const double series = -kEuler - 1 / x + x * static_cast<double>(s) + x / (N + 0.5);
    EXPECT_NEAR(digamma(x), series, 1e-9) << x;
  }
}

TEST(Digamma, RecurrenceAndConjugation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int i = 0; i < 200; ++i) {
    const C z(u(rng), u(rng));
    const C lhs = digamma(z + 1.0) - digamma(z);
    EXPECT_LT(std::abs(lhs - 1.0 / z), 1e-12 * std::max(1.0, std::abs(1.0 / z))) << z;
    EXPECT_LT(std::abs(std::conj(digamma(z)) - digamma(std::conj(z))), 1e-13 * std::abs(digamma(z)));
  }
}

TEST(Digamma, Poles) {
  EXPECT_THROW(digamma(0.0), DomainError);
  EXPECT_THROW(digamma(-3.0), DomainError);
  EXPECT_THROW(digamma(C(-2, 0)), DomainError);
}

TEST(Coth, Values) {
  EXPECT_EQ(coth_stable(700.0), 1.0);
  EXPECT_EQ(coth_stable(C(700, 0)).real(), 1.0);
  EXPECT_NEAR(coth_stable(1.0), 1.3130352854993313036, 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5);
  for (int i = 0; i < 100; ++i) {
    const C w(u(rng), u(rng));
    EXPECT_NEAR((coth_stable(w) + coth_stable(std::conj(w))).imag(), 0.0, 1e-14);
    EXPECT_LT(std::abs(coth_stable(w) - std::cosh(w) / std::sinh(w)), 1e-13 * std::abs(coth_stable(w)));
  }
}

TEST(Coth, Poles) {
  EXPECT_THROW(coth_stable(C(0, std::numbers::pi)), SingularityError);
  EXPECT_THROW(coth_stable(0.0), SingularityError);
}

TEST(EvenDigammaPair, Value) {
  EXPECT_NEAR(even_digamma_pair(C(1, 0)).real(), 0.18930064124495395454, 1e-14);
  EXPECT_NEAR(even_digamma_pair(C(1, 0)).imag(), 0.0, 1e-15);
}

TEST(EvenDigammaPair, BranchEvenAndConjugate) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-8, 8);
  const C i(0, 1);
  for (int k = 0; k < 100; ++k) {
    const C w(u(rng), u(rng));
    const C s = std::sqrt(w);
    const C plus = digamma(i * s) + digamma(-i * s);
    const C minus = digamma(-i * s) + digamma(i * s);
    const C v = even_digamma_pair(w);
    EXPECT_LT(std::abs(v - plus), 1e-12 * std::max(1.0, std::abs(v))) << w;
    EXPECT_LT(std::abs(v - minus), 1e-12 * std::max(1.0, std::abs(v))) << w;
    EXPECT_LT(std::abs(std::conj(v) - even_digamma_pair(std::conj(w))), 1e-13 * std::max(1.0, std::abs(v)));
  }
}

TEST(EvenDigammaPair, Poles) {
  EXPECT_THROW(even_digamma_pair(C(-4, 0)), SingularityError);
  EXPECT_NO_THROW(even_digamma_pair(C(0, 0)));
}

TEST(CotPi, ExactReduction) {
  EXPECT_NEAR(cot_pi(0.25), 1.0, 1e-15);
  EXPECT_NEAR(cot_pi(1e6 + 0.25), 1.0, 1e-9);
  EXPECT_THROW(cot_pi(3.0), SingularityError);
  const C z(0.3, 0.7);
  EXPECT_LT(std::abs(cot_pi(z) - std::cos(std::numbers::pi * z) / std::sin(std::numbers::pi * z)), 1e-13);
}

TEST(Quadrature, GaussLegendre) {
  const GaussRule r = gauss_legendre(10);
  Real sum = 0;
  for (int i = 0; i < 10; ++i) sum += r.weights[i];
  EXPECT_NEAR(static_cast<double>(sum), 2.0, 1e-16);
  // exact for degree 19
  const Real v = integrate([](Real x) { return std::pow(x, 19) + x * x; }, 0, 1, 1, r);
  EXPECT_NEAR(static_cast<double>(v), 0.05 + 1.0 / 3, 1e-16);
  EXPECT_NEAR(static_cast<double>(integrate([](Real x) { return std::exp(-x); }, 0, 30)), 1 - std::exp(-30.0), 1e-15);
}
