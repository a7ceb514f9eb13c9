#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "thetawh/errors.hpp"

namespace thetawh {

struct SeriesAccuracy {
  double abs_tol = 1e-14;
  std::int64_t max_terms = 1'000'000;
};

/// Theta_k(x) = delta_{k,0} + 2 sum_{n>=1} n^{2k} exp(-n^2 x) for
/// k in {0, 1/2, 1, 3/2, 2}. For k = 0 and x < 1 the Jacobi transform is used.
double theta_k(double x, double k, const SeriesAccuracy& acc = {});

/// Direct summation route, any x > 0.
double theta_k_direct(double x, double k, const SeriesAccuracy& acc = {});

/// sqrt(pi/x) * theta_3(0, exp(-pi^2/x)), the modular route for k = 0.
double theta_0_modular(double x, const SeriesAccuracy& acc = {});

namespace detail {

template <class T>
constexpr T pi_v = std::numbers::pi_v<T>;

template <class T>
std::complex<T> expm1(std::complex<T> z) {
  using std::cos;
  using std::exp;
  using std::sin;
  const T x = z.real();
  const T y = z.imag();
  const T em = std::expm1(x);
  const T s = sin(y / 2);
  return {em * cos(y) - 2 * s * s, exp(x) * sin(y)};
}

// Coefficients B_{2k} / (2k), k = 1..10.
template <class T>
constexpr T kDigammaAsymptotic[10] = {
    T(1) / T(12),          T(-1) / T(120),       T(1) / T(252),
    T(-1) / T(240),        T(1) / T(132),        T(-691) / T(32760),
    T(1) / T(12),          T(-3617) / T(8160),   T(43867) / T(14364),
    T(-174611) / T(6600)};

template <class Z>
Z digamma_asymptotic(Z z) {
  using std::log;
  const Z inv2 = Z(1) / (z * z);
  using T = decltype(std::abs(z));
  Z poly = Z(kDigammaAsymptotic<T>[9]);
  for (int k = 8; k >= 0; --k) poly = poly * inv2 + Z(kDigammaAsymptotic<T>[k]);
  return log(z) - Z(1) / (Z(2) * z) - poly * inv2;
}

}  // namespace detail

/// cot(pi x) with exact argument reduction modulo 1.
template <class T>
T cot_pi(T x) {
  using std::cos;
  using std::nearbyint;
  using std::sin;
  const T r = x - nearbyint(x);
  if (r == 0) {
    std::ostringstream os;
    os << "cot(pi x) singular at x = " << static_cast<double>(x);
    throw SingularityError(os.str());
  }
  const T a = detail::pi_v<T> * r;
  return cos(a) / sin(a);
}

template <class T>
std::complex<T> cot_pi(std::complex<T> z) {
  using std::nearbyint;
  const std::complex<T> red(z.real() - nearbyint(z.real()), z.imag());
  if (red.imag() < 0) return std::conj(cot_pi(std::conj(red)));
  if (red == std::complex<T>(0)) throw SingularityError("cot(pi z) singular at an integer");
  const std::complex<T> i(0, 1);
  const std::complex<T> em = detail::expm1(T(2) * i * detail::pi_v<T> * red);
  return i * (T(2) + em) / em;
}

/// Real digamma. Reflection below 1/2, recurrence up to 12, then the
/// Stirling-type expansion.
template <class T>
T digamma(T x) {
  using std::floor;
  using std::log;
  if (x <= 0 && x == floor(x)) {
    std::ostringstream os;
    os << "digamma pole at " << static_cast<double>(x);
    throw DomainError(os.str());
  }
  if (x < T(0.5)) return digamma(T(1) - x) - detail::pi_v<T> * cot_pi(x);
  T acc = 0;
  while (x < T(12)) {
    acc -= T(1) / x;
    x += 1;
  }
  return acc + detail::digamma_asymptotic(x);
}

/// Principal complex digamma.
template <class T>
std::complex<T> digamma(std::complex<T> z) {
  using std::abs;
  using std::nearbyint;
  if (z.real() < T(0.5)) {
    const T n = nearbyint(z.real());
    if (n <= 0 && abs(z - std::complex<T>(n, 0)) < T(1e-15) * (1 + abs(n))) {
      std::ostringstream os;
      os << "digamma pole at " << static_cast<double>(n);
      throw DomainError(os.str());
    }
    return digamma(std::complex<T>(1) - z) - detail::pi_v<T> * cot_pi(z);
  }
  std::complex<T> acc(0);
  while (abs(z) < T(12)) {
    acc -= std::complex<T>(1) / z;
    z += T(1);
  }
  return acc + detail::digamma_asymptotic(z);
}

/// coth via exp(-2w), which never overflows for Re(w) >= 0.
template <class T>
std::complex<T> coth_stable(std::complex<T> w) {
  using std::abs;
  using std::nearbyint;
  if (w.real() < 0) return -coth_stable(-w);
  const T n = nearbyint(w.imag() / detail::pi_v<T>);
  if (abs(w - std::complex<T>(0, n * detail::pi_v<T>)) < T(1e-12)) {
    std::ostringstream os;
    os << "coth pole at i*pi*" << static_cast<double>(n);
    throw SingularityError(os.str());
  }
  const std::complex<T> em = detail::expm1(T(-2) * w);
  return T(-1) - T(2) / em;
}

template <class T>
T coth_stable(T x) {
  if (x == 0) throw SingularityError("coth pole at 0");
  if (x < 0) return -coth_stable(-x);
  return T(-1) - T(2) / std::expm1(T(-2) * x);
}

/// psi(i sqrt(w)) + psi(-i sqrt(w)), evaluated as psi(1 + i sqrt(w)) +
/// psi(1 - i sqrt(w)); even in sqrt(w), so the branch does not matter.
template <class T>
std::complex<T> even_digamma_pair(std::complex<T> w) {
  using std::abs;
  using std::nearbyint;
  using std::sqrt;
  if (w.real() < T(-0.5)) {
    const T n = nearbyint(sqrt(-w.real()));
    if (n >= 1 && abs(w + n * n) < T(1e-12) * n * n) {
      std::ostringstream os;
      os << "even_digamma_pair pole at w = -" << static_cast<double>(n * n);
      throw SingularityError(os.str());
    }
  }
  const std::complex<T> i(0, 1);
  const std::complex<T> s = sqrt(w);
  return digamma(T(1) + i * s) + digamma(T(1) - i * s);
}

}  // namespace thetawh
