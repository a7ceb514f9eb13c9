#include "thetawh/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace thetawh {
namespace {

void check_args(double x, double k) {
  if (!(x > 0)) {
    std::ostringstream os;
    os << "theta_k requires x > 0, got " << x;
    throw DomainError(os.str());
  }
  const double twice = 2 * k;
  if (!(twice >= 0 && twice <= 4 && twice == std::floor(twice))) {
    std::ostringstream os;
    os << "theta_k order must be one of 0, 1/2, 1, 3/2, 2; got " << k;
    throw DomainError(os.str());
  }
}

double log_term(double n, double x, double k) {
  return (k == 0 ? 0.0 : 2 * k * std::log(n)) - n * n * x;
}

// 2 * sum_{n>=1} n^{2k} exp(-n^2 x), truncated so the neglected tail is
// below tol.
double twice_series(double x, double k, double tol, std::int64_t max_terms) {
  const double log_inv_tol = std::log(1 / tol);
  double n_cut = std::ceil(std::sqrt(log_inv_tol / x));
  // Fixed point of N = sqrt((ln(1/tol) + 2k ln N) / x); also stay past the
  // peak of n^{2k} e^{-n^2 x}.
  for (int it = 0; it < 50; ++it) {
    const double next = std::ceil(std::sqrt((log_inv_tol + 2 * k * std::log(std::max(n_cut, 1.0))) / x));
    if (next == n_cut) break;
    n_cut = next;
  }
  n_cut = std::max({n_cut, std::ceil(std::sqrt(k / x)) + 1, 1.0});

  double bound = 0;
  for (;;) {
    if (n_cut > static_cast<double>(max_terms)) {
      std::ostringstream os;
      os << "theta_k: term cap " << max_terms << " exceeded at x = " << x;
      throw AccuracyError(os.str(), bound);
    }
    const double n1 = n_cut + 1;
    const double ratio = std::pow(1 + 1 / n1, 2 * k) * std::exp(-(2 * n1 + 1) * x);
    bound = ratio < 1 ? 2 * std::exp(log_term(n1, x, k)) / (1 - ratio)
                      : std::numeric_limits<double>::infinity();
    if (bound <= tol) break;
    n_cut = std::ceil(n_cut * 1.25) + 1;
  }

  double sum = 0;
  for (double n = n_cut; n >= 1; n -= 1) sum += std::exp(log_term(n, x, k));
  return 2 * sum;
}

}  // namespace

double theta_k_direct(double x, double k, const SeriesAccuracy& acc) {
  check_args(x, k);
  const double s = twice_series(x, k, acc.abs_tol, acc.max_terms);
  return k == 0 ? 1 + s : s;
}

double theta_0_modular(double x, const SeriesAccuracy& acc) {
  check_args(x, 0);
  const double pref = std::sqrt(std::numbers::pi / x);
  const double dual = std::numbers::pi * std::numbers::pi / x;
  return pref * (1 + twice_series(dual, 0, acc.abs_tol / pref, acc.max_terms));
}

double theta_k(double x, double k, const SeriesAccuracy& acc) {
  check_args(x, k);
  if (k == 0 && x < 1) return theta_0_modular(x, acc);
  return theta_k_direct(x, k, acc);
}

}  // namespace thetawh
