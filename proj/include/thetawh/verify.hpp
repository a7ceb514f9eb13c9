#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thetawh/model.hpp"
#include "thetawh/roots.hpp"
#include "thetawh/wiener_hopf.hpp"

namespace thetawh {

struct CheckResult {
  std::string name;
  std::string detail;
  double measured = 0;
  double tolerance = 0;
  bool pass = false;
  bool skipped = false;
};

/// Strict interlacing and |phi(zeta) - q| <= 1e-10 (1 + q) for the first n roots.
CheckResult check_interlacing(const ThetaFamily& f, double q, Side side, std::size_t n = 50);

/// Test points z = r e^{i t}, |z| <= radius, |Im z| >= min_dist, drawn from seed.
std::vector<Complex> factorization_points(std::size_t count, std::uint64_t seed, double radius = 5,
                                          double min_dist = 0.1);
/// Largest factorization residual over the points.
CheckResult check_factorization(const WhFactorization& w, const std::vector<Complex>& points, double tol = 1e-6);

/// Scaled errors |zeta_n - expansion| m^p (divided by ln m for logarithmic
/// orders) at m = 20, 40, 80. Fails when the scaled error grows by sqrt(2)
/// or more on both doublings.
struct AsymptoticProfile {
  std::string regime;
  std::string assignment;
  int order = 0;
  bool log_order = false;
  std::vector<int> m;
  std::vector<double> scaled;
  bool pass = false;
};
AsymptoticProfile asymptotic_profile(const ThetaFamily& f, double q, Side side);
CheckResult check_asymptotics(const ThetaFamily& f, double q, Side side);

/// chi = 5/2, sigma = 0: least-squares fit of (zeta - alpha)/beta - m^2 =
/// A m + B + E/m over m in [lo, 2 lo]; w0 = A/2, offset = beta (B - w0^2).
struct ConstantFit {
  double w0_fit = 0, w0_expected = 0;
  double offset_fit = 0, offset_expected = 0;
};
ConstantFit fit_five_halves_constants(const ThetaFamily& f, double q, Side side, int lo = 200);

/// Nonnegative weights, tail mass within mass_tol, mixture transform equal to
/// the product factor at z in {0.5, 1, 3}.
std::vector<CheckResult> check_mixture(const ThetaFamily& f, double q, Side side, const WhFactorization& w,
                                       double mass_tol = 1e-4, double transform_tol = 1e-8);

}  // namespace thetawh
