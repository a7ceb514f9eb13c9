#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "thetawh/model.hpp"
#include "thetawh/roots.hpp"
#include "thetawh/types.hpp"

namespace thetawh {

struct WhFactorization {
  double q = 0;
  RootSet pos;
  RootSet neg;
  double product_tol = 0;
  double radius = 0;
  std::function<Complex(Complex)> phi;  // closed-form Laplace exponent
};

WhFactorization factorize(const ThetaFamily& family, double q, double product_tol = 1e-10,
                          double radius = 10);
WhFactorization factorize(const SeriesProcess& finite, double q);

/// E[exp(-z S)] (side pos) or E[exp(z I)] (side neg), Re(z) >= 0.
Complex wh_factor(const WhFactorization& f, Complex z, Side side);

/// prod (1 + z/rho_n) / (1 + z/zeta_n) with the tail model; meromorphic in z.
Complex factor_product(const RootSet& roots, Complex z);

/// |q/(q - phi(z)) - F+(-z) F-(z)| / |q/(q - phi(z))|
double factorization_residual(const WhFactorization& f, Complex z);

/// Law of S_{e(q)} (or -I_{e(q)}): atom c0 plus sum c_n Exp(zeta_n); the
/// unresolved mass is tail_mass_bound, lumped at tail_rate in transforms.
struct SupremumLaw {
  double q = 0;
  Side side = Side::Positive;
  double c0 = 0;
  std::vector<double> weights;
  std::vector<double> rates;
  double tail_mass_bound = 0;
  double tail_rate = 0;

  std::size_t n_terms() const { return weights.size(); }
};

SupremumLaw mixture_coefficients(const RootSet& roots, std::size_t n);
SupremumLaw mixture_coefficients(const WhFactorization& f, Side side, std::size_t n);

struct LawRequest {
  double mass_tol = 1e-4;
  double transform_tol = 1e-9;
  double radius = 5;
  std::size_t max_terms = 4096;
  std::size_t max_roots = 16384;  // cost of each coefficient is linear in this
};

/// Grows the number of terms until the unresolved mass meets both tolerances.
SupremumLaw supremum_law(const ThetaFamily& family, double q, Side side, const LawRequest& req = {});
SupremumLaw supremum_law(const SeriesProcess& finite, double q, Side side);

double sup_cdf(const SupremumLaw& law, double x);
double sup_density(const SupremumLaw& law, double x);
/// c0 + sum c_n zeta_n / (zeta_n + z) + tail mass at tail_rate.
Complex mixture_transform(const SupremumLaw& law, Complex z);

}  // namespace thetawh
