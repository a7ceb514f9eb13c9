#include "thetawh/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thetawh/errors.hpp"
#include "thetawh/quadrature.hpp"

namespace thetawh {

namespace {

ComplexR log1p_c(ComplexR w) {
  const Real re = std::log1p(2 * w.real() + std::norm(w)) / 2;
  const Real im = std::atan2(w.imag(), 1 + w.real());
  return {re, im};
}

// Neumaier-compensated complex sum.
struct CompensatedSum {
  ComplexR sum{0};
  ComplexR comp{0};
  void add(ComplexR x) {
    Real s = sum.real(), c = comp.real();
    add_part(s, c, x.real());
    Real si = sum.imag(), ci = comp.imag();
    add_part(si, ci, x.imag());
    sum = {s, si};
    comp = {c, ci};
  }
  static void add_part(Real& s, Real& c, Real x) {
    const Real t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  ComplexR value() const { return sum + comp; }
};

// sum_{n > N} g(n) over the tail model: explicit terms up to K, then the
// remainder as an integral in u = 1/x with the first Euler-Maclaurin term.
template <class G>
ComplexR tail_sum(std::size_t N, G g) {
  const std::size_t K = N + 64;
  CompensatedSum acc;
  for (std::size_t n = K; n > N; --n) acc.add(g(Real(n)));
  const Real x0 = Real(K) + Real(0.5);
  const ComplexR integral = integrate(
      [&](Real u) {
        const Real x = 1 / u;
        return g(x) * (x * x);
      },
      Real(0), 1 / x0, 8);
  const Real dx = Real(0.25);
  const ComplexR deriv = (g(x0 + dx) - g(x0 - dx)) / (2 * dx);
  acc.add(integral + deriv / Real(24));
  return acc.value();
}

struct TailRoot {
  Real pole, zeta, right;
};

TailRoot tail_root(const AsymptoticTail& t, Real n) {
  const Offsets o = t.offsets(n);
  const Real pole = t.pole(n);
  return {pole, pole - o.right, o.right};
}

ComplexR log_factor(const RootSet& rs, ComplexR z) {
  CompensatedSum acc;
  for (std::size_t i = rs.size(); i-- > 0;) {
    const Real zeta = rs.zeros[i];
    if (i < rs.poles.size()) {
      const Real rho = rs.poles[i];
      acc.add(log1p_c(-z * rs.offsets[i].right / (rho * (zeta + z))));
    } else {
      acc.add(-log1p_c(z / zeta));
    }
  }
  if (!rs.complete && rs.tail) {
    const AsymptoticTail& t = *rs.tail;
    acc.add(tail_sum(rs.size(), [&](Real n) {
      const TailRoot r = tail_root(t, n);
      return log1p_c(-z * r.right / (r.pole * (r.zeta + z)));
    }));
  }
  return acc.value();
}

Real atom(const RootSet& rs) {
  if (rs.size() == 0) return 1;
  if (rs.zeros.size() > rs.poles.size()) return 0;
  CompensatedSum acc;
  for (std::size_t i = 0; i < rs.size(); ++i) acc.add(std::log1p(-rs.offsets[i].right / rs.poles[i]));
  if (!rs.complete) {
    if (!rs.tail) return 0;
    const AsymptoticTail& t = *rs.tail;
    // Roots that hug the pole below them leave a gap-sized factor per term
    // and the product diverges to 0.
    if (t.kind == AsymptoticTail::Kind::FrozenFraction || t.right_of_pole) return 0;
    acc.add(tail_sum(rs.size(), [&](Real n) {
      const TailRoot r = tail_root(t, n);
      return ComplexR(std::log1p(-r.right / r.pole), 0);
    }));
  }
  return std::exp(acc.value().real());
}

}  // namespace

WhFactorization factorize(const ThetaFamily& family, double q, double product_tol, double radius) {
  const ThetaFamily f = family.calibrated ? family : calibrate_gamma_and_drift(family);
  WhFactorization w;
  w.q = q;
  w.product_tol = product_tol;
  w.radius = radius;
  w.pos = roots_to_accuracy(f, q, Side::Positive, product_tol, radius);
  w.neg = roots_to_accuracy(f, q, Side::Negative, product_tol, radius);
  w.phi = [f](Complex z) { return laplace_exponent(f, z); };
  return w;
}

WhFactorization factorize(const SeriesProcess& p, double q) {
  WhFactorization w;
  w.q = q;
  w.pos = roots_to_accuracy(p, q, Side::Positive);
  w.neg = roots_to_accuracy(p, q, Side::Negative);
  w.phi = [p](Complex z) { return laplace_exponent(p, z); };
  return w;
}

Complex factor_product(const RootSet& rs, Complex zd) {
  if (zd == Complex(0, 0)) return 1;
  const ComplexR v = std::exp(log_factor(rs, ComplexR(zd.real(), zd.imag())));
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

Complex wh_factor(const WhFactorization& f, Complex z, Side side) {
  if (z.real() < 0) throw DomainError("wh_factor: Re(z) must be >= 0");
  return factor_product(side == Side::Positive ? f.pos : f.neg, z);
}

double factorization_residual(const WhFactorization& f, Complex z) {
  if (z == Complex(0, 0)) return 0;
  const Complex gap = f.q - f.phi(z);
  if (std::abs(gap) <= 1e-14 * f.q) throw SingularityError("factorization_residual: z is a root of q - phi");
  const Complex lhs = f.q / gap;
  const Complex rhs = factor_product(f.pos, -z) * factor_product(f.neg, z);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

SupremumLaw mixture_coefficients(const RootSet& rs, std::size_t n) {
  if (n > rs.size()) throw DomainError("mixture_coefficients: n exceeds the refined roots");
  SupremumLaw law;
  law.q = rs.q;
  law.side = rs.side;
  law.c0 = static_cast<double>(atom(rs));
  const std::size_t size = rs.size();
  auto pole = [&](std::size_t k) { return rs.poles[k]; };
  Real total = law.c0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real zn = rs.zeros[i];
    CompensatedSum acc;
    if (i < rs.poles.size()) acc.add(ComplexR(std::log(rs.offsets[i].right / pole(i)), 0));
    for (std::size_t k = 0; k < size; ++k) {
      if (k == i) continue;
      const Real zk = rs.zeros[k];
      // Distances built from offsets so neighbouring roots keep precision.
      Real d_pole, d_zero;  // rho_k - zeta_n, zeta_k - zeta_n
      if (k < i) {
        const Real span = pole(i - 1) - pole(k);
        d_pole = -(rs.offsets[i].left + span);
        d_zero = -(rs.offsets[k].right + span + rs.offsets[i].left);
      } else {
        const bool k_has_pole = k < rs.poles.size();
        const Real span = (k_has_pole ? pole(k) : pole(k - 1)) - pole(i);
        d_pole = rs.offsets[i].right + span;
        d_zero = rs.offsets[i].right + (pole(k - 1) - pole(i)) + rs.offsets[k].left;
        if (!k_has_pole) {
          acc.add(ComplexR(std::log(zk / d_zero), 0));
          continue;
        }
      }
      if ((d_pole > 0) != (d_zero > 0)) {
        std::ostringstream os;
        os << "mixture_coefficients: interlacing broken between roots " << i + 1 << " and " << k + 1;
        throw StructuralError(os.str());
      }
      const Real rho = pole(k);
      const Real arg = zn * rs.offsets[k].right / (rho * d_zero);
      acc.add(ComplexR(std::abs(arg) < Real(0.5) ? std::log1p(arg) : std::log(zk * d_pole / (rho * d_zero)), 0));
    }
    if (!rs.complete && rs.tail) {
      const AsymptoticTail& t = *rs.tail;
      acc.add(tail_sum(size, [&](Real m) {
        const TailRoot r = tail_root(t, m);
        return ComplexR(std::log1p(zn * r.right / (r.pole * (r.zeta - zn))), 0);
      }));
    }
    const Real c = std::exp(acc.value().real());
    law.weights.push_back(static_cast<double>(c));
    law.rates.push_back(static_cast<double>(zn));
    total += c;
  }
  law.tail_mass_bound = static_cast<double>(1 - total);
  if (law.tail_mass_bound < -1e-9) {
    std::ostringstream os;
    os << "mixture_coefficients: total mass exceeds 1 by " << -law.tail_mass_bound;
    throw StructuralError(os.str());
  }
  law.tail_mass_bound = std::max(law.tail_mass_bound, 0.0);
  if (n < size)
    law.tail_rate = static_cast<double>(rs.zeros[n]);
  else if (!rs.complete && rs.tail)
    law.tail_rate = static_cast<double>(rs.tail->zeta(Real(n + 1)));
  else
    law.tail_rate = n > 0 ? law.rates.back() : 0;
  return law;
}

SupremumLaw mixture_coefficients(const WhFactorization& f, Side side, std::size_t n) {
  return mixture_coefficients(side == Side::Positive ? f.pos : f.neg, n);
}

namespace {

bool law_converged(const SupremumLaw& law, const LawRequest& req) {
  if (law.tail_mass_bound > req.mass_tol) return false;
  if (law.tail_mass_bound == 0) return true;
  return law.tail_mass_bound * req.radius / (law.tail_rate + req.radius) <= req.transform_tol;
}

}  // namespace

SupremumLaw supremum_law(const ThetaFamily& family, double q, Side side, const LawRequest& req) {
  const ThetaFamily f = family.calibrated ? family : calibrate_gamma_and_drift(family);
  RootSet rs = roots_to_accuracy(f, q, side, 1e-10, std::max(10.0, req.radius), req.max_roots);
  std::size_t n = std::min<std::size_t>(32, rs.size());
  for (;;) {
    if (n > rs.size()) extend_roots(f, rs, n);
    const SupremumLaw law = mixture_coefficients(rs, std::min(n, rs.size()));
    if (law_converged(law, req) || rs.complete || n >= req.max_terms) return law;
    n *= 2;
  }
}

SupremumLaw supremum_law(const SeriesProcess& p, double q, Side side) {
  const RootSet rs = roots_to_accuracy(p, q, side);
  return mixture_coefficients(rs, rs.size());
}

double sup_cdf(const SupremumLaw& law, double x) {
  if (x < 0 || std::isnan(x)) throw DomainError("sup_cdf: x must be >= 0");
  Real v = law.c0;
  for (std::size_t i = 0; i < law.weights.size(); ++i)
    v += law.weights[i] * -std::expm1(-Real(law.rates[i]) * x);
  return std::clamp(static_cast<double>(v), 0.0, 1.0);
}

double sup_density(const SupremumLaw& law, double x) {
  if (!(x > 0)) throw DomainError("sup_density: x must be > 0");
  Real v = 0;
  for (std::size_t i = 0; i < law.weights.size(); ++i)
    v += law.weights[i] * Real(law.rates[i]) * std::exp(-Real(law.rates[i]) * x);
  return static_cast<double>(v);
}

Complex mixture_transform(const SupremumLaw& law, Complex zd) {
  const ComplexR z(zd.real(), zd.imag());
  ComplexR v = law.c0;
  for (std::size_t i = 0; i < law.weights.size(); ++i) {
    const Real r = law.rates[i];
    v += Real(law.weights[i]) * r / (r + z);
  }
  if (law.tail_mass_bound > 0 && law.tail_rate > 0)
    v += Real(law.tail_mass_bound) * Real(law.tail_rate) / (Real(law.tail_rate) + z);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace thetawh
