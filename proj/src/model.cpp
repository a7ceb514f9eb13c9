#include "thetawh/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "thetawh/errors.hpp"
#include "thetawh/quadrature.hpp"
#include "thetawh/specfun.hpp"

namespace thetawh {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

// Anchor integer j of pole n: pole(n) = alpha + beta j^2.
long long anchor_index(Chi chi, std::size_t n) {
  return chi == Chi::Half ? static_cast<long long>(n) - 1 : static_cast<long long>(n);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// pi s coth(pi s) for real s >= 0.
Real s_coth(Real s) {
  if (s < Real(1e-10)) return 1 + kPi * kPi * s * s / 3;
  return kPi * s * coth_stable(kPi * s);
}

Real even_pair_real(Real s) { return 2 * digamma(ComplexR(1, s)).real(); }

Real side_kernel(Chi chi, Real v) { return detail::theta_kernel_real(chi, 0, v); }

// Jump part s (c1 K(w1) + c2 K(w2)) at real x, with gamma not yet applied.
Real jump_part(const ThetaFamily& f, Real x) {
  Real sum = 0;
  if (f.c1 > 0) sum += f.c1 * side_kernel(f.chi, (x - f.alpha1) / f.beta1);
  if (f.c2 > 0) sum += f.c2 * side_kernel(f.chi, (-x - f.alpha2) / f.beta2);
  return detail::theta_kernel_sign(f.chi) * sum;
}

void check_pole(const ThetaFamily& f, SideParams side, ComplexR z, const char* name) {
  if (!(side.c > 0)) return;
  const Real v = (z.real() - side.alpha) / side.beta;
  if (v < -1) return;
  const long long j = std::llround(std::sqrt(std::max<Real>(v, 0)));
  for (long long jj = std::max(0LL, j - 1); jj <= j + 1; ++jj) {
    if (jj == 0 && f.chi != Chi::Half) continue;
    const Real pole = side.alpha + side.beta * Real(jj) * Real(jj);
    if (std::abs(z - ComplexR(pole, 0)) < Real(1e-10) * pole) {
      std::ostringstream os;
      os << "laplace_exponent: z within 1e-10 relative of pole " << name << "_"
         << (f.chi == Chi::Half ? jj + 1 : jj) << " = " << static_cast<double>(pole);
      throw SingularityError(os.str());
    }
  }
}

// sum_{n=1}^{N} g(term n) plus, for generated sides, an integral estimate of
// the remainder with the first Euler-Maclaurin correction.
template <class T>
struct SideSum {
  T value{};
  T tail{};
  Real bound = 0;
};

template <class T, class G>
SideSum<T> sum_side(const SeriesSide& side, std::size_t n_terms, G g) {
  SideSum<T> out;
  if (side.empty()) return out;
  const std::size_t n = side.is_finite() ? side.size() : std::max<std::size_t>(n_terms, 1);
  const std::size_t top = std::min(n, side.size());
  Real abs_sum = 0;
  for (std::size_t i = top; i >= 1; --i) {
    const T t = g(side(i));
    out.value += t;
    abs_sum += std::abs(t);
  }
  out.bound = 64 * std::numeric_limits<Real>::epsilon() * abs_sum;
  if (side.is_finite()) return out;

  const Real x0 = Real(top) + Real(0.5);
  auto h = [&](Real x) { return g(side.smooth(x)); };
  const T integral = integrate(
      [&](Real u) {
        const Real x = 1 / u;
        return h(x) * (x * x);
      },
      Real(0), 1 / x0, 8);
  const Real dx = Real(0.25);
  const T deriv = (h(x0 + dx) - h(x0 - dx)) / (2 * dx);
  out.tail = integral + deriv / Real(24);
  out.bound += std::abs(deriv) / 24;
  return out;
}

// First index whose smooth tail stays clear of a singularity at rho = w.
std::size_t safe_terms(const SeriesSide& side, ComplexR w, std::size_t requested) {
  if (side.empty() || side.is_finite()) return requested;
  std::size_t n = std::max<std::size_t>(requested, 1);
  while (n < (std::size_t(1) << 40)) {
    const ExpTerm t = side.smooth(Real(n) + Real(0.5));
    if (std::abs(ComplexR(t.rho, 0) - w) > t.rho / 2 && t.rho > 2 * std::abs(w)) break;
    n *= 2;
  }
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------

double chi_value(Chi chi) {
  switch (chi) {
    case Chi::Half: return 0.5;
    case Chi::One: return 1.0;
    case Chi::ThreeHalves: return 1.5;
    case Chi::Two: return 2.0;
    case Chi::FiveHalves: return 2.5;
  }
  return 0;
}

Chi chi_from_value(double value) {
  for (Chi c : {Chi::Half, Chi::One, Chi::ThreeHalves, Chi::Two, Chi::FiveHalves})
    if (chi_value(c) == value) return c;
  std::ostringstream os;
  os << "must be one of 0.5, 1, 1.5, 2, 2.5; got " << value;
  throw ValidationError("chi", os.str());
}

ThetaFamily ThetaFamily::mirrored() const {
  ThetaFamily m = *this;
  std::swap(m.c1, m.c2);
  std::swap(m.alpha1, m.alpha2);
  std::swap(m.beta1, m.beta2);
  m.mu = -mu;
  m.rho_drift = -rho_drift;
  return m;
}

void validate(const ThetaFamily& f) {
  if (!finite_all({f.sigma, f.mu, f.c1, f.c2, f.alpha1, f.alpha2, f.beta1, f.beta2}))
    throw ValidationError("params", "all parameters must be finite");
  if (f.sigma < 0) throw ValidationError("sigma", "must be >= 0");
  if (f.c1 < 0) throw ValidationError("c1", "must be >= 0");
  if (f.c2 < 0) throw ValidationError("c2", "must be >= 0");
  if (!(f.alpha1 > 0)) throw ValidationError("alpha1", "must be > 0");
  if (!(f.alpha2 > 0)) throw ValidationError("alpha2", "must be > 0");
  if (!(f.beta1 > 0)) throw ValidationError("beta1", "must be > 0");
  if (!(f.beta2 > 0)) throw ValidationError("beta2", "must be > 0");
}

ThetaFamily calibrate_gamma_and_drift(ThetaFamily f) {
  validate(f);
  Real gamma = 0;
  if (f.c1 > 0) gamma += f.c1 * side_kernel(f.chi, -Real(f.alpha1) / f.beta1);
  if (f.c2 > 0) gamma += f.c2 * side_kernel(f.chi, -Real(f.alpha2) / f.beta2);
  f.gamma = static_cast<double>(gamma);

  if (chi_value(f.chi) < 2 || (f.c1 == 0 && f.c2 == 0)) {
    f.rho_drift = f.mu;
  } else {
    // Romberg table over central differences with halved steps.
    Real h = Real(0.1) * std::min(Real(f.alpha1) + f.beta1, Real(f.alpha2) + f.beta2);
    auto central = [&](Real step) { return (jump_part(f, step) - jump_part(f, -step)) / (2 * step); };
    std::vector<Real> prev{central(h)};
    Real slope = prev[0];
    Real change = std::numeric_limits<Real>::infinity();
    for (int level = 1; level < 12; ++level) {
      h /= 2;
      std::vector<Real> row{central(h)};
      Real pow4 = 1;
      for (int k = 1; k <= level; ++k) {
        pow4 *= 4;
        row.push_back(row[k - 1] + (row[k - 1] - prev[k - 1]) / (pow4 - 1));
      }
      change = std::abs(row.back() - slope);
      slope = row.back();
      prev = std::move(row);
      if (change <= Real(1e-15) * std::max<Real>(1, std::abs(slope))) break;
    }
    if (!(change <= Real(1e-10) * std::max<Real>(1, std::abs(slope))))
      throw CalibrationError("drift calibration: derivative extrapolation did not converge");
    f.rho_drift = static_cast<double>(f.mu - slope);
  }
  f.calibrated = true;
  return f;
}

ThetaFamily make_family(Chi chi, double sigma, double mu, SideParams pos, SideParams neg) {
  ThetaFamily f;
  f.chi = chi;
  f.sigma = sigma;
  f.mu = mu;
  f.c1 = pos.c;
  f.alpha1 = pos.alpha;
  f.beta1 = pos.beta;
  f.c2 = neg.c;
  f.alpha2 = neg.alpha;
  f.beta2 = neg.beta;
  return calibrate_gamma_and_drift(f);
}

double levy_density(const ThetaFamily& f, double x) {
  if (x == 0 || !std::isfinite(x)) throw DomainError("levy_density: x must be finite and nonzero");
  const double k = theta_order(f.chi);
  if (x > 0) return f.c1 == 0 ? 0.0 : f.c1 * f.beta1 * std::exp(-f.alpha1 * x) * theta_k(x * f.beta1, k);
  return f.c2 == 0 ? 0.0 : f.c2 * f.beta2 * std::exp(f.alpha2 * x) * theta_k(-x * f.beta2, k);
}

// ---------------------------------------------------------------------------

SeriesSide SeriesSide::finite(std::vector<ExpTerm> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!(terms[i].a > 0) || !(terms[i].rho > 0))
      throw ValidationError("terms", "coefficients and poles must be positive");
    if (i > 0 && !(terms[i].rho > terms[i - 1].rho))
      throw ValidationError("terms", "poles must be strictly increasing");
  }
  SeriesSide s;
  s.terms_ = std::move(terms);
  return s;
}

SeriesSide SeriesSide::generated(std::function<ExpTerm(std::size_t)> term,
                                 std::function<ExpTerm(Real)> smooth, Real smooth_from) {
  SeriesSide s;
  s.generator_ = std::move(term);
  s.smooth_ = std::move(smooth);
  s.smooth_from_ = smooth_from;
  return s;
}

ExpTerm SeriesSide::operator()(std::size_t n) const {
  if (n == 0 || n > size()) throw DomainError("SeriesSide: index out of range");
  return generator_ ? generator_(n) : terms_[n - 1];
}

namespace {

SeriesSide theta_side(Chi chi, SideParams p) {
  if (!(p.c > 0)) return {};
  const Real c = p.c, alpha = p.alpha, beta = p.beta;
  const Real two_k = 2 * theta_order(chi);
  if (chi == Chi::Half) {
    auto smooth = [=](Real x) {
      const Real j = x - 1;
      const Real rho = alpha + beta * j * j;
      return ExpTerm{2 * c * beta / rho, rho};
    };
    auto term = [=](std::size_t n) {
      if (n == 1) return ExpTerm{c * beta / alpha, alpha};
      return smooth(Real(n));
    };
    return SeriesSide::generated(term, smooth, 2);
  }
  auto smooth = [=](Real x) {
    const Real rho = alpha + beta * x * x;
    return ExpTerm{2 * c * beta * std::pow(x, two_k) / rho, rho};
  };
  auto term = [=](std::size_t n) { return smooth(Real(n)); };
  return SeriesSide::generated(term, smooth, 1);
}

}  // namespace

ExpSeriesMeasure series_coefficients(const ThetaFamily& f) {
  validate(f);
  return {theta_side(f.chi, f.positive()), theta_side(f.chi, f.negative())};
}

SeriesProcess SeriesProcess::mirrored() const {
  SeriesProcess m = *this;
  std::swap(m.measure.pos, m.measure.neg);
  m.mean_drift = -mean_drift;
  return m;
}

SeriesProcess series_process(const ThetaFamily& f) {
  SeriesProcess p;
  p.sigma = f.sigma;
  p.measure = series_coefficients(f);
  p.mean_drift = f.mu;
  if (chi_value(f.chi) < 2) {
    auto ratio = [](ExpTerm t) { return t.a / t.rho; };
    const auto pos = sum_side<Real, decltype(ratio)>(p.measure.pos, 4096, ratio);
    const auto neg = sum_side<Real, decltype(ratio)>(p.measure.neg, 4096, ratio);
    p.mean_drift += (pos.value + pos.tail) - (neg.value + neg.tail);
    p.mean_drift_error = pos.bound + neg.bound;
  }
  return p;
}

SeriesProcess finite_process(double sigma, double mean_drift, std::vector<ExpTerm> pos,
                             std::vector<ExpTerm> neg) {
  if (!std::isfinite(sigma) || sigma < 0) throw ValidationError("sigma", "must be finite and >= 0");
  if (!std::isfinite(mean_drift)) throw ValidationError("mu", "must be finite");
  SeriesProcess p;
  p.sigma = sigma;
  p.mean_drift = mean_drift;
  p.measure.pos = SeriesSide::finite(std::move(pos));
  p.measure.neg = SeriesSide::finite(std::move(neg));
  return p;
}

SeriesValue laplace_exponent_series(const SeriesProcess& p, Complex zd, std::size_t terms) {
  const ComplexR z(zd.real(), zd.imag());
  const ComplexR z2 = z * z;
  auto pos_term = [&](ExpTerm t) { return z2 * t.a / (t.rho * (ComplexR(t.rho, 0) - z)); };
  auto neg_term = [&](ExpTerm t) { return z2 * t.a / (t.rho * (ComplexR(t.rho, 0) + z)); };
  const auto pos = sum_side<ComplexR, decltype(pos_term)>(p.measure.pos,
                                                         safe_terms(p.measure.pos, z, terms), pos_term);
  const auto neg = sum_side<ComplexR, decltype(neg_term)>(p.measure.neg,
                                                         safe_terms(p.measure.neg, -z, terms), neg_term);
  const Real s = p.sigma;
  const ComplexR base = s * s * z2 / Real(2) + p.mean_drift * z;
  const ComplexR tail = pos.tail + neg.tail;
  const ComplexR value = base + pos.value + neg.value + tail;
  SeriesValue out;
  out.value = Complex(static_cast<double>(value.real()), static_cast<double>(value.imag()));
  out.tail_estimate = Complex(static_cast<double>(tail.real()), static_cast<double>(tail.imag()));
  // The result is rounded to double on return.
  out.tail_bound = static_cast<double>(pos.bound + neg.bound + p.mean_drift_error * std::abs(z)) +
                   2 * std::numeric_limits<double>::epsilon() * std::abs(out.value);
  return out;
}

SeriesValue laplace_exponent_series(const ThetaFamily& f, Complex z, std::size_t terms) {
  return laplace_exponent_series(series_process(f), z, terms);
}

Complex laplace_exponent(const SeriesProcess& p, Complex z) {
  if (!p.measure.pos.is_finite() || !p.measure.neg.is_finite())
    throw DomainError("laplace_exponent: closed form needs a finite measure");
  const ComplexR zr(z.real(), z.imag());
  for (std::size_t n = 1; n <= p.measure.pos.size(); ++n)
    if (std::abs(zr - p.measure.pos(n).rho) < Real(1e-10) * p.measure.pos(n).rho) {
      std::ostringstream os;
      os << "laplace_exponent: z at pole rho_" << n;
      throw SingularityError(os.str());
    }
  for (std::size_t n = 1; n <= p.measure.neg.size(); ++n)
    if (std::abs(zr + p.measure.neg(n).rho) < Real(1e-10) * p.measure.neg(n).rho) {
      std::ostringstream os;
      os << "laplace_exponent: z at pole -rho_hat_" << n;
      throw SingularityError(os.str());
    }
  return laplace_exponent_series(p, z, 0).value;
}

// ---------------------------------------------------------------------------

namespace detail {

int theta_kernel_sign(Chi chi) {
  return (chi == Chi::One || chi == Chi::ThreeHalves) ? -1 : 1;
}

Real theta_kernel_real(Chi chi, long long j, Real dv) {
  const Real v = Real(j) * Real(j) + dv;
  if (v > 0) {
    const Real t = std::sqrt(v);
    // t - j, accurate when z sits near the anchor pole.
    const Real eps = j > 0 ? dv / (t + Real(j)) : t;
    auto cot = [&] { return cot_pi(eps); };
    switch (chi) {
      case Chi::Half: return -kPi * cot() / t;
      case Chi::ThreeHalves: return kPi * t * cot();
      case Chi::FiveHalves: return -kPi * t * t * t * cot();
      case Chi::One:
      case Chi::Two: {
        const Real d = t < Real(0.5) ? digamma(1 + t) + digamma(1 - t)
                                     : 2 * digamma(t) + 1 / t + kPi * cot();
        return chi == Chi::One ? d : -t * t * d;
      }
    }
  }
  const Real s = std::sqrt(-v);
  switch (chi) {
    case Chi::Half:
      if (s == 0) throw SingularityError("theta kernel pole at w = 0");
      return kPi * coth_stable(kPi * s) / s;
    case Chi::ThreeHalves: return s_coth(s);
    case Chi::FiveHalves: return s * s * s_coth(s);
    case Chi::One: return even_pair_real(s);
    case Chi::Two: return s * s * even_pair_real(s);
  }
  return 0;
}

ComplexR theta_kernel(Chi chi, ComplexR w) {
  const ComplexR s = std::sqrt(w);
  auto s_coth_c = [&] {
    if (std::abs(w) < Real(1e-16)) return ComplexR(1) + kPi * kPi * w / Real(3);
    return kPi * s * coth_stable(kPi * s);
  };
  switch (chi) {
    case Chi::Half:
      if (std::abs(s) == 0) throw SingularityError("theta kernel pole at w = 0");
      return kPi * coth_stable(kPi * s) / s;
    case Chi::ThreeHalves: return s_coth_c();
    case Chi::FiveHalves: return w * s_coth_c();
    case Chi::One: return even_digamma_pair(w);
    case Chi::Two: return w * even_digamma_pair(w);
  }
  return 0;
}

}  // namespace detail

ComplexR laplace_exponent(const ThetaFamily& f, ComplexR z) {
  check_pole(f, f.positive(), z, "rho");
  check_pole(f, f.negative(), -z, "rho_hat");
  const Real s = f.sigma;
  ComplexR jump(0);
  if (f.c1 > 0) jump += Real(f.c1) * detail::theta_kernel(f.chi, (Real(f.alpha1) - z) / Real(f.beta1));
  if (f.c2 > 0) jump += Real(f.c2) * detail::theta_kernel(f.chi, (Real(f.alpha2) + z) / Real(f.beta2));
  const Real sign = detail::theta_kernel_sign(f.chi);
  return s * s * z * z / Real(2) + Real(f.rho_drift) * z + sign * (jump - Real(f.gamma));
}

Complex laplace_exponent(const ThetaFamily& f, Complex z) {
  const ComplexR v = laplace_exponent(f, ComplexR(z.real(), z.imag()));
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

Complex characteristic_exponent(const ThetaFamily& f, Complex z) {
  return -laplace_exponent(f, Complex(0, 1) * z);
}

Complex evaluate(const ThetaFamily& f, const EvalPoint& p) {
  return p.representation == Representation::Laplace ? laplace_exponent(f, p.z)
                                                     : characteristic_exponent(f, p.z);
}

// ---------------------------------------------------------------------------

ThetaLine::ThetaLine(ThetaFamily family) : family_(std::move(family)) {
  if (!family_.calibrated) family_ = calibrate_gamma_and_drift(family_);
}

std::size_t ThetaLine::pole_count() const {
  return family_.c1 > 0 ? std::numeric_limits<std::size_t>::max() : 0;
}

Real ThetaLine::pole(std::size_t n) const {
  if (n == 0) return 0;
  const Real j = anchor_index(family_.chi, n);
  return Real(family_.alpha1) + Real(family_.beta1) * j * j;
}

Real ThetaLine::pole_gap(std::size_t n) const {
  if (n == 0) return pole(1);
  const Real j = anchor_index(family_.chi, n);
  return Real(family_.beta1) * (2 * j + 1);
}

LineValue ThetaLine::eval(std::size_t anchor, Real delta) const {
  const ThetaFamily& f = family_;
  const Real z = pole(anchor) + delta;
  Real k1 = 0, k2 = 0;
  if (f.c1 > 0) {
    k1 = anchor == 0 ? Real(f.c1) * detail::theta_kernel_real(f.chi, 0, (z - f.alpha1) / f.beta1)
                     : Real(f.c1) * detail::theta_kernel_real(f.chi, anchor_index(f.chi, anchor),
                                                              delta / f.beta1);
  }
  if (f.c2 > 0) k2 = Real(f.c2) * detail::theta_kernel_real(f.chi, 0, (-z - f.alpha2) / f.beta2);
  const Real s = f.sigma;
  const Real quad = s * s * z * z / 2;
  const Real lin = Real(f.rho_drift) * z;
  const int sign = detail::theta_kernel_sign(f.chi);
  LineValue out;
  out.value = quad + lin + sign * (k1 + k2 - Real(f.gamma));
  out.scale = std::max({std::abs(quad), std::abs(lin), std::abs(k1), std::abs(k2), Real(std::abs(f.gamma))});
  return out;
}

SeriesLine::SeriesLine(SeriesProcess process) : process_(std::move(process)) {
  if (!process_.measure.pos.is_finite() || !process_.measure.neg.is_finite())
    throw DomainError("SeriesLine needs a finite measure");
  for (std::size_t n = 1; n <= process_.measure.pos.size(); ++n) pos_.push_back(process_.measure.pos(n));
  for (std::size_t n = 1; n <= process_.measure.neg.size(); ++n) neg_.push_back(process_.measure.neg(n));
}

LineValue SeriesLine::eval(std::size_t anchor, Real delta) const {
  const Real z = pole(anchor) + delta;
  const Real s = process_.sigma;
  const Real quad = s * s * z * z / 2;
  const Real lin = process_.mean_drift * z;
  LineValue out;
  out.value = quad + lin;
  out.scale = std::max(std::abs(quad), std::abs(lin));
  for (std::size_t k = 0; k < pos_.size(); ++k) {
    const Real gap = (k + 1 == anchor) ? -delta : pos_[k].rho - z;
    const Real t = z * z * pos_[k].a / (pos_[k].rho * gap);
    out.value += t;
    out.scale = std::max(out.scale, std::abs(t));
  }
  for (const ExpTerm& e : neg_) {
    const Real t = z * z * e.a / (e.rho * (e.rho + z));
    out.value += t;
    out.scale = std::max(out.scale, std::abs(t));
  }
  return out;
}

}  // namespace thetawh
