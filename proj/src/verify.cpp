#include "thetawh/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "thetawh/errors.hpp"

namespace thetawh {

namespace {

std::string side_tag(const std::string& name, double q, Side side) {
  std::ostringstream os;
  os << name << "[q=" << q << "," << to_string(side) << "]";
  return os.str();
}

std::size_t root_index(const AsymptoticTail& t, int m) {
  const int shift = t.chi == Chi::Half ? 1 : 0;
  return static_cast<std::size_t>(t.right_of_pole ? m + 1 + shift : m + shift);
}

}  // namespace

CheckResult check_interlacing(const ThetaFamily& f, double q, Side side, std::size_t n) {
  CheckResult r;
  r.name = side_tag("interlacing", q, side);
  r.tolerance = 1e-10 * (1 + q);
  try {
    const RootSet rs = bracket_and_refine(f, q, side, n);
    if (rs.size() < n && !rs.complete) {
      r.detail = "fewer roots than requested";
      return r;
    }
    Real worst = 0;
    bool ordered = true;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const Real below = i == 0 ? 0 : rs.poles[i - 1];
      const bool above_ok = i >= rs.poles.size() || rs.zeros[i] < rs.poles[i];
      if (!(rs.zeros[i] > below) || !above_ok) {
        ordered = false;
        r.detail = "root " + std::to_string(i + 1) + " outside its interval";
        break;
      }
      worst = std::max(worst, rs.residuals[i]);
    }
    r.measured = static_cast<double>(worst);
    r.pass = ordered && r.measured <= r.tolerance;
    if (ordered) r.detail = std::to_string(rs.size()) + " roots";
  } catch (const Error& e) {
    r.detail = e.what();
  }
  return r;
}

std::vector<Complex> factorization_points(std::size_t count, std::uint64_t seed, double radius, double min_dist) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Complex> pts;
  while (pts.size() < count) {
    const Complex z(u(rng), u(rng));
    if (std::abs(z) <= radius && std::abs(z.imag()) >= min_dist) pts.push_back(z);
  }
  return pts;
}

CheckResult check_factorization(const WhFactorization& w, const std::vector<Complex>& points, double tol) {
  CheckResult r;
  std::ostringstream os;
  os << "factorization[q=" << w.q << "]";
  r.name = os.str();
  r.tolerance = tol;
  try {
    for (const Complex& z : points) r.measured = std::max(r.measured, factorization_residual(w, z));
    r.pass = r.measured <= tol;
    r.detail = std::to_string(points.size()) + " points, roots " + std::to_string(w.pos.size()) + "/" +
               std::to_string(w.neg.size());
  } catch (const Error& e) {
    r.detail = e.what();
  }
  return r;
}

AsymptoticProfile asymptotic_profile(const ThetaFamily& f, double q, Side side) {
  AsymptoticProfile p;
  try {
    expansion_candidates(f, q, side);
  } catch (const UnsupportedRegime& e) {
    p.regime = "unsupported";
    p.assignment = e.what();
    return p;
  }
  const RootSet rs = bracket_and_refine(f, q, side, 200);
  const auto t = select_expansion(f, rs);
  if (!t) {
    p.regime = "no matching expansion";
    return p;
  }
  p.regime = t->regime;
  p.assignment = t->assignment;
  p.order = t->order;
  p.log_order = t->log_order;
  for (int m : {20, 40, 80}) {
    const std::size_t n = root_index(*t, m);
    const Offsets ref = rs.offsets[n - 1];
    const Offsets mod = t->offsets(Real(n));
    const Real err = t->right_of_pole ? std::abs(mod.left - ref.left) : std::abs(mod.right - ref.right);
    Real scaled = err * std::pow(Real(m), Real(t->order));
    if (t->log_order) scaled /= std::log(Real(m));
    p.m.push_back(m);
    p.scaled.push_back(static_cast<double>(scaled));
  }
  const double g = std::numbers::sqrt2;
  const bool grows = p.scaled[1] >= g * p.scaled[0] && p.scaled[2] >= g * p.scaled[1];
  p.pass = !grows && std::isfinite(p.scaled[2]);
  return p;
}

CheckResult check_asymptotics(const ThetaFamily& f, double q, Side side) {
  CheckResult r;
  r.name = side_tag("asymptotics", q, side);
  try {
    const AsymptoticProfile p = asymptotic_profile(f, q, side);
    if (p.scaled.empty()) {
      r.skipped = true;
      r.pass = true;
      r.detail = p.regime + (p.assignment.empty() ? "" : ": " + p.assignment);
      return r;
    }
    std::ostringstream os;
    os << p.regime << " order " << p.order << (p.log_order ? " (log)" : "") << " scaled";
    for (std::size_t i = 0; i < p.m.size(); ++i) os << " m=" << p.m[i] << ":" << p.scaled[i];
    r.detail = os.str();
    r.measured = p.scaled[2] / p.scaled[1];
    r.tolerance = std::numbers::sqrt2;
    r.pass = p.pass;
  } catch (const Error& e) {
    r.detail = e.what();
  }
  return r;
}

ConstantFit fit_five_halves_constants(const ThetaFamily& f, double q, Side side, int lo) {
  if (f.chi != Chi::FiveHalves || f.sigma != 0) throw UnsupportedRegime("constant fit needs chi = 5/2, sigma = 0");
  const int hi = 2 * lo;
  expansion_candidates(f, q, side);
  RootSet rs = bracket_and_refine(f, q, side, static_cast<std::size_t>(hi) + 2);
  const auto t = select_expansion(f, rs);
  if (!t) throw UnsupportedRegime("no matching expansion");
  Eigen::MatrixXd A(hi - lo + 1, 3);
  Eigen::VectorXd b(hi - lo + 1);
  for (int m = lo; m <= hi; ++m) {
    const Real z = rs.zeros[root_index(*t, m) - 1];
    const Real y = (z - Real(t->alpha)) / Real(t->beta) - Real(m) * m;
    A.row(m - lo) << m, 1, 1.0 / m;
    b(m - lo) = static_cast<double>(y);
  }
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
  ConstantFit out;
  out.w0_fit = x(0) / 2;
  out.offset_fit = t->beta * (x(1) - out.w0_fit * out.w0_fit);
  out.w0_expected = t->w0;
  out.offset_expected = t->terms.empty() ? 0 : t->terms[0].coef;
  return out;
}

std::vector<CheckResult> check_mixture(const ThetaFamily& f, double q, Side side, const WhFactorization& w,
                                       double mass_tol, double transform_tol) {
  std::vector<CheckResult> out(3);
  out[0].name = side_tag("mixture.weights", q, side);
  out[1].name = side_tag("mixture.mass", q, side);
  out[2].name = side_tag("mixture.transform", q, side);
  out[1].tolerance = mass_tol;
  out[2].tolerance = transform_tol;
  try {
    const SupremumLaw law = supremum_law(f, q, side);
    double min_w = 1;
    Real total = law.c0;
    for (double c : law.weights) {
      min_w = std::min(min_w, c);
      total += c;
    }
    out[0].measured = min_w;
    out[0].pass = min_w >= 0 && law.c0 >= 0 && law.c0 < 1;
    out[0].detail = std::to_string(law.n_terms()) + " terms, c0 = " + std::to_string(law.c0);
    const double gap = std::abs(1 - static_cast<double>(total));
    out[1].measured = law.tail_mass_bound;
    out[1].pass = law.tail_mass_bound <= mass_tol && gap <= law.tail_mass_bound + 1e-12;
    out[1].detail = "|1 - c0 - sum c| = " + std::to_string(gap);
    for (double z : {0.5, 1.0, 3.0})
      out[2].measured =
          std::max(out[2].measured, std::abs(mixture_transform(law, z) - wh_factor(w, Complex(z, 0), side)));
    out[2].pass = out[2].measured <= transform_tol;
  } catch (const Error& e) {
    for (auto& r : out) r.detail = e.what();
  }
  return out;
}

}  // namespace thetawh
