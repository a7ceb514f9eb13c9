#include "thetawh/roots.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "thetawh/errors.hpp"

namespace thetawh {

namespace {

constexpr Real kEps = std::numeric_limits<Real>::epsilon();
constexpr Real kInf = std::numeric_limits<Real>::infinity();

Real logistic(Real s) { return s >= 0 ? 1 / (1 + std::exp(-s)) : std::exp(s) / (1 + std::exp(s)); }

Real logit(Real p) { return std::log(p) - std::log1p(-p); }

struct Refined {
  Real zeta = 0;
  Offsets off;
  Real residual = 0;
  Real scale = 0;
};

// Root in (pole(r-1), pole(r)), or in (pole(r-1), inf) past the last pole.
// Points are pole-anchored: the nearer pole plus an offset.
template <class Line>
std::optional<Refined> refine_bracket(const Line& line, double q, std::size_t r) {
  const bool bounded = r <= line.pole_count();
  const Real left_pole = line.pole(r - 1);
  const Real qr = q;

  auto f_left = [&](Real off) { return line.eval(r - 1, off).value - qr; };
  auto f_right = [&](Real off) { return line.eval(r, -off).value - qr; };

  Real width;
  if (bounded) {
    width = line.pole_gap(r - 1);
  } else {
    width = std::max<Real>(1, left_pole);
    while (!(f_left(width) > 0)) {
      width *= 2;
      if (width > Real(1e300)) return std::nullopt;
    }
  }

  // Offsets 1e-12 rho inside each end; shrink when the root is closer still.
  const Real ref = bounded ? line.pole(r) : width;
  Real off_l = Real(1e-12) * ref;
  if (r == 1) off_l = std::min(off_l, width * Real(1e-6));
  while (!(f_left(off_l) < 0)) {
    off_l *= Real(1e-3);
    if (off_l < width * Real(1e-280)) {
      std::ostringstream os;
      os << "bracket " << r << ": phi - q not negative above pole " << static_cast<double>(left_pole)
         << " (value " << static_cast<double>(f_left(off_l)) << ")";
      throw StructuralError(os.str());
    }
  }
  Real off_r = 0;
  if (bounded) {
    off_r = Real(1e-12) * ref;
    while (!(f_right(off_r) > 0)) {
      off_r *= Real(1e-3);
      if (off_r < width * Real(1e-280)) {
        std::ostringstream os;
        os << "bracket " << r << ": phi - q not positive below pole " << static_cast<double>(line.pole(r))
           << " (value " << static_cast<double>(f_right(off_r)) << ")";
        throw StructuralError(os.str());
      }
    }
  }

  // Bisection in s with u = width * logistic(s), so both ends keep their
  // relative precision.
  Real s_lo = logit(off_l / width);
  Real s_hi = bounded ? -logit(off_r / width) : Real(60);
  auto at = [&](Real s) {
    if (s < 0 || !bounded) return f_left(width * logistic(s));
    return f_right(width * logistic(-s));
  };
  while (s_hi - s_lo > Real(1e-6)) {
    const Real mid = (s_lo + s_hi) / 2;
    (at(mid) < 0 ? s_lo : s_hi) = mid;
  }

  // Newton in the anchor-relative offset, kept inside the bracket.
  const Real s_mid = (s_lo + s_hi) / 2;
  const bool use_left = !bounded || s_mid < 0;
  const std::size_t anchor = use_left ? r - 1 : r;
  auto delta_of = [&](Real s) {
    return use_left ? width * logistic(s) : -width * logistic(-s);
  };
  auto F = [&](Real d) { return line.eval(anchor, d); };
  Real lo = delta_of(s_lo), hi = delta_of(s_hi);
  Real x = delta_of(s_mid);
  LineValue fx = F(x);
  Real best_x = x;
  LineValue best = fx;
  for (int it = 0; it < 100; ++it) {
    const Real g = fx.value - qr;
    if (std::abs(g) <= 4 * kEps * fx.scale) break;
    if (hi - lo <= 4 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
    const Real h = Real(1e-7) * std::abs(x);
    const Real d = (F(x + h).value - F(x - h).value) / (2 * h);
    Real xn = x - g / d;
    if (!std::isfinite(xn) || !(xn > lo && xn < hi)) {
      xn = (lo > 0 && hi / lo > 16) ? std::sqrt(lo * hi)
           : (hi < 0 && lo / hi > 16) ? -std::sqrt(lo * hi)
                                      : (lo + hi) / 2;
    }
    if (xn == x) break;
    const LineValue fn = F(xn);
    ((fn.value - qr) < 0 ? lo : hi) = xn;
    x = xn;
    fx = fn;
    if (std::abs(fx.value - qr) < std::abs(best.value - qr)) {
      best = fx;
      best_x = x;
    }
  }

  Refined out;
  out.residual = std::abs(best.value - qr);
  out.scale = best.scale;
  if (use_left) {
    out.off.left = best_x;
    out.off.right = bounded ? width - best_x : kInf;
    out.zeta = left_pole + best_x;
  } else {
    out.off.right = -best_x;
    out.off.left = width + best_x;
    out.zeta = line.pole(r) + best_x;
  }
  return out;
}

template <class Line>
void grow_roots(const Line& line, RootSet& rs, std::size_t n) {
  const std::size_t pc = line.pole_count();
  const std::size_t cap = pc == std::numeric_limits<std::size_t>::max() ? n : std::min(n, pc + 1);
  for (std::size_t r = rs.size() + 1; r <= cap && !rs.complete; ++r) {
    const auto root = refine_bracket(line, rs.q, r);
    if (!root) {
      rs.complete = true;
      break;
    }
    rs.zeros.push_back(root->zeta);
    rs.offsets.push_back(root->off);
    rs.residuals.push_back(root->residual);
    rs.scales.push_back(root->scale);
    if (r <= pc) rs.poles.push_back(line.pole(r));
    if (r == pc + 1) rs.complete = true;
  }
  if (pc == 0 && rs.size() == 0) rs.complete = true;
  rs.n_exact = rs.size();
}

ThetaFamily working_family(const ThetaFamily& f, Side side) {
  ThetaFamily g = f.calibrated ? f : calibrate_gamma_and_drift(f);
  return side == Side::Positive ? g : g.mirrored();
}

void check_q(double q) {
  if (!(q > 0) || !std::isfinite(q)) throw DomainError("killing rate q must be positive and finite");
}

struct SideArgs {
  double c, alpha, beta;
};

// Expansion around poles alpha + beta m^2 of the side "own".
AsymptoticTail expansion(Chi chi, double sigma, double mu, double rho, double gamma, double q,
                         SideArgs own, SideArgs other) {
  AsymptoticTail t;
  t.chi = chi;
  t.alpha = own.alpha;
  t.beta = own.beta;
  const double c = own.c, a = own.alpha, b = own.beta;
  const double s2 = sigma * sigma, s4 = s2 * s2;
  const double pi = std::numbers::pi;
  auto add = [&](double coef, int p, int l = 0) { t.terms.push_back({coef, p, l}); };
  if (sigma != 0) {
    t.regime = "sigma>0";
    switch (chi) {
      case Chi::Half:
        add(4 / s2 * c / b, 4);
        add(8 / s4 * c / (b * b) * (mu - a * s2), 6);
        t.order = 8;
        break;
      case Chi::One:
        add(4 / s2 * c / b, 3);
        add(8 / s4 * c / (b * b) * (mu - a * s2), 5);
        t.order = 7;
        break;
      case Chi::ThreeHalves:
        add(4 / s2 * c / b, 2);
        add(8 / s4 * c / (b * b) * (mu - a * s2), 4);
        t.order = 6;
        break;
      case Chi::Two:
        add(4 / s2 * c / b, 1);
        t.order = 3;
        t.log_order = true;
        break;
      case Chi::FiveHalves:
        add(4 / s2 * c / b, 0);
        add(-8 * pi / s4 * c * other.c / std::pow(b * other.beta, 1.5), 1);
        t.order = 2;
        break;
    }
    return t;
  }
  if (chi == Chi::FiveHalves) {
    t.regime = "sigma=0";
    t.w0 = std::atan(c * std::pow(other.beta, 1.5) / (other.c * std::pow(b, 1.5))) / pi;
    const double ob3 = std::pow(other.beta, 3);
    add(2 * rho / (pi * pi) * c * b * b * ob3 / (other.c * other.c * b * b * b + c * c * ob3), 0);
    t.order = 1;
    return t;
  }
  if (chi == Chi::Two) throw UnsupportedRegime("no root expansion for chi = 2 with sigma = 0");
  if (mu == 0) throw UnsupportedRegime("no root expansion for sigma = 0 and mu = 0");
  t.regime = "sigma=0,mu!=0";
  switch (chi) {
    case Chi::Half:
      add(-2 * c / mu, 2);
      add(2 / (mu * mu) * c / b * (mu * a + gamma + q), 4);
      t.order = 5;
      break;
    case Chi::One: {
      const double pref = 2 / (mu * mu) * c / b;
      const double c0 = mu * a - gamma + q + other.c * std::log(b / other.beta);
      add(-2 * c / mu, 1);
      add(pref * 2 * (c + other.c), 3, 1);
      add(pref * c0, 3);
      t.order = 4;
      t.log_order = true;
      break;
    }
    case Chi::ThreeHalves:
      add(-2 * c / mu, 0);
      add(2 * pi / (mu * mu) * c * other.c / std::sqrt(b * other.beta), 1);
      t.order = 2;
      break;
    default:
      break;
  }
  return t;
}

// Distance from the tail model's anchor pole, compared on the same footing
// as the refined offsets.
Real model_error(const AsymptoticTail& t, const RootSet& rs, std::size_t n) {
  const Offsets ref = rs.offsets[n - 1];
  const Offsets mod = t.offsets(Real(n));
  return t.right_of_pole ? std::abs(mod.left - ref.left) : std::abs(mod.right - ref.right);
}

Real same_params(double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(std::abs(a), std::abs(b)); }

// sum_{n > N} 1 / rho_{n-1}^2 for the tail poles (integral bound).
Real inverse_square_tail(const AsymptoticTail& t, std::size_t n) {
  const Real j = std::max<Real>(t.anchor(Real(n) - 1), 1);
  return 1 / (3 * Real(t.beta) * t.beta * j * j * j) + 1 / (t.pole(Real(n) - 1) * t.pole(Real(n) - 1));
}

AsymptoticTail frozen_tail(const ThetaFamily& g, const RootSet& rs) {
  AsymptoticTail t;
  t.kind = AsymptoticTail::Kind::FrozenFraction;
  t.chi = g.chi;
  t.side = rs.side;
  t.regime = g.sigma != 0 ? "sigma>0" : "sigma=0";
  t.assignment = "frozen";
  t.alpha = g.alpha1;
  t.beta = g.beta1;
  const std::size_t n = rs.size();
  const Real gap = rs.offsets[n - 1].left + rs.offsets[n - 1].right;
  t.frozen_fraction = static_cast<double>(rs.offsets[n - 1].left / gap);
  t.right_of_pole = t.frozen_fraction < 0.5;
  t.validated_from = n + 1;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

Real AsymptoticTail::pole(Real n) const {
  const Real j = anchor(n);
  return Real(alpha) + Real(beta) * j * j;
}

Real AsymptoticTail::correction(Real m) const {
  Real sum = 0;
  const Real lm = std::log(m);
  for (const auto& t : terms) {
    Real v = t.coef * std::pow(m, Real(-t.power));
    for (int l = 0; l < t.log_power; ++l) v *= lm;
    sum += v;
  }
  if (w0 != 0) sum += Real(beta) * (2 * Real(w0) * m + Real(w0) * w0);
  return sum;
}

Offsets AsymptoticTail::offsets(Real n) const {
  if (kind == Kind::FrozenFraction) {
    const Real gap = pole(n) - pole(n - 1);
    return {Real(frozen_fraction) * gap, (1 - Real(frozen_fraction)) * gap};
  }
  if (right_of_pole) {
    const Real a = n - 1;
    const Real corr = correction(anchor(a));
    return {corr, Real(beta) * (2 * anchor(a) + 1) - corr};
  }
  const Real corr = correction(anchor(n));
  return {Real(beta) * (2 * anchor(n) - 1) + corr, -corr};
}

Real AsymptoticTail::zeta(Real n) const {
  const Offsets o = offsets(n);
  return o.left <= o.right ? pole(n - 1) + o.left : pole(n) - o.right;
}

Real RootSet::residual_tolerance(std::size_t i) const {
  return std::max(Real(1e-10) * (1 + Real(q)), 64 * kEps * scales[i]);
}

RootSet bracket_and_refine(const ThetaFamily& f, double q, Side side, std::size_t n) {
  check_q(q);
  if (n < 1) throw DomainError("bracket_and_refine: n must be >= 1");
  const ThetaLine line(working_family(f, side));
  RootSet rs;
  rs.q = q;
  rs.side = side;
  grow_roots(line, rs, n);
  return rs;
}

RootSet bracket_and_refine(const SeriesProcess& p, double q, Side side) {
  check_q(q);
  const SeriesLine line(side == Side::Positive ? p : p.mirrored());
  RootSet rs;
  rs.q = q;
  rs.side = side;
  grow_roots(line, rs, line.pole_count() + 1);
  rs.complete = true;
  return rs;
}

std::vector<AsymptoticTail> expansion_candidates(const ThetaFamily& f, double q, Side side) {
  const ThetaFamily g = working_family(f, side);
  if (!(g.c1 > 0)) return {};
  const SideArgs one{g.c1, g.alpha1, g.beta1}, two{g.c2, g.alpha2, g.beta2};
  // Labels refer to the original family: "params=k" is the side whose
  // (c, alpha, beta) play the role of the expanded poles.
  const char* own_label = side == Side::Positive ? "1" : "2";
  const char* other_label = side == Side::Positive ? "2" : "1";
  std::vector<AsymptoticTail> out;
  struct Spec {
    SideArgs own, other;
    double sign;
    std::string label;
  };
  const std::vector<Spec> specs = {
      {two, one, 1, std::string("params=") + other_label + ",drift=" + (side == Side::Positive ? "+" : "-")},
      {one, two, 1, std::string("params=") + own_label + ",drift=" + (side == Side::Positive ? "+" : "-")},
      {one, two, -1, std::string("params=") + own_label + ",drift=" + (side == Side::Positive ? "-" : "+")},
  };
  for (const auto& s : specs) {
    AsymptoticTail t = expansion(g.chi, g.sigma, s.sign * g.mu, s.sign * g.rho_drift, g.gamma, q, s.own, s.other);
    t.side = side;
    t.assignment = s.label;
    t.right_of_pole = t.correction(Real(1e6)) > 0;
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<AsymptoticTail> select_expansion(const ThetaFamily& f, const RootSet& rs) {
  if (rs.complete || rs.size() < 8) return std::nullopt;
  const ThetaFamily g = working_family(f, rs.side);
  std::vector<AsymptoticTail> cands;
  try {
    cands = expansion_candidates(f, rs.q, rs.side);
  } catch (const UnsupportedRegime&) {
    return std::nullopt;
  }
  const std::size_t n = rs.size();
  std::optional<AsymptoticTail> best;
  Real best_err = kInf;
  for (auto& t : cands) {
    if (!same_params(t.alpha, g.alpha1) || !same_params(t.beta, g.beta1)) continue;
    const Real err = model_error(t, rs, n);
    const Real err_half = model_error(t, rs, n / 2);
    const Real floor = Real(1e-14) * rs.poles[n - 1];
    const bool shrinking = err <= err_half * Real(1.01) + floor;
    if (!shrinking) continue;
    if (err < best_err) {
      best_err = err;
      best = t;
    }
  }
  if (!best) return std::nullopt;
  best->validation_error = static_cast<double>(best_err);
  if (best_err <= Real(1e-8) * rs.poles[n - 1]) best->validated_from = n + 1;
  return best;
}

Real asymptotic_root(const ThetaFamily& f, double q, Side side, std::size_t n) {
  check_q(q);
  const auto cands = expansion_candidates(f, q, side);
  if (cands.empty()) throw UnsupportedRegime("no poles on this side");
  RootSet rs;
  rs.q = q;
  rs.side = side;
  const ThetaLine line(working_family(f, side));
  std::optional<AsymptoticTail> chosen;
  for (std::size_t m = 32; m <= 1024; m *= 2) {
    grow_roots(line, rs, m);
    chosen = select_expansion(f, rs);
    if (chosen && chosen->validated_from > 0) break;
  }
  if (!chosen) throw UnsupportedRegime("no expansion candidate matches the refined roots");
  return chosen->zeta(Real(n));
}

RootSet roots_to_accuracy(const ThetaFamily& f, double q, Side side, double product_tol, double radius,
                          std::size_t max_roots) {
  check_q(q);
  if (!(product_tol > 0 && product_tol < 1)) throw DomainError("product_tol must lie in (0, 1)");
  const ThetaFamily g = working_family(f, side);
  const ThetaLine line(g);
  RootSet rs;
  rs.q = q;
  rs.side = side;
  rs.radius = radius;
  bool expansion_known = true;
  try {
    expansion_candidates(f, q, side);
  } catch (const UnsupportedRegime&) {
    expansion_known = false;
  }
  for (std::size_t n = 32;; n *= 2) {
    grow_roots(line, rs, std::min(n, max_roots));
    if (rs.complete) {
      rs.product_tail_bound = 0;
      rs.tail.reset();
      return rs;
    }
    const std::size_t N = rs.size();
    if (expansion_known) {
      auto t = select_expansion(f, rs);
      if (t && t->validated_from > 0) {
        rs.product_tail_bound = static_cast<double>(Real(radius) * Real(t->validation_error) *
                                                    inverse_square_tail(*t, N + 1) * 4);
        if (rs.product_tail_bound <= product_tol) {
          rs.tail = std::move(t);
          return rs;
        }
      }
    }
    const AsymptoticTail frozen = frozen_tail(g, rs);
    // sum_{n>N} (1/zeta_n - 1/rho_n) < 1/rho_N; the frozen model's share of
    // it is the whole uncertainty.
    rs.product_tail_bound = static_cast<double>(Real(radius) / rs.poles[N - 1] * (1 + Real(radius) / rs.poles[N - 1]));
    if (rs.product_tail_bound <= product_tol || N >= max_roots) {
      rs.tail = frozen;
      if (rs.product_tail_bound > product_tol) {
        std::ostringstream os;
        os << "root cap " << max_roots << " reached; product tail bound " << rs.product_tail_bound;
        rs.warning = os.str();
      } else if (expansion_known) {
        rs.warning = "expansion not validated; frozen-fraction tail used";
      } else {
        rs.warning = "no expansion for this regime; refined prefix extended";
      }
      return rs;
    }
  }
}

void extend_roots(const ThetaFamily& f, RootSet& rs, std::size_t n) {
  const ThetaFamily g = working_family(f, rs.side);
  grow_roots(ThetaLine(g), rs, n);
  if (rs.complete) {
    rs.tail.reset();
    return;
  }
  auto t = select_expansion(f, rs);
  if (t && t->validated_from > 0)
    rs.tail = std::move(t);
  else
    rs.tail = frozen_tail(g, rs);
}

RootSet roots_to_accuracy(const SeriesProcess& p, double q, Side side) {
  return bracket_and_refine(p, q, side);
}

void write_roots_csv(std::ostream& os, const RootSet& rs, std::size_t extra) {
  os << "n,rho_n,zeta_n,residual,source\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    os << i + 1 << ',';
    if (i < rs.poles.size())
      os << static_cast<double>(rs.poles[i]);
    else
      os << "inf";
    os << ',' << static_cast<double>(rs.zeros[i]) << ',' << static_cast<double>(rs.residuals[i]) << ",exact\n";
  }
  if (rs.tail && extra > 0) {
    for (std::size_t k = 1; k <= extra; ++k) {
      const Real n = Real(rs.size() + k);
      os << rs.size() + k << ',' << static_cast<double>(rs.tail->pole(n)) << ','
         << static_cast<double>(rs.tail->zeta(n)) << ",,asymptotic\n";
    }
  }
}

}  // namespace thetawh
