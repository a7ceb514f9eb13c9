#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "thetawh/types.hpp"

namespace thetawh {

/// Order of the small-jump singularity: pi(x) ~ const |x|^{-chi}.
enum class Chi { Half, One, ThreeHalves, Two, FiveHalves };

double chi_value(Chi chi);
/// Throws ValidationError("chi") unless value is one of 0.5, 1, 1.5, 2, 2.5.
Chi chi_from_value(double value);
/// k = chi - 1/2, the order of Theta_k in the Levy density.
inline double theta_order(Chi chi) { return chi_value(chi) - 0.5; }

struct SideParams {
  double c = 0;
  double alpha = 1;
  double beta = 1;
};

/// Eight-parameter theta family. For chi < 2, mu is the linear drift with
/// cutoff h = 0; for chi >= 2, mu is E[X_1] (cutoff h = 1). gamma and
/// rho_drift are filled by calibrate_gamma_and_drift.
struct ThetaFamily {
  Chi chi = Chi::Half;
  double sigma = 0;
  double mu = 0;
  double c1 = 0, c2 = 0;
  double alpha1 = 1, alpha2 = 1;
  double beta1 = 1, beta2 = 1;

  double gamma = 0;
  double rho_drift = 0;
  bool calibrated = false;

  SideParams positive() const { return {c1, alpha1, beta1}; }
  SideParams negative() const { return {c2, alpha2, beta2}; }

  /// The family of -X: sides swapped, drifts negated, gamma unchanged.
  ThetaFamily mirrored() const;
};

/// Throws ValidationError naming the offending field. c1 = c2 = 0 is allowed.
void validate(const ThetaFamily& family);

/// Sets gamma from phi(0) = 0 and the linear drift: rho_drift = mu for
/// chi < 2, and for chi >= 2 the value that makes phi'(0) = mu (Romberg table
/// over central differences).
ThetaFamily calibrate_gamma_and_drift(ThetaFamily raw);

/// validate + calibrate.
ThetaFamily make_family(Chi chi, double sigma, double mu, SideParams pos, SideParams neg);

/// Levy density pi_chi(x), x != 0.
double levy_density(const ThetaFamily& family, double x);

// ---------------------------------------------------------------------------
// Exponential-series representation.

struct ExpTerm {
  Real a = 0;
  Real rho = 0;
};

/// One side of the measure: pairs (a_n, rho_n), n >= 1, either a finite list
/// or a generator. Generators also carry a smooth extension to real n, used
/// for integral estimates of series remainders.
class SeriesSide {
 public:
  SeriesSide() = default;
  static SeriesSide finite(std::vector<ExpTerm> terms);
  static SeriesSide generated(std::function<ExpTerm(std::size_t)> term,
                              std::function<ExpTerm(Real)> smooth, Real smooth_from);

  bool empty() const { return size() == 0; }
  bool is_finite() const { return !generator_; }
  std::size_t size() const {
    return generator_ ? std::numeric_limits<std::size_t>::max() : terms_.size();
  }
  ExpTerm operator()(std::size_t n) const;
  ExpTerm smooth(Real x) const { return smooth_(x); }
  Real smooth_from() const { return smooth_from_; }

 private:
  std::vector<ExpTerm> terms_;
  std::function<ExpTerm(std::size_t)> generator_;
  std::function<ExpTerm(Real)> smooth_;
  Real smooth_from_ = 1;
};

struct ExpSeriesMeasure {
  SeriesSide pos;
  SeriesSide neg;
};

ExpSeriesMeasure series_coefficients(const ThetaFamily& family);

/// Process written in partial-fraction form with cutoff h = 1:
/// phi(z) = sigma^2 z^2 / 2 + mean_drift z + z^2 sum a/(rho(rho - z)) + ...
struct SeriesProcess {
  double sigma = 0;
  Real mean_drift = 0;
  Real mean_drift_error = 0;  // remainder bound when the drift is itself a series
  ExpSeriesMeasure measure;

  SeriesProcess mirrored() const;
};

/// For chi < 2 the mean drift is mu + sum a/rho - sum a_hat/rho_hat, summed
/// with an integral remainder estimate.
SeriesProcess series_process(const ThetaFamily& family);

/// Finite truncation (rational exponent). Poles must be strictly increasing.
SeriesProcess finite_process(double sigma, double mean_drift, std::vector<ExpTerm> pos,
                             std::vector<ExpTerm> neg);

struct SeriesValue {
  Complex value;          // truncated sum plus remainder estimate
  Complex tail_estimate;  // the remainder estimate that was added
  double tail_bound = 0;  // bound on |exact - value|
};

SeriesValue laplace_exponent_series(const SeriesProcess& process, Complex z, std::size_t terms);
SeriesValue laplace_exponent_series(const ThetaFamily& family, Complex z, std::size_t terms);

/// Closed-form Laplace exponent phi(z) = log E[exp(z X_1)].
Complex laplace_exponent(const ThetaFamily& family, Complex z);
ComplexR laplace_exponent(const ThetaFamily& family, ComplexR z);

/// Psi(z) = -log E[exp(i z X_1)] = -phi(i z).
Complex characteristic_exponent(const ThetaFamily& family, Complex z);

enum class Representation { Characteristic, Laplace };

struct EvalPoint {
  Complex z;
  Representation representation = Representation::Laplace;
};

Complex evaluate(const ThetaFamily& family, const EvalPoint& point);

// ---------------------------------------------------------------------------
// Real-line evaluation in pole-anchored coordinates. A point is
// z = pole(anchor) + delta, with pole(0) = 0. Near a pole the offset carries
// full relative precision, which the cotangent terms need.

struct LineValue {
  Real value = 0;
  Real scale = 0;  // magnitude of the largest term that entered the sum
};

/// phi on the positive half line of a theta family.
class ThetaLine {
 public:
  explicit ThetaLine(ThetaFamily family);

  std::size_t pole_count() const;
  Real pole(std::size_t n) const;
  /// pole(n + 1) - pole(n), exact in the pole parametrisation.
  Real pole_gap(std::size_t n) const;
  LineValue eval(std::size_t anchor, Real delta) const;
  const ThetaFamily& family() const { return family_; }
  double sigma() const { return family_.sigma; }

 private:
  ThetaFamily family_;
};

/// phi on the positive half line of a finite exponential-series process.
class SeriesLine {
 public:
  explicit SeriesLine(SeriesProcess process);

  std::size_t pole_count() const { return pos_.size(); }
  Real pole(std::size_t n) const { return n == 0 ? 0 : pos_[n - 1].rho; }
  Real pole_gap(std::size_t n) const { return pole(n + 1) - pole(n); }
  LineValue eval(std::size_t anchor, Real delta) const;
  const SeriesProcess& process() const { return process_; }
  double sigma() const { return process_.sigma; }

 private:
  SeriesProcess process_;
  std::vector<ExpTerm> pos_;
  std::vector<ExpTerm> neg_;
};

/// phi(z) for a finite process, complex argument.
Complex laplace_exponent(const SeriesProcess& finite, Complex z);

namespace detail {
/// Real kernel of one side at v = j^2 + dv, where v = (z - alpha)/beta.
/// Passing the anchor integer j and dv separately keeps cot(pi t) accurate.
Real theta_kernel_real(Chi chi, long long j, Real dv);
ComplexR theta_kernel(Chi chi, ComplexR w);
int theta_kernel_sign(Chi chi);
}  // namespace detail

}  // namespace thetawh
