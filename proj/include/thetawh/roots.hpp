#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thetawh/model.hpp"
#include "thetawh/types.hpp"

namespace thetawh {

/// Distances of a root from the two poles around it: left = zeta_n - rho_{n-1}
/// (rho_0 = 0), right = rho_n - zeta_n (infinite when no pole follows).
struct Offsets {
  Real left = 0;
  Real right = 0;
};

/// c * m^{-power} * ln(m)^{log_power}
struct ExpansionTerm {
  double coef = 0;
  int power = 0;
  int log_power = 0;
};

/// Model for the roots beyond the refined prefix. Either a large-n expansion
/// around the poles rho = alpha + beta m^2, or a frozen position inside the
/// interlacing interval when no expansion applies.
struct AsymptoticTail {
  enum class Kind { Expansion, FrozenFraction };

  Kind kind = Kind::Expansion;
  Chi chi = Chi::Half;
  Side side = Side::Positive;
  std::string regime;
  std::string assignment;  // which parameter set and drift sign the expansion uses
  double alpha = 1;
  double beta = 1;
  std::vector<ExpansionTerm> terms;
  double w0 = 0;  // zeta ~ beta (m + w0)^2 + ...
  int order = 0;  // error O(m^{-order}), times ln(m) when log_order
  bool log_order = false;
  bool right_of_pole = true;  // root n sits above pole n-1 (else below pole n)
  double frozen_fraction = 0;
  std::size_t validated_from = 0;  // first root index the model stands in for
  double validation_error = 0;     // |refined - model| at validated_from - 1

  /// Pole index n -> alpha + beta j^2, j = n - 1 for chi = 1/2, else n.
  Real pole(Real n) const;
  Real anchor(Real n) const { return chi == Chi::Half ? n - 1 : n; }
  /// Correction to alpha + beta m^2 in the expansion index m.
  Real correction(Real m) const;
  /// Root n (continuous in n).
  Offsets offsets(Real n) const;
  Real zeta(Real n) const;
};

/// Roots of phi(z) = q on one side. Negative-side roots are stored as
/// positive numbers (roots of the mirrored process).
struct RootSet {
  double q = 0;
  Side side = Side::Positive;
  std::vector<Real> zeros;   // zeta_1 < zeta_2 < ...
  std::vector<Real> poles;   // rho_1 < rho_2 < ...; can be one shorter than zeros
  std::vector<Offsets> offsets;
  std::vector<Real> residuals;
  std::vector<Real> scales;  // magnitude of the largest term in phi at the root
  std::size_t n_exact = 0;
  bool complete = false;     // every root of this side is stored
  std::optional<AsymptoticTail> tail;
  double product_tail_bound = 0;
  double radius = 0;
  std::string warning;

  std::size_t size() const { return zeros.size(); }
  /// max(1e-10 (1 + q), 64 eps scale_n)
  Real residual_tolerance(std::size_t i) const;
};

RootSet bracket_and_refine(const ThetaFamily& family, double q, Side side, std::size_t n);
/// Finite measure: all roots (at most one per pole plus one).
RootSet bracket_and_refine(const SeriesProcess& finite, double q, Side side);

/// Expansion candidates, each with its own parameter assignment. Throws
/// UnsupportedRegime when no expansion is known.
std::vector<AsymptoticTail> expansion_candidates(const ThetaFamily& family, double q, Side side);

/// Picks the candidate that matches the refined roots; validated_from is set
/// only when the match at the last refined root is within 1e-8 rho.
std::optional<AsymptoticTail> select_expansion(const ThetaFamily& family, const RootSet& roots);

/// Expansion value for root n after resolving the parameter assignment
/// against refined roots.
Real asymptotic_root(const ThetaFamily& family, double q, Side side, std::size_t n);

/// Doubles the refined prefix until the product tail contributes relative
/// error below product_tol for |z| <= radius.
RootSet roots_to_accuracy(const ThetaFamily& family, double q, Side side, double product_tol,
                          double radius = 10, std::size_t max_roots = 65536);
RootSet roots_to_accuracy(const SeriesProcess& finite, double q, Side side);

/// Refines at least n roots and re-fits the tail model.
void extend_roots(const ThetaFamily& family, RootSet& roots, std::size_t n);

/// n, rho_n, zeta_n, residual, source; extra rows come from the tail model.
void write_roots_csv(std::ostream& os, const RootSet& roots, std::size_t extra_asymptotic = 0);

}  // namespace thetawh
