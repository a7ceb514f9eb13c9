#pragma once

#include <cstddef>

#include "thetawh/types.hpp"

namespace thetawh {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  VectorXr nodes;
  VectorXr weights;
};

/// Golub-Welsch: eigen-decomposition of the Legendre Jacobi matrix.
GaussRule gauss_legendre(int order);

/// Shared 24-point rule (built once).
const GaussRule& default_rule();

/// Composite Gauss-Legendre over [a, b] with equal panels.
template <class F>
auto integrate(F&& f, Real a, Real b, int panels = 4, const GaussRule& rule = default_rule()) {
  using R = decltype(f(a));
  R sum(0);
  const Real h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const Real lo = a + p * h;
    const Real mid = lo + h / 2;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * (h / 2) * f(mid + (h / 2) * rule.nodes[i]);
  }
  return sum;
}

}  // namespace thetawh
