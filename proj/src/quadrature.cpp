#include "thetawh/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace thetawh {

GaussRule gauss_legendre(int order) {
  using MatrixXr = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  MatrixXr jacobi = MatrixXr::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const Real b = k / std::sqrt(Real(4) * k * k - 1);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(jacobi);
  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = 2 * es.eigenvectors().row(0).array().square().transpose();
  return rule;
}

const GaussRule& default_rule() {
  static const GaussRule rule = gauss_legendre(24);
  return rule;
}

}  // namespace thetawh
