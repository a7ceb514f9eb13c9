#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace thetawh {

// Extended precision for everything that touches the real line near a pole.
using Real = long double;
using Complex = std::complex<double>;
using ComplexR = std::complex<Real>;

using VectorXr = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

enum class Side { Positive, Negative };

inline const char* to_string(Side s) { return s == Side::Positive ? "pos" : "neg"; }

}  // namespace thetawh
