#pragma once

// Independent oracle for a finite exponential series (rational exponent):
// roots of (q - phi(z)) prod(rho - z) prod(rho_hat + z) from the companion
// matrix, and mixture weights from polynomial residues.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "thetawh/model.hpp"

namespace oracle {

using Poly = std::vector<double>;  // ascending powers

inline Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

inline Poly scale(Poly a, double s) {
  for (double& c : a) c *= s;
  return a;
}

inline double eval(const Poly& p, double x) {
  double v = 0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * double(i));
  return d;
}

struct Rational {
  double sigma, drift;
  std::vector<std::pair<double, double>> pos, neg;  // (a, rho)
};

// (q - phi(z)) * prod(rho_i - z) * prod(rho_hat_j + z)
inline Poly characteristic(const Rational& r, double q) {
  Poly base{1.0};
  for (auto [a, rho] : r.pos) base = mul(base, {rho, -1.0});
  for (auto [a, rho] : r.neg) base = mul(base, {rho, 1.0});
  Poly phi = mul(Poly{0.0, r.drift, 0.5 * r.sigma * r.sigma}, base);
  for (std::size_t i = 0; i < r.pos.size(); ++i) {
    auto [a, rho] = r.pos[i];
    Poly t{0.0, 0.0, a / rho};  // z^2 a / (rho (rho - z)) times base
    for (std::size_t k = 0; k < r.pos.size(); ++k)
      if (k != i) t = mul(t, {r.pos[k].second, -1.0});
    for (auto [b, eta] : r.neg) t = mul(t, {eta, 1.0});
    phi = add(phi, t);
  }
  for (std::size_t j = 0; j < r.neg.size(); ++j) {
    auto [a, rho] = r.neg[j];
    Poly t{0.0, 0.0, a / rho};
    for (auto [b, eta] : r.pos) t = mul(t, {eta, -1.0});
    for (std::size_t k = 0; k < r.neg.size(); ++k)
      if (k != j) t = mul(t, {r.neg[k].second, 1.0});
    phi = add(phi, t);
  }
  return add(scale(base, q), scale(phi, -1.0));
}

inline std::vector<std::complex<double>> companion_roots(Poly p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  const int n = int(p.size()) - 1;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C);
  std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

// Positive-side roots zeta (> 0) and negative-side roots zeta_hat (> 0), sorted.
inline std::pair<std::vector<double>, std::vector<double>> real_roots(const Rational& r, double q) {
  std::vector<double> pos, neg;
  for (auto z : companion_roots(characteristic(r, q))) {
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
    (z.real() > 0 ? pos : neg).push_back(std::abs(z.real()));
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  return {pos, neg};
}

// E[exp(-z S)] = N(z)/D(z), N = prod(1 + z/rho), D = prod(1 + z/zeta).
// Weight of Exp(zeta_k): Res_{z=-zeta_k} (N/D) / zeta_k.
struct Mixture {
  double c0;
  std::vector<double> c;
};

inline Mixture residues(const std::vector<double>& rho, const std::vector<double>& zeta) {
  Poly N{1.0}, D{1.0};
  for (double r : rho) N = mul(N, {1.0, 1.0 / r});
  for (double z : zeta) D = mul(D, {1.0, 1.0 / z});
  const Poly dD = derivative(D);
  Mixture m;
  m.c0 = N.size() == D.size() ? N.back() / D.back() : 0.0;
  for (double z : zeta) m.c.push_back(eval(N, -z) / eval(dD, -z) / z);
  return m;
}

inline thetawh::SeriesProcess to_process(const Rational& r) {
  std::vector<thetawh::ExpTerm> p, n;
  for (auto [a, rho] : r.pos) p.push_back({a, rho});
  for (auto [a, rho] : r.neg) n.push_back({a, rho});
  return thetawh::finite_process(r.sigma, r.drift, p, n);
}

inline Rational demo() { return {0.5, 0.1, {{1.0, 2.0}, {0.8, 5.0}}, {{0.6, 1.5}, {0.9, 4.0}}}; }

}  // namespace oracle
