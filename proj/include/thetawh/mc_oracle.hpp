#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "thetawh/model.hpp"

namespace thetawh {

struct SimConfig {
  std::size_t n_paths = 100000;
  std::size_t n_series_terms = 1000;  // per side
  double dt = 1e-3;
  std::uint64_t seed = 42;
  double q = 1;
  // Exact maximum of the Brownian piece between jump epochs; dt is then unused.
  bool bridge = true;
};

void validate(const SimConfig& cfg);

struct EmpiricalLaw {
  std::vector<double> samples;  // sorted
  double atom_frequency = 0;    // share of exact zeros
  double gaussian_variance = 0;  // per unit time, both truncated tails
  double jump_rate = 0;          // total rate of the simulated terms

  double cdf(double x) const;
};

/// Superposed compound Poisson jumps (exact) plus Brownian motion with the
/// compensated drift and the truncated-tail variance.
EmpiricalLaw simulate_sup(const ThetaFamily& family, const SimConfig& cfg);
EmpiricalLaw simulate_sup(const SeriesProcess& process, const SimConfig& cfg);

/// sup |F_emp - F| with the atom at 0 handled explicitly (F(0-) = 0).
double ks_statistic(const EmpiricalLaw& emp, const std::function<double(double)>& cdf);

/// Writes path.bin (float64, native byte order) and path.json (header).
void write_raw_samples(const std::string& path, const EmpiricalLaw& emp, const SimConfig& cfg);

/// Stream seed for path i.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

}  // namespace thetawh
