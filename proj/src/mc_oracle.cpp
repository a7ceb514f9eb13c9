#include "thetawh/mc_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "thetawh/errors.hpp"
#include "thetawh/io.hpp"
#include "thetawh/quadrature.hpp"

namespace thetawh {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Max allowed mean number of jumps per path.
constexpr double kMaxJumpsPerPath = 1e7;

struct Term {
  double rate;  // a_n
  double rho;
  double sign;
};

// sum_{n > N} a_n / rho_n^2 for one side.
Real tail_second_moment(const SeriesSide& side, std::size_t N) {
  if (side.is_finite()) {
    Real s = 0;
    for (std::size_t n = N + 1; n <= side.size(); ++n) {
      const ExpTerm t = side(n);
      s += t.a / (t.rho * t.rho);
    }
    return s;
  }
  const std::size_t K = N + 4096;
  Real s = 0;
  for (std::size_t n = K; n > N; --n) {
    const ExpTerm t = side(n);
    s += t.a / (t.rho * t.rho);
  }
  const Real x0 = std::max<Real>(Real(K) + Real(0.5), side.smooth_from());
  s += integrate(
      [&](Real u) {
        const Real x = 1 / u;
        const ExpTerm t = side.smooth(x);
        return t.a / (t.rho * t.rho) * x * x;
      },
      Real(0), 1 / x0, 8);
  return s;
}

struct Simulator {
  std::vector<Term> terms;
  std::vector<double> cumulative;
  double lambda = 0;
  double drift = 0;
  double variance = 0;

  Simulator(const SeriesProcess& p, std::size_t n_terms, double q) {
    Real compensator = 0;
    for (const SeriesSide* side : {&p.measure.pos, &p.measure.neg}) {
      const double sign = side == &p.measure.pos ? 1 : -1;
      const std::size_t N = std::min(n_terms, side->size());
      for (std::size_t n = 1; n <= N; ++n) {
        const ExpTerm t = side->operator()(n);
        terms.push_back({static_cast<double>(t.a), static_cast<double>(t.rho), sign});
        compensator += sign * t.a / t.rho;
      }
      variance += static_cast<double>(2 * tail_second_moment(*side, N));
    }
    Real acc = 0;
    for (const Term& t : terms) {
      acc += t.rate;
      cumulative.push_back(static_cast<double>(acc));
    }
    lambda = static_cast<double>(acc);
    if (!std::isfinite(lambda) || lambda / q > kMaxJumpsPerPath)
      throw ConfigError("jump rate " + std::to_string(lambda) +
                        " is too large; lower n_series_terms (the Gaussian term absorbs the tail)");
    // Compensated jumps: mean drift minus the means of the simulated terms.
    drift = static_cast<double>(p.mean_drift - compensator);
    variance += p.sigma * p.sigma;
  }

  double run(std::mt19937_64& rng, const SimConfig& cfg) const {
    std::exponential_distribution<double> exp1(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double s = std::sqrt(variance);
    const double horizon = exp1(rng) / cfg.q;
    double t = 0, x = 0, sup = 0;

    auto diffuse = [&](double h) {
      if (h <= 0) return;
      const double x1 = x + drift * h + s * std::sqrt(h) * normal(rng);
      if (cfg.bridge) {
        const double d = x1 - x;
        // 1 - U keeps the log finite
        const double m = 0.5 * (x + x1 + std::sqrt(d * d - 2 * variance * h * std::log(1 - uniform(rng))));
        sup = std::max(sup, m);
      }
      x = x1;
      sup = std::max(sup, x);
    };

    for (;;) {
      const double next = lambda > 0 ? t + exp1(rng) / lambda : horizon;
      const double end = std::min(next, horizon);
      if (cfg.bridge) {
        diffuse(end - t);
      } else {
        const double span = end - t;
        const auto steps = static_cast<std::size_t>(std::ceil(span / cfg.dt));
        for (std::size_t i = 0; i < steps; ++i) diffuse(std::min(cfg.dt, span - i * cfg.dt));
      }
      t = end;
      if (next >= horizon) break;
      const double pick = uniform(rng) * lambda;
      const std::size_t k = std::min<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin(), terms.size() - 1);
      x += terms[k].sign * exp1(rng) / terms[k].rho;
      sup = std::max(sup, x);
    }
    return sup;
  }
};

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.n_paths < 1) throw ValidationError("paths", "must be >= 1");
  if (!(cfg.dt > 0)) throw ValidationError("dt", "must be > 0");
  if (!(cfg.q > 0) || !std::isfinite(cfg.q)) throw ValidationError("q", "must be > 0");
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
  return splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL));
}

double EmpiricalLaw::cdf(double x) const {
  if (samples.empty()) return 0;
  return static_cast<double>(std::upper_bound(samples.begin(), samples.end(), x) - samples.begin()) /
         static_cast<double>(samples.size());
}

EmpiricalLaw simulate_sup(const SeriesProcess& p, const SimConfig& cfg) {
  validate(cfg);
  const Simulator sim(p, cfg.n_series_terms, cfg.q);
  EmpiricalLaw emp;
  emp.samples.resize(cfg.n_paths);
  for (std::size_t i = 0; i < cfg.n_paths; ++i) {
    std::mt19937_64 rng(path_seed(cfg.seed, i));
    emp.samples[i] = sim.run(rng, cfg);
  }
  std::sort(emp.samples.begin(), emp.samples.end());
  const auto zeros = std::upper_bound(emp.samples.begin(), emp.samples.end(), 0.0) - emp.samples.begin();
  emp.atom_frequency = static_cast<double>(zeros) / static_cast<double>(cfg.n_paths);
  emp.gaussian_variance = sim.variance - p.sigma * p.sigma;
  emp.jump_rate = sim.lambda;
  return emp;
}

EmpiricalLaw simulate_sup(const ThetaFamily& family, const SimConfig& cfg) {
  // series_process carries E[X_1]; for chi < 2 that folds the h = 0 drift
  // together with the full compensator, so the simulated drift is the same
  // for both cutoff conventions.
  return simulate_sup(series_process(family), cfg);
}

double ks_statistic(const EmpiricalLaw& emp, const std::function<double(double)>& cdf) {
  const auto& s = emp.samples;
  const double n = static_cast<double>(s.size());
  double d = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double f = cdf(s[i]);
    const double f_left = s[i] <= 0 ? 0.0 : f;
    d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(f_left - static_cast<double>(i) / n)});
    i = j;
  }
  return d;
}

void write_raw_samples(const std::string& path, const EmpiricalLaw& emp, const SimConfig& cfg) {
  std::ofstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot write " + path + ".bin");
  bin.write(reinterpret_cast<const char*>(emp.samples.data()),
            static_cast<std::streamsize>(emp.samples.size() * sizeof(double)));
  const nlohmann::ordered_json header = {
      {"schema_version", kSchemaVersion},
      {"dtype", "float64"},
      {"byte_order", std::endian::native == std::endian::little ? "little" : "big"},
      {"count", emp.samples.size()},
      {"sorted", true},
      {"q", cfg.q},
      {"seed", cfg.seed},
      {"n_paths", cfg.n_paths},
      {"n_series_terms", cfg.n_series_terms},
      {"dt", cfg.dt},
      {"bridge", cfg.bridge},
      {"atom_frequency", emp.atom_frequency},
      {"gaussian_variance", emp.gaussian_variance},
      {"jump_rate", emp.jump_rate}};
  write_file(path + ".json", header.dump(2) + "\n");
}

}  // namespace thetawh
