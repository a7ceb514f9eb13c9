#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "rational_oracle.hpp"
#include "thetawh/errors.hpp"
#include "thetawh/io.hpp"
#include "thetawh/mc_oracle.hpp"
#include "thetawh/wiener_hopf.hpp"

using namespace thetawh;

namespace {

SimConfig config(std::size_t paths, std::uint64_t seed = 42) {
  SimConfig c;
  c.n_paths = paths;
  c.seed = seed;
  return c;
}

double ks99(std::size_t n) { return 1.63 / std::sqrt(double(n)); }

}  // namespace

TEST(MonteCarlo, PureDriftIsExponential) {
  const double mu = 0.7;
  SimConfig c = config(20000);
  c.q = 1.5;
  const EmpiricalLaw e = simulate_sup(finite_process(0.0, mu, {}, {}), c);
  EXPECT_EQ(e.atom_frequency, 0.0);
  const double ks = ks_statistic(e, [&](double x) { return x < 0 ? 0.0 : 1 - std::exp(-c.q / mu * x); });
  EXPECT_LT(ks, ks99(c.n_paths));
}

TEST(MonteCarlo, NegativeDriftGivesAtom) {
  const EmpiricalLaw e = simulate_sup(finite_process(0.0, -0.4, {}, {}), config(1000));
  EXPECT_EQ(e.atom_frequency, 1.0);
  EXPECT_EQ(ks_statistic(e, [](double x) { return x < 0 ? 0.0 : 1.0; }), 0.0);
  EXPECT_EQ(ks_statistic(e, [](double x) { return x < 0 ? 0.0 : 0.25; }), 0.75);
}

TEST(MonteCarlo, Deterministic) {
  const SeriesProcess p = oracle::to_process(oracle::demo());
  const EmpiricalLaw a = simulate_sup(p, config(2000, 7));
  const EmpiricalLaw b = simulate_sup(p, config(2000, 7));
  const EmpiricalLaw d = simulate_sup(p, config(2000, 8));
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, d.samples);
  EXPECT_NE(path_seed(1, 0), path_seed(1, 1));
  EXPECT_NE(path_seed(1, 0), path_seed(2, 0));
}

TEST(MonteCarlo, BrownianMatchesClosedForm) {
  const double mu = 0.2, q = 1.0;
  const double phi = -mu + std::sqrt(mu * mu + 2 * q);
  const EmpiricalLaw e = simulate_sup(finite_process(1.0, mu, {}, {}), config(40000));
  const double ks = ks_statistic(e, [&](double x) { return x < 0 ? 0.0 : 1 - std::exp(-phi * x); });
  EXPECT_LT(ks, ks99(40000));
}

TEST(MonteCarlo, GridSamplingUnderestimates) {
  SimConfig c = config(20000);
  c.bridge = false;
  c.dt = 1e-2;
  const double phi = std::sqrt(2.0);
  const EmpiricalLaw e = simulate_sup(finite_process(1.0, 0.0, {}, {}), c);
  double mean = 0;
  for (double s : e.samples) mean += s;
  mean /= double(e.samples.size());
  // discrete monitoring shifts the maximum down by about 0.5826 sqrt(dt)
  EXPECT_LT(mean, 1 / phi - 0.03);
}

TEST(MonteCarlo, RationalMatchesMixture) {
  const SeriesProcess p = oracle::to_process(oracle::demo());
  for (Side s : {Side::Positive, Side::Negative}) {
    const SupremumLaw law = supremum_law(p, 1.0, s);
    const EmpiricalLaw e = simulate_sup(s == Side::Positive ? p : p.mirrored(), config(20000));
    EXPECT_LT(ks_statistic(e, [&](double x) { return sup_cdf(law, x); }), ks99(20000)) << to_string(s);
  }
}

TEST(MonteCarlo, HalfFamilyMatchesMixture) {
  const ThetaFamily f = make_family(Chi::Half, 0.5, 0.1, {1.0, 2.0, 1.5}, {0.7, 1.5, 2.0});
  const SupremumLaw law = supremum_law(f, 1.0, Side::Positive);
  const EmpiricalLaw e = simulate_sup(f, config(20000));
  EXPECT_GT(e.gaussian_variance, 0);
  const double ks = ks_statistic(e, [&](double x) { return sup_cdf(law, x); });
  EXPECT_LT(ks, ks99(20000));
  // the statistic does see a shifted law
  EXPECT_GT(ks_statistic(e, [&](double x) { return x < 0.1 ? 0.0 : sup_cdf(law, x - 0.1); }), 0.05);
}

TEST(MonteCarlo, ConfigErrors) {
  SimConfig c = config(0);
  EXPECT_THROW(validate(c), ValidationError);
  c = config(10);
  c.q = 0;
  EXPECT_THROW(validate(c), ValidationError);
  c = config(10);
  c.n_series_terms = 1000000;
  const ThetaFamily f = make_family(Chi::FiveHalves, 0.5, 0.1, {1.0, 2.0, 1.5}, {0.7, 1.5, 2.0});
  EXPECT_THROW(simulate_sup(f, c), ConfigError);
}

TEST(MonteCarlo, RawDump) {
  const auto dir = std::filesystem::temp_directory_path() / "thetawh_mc_dump";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "samples").string();
  const SimConfig c = config(500);
  const EmpiricalLaw e = simulate_sup(oracle::to_process(oracle::demo()), c);
  write_raw_samples(prefix, e, c);
  EXPECT_EQ(std::filesystem::file_size(prefix + ".bin"), 500 * sizeof(double));
  const auto header = nlohmann::json::parse(read_file(prefix + ".json"));
  EXPECT_EQ(header["count"], 500);
  EXPECT_EQ(header["dtype"], "float64");
  std::ifstream in(prefix + ".bin", std::ios::binary);
  std::vector<double> back(500);
  in.read(reinterpret_cast<char*>(back.data()), 500 * sizeof(double));
  EXPECT_EQ(back, e.samples);
  std::filesystem::remove_all(dir);
}
