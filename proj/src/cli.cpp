#include "thetawh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thetawh/errors.hpp"
#include "thetawh/io.hpp"
#include "thetawh/mc_oracle.hpp"
#include "thetawh/roots.hpp"
#include "thetawh/verify.hpp"
#include "thetawh/wiener_hopf.hpp"

namespace thetawh::cli {

namespace {

using json = nlohmann::ordered_json;

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

void check_q(double q) {
  if (!(q > 0) || !std::isfinite(q)) throw ValidationError("q", "must be > 0");
}

// Writes to path, or to out when path is empty or "-".
void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_file(path, text);
}

struct Common {
  std::string params;
  double q = 1;
};

int cmd_roots(const Common& c, const std::string& side, std::size_t n, std::size_t extra, const std::string& out_path,
              std::ostream& out) {
  check_q(c.q);
  if (n < 1) throw ValidationError("n", "must be >= 1");
  const ThetaFamily f = load_params(c.params);
  RootSet rs = bracket_and_refine(f, c.q, parse_side(side), n);
  if (extra > 0) extend_roots(f, rs, n);
  std::ostringstream os;
  write_roots_csv(os, rs, extra);
  emit(out, out_path, os.str());
  return kOk;
}

int cmd_factor(const Common& c, const std::string& z_text, double product_tol, std::ostream& out) {
  check_q(c.q);
  const Complex z = parse_complex(z_text);
  if (z.real() < 0) throw ValidationError("z", "Re(z) must be >= 0");
  const ThetaFamily f = load_params(c.params);
  const WhFactorization w = factorize(f, c.q, product_tol);
  json j = {{"schema_version", kSchemaVersion},
            {"q", c.q},
            {"z", complex_json(z)},
            {"pos", complex_json(wh_factor(w, z, Side::Positive))},
            {"neg", complex_json(wh_factor(w, z, Side::Negative))},
            {"roots", {{"pos", w.pos.size()}, {"neg", w.neg.size()}}},
            {"product_tail_bound", {{"pos", w.pos.product_tail_bound}, {"neg", w.neg.product_tail_bound}}}};
  try {
    j["residual"] = factorization_residual(w, z);
  } catch (const SingularityError& e) {
    j["residual"] = nullptr;
    j["warning"] = e.what();
  }
  out << std::setprecision(17) << j.dump(2) << "\n";
  return kOk;
}

int cmd_sup_dist(const Common& c, const std::string& side, const std::string& grid, const std::string& outs,
                 double mass_tol, std::ostream& out) {
  check_q(c.q);
  const std::vector<double> g = parse_grid(grid);
  const ThetaFamily f = load_params(c.params);
  LawRequest req;
  req.mass_tol = mass_tol;
  const SupremumLaw law = supremum_law(f, c.q, parse_side(side), req);
  const auto paths = split(outs, ',');
  if (paths.size() > 2) throw ValidationError("out", "expected law.json[,grid.csv]");
  emit(out, paths.empty() ? "" : paths[0], law_to_json(law));
  if (paths.size() == 2) {
    std::ostringstream os;
    write_law_grid_csv(os, law, g);
    emit(out, paths[1], os.str());
  }
  return kOk;
}

void print_check(std::ostream& out, const CheckResult& r) {
  out << (r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL") << ' ' << r.name;
  if (!r.skipped) out << " measured=" << std::setprecision(6) << r.measured << " tol=" << r.tolerance;
  if (!r.detail.empty()) out << " (" << r.detail << ")";
  out << '\n';
}

int cmd_verify(const Common& c, const std::string& suite, const std::string& q_list, std::ostream& out) {
  static const std::vector<std::string> suites = {"interlacing", "factorization", "asymptotics", "mixture", "all"};
  if (std::find(suites.begin(), suites.end(), suite) == suites.end())
    throw ValidationError("suite", "expected interlacing|factorization|asymptotics|mixture|all");
  const std::vector<double> qs = parse_list(q_list, "q-list");
  for (double q : qs) check_q(q);
  const ThetaFamily f = load_params(c.params);
  auto want = [&](const char* s) { return suite == "all" || suite == s; };
  std::vector<CheckResult> results;
  for (double q : qs) {
    for (Side side : {Side::Positive, Side::Negative}) {
      if (want("interlacing")) results.push_back(check_interlacing(f, q, side));
      if (want("asymptotics")) results.push_back(check_asymptotics(f, q, side));
    }
    if (want("factorization") || want("mixture")) {
      const WhFactorization w = factorize(f, q);
      if (want("factorization")) results.push_back(check_factorization(w, factorization_points(50, 2024)));
      if (want("mixture"))
        for (Side side : {Side::Positive, Side::Negative})
          for (auto& r : check_mixture(f, q, side, w)) results.push_back(r);
    }
  }
  std::size_t failed = 0;
  for (const auto& r : results) {
    print_check(out, r);
    if (!r.pass) ++failed;
  }
  out << (failed ? "FAIL " : "PASS ") << results.size() - failed << "/" << results.size() << " checks\n";
  return failed ? kVerifyFailed : kOk;
}

struct SimArgs {
  std::size_t paths = 100000;
  std::uint64_t seed = 42;
  std::size_t terms = 1000;
  double dt = 1e-3;
  bool grid_only = false;
  std::string compare;
  std::string dump;
};

int cmd_simulate(const Common& c, const SimArgs& a, std::ostream& out) {
  check_q(c.q);
  ThetaFamily f = load_params(c.params);
  SimConfig cfg;
  cfg.n_paths = a.paths;
  cfg.seed = a.seed;
  cfg.n_series_terms = a.terms;
  cfg.dt = a.dt;
  cfg.q = c.q;
  cfg.bridge = !a.grid_only;
  validate(cfg);
  std::optional<SupremumLaw> law;
  if (!a.compare.empty()) {
    law = load_law(a.compare);
    if (std::abs(law->q - c.q) > 1e-12 * c.q) throw ValidationError("compare", "law q differs from --q");
    if (law->side == Side::Negative) f = f.mirrored();
  }
  const EmpiricalLaw emp = simulate_sup(f, cfg);
  if (!a.dump.empty()) write_raw_samples(a.dump, emp, cfg);
  json j = {{"schema_version", kSchemaVersion},
            {"q", c.q},
            {"paths", cfg.n_paths},
            {"seed", cfg.seed},
            {"series_terms", cfg.n_series_terms},
            {"bridge", cfg.bridge},
            {"dt", cfg.dt},
            {"atom_frequency", emp.atom_frequency},
            {"jump_rate", emp.jump_rate},
            {"gaussian_variance", emp.gaussian_variance},
            {"mean", std::accumulate(emp.samples.begin(), emp.samples.end(), 0.0) / double(emp.samples.size())}};
  if (law) {
    j["side"] = to_string(law->side);
    j["ks"] = ks_statistic(emp, [&](double x) { return sup_cdf(*law, x); });
    j["ks_99"] = 1.63 / std::sqrt(double(cfg.n_paths));
    j["c0"] = law->c0;
  }
  out << std::setprecision(17) << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wiener-Hopf factorization for theta-family Levy processes"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--params", common.params, "parameter file (JSON)")->required();
    sub->add_option("--q", common.q, "killing rate");
  };

  std::string side = "pos", out_path, z = "0", grid = "0:5:0.01", outs, suite = "all", q_list = "0.1,1,10";
  std::size_t n = 50, extra = 0;
  double product_tol = 1e-10, mass_tol = 1e-4;
  SimArgs sim;

  auto* roots = app.add_subcommand("roots", "root table as CSV");
  add_common(roots);
  roots->add_option("--side", side, "pos | neg");
  roots->add_option("--n", n, "number of refined roots");
  roots->add_option("--extra", extra, "rows from the asymptotic tail");
  roots->add_option("--out", out_path, "CSV path (default stdout)");

  auto* factor = app.add_subcommand("factor", "both Wiener-Hopf factors and the factorization residual");
  add_common(factor);
  factor->add_option("--z", z, "complex point, e.g. 0.5+1.2i");
  factor->add_option("--product-tol", product_tol);

  auto* sup = app.add_subcommand("sup-dist", "law of the supremum (or infimum) at an exponential time");
  add_common(sup);
  sup->add_option("--side", side, "pos | neg");
  sup->add_option("--grid", grid, "start:stop:step");
  sup->add_option("--out", outs, "law.json[,grid.csv]");
  sup->add_option("--mass-tol", mass_tol);

  auto* ver = app.add_subcommand("verify", "property checks");
  add_common(ver);
  ver->add_option("--suite", suite, "interlacing | factorization | asymptotics | mixture | all");
  ver->add_option("--q-list", q_list, "comma separated killing rates");

  auto* simc = app.add_subcommand("simulate", "Monte Carlo supremum sample");
  add_common(simc);
  simc->add_option("--paths", sim.paths);
  simc->add_option("--seed", sim.seed);
  simc->add_option("--terms", sim.terms, "series terms per side");
  simc->add_option("--dt", sim.dt, "grid step when --grid-only");
  simc->add_flag("--grid-only", sim.grid_only, "sample the diffusion maximum on the dt grid only");
  simc->add_option("--compare", sim.compare, "law.json from sup-dist");
  simc->add_option("--dump", sim.dump, "raw sample prefix (.bin + .json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kInvalidInput;
  }

  try {
    if (*roots) return cmd_roots(common, side, n, extra, out_path, out);
    if (*factor) return cmd_factor(common, z, product_tol, out);
    if (*sup) return cmd_sup_dist(common, side, grid, outs, mass_tol, out);
    if (*ver) return cmd_verify(common, suite, q_list, out);
    if (*simc) return cmd_simulate(common, sim, out);
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kInvalidInput;
}

}  // namespace thetawh::cli
