#include "thetawh/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "thetawh/errors.hpp"

namespace thetawh {

using json = nlohmann::ordered_json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("json", e.what());
  }
}

void check_schema(const json& j) {
  if (!j.is_object()) throw ValidationError("json", "expected an object");
  if (!j.contains("schema_version")) throw ValidationError("schema_version", "missing");
  if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion)
    throw ValidationError("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
}

double number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ValidationError(path, "missing");
  const json& v = j[key];
  if (!v.is_number()) throw ValidationError(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path, "must be finite");
  return x;
}

double positive(const json& j, const std::string& key) {
  const double x = number(j, key, key);
  if (!(x > 0)) throw ValidationError(key, "must be > 0");
  return x;
}

}  // namespace

ThetaFamily parse_params(const std::string& text) {
  const json j = parse_json(text);
  check_schema(j);
  const Chi chi = chi_from_value(number(j, "chi", "chi"));
  const double sigma = number(j, "sigma", "sigma");
  if (sigma < 0) throw ValidationError("sigma", "must be >= 0");
  const double mu = number(j, "mu", "mu");
  SideParams pos, neg;
  pos.c = number(j, "c1", "c1");
  neg.c = number(j, "c2", "c2");
  if (pos.c < 0) throw ValidationError("c1", "must be >= 0");
  if (neg.c < 0) throw ValidationError("c2", "must be >= 0");
  pos.alpha = positive(j, "alpha1");
  neg.alpha = positive(j, "alpha2");
  pos.beta = positive(j, "beta1");
  neg.beta = positive(j, "beta2");
  return make_family(chi, sigma, mu, pos, neg);
}

ThetaFamily load_params(const std::string& path) { return parse_params(read_file(path)); }

std::string params_to_json(const ThetaFamily& f) {
  json j = {{"schema_version", kSchemaVersion},
            {"chi", chi_value(f.chi)},
            {"sigma", f.sigma},
            {"mu", f.mu},
            {"c1", f.c1},
            {"c2", f.c2},
            {"alpha1", f.alpha1},
            {"alpha2", f.alpha2},
            {"beta1", f.beta1},
            {"beta2", f.beta2}};
  return j.dump(2) + "\n";
}

std::string law_to_json(const SupremumLaw& law) {
  json terms = json::array();
  for (std::size_t i = 0; i < law.n_terms(); ++i) terms.push_back({{"zeta", law.rates[i]}, {"c", law.weights[i]}});
  json j = {{"schema_version", kSchemaVersion},
            {"q", law.q},
            {"side", to_string(law.side)},
            {"c0", law.c0},
            {"terms", terms},
            {"tail_mass_bound", law.tail_mass_bound},
            {"tail_rate", law.tail_rate}};
  return j.dump(2) + "\n";
}

SupremumLaw law_from_json(const std::string& text) {
  const json j = parse_json(text);
  check_schema(j);
  SupremumLaw law;
  law.q = number(j, "q", "q");
  if (!j.contains("side") || !j["side"].is_string()) throw ValidationError("side", "missing");
  law.side = parse_side(j["side"].get<std::string>());
  law.c0 = number(j, "c0", "c0");
  if (!j.contains("terms") || !j["terms"].is_array()) throw ValidationError("terms", "missing array");
  std::size_t i = 0;
  for (const json& t : j["terms"]) {
    const std::string path = "terms[" + std::to_string(i++) + "]";
    if (!t.is_object()) throw ValidationError(path, "expected an object");
    law.rates.push_back(number(t, "zeta", path + ".zeta"));
    law.weights.push_back(number(t, "c", path + ".c"));
  }
  law.tail_mass_bound = number(j, "tail_mass_bound", "tail_mass_bound");
  law.tail_rate = j.contains("tail_rate") ? number(j, "tail_rate", "tail_rate") : 0;
  return law;
}

void save_law(const std::string& path, const SupremumLaw& law) { write_file(path, law_to_json(law)); }
SupremumLaw load_law(const std::string& path) { return law_from_json(read_file(path)); }

std::vector<double> parse_grid(const std::string& spec) {
  double a, b, h;
  char c1, c2;
  std::istringstream is(spec);
  if (!(is >> a >> c1 >> b >> c2 >> h) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
    throw ValidationError("grid", "expected start:stop:step");
  if (!(h > 0) || b < a) throw ValidationError("grid", "need step > 0 and stop >= start");
  const double count = std::floor((b - a) / h + 1e-9);
  if (count > 1e7) throw ValidationError("grid", "too many points");
  std::vector<double> g;
  for (long i = 0; i <= static_cast<long>(count); ++i) g.push_back(a + i * h);
  return g;
}

Complex parse_complex(const std::string& text) {
  static const std::regex re(
      R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij])?\s*$)");
  static const std::regex imag_only(R"(^\s*([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij]\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, imag_only)) {
    const double v = m[2].matched ? std::stod(m[2]) : 1.0;
    return {0, m[1] == "-" ? -v : v};
  }
  if (!std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched))
    throw ValidationError("z", "expected a complex number like 0.5+1.2i");
  const double re_part = m[1].matched ? std::stod(m[1]) : 0.0;
  double im_part = 0;
  if (m[2].matched) {
    im_part = m[3].matched ? std::stod(m[3]) : 1.0;
    if (m[2] == "-") im_part = -im_part;
  }
  return {re_part, im_part};
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError(field, "not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ValidationError(field, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(field, "empty list");
  return out;
}

Side parse_side(const std::string& text) {
  if (text == "pos" || text == "positive" || text == "+") return Side::Positive;
  if (text == "neg" || text == "negative" || text == "-") return Side::Negative;
  throw ValidationError("side", "expected pos or neg");
}

void write_law_grid_csv(std::ostream& os, const SupremumLaw& law, const std::vector<double>& grid) {
  os << std::setprecision(17) << "x,cdf,density\n";
  for (double x : grid) {
    os << x << ',' << sup_cdf(law, x) << ',';
    if (x > 0) os << sup_density(law, x);
    os << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("file", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

}  // namespace thetawh
