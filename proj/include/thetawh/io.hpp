#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thetawh/model.hpp"
#include "thetawh/types.hpp"
#include "thetawh/wiener_hopf.hpp"

namespace thetawh {

inline constexpr int kSchemaVersion = 1;

/// {"schema_version", "chi", "sigma", "mu", "c1", "c2", "alpha1", "alpha2",
///  "beta1", "beta2"}. Returns the calibrated family; ValidationError names
/// the offending field.
ThetaFamily parse_params(const std::string& json_text);
ThetaFamily load_params(const std::string& path);
std::string params_to_json(const ThetaFamily& family);

/// {"schema_version", "q", "side", "c0", "terms": [{"zeta", "c"}],
///  "tail_mass_bound", "tail_rate"}
std::string law_to_json(const SupremumLaw& law);
SupremumLaw law_from_json(const std::string& json_text);
void save_law(const std::string& path, const SupremumLaw& law);
SupremumLaw load_law(const std::string& path);

/// "a:b:h" -> a, a + h, ..., b (inclusive up to rounding).
std::vector<double> parse_grid(const std::string& spec);
/// "a+bi", "a-bi", "bi", "a"; ValidationError on anything else.
Complex parse_complex(const std::string& text);
/// "0.1,1,10"
std::vector<double> parse_list(const std::string& text, const std::string& field);
Side parse_side(const std::string& text);

/// x,cdf,density at 17 significant digits; density is left empty at x = 0.
void write_law_grid_csv(std::ostream& os, const SupremumLaw& law, const std::vector<double>& grid);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace thetawh
