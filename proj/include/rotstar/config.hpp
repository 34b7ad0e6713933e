#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rotstar/families.hpp"
#include "rotstar/generator.hpp"
#include "rotstar/spectral.hpp"

namespace rotstar {

using Json = nlohmann::ordered_json;

// Complete default configuration; also the schema: a user config may only use
// keys present here, with the same JSON types.
Json default_config();

// Overlays `user` on the defaults. Throws ConfigError on unknown keys or type mismatches.
Json merge_config(const Json& user);
Json load_config(const std::string& path);

EquationOfState eos_from(const Json& cfg);
Rotation rotation_from(const Json& cfg);
GridSpec grid_from(const Json& cfg);
ScfOptions scf_from(const Json& cfg);
BasisSpec basis_from(const Json& cfg);
GeneratorSpec generator_from(const Json& cfg);
SpectralSpec spectral_from(const Json& cfg);
FamilyOptions family_options_from(const Json& cfg);
std::vector<double> mu_grid_from(const Json& cfg);

}  // namespace rotstar
