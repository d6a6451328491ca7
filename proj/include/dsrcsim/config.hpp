#pragma once

#include <iosfwd>
#include <string>

#include "dsrcsim/scenario.hpp"

namespace dsrcsim {

// Scenario files are flat "key = value" text grouped by [section]
// headers; '#' and ';' start comments. Unknown sections or keys are
// rejected. Every key has a default, so an empty file is a valid
// scenario. The full grammar is documented in the README.
ScenarioConfig parse_scenario(std::istream& in, const std::string& origin,
                              const std::string& base_dir = "");

// Relative paths inside the file (coefficients_file) resolve against the
// config file's directory.
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace dsrcsim
