#pragma once

#include "latshell/geometry.hpp"
#include "latshell/phase.hpp"

#include <json.hpp>

namespace latshell {

// Body descriptors: {"kind":"ball","dim":2}, {"kind":"pball","p":4,"dim":3},
// {"kind":"ellipsoid","A":[[1,0],[0,4]]}. Throws ConfigError naming the
// offending field.
ConvexBody body_from_json(const nlohmann::json& j);
nlohmann::json body_to_json(const ConvexBody& body);

// Phase descriptors: {"kind":"parabolic","dim":2}, {"kind":"diff_gauge","body":{...}}.
PhaseFunction phase_from_json(const nlohmann::json& j);
nlohmann::json phase_to_json(const PhaseFunction& phi);

} // namespace latshell
