#pragma once

#include "mpslam/geometry.hpp"
#include "mpslam/localization.hpp"

#include <json.hpp>

#include <string>

namespace mpslam {

/// {"rx": [x, y], "phi0": rad, "tau_e": s, "reflectors": [[x, y], ...]}
nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

/// {"paths": [[tdoa_s, aod_rad, daoa_rad], ...], "provenance": "exact"|"quantized"}
nlohmann::json multipath_to_json(const MultipathSet& obs);
MultipathSet multipath_from_json(const nlohmann::json& j);

nlohmann::json estimate_to_json(const LocationEstimate& est);

/// Parses either document flavor: a scene (run through the exact forward
/// model) or a bare path list. Throws std::invalid_argument on anything else.
MultipathSet observations_from_json(const nlohmann::json& j);

/// Round-trip safe double formatting ("%.17g"), shared by all CSV writers.
std::string format_double(double v);

}  // namespace mpslam
