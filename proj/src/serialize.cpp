#include "mpslam/serialize.hpp"

#include <cstdio>
#include <stdexcept>

namespace mpslam {

using nlohmann::json;

json scene_to_json(const Scene& scene) {
    json reflectors = json::array();
    for (const Eigen::Vector2d& r : scene.reflectors) {
        reflectors.push_back({r.x(), r.y()});
    }
    return json{{"rx", {scene.rx_position.x(), scene.rx_position.y()}},
                {"phi0", scene.orientation},
                {"tau_e", scene.clock_offset},
                {"reflectors", reflectors}};
}

Scene scene_from_json(const json& j) {
    try {
        Scene s;
        const auto& rx = j.at("rx");
        if (!rx.is_array() || rx.size() != 2) {
            throw std::invalid_argument("scene: \"rx\" must be [x, y]");
        }
        s.rx_position = {rx[0].get<double>(), rx[1].get<double>()};
        s.orientation = j.at("phi0").get<double>();
        s.clock_offset = j.at("tau_e").get<double>();
        for (const auto& r : j.at("reflectors")) {
            if (!r.is_array() || r.size() != 2) {
                throw std::invalid_argument("scene: each reflector must be [x, y]");
            }
            s.reflectors.emplace_back(r[0].get<double>(), r[1].get<double>());
        }
        return s;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scene: malformed document: ") + e.what());
    }
}

json multipath_to_json(const MultipathSet& obs) {
    json paths = json::array();
    for (const PathObservation& p : obs.paths) {
        paths.push_back({p.tdoa, p.aod, p.daoa});
    }
    return json{{"paths", paths},
                {"provenance", obs.provenance == Provenance::Exact ? "exact" : "quantized"}};
}

MultipathSet multipath_from_json(const json& j) {
    try {
        MultipathSet obs;
        for (const auto& p : j.at("paths")) {
            if (!p.is_array() || p.size() != 3) {
                throw std::invalid_argument("paths: each entry must be [tdoa, aod, daoa]");
            }
            obs.paths.push_back(
                {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
        if (j.contains("provenance")) {
            const std::string prov = j["provenance"].get<std::string>();
            if (prov == "exact") {
                obs.provenance = Provenance::Exact;
            } else if (prov == "quantized") {
                obs.provenance = Provenance::Quantized;
            } else {
                throw std::invalid_argument("paths: unknown provenance \"" + prov + "\"");
            }
        }
        return obs;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("paths: malformed document: ") + e.what());
    }
}

json estimate_to_json(const LocationEstimate& est) {
    json reflectors = json::array();
    for (const Eigen::Vector2d& r : est.reflectors) {
        reflectors.push_back({r.x(), r.y()});
    }
    return json{{"rx", {est.rx_position.x(), est.rx_position.y()}},
                {"l_e", est.l_e},
                {"tau_e", est.clock_offset},
                {"reflectors", reflectors},
                {"los", est.los},
                {"residual_norm", est.residual_norm},
                {"used_paths", est.used_paths}};
}

MultipathSet observations_from_json(const json& j) {
    if (j.contains("paths")) return multipath_from_json(j);
    if (j.contains("rx")) return exact_observations(scene_from_json(j));
    throw std::invalid_argument(
        "input document must contain either \"paths\" or a scene with \"rx\"");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace mpslam
