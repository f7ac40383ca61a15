#include "mpslam/geometry.hpp"

#include "mpslam/errors.hpp"
#include "mpslam/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mpslam {

double wrap_angle(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("wrap_angle: non-finite input");
    }
    double r = std::remainder(x, kTwoPi);  // [-pi, pi]
    if (r <= -kPi) {
        r = kPi;  // the interval is open at -pi, closed at +pi
    }
    return r;
}

double circular_distance(double a, double b) {
    return std::abs(wrap_angle(a - b));
}

std::vector<PathParameters> forward_model(const Scene& scene, double eps_geom) {
    const Eigen::Vector2d& rx = scene.rx_position;
    std::vector<PathParameters> out;
    out.reserve(scene.reflectors.size());
    for (std::size_t i = 0; i < scene.reflectors.size(); ++i) {
        const Eigen::Vector2d& refl = scene.reflectors[i];
        const Eigen::Vector2d to_rx = refl - rx;
        if (refl.norm() < eps_geom || to_rx.norm() < eps_geom) {
            throw degenerate_geometry_error(
                "forward_model: reflector " + std::to_string(i) +
                " within " + std::to_string(eps_geom) + " m of a terminal");
        }
        PathParameters p;
        p.length = refl.norm() + to_rx.norm();
        p.delay = p.length / kSpeedOfLight;
        p.tdoa = p.delay - scene.clock_offset;
        p.aod = std::atan2(refl.y(), refl.x());
        // arrival angle = direction of the reflector as seen from the receiver
        p.aoa = std::atan2(to_rx.y(), to_rx.x());
        p.daoa = wrap_angle(p.aoa - scene.orientation);
        out.push_back(p);
    }
    return out;
}

MultipathSet exact_observations(const Scene& scene, double eps_geom) {
    MultipathSet obs;
    obs.provenance = Provenance::Exact;
    for (const PathParameters& p : forward_model(scene, eps_geom)) {
        obs.paths.push_back({p.tdoa, p.aod, p.daoa});
    }
    return obs;
}

Scene sample_scene(const ScenarioConfig& config, std::uint64_t seed) {
    if (config.n_paths < 3) {
        throw std::invalid_argument("sample_scene: n_paths must be >= 3");
    }
    if (config.side <= 2.0 * config.eps_geom) {
        throw std::invalid_argument("sample_scene: side too small for eps_geom");
    }
    if (config.clock_offset_span < 0.0) {
        throw std::invalid_argument("sample_scene: clock_offset_span must be >= 0");
    }
    RandomStream rng(seed);
    Scene scene;

    // Draw order is fixed; changing it changes every seeded result.
    do {
        scene.rx_position = {rng.uniform(0.0, config.side), rng.uniform(0.0, config.side)};
    } while (scene.rx_position.norm() < config.eps_geom);

    scene.orientation = wrap_angle(rng.uniform(0.0, kTwoPi));
    const double los_delay = scene.rx_position.norm() / kSpeedOfLight;
    scene.clock_offset = los_delay + rng.uniform(0.0, config.clock_offset_span);

    scene.reflectors.reserve(static_cast<std::size_t>(config.n_paths));
    for (int i = 0; i < config.n_paths; ++i) {
        Eigen::Vector2d r;
        do {
            r = {rng.uniform(0.0, config.side), rng.uniform(0.0, config.side)};
        } while (r.norm() < config.eps_geom || (r - scene.rx_position).norm() < config.eps_geom);
        scene.reflectors.push_back(r);
    }
    return scene;
}

}  // namespace mpslam
