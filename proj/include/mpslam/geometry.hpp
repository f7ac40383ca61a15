#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace mpslam {

/// Speed of light in m/s, exact. All internal units are SI (meters, seconds,
/// radians).
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle to (-pi, pi]. Throws std::invalid_argument on non-finite
/// input.
double wrap_angle(double x);

/// |a - b| on the circle, always in [0, pi].
double circular_distance(double a, double b);

// Ground truth of one realization. The transmitter sits at the origin; the
// receiver pose, its clock offset and the single-bounce reflector positions
// are the unknowns every solver targets.
struct Scene {
    Eigen::Vector2d rx_position = Eigen::Vector2d::Zero();  // meters
    double orientation = 0.0;                               // radians, (-pi, pi]
    double clock_offset = 0.0;                              // seconds
    std::vector<Eigen::Vector2d> reflectors;                // meters

    int n_paths() const { return static_cast<int>(reflectors.size()); }
};

// Exact multipath parameters of one single-bounce path.
struct PathParameters {
    double delay = 0.0;   // seconds, tx -> reflector -> rx
    double tdoa = 0.0;    // seconds, delay - clock_offset
    double aod = 0.0;     // radians, departure angle at the transmitter
    double aoa = 0.0;     // radians, reflector direction seen from the receiver
    double daoa = 0.0;    // radians, aoa - orientation, wrapped
    double length = 0.0;  // meters, c * delay
};

// One observed path triplet as a channel estimator would deliver it.
struct PathObservation {
    double tdoa = 0.0;  // seconds
    double aod = 0.0;   // radians
    double daoa = 0.0;  // radians
};

enum class Provenance { Exact, Quantized };

// The solver-facing view of a channel estimate: per-path (TDoA, AoD, DAoA)
// triplets. Ordering is stable and index-aligned with the scene's reflectors
// when produced by the forward model.
struct MultipathSet {
    std::vector<PathObservation> paths;
    Provenance provenance = Provenance::Exact;

    int size() const { return static_cast<int>(paths.size()); }
};

struct ScenarioConfig {
    double side = 100.0;              // m, square side; positions are U([0, side]^2)
    int n_paths = 20;                 // reflectors per scene
    double clock_offset_span = 40e-9; // s, offset added on top of the LoS delay
    double eps_geom = 1.0;            // m, minimum terminal/reflector separation
};

/// Exact forward model: maps a scene to the per-path multipath parameters.
/// Throws degenerate_geometry_error when a reflector is within eps_geom of
/// either terminal.
std::vector<PathParameters> forward_model(const Scene& scene, double eps_geom = 1.0);

/// Convenience wrapper packing forward_model output into a MultipathSet.
MultipathSet exact_observations(const Scene& scene, double eps_geom = 1.0);

/// Draws a random scene: rx and reflectors uniform in the square, orientation
/// uniform on the circle, clock offset = LoS delay + U(0, clock_offset_span).
/// Deterministic given (config, seed); offending reflectors are resampled.
Scene sample_scene(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace mpslam
