#pragma once

#include "mpslam/geometry.hpp"
#include "mpslam/localization.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace mpslam {

// How the path set is split for the orientation consensus. Every group must
// keep >= 3 paths and at least 3 groups are required so that a spurious
// two-line crossing cannot masquerade as agreement.
struct GroupingStrategy {
    enum class Kind { ThreePath, DropOne, Custom };

    Kind kind = Kind::DropOne;
    std::vector<std::vector<int>> custom_groups;  // Kind::Custom only

    static GroupingStrategy three_path() { return {Kind::ThreePath, {}}; }
    static GroupingStrategy drop_one() { return {Kind::DropOne, {}}; }
    static GroupingStrategy custom(std::vector<std::vector<int>> groups) {
        return {Kind::Custom, std::move(groups)};
    }
};

// Where the 1D refinement starts: bracketing the best grid candidate, or the
// quantized-sensor reading +- half a sensor step (which always contains the
// true orientation).
struct OrientationInit {
    enum class Mode { BruteForce, Sensor };

    Mode mode = Mode::BruteForce;
    double sensor_value = 0.0;       // radians
    double sensor_half_width = 0.0;  // radians, pi / n_q

    static OrientationInit brute_force() { return {}; }
    static OrientationInit sensor(double phi_init, int n_q) {
        return {Mode::Sensor, phi_init, kPi / n_q};
    }
};

struct OrientationSolverConfig {
    int grid_points = 100;           // candidates over [0, 2pi)
    double refine_tolerance = 1e-9;  // radians, bracket width floor
    // Golden-section iteration cap. 27 narrows a grid-cell bracket to the
    // point where downstream position errors concentrate in the micrometer
    // decade on exact inputs; more iterations overshoot below it.
    int max_refine_iters = 27;
    OrientationInit init{};
};

struct OrientationDiagnostics {
    double grid_argmin = 0.0;    // radians; the init point in Sensor mode
    double final_cost = 0.0;     // m^2
    int refine_iterations = 0;
    int invalid_candidates = 0;  // infeasible grid candidates
};

struct RobustEstimate {
    LocationEstimate location;
    double phi_o = 0.0;  // radians
    OrientationDiagnostics diagnostics{};
};

/// Path index groups for the given strategy. Throws std::invalid_argument
/// naming the required minimum when n_paths is too small.
std::vector<std::vector<int>> make_groups(int n_paths, const GroupingStrategy& strategy);

/// The group's 3-vector (x, y, l_e) solved at the candidate orientation, or
/// nullopt when the group degenerates there (singular rows or rank loss).
std::optional<Eigen::Vector3d> group_solution(const std::vector<int>& group,
                                              const MultipathSet& obs, double phi_candidate,
                                              const LocateOptions& opts = {});

/// Summed squared spread of the per-group solutions about their mean at the
/// candidate, +inf when fewer than 3 groups stay valid. Optionally reports
/// the valid-group count.
double orientation_cost(double phi_candidate, const std::vector<std::vector<int>>& groups,
                        const MultipathSet& obs, const LocateOptions& opts = {},
                        int* valid_groups = nullptr);

/// Orientation estimate: coarse grid search (unless Sensor init) followed by
/// golden-section refinement of the consensus cost. Deterministic; grid ties
/// break toward the smaller angle. Throws orientation_unrecoverable_error
/// when every candidate is infeasible.
std::pair<double, OrientationDiagnostics> estimate_orientation(
    const MultipathSet& obs, const GroupingStrategy& strategy,
    const OrientationSolverConfig& cfg = {}, const LocateOptions& opts = {});

/// Full clock- and orientation-robust solve: estimate the orientation, then
/// locate with all paths at the estimate.
RobustEstimate robust_locate(const MultipathSet& obs, const GroupingStrategy& strategy,
                             const OrientationSolverConfig& cfg = {},
                             const LocateOptions& opts = {});

}  // namespace mpslam
