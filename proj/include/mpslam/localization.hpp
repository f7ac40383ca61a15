#pragma once

#include "mpslam/geometry.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace mpslam {

struct LocateOptions {
    double eps_sing = 1e-6;           // threshold on |sin(aod - aoa)| below which a path is dropped
    double eps_los = 0.3;             // meters, slack of the line-of-sight test
    double rank_rel_threshold = 1e-10;  // relative rank decision of the LS matrix
};

// Output of the clock-robust solve: receiver position, the clock length
// l_e = c * clock offset estimated as the third linear unknown, the mapped
// reflectors (index-aligned with used_paths), and the LoS verdict.
struct LocationEstimate {
    Eigen::Vector2d rx_position = Eigen::Vector2d::Zero();  // meters
    double l_e = 0.0;           // meters
    double clock_offset = 0.0;  // seconds
    std::vector<Eigen::Vector2d> reflectors;  // meters, one per used path
    bool los = false;
    double residual_norm = 0.0;  // meters
    std::vector<int> used_paths;  // indices into the observation set
};

// Coefficients of one row of the linear system:
// p * d_ox + q * d_oy - l_e = c * tdoa.
struct PathCoefficients {
    double p = 0.0;
    double q = 0.0;
};

/// Row coefficients for a path with departure angle theta and arrival angle
/// phi. Evaluated in a product form that stays finite at theta, phi = +-pi/2.
/// Throws singular_path_error when |sin(theta - phi)| < eps_sing.
PathCoefficients path_coefficients(double theta, double phi, double eps_sing = 1e-6);

/// Least-squares solve of receiver position and clock length from >= 3 paths,
/// given the receiver orientation. Singular paths are dropped and recorded;
/// the returned estimate is completed with reflector map, clock offset and
/// LoS verdict.
LocationEstimate solve_location(const MultipathSet& obs, double phi_o,
                                const LocateOptions& opts = {});

/// Reflector positions for the estimate's used paths (index-aligned).
std::vector<Eigen::Vector2d> map_reflectors(const LocationEstimate& estimate,
                                            const MultipathSet& obs, double phi_o,
                                            const LocateOptions& opts = {});

/// (clock offset seconds, LoS verdict) from the solved path lengths.
std::pair<double, bool> clock_and_los(const LocationEstimate& estimate,
                                      const MultipathSet& obs,
                                      const LocateOptions& opts = {});

}  // namespace mpslam
