#pragma once

#include <vector>

namespace mpslam {

// Grid sizes of the sparse-recovery dictionary plus the orientation-sensor
// resolution. The same grids double as the quantizers that model estimation
// error in the Monte Carlo experiments.
struct DictionaryConfig {
    int k_tau = 64;      // delay grid points
    int k_theta = 64;    // departure-angle grid points, even
    int k_phi = 64;      // arrival-angle grid points, even
    double t_cp = 1e-6;  // seconds, cyclic prefix length spanned by the delay grid
    int n_q = 64;        // orientation sensor levels

    void validate() const;
};

/// k_tau ascending delays {0, 1, ..., k_tau-1} * t_cp / k_tau.
std::vector<double> delay_grid(int k_tau, double t_cp);

/// k ascending angles asin((2/k) * {-k/2, ..., k/2-1}), spanning [-pi/2, pi/2).
/// k must be even and >= 2.
std::vector<double> angle_grid(int k);

/// Nearest point of the uniform circular grid with step pi/k covering
/// (-pi, pi]. Circular metric; ties break toward the smaller grid index.
/// Matches the error-variance model (1/12) * (pi/k)^2 on uniform inputs.
double quantize_uniform_angle(double x, int k);

/// Nearest sensor level n * 2pi/n_q, n in {0, ..., n_q-1}, circular metric,
/// ties toward smaller n.
double quantize_orientation(double phi, int n_q);

/// Nearest point of delay_grid(k_tau, t_cp); values outside the grid clamp to
/// its ends. Ties break toward the smaller grid index.
double quantize_to_delay_grid(double tdoa, int k_tau, double t_cp);

/// Nearest point of angle_grid(k) in angle metric (clamping outside
/// [-pi/2, pi/2), where a linear array cannot tell front from back).
double quantize_to_angle_grid(double x, int k);

}  // namespace mpslam
