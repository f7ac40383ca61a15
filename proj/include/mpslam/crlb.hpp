#pragma once

#include "mpslam/geometry.hpp"

#include <Eigen/Core>

namespace mpslam {

// Jacobian of the stacked path measurements with respect to the location
// parameters. Rows come in per-path triples (aod_i, daoa_i, tdoa_i); columns
// are (rx_x, rx_y, clock, orientation, refl_1x, refl_1y, ...).
struct TransformMatrix {
    Eigen::MatrixXd t;  // 3 n_paths x (4 + 2 n_paths)

    static constexpr int kColRxX = 0;
    static constexpr int kColRxY = 1;
    static constexpr int kColClock = 2;
    static constexpr int kColOrientation = 3;

    static int aod_row(int i) { return 3 * i; }
    static int daoa_row(int i) { return 3 * i + 1; }
    static int tdoa_row(int i) { return 3 * i + 2; }
    static int reflector_col(int i) { return 4 + 2 * i; }

    int n_paths() const { return static_cast<int>(t.rows()) / 3; }
};

// Location-domain bound J_d = T^T J_m T. When J_d is full rank, covariance
// holds its inverse; otherwise covariance is the pseudo-inverse and
// null_space spans the unobservable directions.
struct LocationBound {
    Eigen::MatrixXd fim;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd null_space;  // (4 + 2 n_paths) x (dim - rank), empty when full rank
    int rank = 0;
    bool full_rank = false;

    /// Leading 2x2 receiver-position block of the covariance bound.
    Eigen::Matrix2d user_block() const { return covariance.topLeftCorner<2, 2>(); }
};

/// Analytic derivatives of every path's (aod, daoa, tdoa) with respect to the
/// scene parameters. Throws degenerate_geometry_error when a reflector sits
/// on the transmitter or the receiver.
TransformMatrix transform_matrix(const Scene& scene);

/// Sandwich J_d = T^T J_m T and its (pseudo-)inverse. j_m must be symmetric
/// with 3 n_paths rows.
LocationBound location_fim(const Eigen::MatrixXd& j_m, const TransformMatrix& t);

/// Scalar RMS receiver-position bound under DAoA quantization only:
/// sqrt((1/12) (pi/k_phi)^2 tr{(T_o^T T_o)^{-1}}), T_o the n_paths x 2 block
/// of daoa rows against the receiver-position columns. Scales as 1/k_phi.
/// Throws degenerate_configuration_error when T_o is rank deficient (all
/// reflectors seen from the receiver along one line).
double approx_crlb(const Scene& scene, int k_phi);

}  // namespace mpslam
