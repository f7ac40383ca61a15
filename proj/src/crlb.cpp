#include "mpslam/crlb.hpp"

#include "mpslam/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mpslam {

TransformMatrix transform_matrix(const Scene& scene) {
    const int np = scene.n_paths();
    if (np < 1) throw std::invalid_argument("transform_matrix: scene has no reflectors");
    TransformMatrix out;
    out.t = Eigen::MatrixXd::Zero(3 * np, 4 + 2 * np);

    for (int i = 0; i < np; ++i) {
        const Eigen::Vector2d& di = scene.reflectors[static_cast<std::size_t>(i)];
        const Eigen::Vector2d u = di - scene.rx_position;  // reflector as seen from rx
        const double norm_di = di.norm();
        const double norm_u = u.norm();
        if (norm_di == 0.0 || norm_u == 0.0) {
            throw degenerate_geometry_error("transform_matrix: reflector " + std::to_string(i) +
                                            " coincides with the transmitter or receiver");
        }

        const int ra = TransformMatrix::aod_row(i);
        const int rp = TransformMatrix::daoa_row(i);
        const int rt = TransformMatrix::tdoa_row(i);
        const int rc = TransformMatrix::reflector_col(i);

        // aod = atan2(d_iy, d_ix): depends on the reflector only.
        out.t(ra, rc + 0) = -di.y() / (norm_di * norm_di);
        out.t(ra, rc + 1) = di.x() / (norm_di * norm_di);

        // daoa = atan2(u_y, u_x) - orientation.
        out.t(rp, TransformMatrix::kColRxX) = u.y() / (norm_u * norm_u);
        out.t(rp, TransformMatrix::kColRxY) = -u.x() / (norm_u * norm_u);
        out.t(rp, rc + 0) = -u.y() / (norm_u * norm_u);
        out.t(rp, rc + 1) = u.x() / (norm_u * norm_u);
        out.t(rp, TransformMatrix::kColOrientation) = -1.0;

        // tdoa = (||d_i|| + ||d_i - d_o||)/c - clock.
        out.t.block<1, 2>(rt, TransformMatrix::kColRxX) =
            (-u / (kSpeedOfLight * norm_u)).transpose();
        out.t.block<1, 2>(rt, rc) =
            (u / (kSpeedOfLight * norm_u) + di / (kSpeedOfLight * norm_di)).transpose();
        out.t(rt, TransformMatrix::kColClock) = -1.0;
    }
    return out;
}

LocationBound location_fim(const Eigen::MatrixXd& j_m, const TransformMatrix& t) {
    if (j_m.rows() != j_m.cols() || j_m.rows() != t.t.rows()) {
        throw std::invalid_argument("location_fim: j_m must be square with 3 n_paths rows");
    }
    if ((j_m - j_m.transpose()).cwiseAbs().maxCoeff() >
        1e-9 * std::max(1.0, j_m.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("location_fim: j_m must be symmetric");
    }

    LocationBound out;
    out.fim = t.t.transpose() * j_m * t.t;
    // Symmetrize against roundoff before the eigendecomposition.
    out.fim = 0.5 * (out.fim + out.fim.transpose()).eval();

    const Eigen::Index dim = out.fim.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.fim);
    const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
    const double lmax = std::max(lambda.cwiseAbs().maxCoeff(), 0.0);
    const double tol = static_cast<double>(dim) * std::numeric_limits<double>::epsilon() * lmax;

    int rank = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (lambda(i) > tol) ++rank;
    }
    out.rank = rank;
    out.full_rank = (rank == dim);

    if (out.full_rank) {
        out.covariance = eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
                         eig.eigenvectors().transpose();
        out.null_space.resize(dim, 0);
    } else {
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (lambda(i) > tol) inv(i) = 1.0 / lambda(i);
        }
        out.covariance = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
        out.null_space = eig.eigenvectors().leftCols(dim - rank);
    }
    return out;
}

double approx_crlb(const Scene& scene, int k_phi) {
    if (k_phi < 1) throw std::invalid_argument("approx_crlb: k_phi must be >= 1");
    const TransformMatrix t = transform_matrix(scene);
    const int np = t.n_paths();
    Eigen::MatrixXd t_o(np, 2);
    for (int i = 0; i < np; ++i) {
        t_o(i, 0) = t.t(TransformMatrix::daoa_row(i), TransformMatrix::kColRxX);
        t_o(i, 1) = t.t(TransformMatrix::daoa_row(i), TransformMatrix::kColRxY);
    }
    const Eigen::Matrix2d gram = t_o.transpose() * t_o;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(t_o);
    if (qr.rank() < 2) {
        throw degenerate_configuration_error(
            "approx_crlb: arrival directions are collinear; position not identifiable");
    }
    const double step = kPi / k_phi;
    return std::sqrt(step * step / 12.0 * gram.inverse().trace());
}

}  // namespace mpslam
