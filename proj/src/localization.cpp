#include "mpslam/localization.hpp"

#include "mpslam/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mpslam {

PathCoefficients path_coefficients(double theta, double phi, double eps_sing) {
    const double s = std::sin(theta - phi);
    if (std::abs(s) < eps_sing) {
        throw singular_path_error("path_coefficients: |sin(aod - aoa)| = " +
                                  std::to_string(std::abs(s)) + " below threshold");
    }
    // Equivalent to the tan-based forms but finite at +-pi/2:
    //   q = (cos(phi) + cos(theta)) / sin(theta - phi)
    //   p = -(sin(theta) + sin(phi)) / sin(theta - phi)
    return {-(std::sin(theta) + std::sin(phi)) / s, (std::cos(phi) + std::cos(theta)) / s};
}

namespace {

struct RowSet {
    Eigen::MatrixXd b;        // n x 3, rows (p, q, -1)
    Eigen::VectorXd delta_l;  // n, meters
    std::vector<int> used;    // original path indices
};

RowSet build_rows(const MultipathSet& obs, double phi_o, const LocateOptions& opts) {
    RowSet rows;
    rows.used.reserve(obs.paths.size());
    std::vector<PathCoefficients> coeffs;
    coeffs.reserve(obs.paths.size());
    for (std::size_t i = 0; i < obs.paths.size(); ++i) {
        const PathObservation& path = obs.paths[i];
        const double phi_i = wrap_angle(path.daoa + phi_o);
        try {
            coeffs.push_back(path_coefficients(path.aod, phi_i, opts.eps_sing));
            rows.used.push_back(static_cast<int>(i));
        } catch (const singular_path_error&) {
            // dropped, index simply absent from used
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(rows.used.size());
    rows.b.resize(n, 3);
    rows.delta_l.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        rows.b(r, 0) = coeffs[static_cast<std::size_t>(r)].p;
        rows.b(r, 1) = coeffs[static_cast<std::size_t>(r)].q;
        rows.b(r, 2) = -1.0;
        rows.delta_l(r) = kSpeedOfLight * obs.paths[static_cast<std::size_t>(rows.used[r])].tdoa;
    }
    return rows;
}

}  // namespace

LocationEstimate solve_location(const MultipathSet& obs, double phi_o,
                                const LocateOptions& opts) {
    RowSet rows = build_rows(obs, phi_o, opts);
    if (rows.used.size() < 3) {
        throw insufficient_paths_error("solve_location: " + std::to_string(rows.used.size()) +
                                       " usable paths, need >= 3");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows.b);
    qr.setThreshold(opts.rank_rel_threshold);
    if (qr.rank() < 3) {
        throw degenerate_configuration_error("solve_location: system rank " +
                                             std::to_string(qr.rank()) + " < 3");
    }
    const Eigen::Vector3d x = qr.solve(rows.delta_l);

    LocationEstimate est;
    est.rx_position = x.head<2>();
    est.l_e = x(2);
    est.residual_norm = (rows.b * x - rows.delta_l).norm();
    est.used_paths = std::move(rows.used);

    est.reflectors = map_reflectors(est, obs, phi_o, opts);
    const auto [clock, los] = clock_and_los(est, obs, opts);
    est.clock_offset = clock;
    est.los = los;
    return est;
}

std::vector<Eigen::Vector2d> map_reflectors(const LocationEstimate& estimate,
                                            const MultipathSet& obs, double phi_o,
                                            const LocateOptions& opts) {
    std::vector<Eigen::Vector2d> reflectors;
    reflectors.reserve(estimate.used_paths.size());
    const double dx = estimate.rx_position.x();
    const double dy = estimate.rx_position.y();
    for (int idx : estimate.used_paths) {
        const PathObservation& path = obs.paths[static_cast<std::size_t>(idx)];
        const double theta = path.aod;
        const double phi = wrap_angle(path.daoa + phi_o);
        const double s = std::sin(theta - phi);
        if (std::abs(s) < opts.eps_sing) {
            throw singular_path_error("map_reflectors: used path " + std::to_string(idx) +
                                      " singular");
        }
        // d_ix = (d_oy - d_ox tan(phi)) / (tan(theta) - tan(phi)) cross-multiplied
        // by cos(theta) cos(phi); d_iy follows from the departure ray.
        const double t = dy * std::cos(phi) - dx * std::sin(phi);
        reflectors.emplace_back(std::cos(theta) * t / s, std::sin(theta) * t / s);
    }
    return reflectors;
}

std::pair<double, bool> clock_and_los(const LocationEstimate& estimate,
                                      const MultipathSet& obs, const LocateOptions& opts) {
    double min_length = std::numeric_limits<double>::infinity();
    double min_tdoa = std::numeric_limits<double>::infinity();
    for (int idx : estimate.used_paths) {
        const double tdoa = obs.paths[static_cast<std::size_t>(idx)].tdoa;
        min_length = std::min(min_length, estimate.l_e + kSpeedOfLight * tdoa);
        min_tdoa = std::min(min_tdoa, tdoa);
    }
    const double clock_offset = min_length / kSpeedOfLight - min_tdoa;
    const bool los = estimate.rx_position.norm() >= min_length - opts.eps_los;
    return {clock_offset, los};
}

}  // namespace mpslam
