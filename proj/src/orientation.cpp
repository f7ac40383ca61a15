#include "mpslam/orientation.hpp"

#include "mpslam/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpslam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_custom(int n_paths, const std::vector<std::vector<int>>& groups) {
    if (groups.size() < 3) {
        throw std::invalid_argument("make_groups: custom grouping needs >= 3 groups");
    }
    for (const auto& g : groups) {
        if (g.size() < 3) {
            throw std::invalid_argument("make_groups: every group needs >= 3 paths");
        }
        for (int idx : g) {
            if (idx < 0 || idx >= n_paths) {
                throw std::invalid_argument("make_groups: path index " + std::to_string(idx) +
                                            " out of range");
            }
        }
        std::vector<int> sorted = g;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("make_groups: duplicate path index within a group");
        }
    }
}

}  // namespace

std::vector<std::vector<int>> make_groups(int n_paths, const GroupingStrategy& strategy) {
    std::vector<std::vector<int>> groups;
    switch (strategy.kind) {
        case GroupingStrategy::Kind::ThreePath: {
            if (n_paths < 5) {
                throw std::invalid_argument(
                    "make_groups: three-path windows need >= 5 paths (got " +
                    std::to_string(n_paths) + ")");
            }
            for (int m = 0; m + 2 < n_paths; ++m) {
                groups.push_back({m, m + 1, m + 2});
            }
            break;
        }
        case GroupingStrategy::Kind::DropOne: {
            if (n_paths < 4) {
                throw std::invalid_argument("make_groups: drop-one needs >= 4 paths (got " +
                                            std::to_string(n_paths) + ")");
            }
            for (int m = 0; m < n_paths; ++m) {
                std::vector<int> g;
                g.reserve(static_cast<std::size_t>(n_paths - 1));
                for (int i = 0; i < n_paths; ++i) {
                    if (i != m) g.push_back(i);
                }
                groups.push_back(std::move(g));
            }
            break;
        }
        case GroupingStrategy::Kind::Custom:
            validate_custom(n_paths, strategy.custom_groups);
            groups = strategy.custom_groups;
            break;
    }
    return groups;
}

std::optional<Eigen::Vector3d> group_solution(const std::vector<int>& group,
                                              const MultipathSet& obs, double phi_candidate,
                                              const LocateOptions& opts) {
    Eigen::MatrixXd b(static_cast<Eigen::Index>(group.size()), 3);
    Eigen::VectorXd delta_l(static_cast<Eigen::Index>(group.size()));
    Eigen::Index n = 0;
    for (int idx : group) {
        const PathObservation& path = obs.paths[static_cast<std::size_t>(idx)];
        const double phi_i = path.daoa + phi_candidate;
        const double s = std::sin(path.aod - phi_i);
        if (std::abs(s) < opts.eps_sing) continue;
        b(n, 0) = -(std::sin(path.aod) + std::sin(phi_i)) / s;
        b(n, 1) = (std::cos(phi_i) + std::cos(path.aod)) / s;
        b(n, 2) = -1.0;
        delta_l(n) = kSpeedOfLight * path.tdoa;
        ++n;
    }
    if (n < 3) return std::nullopt;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b.topRows(n));
    qr.setThreshold(opts.rank_rel_threshold);
    if (qr.rank() < 3) return std::nullopt;
    return qr.solve(delta_l.head(n));
}

double orientation_cost(double phi_candidate, const std::vector<std::vector<int>>& groups,
                        const MultipathSet& obs, const LocateOptions& opts,
                        int* valid_groups) {
    std::vector<Eigen::Vector3d> solutions;
    solutions.reserve(groups.size());
    for (const auto& g : groups) {
        if (auto f = group_solution(g, obs, phi_candidate, opts)) {
            solutions.push_back(*f);
        }
    }
    if (valid_groups != nullptr) *valid_groups = static_cast<int>(solutions.size());
    if (solutions.size() < 3) return kInf;

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& f : solutions) mean += f;
    mean /= static_cast<double>(solutions.size());
    double cost = 0.0;
    for (const auto& f : solutions) cost += (f - mean).squaredNorm();
    return cost;
}

namespace {

// Golden-section minimization on [lo, hi]; returns the best evaluated point.
// Infinite cost values are handled by the comparisons directly.
struct GoldenResult {
    double x;
    double cost;
    int iterations;
};

template <class F>
GoldenResult golden_section(const F& f, double lo, double hi, double tol, int max_iters) {
    constexpr double inv_phi = 0.6180339887498948482;  // 1/golden ratio
    double a = lo;
    double b = hi;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = f(c);
    double fd = f(d);
    int it = 0;
    while (it < max_iters && (b - a) > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
        ++it;
    }
    return fc < fd ? GoldenResult{c, fc, it} : GoldenResult{d, fd, it};
}

}  // namespace

std::pair<double, OrientationDiagnostics> estimate_orientation(
    const MultipathSet& obs, const GroupingStrategy& strategy,
    const OrientationSolverConfig& cfg, const LocateOptions& opts) {
    if (cfg.grid_points < 8) {
        throw std::invalid_argument("estimate_orientation: grid_points must be >= 8");
    }
    if (!(cfg.refine_tolerance > 0.0)) {
        throw std::invalid_argument("estimate_orientation: refine_tolerance must be > 0");
    }
    if (cfg.max_refine_iters < 1) {
        throw std::invalid_argument("estimate_orientation: max_refine_iters must be >= 1");
    }
    const std::vector<std::vector<int>> groups = make_groups(obs.size(), strategy);
    const auto cost = [&](double phi) { return orientation_cost(phi, groups, obs, opts); };

    OrientationDiagnostics diag;
    double lo = 0.0;
    double hi = 0.0;

    if (cfg.init.mode == OrientationInit::Mode::Sensor) {
        diag.grid_argmin = cfg.init.sensor_value;
        lo = cfg.init.sensor_value - cfg.init.sensor_half_width;
        hi = cfg.init.sensor_value + cfg.init.sensor_half_width;
    } else {
        const double step = kTwoPi / cfg.grid_points;
        double best_phi = 0.0;
        double best_cost = kInf;
        for (int g = 0; g < cfg.grid_points; ++g) {
            const double phi = g * step;
            const double c = cost(phi);
            if (std::isinf(c)) ++diag.invalid_candidates;
            if (c < best_cost) {  // strict: ties keep the smaller angle
                best_cost = c;
                best_phi = phi;
            }
        }
        if (std::isinf(best_cost)) {
            throw orientation_unrecoverable_error(
                "estimate_orientation: all grid candidates infeasible");
        }
        diag.grid_argmin = best_phi;
        lo = best_phi - step;
        hi = best_phi + step;
    }

    const GoldenResult r =
        golden_section(cost, lo, hi, cfg.refine_tolerance, cfg.max_refine_iters);
    if (std::isinf(r.cost)) {
        throw orientation_unrecoverable_error(
            "estimate_orientation: refinement found no feasible candidate");
    }
    diag.final_cost = r.cost;
    diag.refine_iterations = r.iterations;
    return {wrap_angle(r.x), diag};
}

RobustEstimate robust_locate(const MultipathSet& obs, const GroupingStrategy& strategy,
                             const OrientationSolverConfig& cfg, const LocateOptions& opts) {
    RobustEstimate out;
    auto [phi, diag] = estimate_orientation(obs, strategy, cfg, opts);
    out.phi_o = phi;
    out.diagnostics = diag;
    out.location = solve_location(obs, phi, opts);
    return out;
}

}  // namespace mpslam
