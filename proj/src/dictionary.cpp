#include "mpslam/dictionary.hpp"

#include "mpslam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpslam {

namespace {

// round-half-down: the documented tie-break toward the smaller grid index
double round_to_lower(double x) { return std::ceil(x - 0.5); }

}  // namespace

void DictionaryConfig::validate() const {
    if (k_tau < 2) throw std::invalid_argument("DictionaryConfig: k_tau must be >= 2");
    if (k_theta < 2 || k_theta % 2 != 0)
        throw std::invalid_argument("DictionaryConfig: k_theta must be even and >= 2");
    if (k_phi < 2 || k_phi % 2 != 0)
        throw std::invalid_argument("DictionaryConfig: k_phi must be even and >= 2");
    if (!(t_cp > 0.0)) throw std::invalid_argument("DictionaryConfig: t_cp must be > 0");
    if (n_q < 2) throw std::invalid_argument("DictionaryConfig: n_q must be >= 2");
}

std::vector<double> delay_grid(int k_tau, double t_cp) {
    if (k_tau < 2) throw std::invalid_argument("delay_grid: k_tau must be >= 2");
    if (!(t_cp > 0.0)) throw std::invalid_argument("delay_grid: t_cp must be > 0");
    std::vector<double> grid(static_cast<std::size_t>(k_tau));
    for (int i = 0; i < k_tau; ++i) {
        grid[static_cast<std::size_t>(i)] = static_cast<double>(i) * t_cp / k_tau;
    }
    return grid;
}

std::vector<double> angle_grid(int k) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("angle_grid: k must be even and >= 2");
    std::vector<double> grid(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        grid[static_cast<std::size_t>(i)] = std::asin(2.0 * (i - k / 2) / k);
    }
    return grid;
}

double quantize_uniform_angle(double x, int k) {
    if (k < 2) throw std::invalid_argument("quantize_uniform_angle: k must be >= 2");
    const double step = kPi / k;
    const double n = round_to_lower(wrap_angle(x) / step);
    return wrap_angle(n * step);
}

double quantize_orientation(double phi, int n_q) {
    if (n_q < 2) throw std::invalid_argument("quantize_orientation: n_q must be >= 2");
    const double step = kTwoPi / n_q;
    int best = 0;
    double best_dist = circular_distance(phi, 0.0);
    for (int n = 1; n < n_q; ++n) {
        const double d = circular_distance(phi, n * step);
        if (d < best_dist) {  // strict: ties keep the smaller n
            best_dist = d;
            best = n;
        }
    }
    return best * step;
}

double quantize_to_delay_grid(double tdoa, int k_tau, double t_cp) {
    if (k_tau < 2) throw std::invalid_argument("quantize_to_delay_grid: k_tau must be >= 2");
    if (!(t_cp > 0.0)) throw std::invalid_argument("quantize_to_delay_grid: t_cp must be > 0");
    const double step = t_cp / k_tau;
    const double n = std::clamp(round_to_lower(tdoa / step), 0.0, static_cast<double>(k_tau - 1));
    return n * step;
}

double quantize_to_angle_grid(double x, int k) {
    const std::vector<double> grid = angle_grid(k);
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return grid.front();
    if (it == grid.end()) return grid.back();
    const double above = *it;
    const double below = *(it - 1);
    // ties toward the smaller index
    return (above - x < x - below) ? above : below;
}

}  // namespace mpslam
