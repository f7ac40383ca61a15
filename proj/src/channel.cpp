#include "mpslam/channel.hpp"

#include "mpslam/errors.hpp"
#include "mpslam/geometry.hpp"
#include "mpslam/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace mpslam {

namespace {

using cd = std::complex<double>;
constexpr cd kJ{0.0, 1.0};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void WaveformConfig::validate() const {
    require(n_k >= 1, "WaveformConfig: n_k must be >= 1");
    require(n_t >= 1, "WaveformConfig: n_t must be >= 1");
    require(n_r >= 1, "WaveformConfig: n_r must be >= 1");
    require(n_rf_t >= 1, "WaveformConfig: n_rf_t must be >= 1");
    require(n_rf_r >= 1, "WaveformConfig: n_rf_r must be >= 1");
    require(n_s >= 1, "WaveformConfig: n_s must be >= 1");
    require(delta_f > 0.0, "WaveformConfig: delta_f must be > 0");
    require(sigma_z2 >= 0.0, "WaveformConfig: sigma_z2 must be >= 0");
    require(t_cp > 0.0, "WaveformConfig: t_cp must be > 0");
    // Cyclic prefix cannot outlast the symbol period.
    require(t_cp <= 1.0 / delta_f, "WaveformConfig: t_cp must be <= 1/delta_f");
}

PilotFrame PilotFrame::random_phases(const WaveformConfig& cfg, uint64_t seed) {
    cfg.validate();
    PilotFrame f;
    f.combiners.resize(static_cast<std::size_t>(cfg.blocks()));
    f.pilots.resize(static_cast<std::size_t>(cfg.blocks()));
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_t));
    const double rx_scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_r));
    for (int b = 0; b < cfg.blocks(); ++b) {
        RandomStream rng(derive_seed(seed, static_cast<uint64_t>(b)));
        Eigen::VectorXcd x(cfg.n_t);
        for (int n = 0; n < cfg.n_t; ++n) {
            x(n) = std::polar(tx_scale, rng.uniform(0.0, kTwoPi));
        }
        Eigen::MatrixXcd w(cfg.n_r, cfg.n_rf_r);
        for (int r = 0; r < cfg.n_rf_r; ++r) {
            for (int n = 0; n < cfg.n_r; ++n) {
                w(n, r) = std::polar(rx_scale, rng.uniform(0.0, kTwoPi));
            }
        }
        f.pilots[static_cast<std::size_t>(b)] = std::move(x);
        f.combiners[static_cast<std::size_t>(b)] = std::move(w);
    }
    return f;
}

void PilotFrame::validate_against(const WaveformConfig& cfg) const {
    const auto nb = static_cast<std::size_t>(cfg.blocks());
    require(combiners.size() == nb, "PilotFrame: combiner block count mismatch");
    require(pilots.size() == nb, "PilotFrame: pilot block count mismatch");
    for (std::size_t b = 0; b < nb; ++b) {
        require(combiners[b].rows() == cfg.n_r && combiners[b].cols() == cfg.n_rf_r,
                "PilotFrame: combiner block " + std::to_string(b) + " has wrong shape");
        require(pilots[b].size() == cfg.n_t,
                "PilotFrame: pilot block " + std::to_string(b) + " has wrong length");
    }
}

bool PilotFrame::unit_norm(double tol) const {
    for (const auto& w : combiners) {
        for (Eigen::Index r = 0; r < w.cols(); ++r) {
            if (std::abs(w.col(r).norm() - 1.0) > tol) return false;
        }
    }
    for (const auto& x : pilots) {
        if (std::abs(x.norm() - 1.0) > tol) return false;
    }
    return true;
}

Eigen::VectorXcd steering(int n, double angle) {
    require(n >= 1, "steering: n must be >= 1");
    Eigen::VectorXcd a(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double spatial = kPi * std::sin(angle);
    for (int i = 0; i < n; ++i) {
        a(i) = std::polar(scale, spatial * i);
    }
    return a;
}

ComplexObservation dictionary_column(double tau, double theta, double phi,
                                     const PilotFrame& frame, const WaveformConfig& cfg) {
    cfg.validate();
    frame.validate_against(cfg);
    const Eigen::VectorXcd at = steering(cfg.n_t, theta);
    const Eigen::VectorXcd ar = steering(cfg.n_r, phi);
    ComplexObservation obs;
    obs.y.resize(cfg.observation_size());
    for (int s = 0; s < cfg.n_s; ++s) {
        for (int k = 0; k < cfg.n_k; ++k) {
            const int b = s * cfg.n_k + k;
            const cd bt = at.transpose() * frame.pilots[static_cast<std::size_t>(b)];
            const cd ramp = std::exp(-kJ * (2.0 * kPi * k * cfg.delta_f * tau));
            const Eigen::VectorXcd br =
                frame.combiners[static_cast<std::size_t>(b)].adjoint() * ar;
            for (int r = 0; r < cfg.n_rf_r; ++r) {
                obs.y(ComplexObservation::index(s, k, r, cfg)) = br(r) * bt * ramp;
            }
        }
    }
    return obs;
}

ComplexObservation synthesize(const std::vector<ChannelPath>& paths, const PilotFrame& frame,
                              const WaveformConfig& cfg, uint64_t noise_seed) {
    cfg.validate();
    frame.validate_against(cfg);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (paths[i].delay < 0.0 || paths[i].delay > cfg.t_cp) {
            throw std::invalid_argument("synthesize: path " + std::to_string(i) +
                                        " delay outside the cyclic prefix [0, t_cp]");
        }
    }
    ComplexObservation obs;
    obs.y = Eigen::VectorXcd::Zero(cfg.observation_size());
    for (const ChannelPath& p : paths) {
        obs.y += p.alpha * dictionary_column(p.delay, p.aod, p.daoa, frame, cfg).y;
    }
    if (cfg.sigma_z2 > 0.0) {
        const double sd = std::sqrt(cfg.sigma_z2 / 2.0);  // per real component
        for (int b = 0; b < cfg.blocks(); ++b) {
            RandomStream rng(derive_seed(noise_seed, static_cast<uint64_t>(b)));
            Eigen::VectorXcd z(cfg.n_r);
            for (int n = 0; n < cfg.n_r; ++n) {
                const double re = sd * rng.normal();
                const double im = sd * rng.normal();
                z(n) = cd(re, im);
            }
            const Eigen::VectorXcd zr =
                frame.combiners[static_cast<std::size_t>(b)].adjoint() * z;
            obs.y.segment(b * cfg.n_rf_r, cfg.n_rf_r) += zr;
        }
    }
    return obs;
}

Whitener::Whitener(const PilotFrame& frame, const WaveformConfig& cfg) {
    cfg.validate();
    frame.validate_against(cfg);
    n_rf_r_ = cfg.n_rf_r;
    inv_l_.reserve(static_cast<std::size_t>(cfg.blocks()));
    for (int b = 0; b < cfg.blocks(); ++b) {
        const Eigen::MatrixXcd& w = frame.combiners[static_cast<std::size_t>(b)];
        const Eigen::MatrixXcd gram = w.adjoint() * w;
        Eigen::LLT<Eigen::MatrixXcd> llt(gram);
        if (llt.info() != Eigen::Success) {
            throw rank_deficiency_error(
                "Whitener: combiner covariance singular at block (s=" +
                std::to_string(b / cfg.n_k) + ", k=" + std::to_string(b % cfg.n_k) + ")");
        }
        inv_l_.push_back(llt.matrixL().solve(Eigen::MatrixXcd::Identity(n_rf_r_, n_rf_r_)));
    }
}

Eigen::VectorXcd Whitener::apply(const Eigen::VectorXcd& v) const {
    const auto nb = static_cast<Eigen::Index>(inv_l_.size());
    require(v.size() == nb * n_rf_r_, "Whitener: vector length mismatch");
    Eigen::VectorXcd out(v.size());
    for (Eigen::Index b = 0; b < nb; ++b) {
        out.segment(b * n_rf_r_, n_rf_r_) =
            inv_l_[static_cast<std::size_t>(b)] * v.segment(b * n_rf_r_, n_rf_r_);
    }
    return out;
}

Eigen::MatrixXcd Whitener::apply(const Eigen::MatrixXcd& m) const {
    const auto nb = static_cast<Eigen::Index>(inv_l_.size());
    require(m.rows() == nb * n_rf_r_, "Whitener: matrix row count mismatch");
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index b = 0; b < nb; ++b) {
        out.middleRows(b * n_rf_r_, n_rf_r_) =
            inv_l_[static_cast<std::size_t>(b)] * m.middleRows(b * n_rf_r_, n_rf_r_);
    }
    return out;
}

Eigen::MatrixXcd Whitener::matrix() const {
    const auto nb = static_cast<Eigen::Index>(inv_l_.size());
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(nb * n_rf_r_, nb * n_rf_r_);
    for (Eigen::Index b = 0; b < nb; ++b) {
        r.block(b * n_rf_r_, b * n_rf_r_, n_rf_r_, n_rf_r_) =
            inv_l_[static_cast<std::size_t>(b)];
    }
    return r;
}

namespace {

// Separable factors of the whitened dictionary: the whitened column for grid
// triple (t, a, p) is, per block b and chain r,
//   wbr[p](b, r) * bt[a](b) * ramp[t](b % n_k),
// so columns are never materialized ahead of selection.
struct DictionaryFactors {
    std::vector<Eigen::VectorXcd> ramp;  // per tau index: length n_k
    std::vector<Eigen::VectorXcd> bt;    // per theta index: length blocks
    std::vector<Eigen::MatrixXcd> wbr;   // per phi index: blocks x n_rf_r, whitened
    std::vector<double> tau_grid;
    std::vector<double> theta_grid;
    std::vector<double> phi_grid;
    Eigen::MatrixXd norm2;  // (theta, phi) -> squared whitened column norm

    int columns() const {
        return static_cast<int>(tau_grid.size() * theta_grid.size() * phi_grid.size());
    }
};

DictionaryFactors build_factors(const DictionaryConfig& dict_cfg, const PilotFrame& frame,
                                const WaveformConfig& cfg, const Whitener& wh) {
    DictionaryFactors f;
    f.tau_grid = delay_grid(dict_cfg.k_tau, dict_cfg.t_cp);
    f.theta_grid = angle_grid(dict_cfg.k_theta);
    f.phi_grid = angle_grid(dict_cfg.k_phi);

    f.ramp.reserve(f.tau_grid.size());
    for (double tau : f.tau_grid) {
        Eigen::VectorXcd ramp(cfg.n_k);
        for (int k = 0; k < cfg.n_k; ++k) {
            ramp(k) = std::exp(-kJ * (2.0 * kPi * k * cfg.delta_f * tau));
        }
        f.ramp.push_back(std::move(ramp));
    }

    f.bt.reserve(f.theta_grid.size());
    for (double theta : f.theta_grid) {
        const Eigen::VectorXcd at = steering(cfg.n_t, theta);
        Eigen::VectorXcd bt(cfg.blocks());
        for (int b = 0; b < cfg.blocks(); ++b) {
            bt(b) = at.transpose() * frame.pilots[static_cast<std::size_t>(b)];
        }
        f.bt.push_back(std::move(bt));
    }

    f.wbr.reserve(f.phi_grid.size());
    for (double phi : f.phi_grid) {
        const Eigen::VectorXcd ar = steering(cfg.n_r, phi);
        Eigen::VectorXcd br(cfg.observation_size());
        for (int b = 0; b < cfg.blocks(); ++b) {
            br.segment(b * cfg.n_rf_r, cfg.n_rf_r) =
                frame.combiners[static_cast<std::size_t>(b)].adjoint() * ar;
        }
        const Eigen::VectorXcd wbr_flat = wh.apply(br);
        Eigen::MatrixXcd wbr(cfg.blocks(), cfg.n_rf_r);
        for (int b = 0; b < cfg.blocks(); ++b) {
            wbr.row(b) = wbr_flat.segment(b * cfg.n_rf_r, cfg.n_rf_r).transpose();
        }
        f.wbr.push_back(std::move(wbr));
    }

    // |ramp| = 1, so the squared norm does not depend on the delay index.
    f.norm2.resize(static_cast<Eigen::Index>(f.theta_grid.size()),
                   static_cast<Eigen::Index>(f.phi_grid.size()));
    for (std::size_t a = 0; a < f.theta_grid.size(); ++a) {
        for (std::size_t p = 0; p < f.phi_grid.size(); ++p) {
            double acc = 0.0;
            for (int b = 0; b < cfg.blocks(); ++b) {
                acc += std::norm(f.bt[a](b)) * f.wbr[p].row(b).squaredNorm();
            }
            f.norm2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(p)) = acc;
        }
    }
    return f;
}

Eigen::VectorXcd whitened_column(const DictionaryFactors& f, const WaveformConfig& cfg, int t,
                                 int a, int p) {
    Eigen::VectorXcd col(cfg.observation_size());
    for (int b = 0; b < cfg.blocks(); ++b) {
        const cd scale = f.bt[static_cast<std::size_t>(a)](b) *
                         f.ramp[static_cast<std::size_t>(t)](b % cfg.n_k);
        col.segment(b * cfg.n_rf_r, cfg.n_rf_r) =
            scale * f.wbr[static_cast<std::size_t>(p)].row(b).transpose();
    }
    return col;
}

}  // namespace

std::vector<RecoveredPath> greedy_recover(const ComplexObservation& obs,
                                          const DictionaryConfig& dict_cfg,
                                          const PilotFrame& frame, const WaveformConfig& cfg,
                                          const GreedyStop& stop) {
    cfg.validate();
    dict_cfg.validate();
    frame.validate_against(cfg);
    require(obs.y.size() == cfg.observation_size(), "greedy_recover: observation length mismatch");
    require(stop.max_paths >= 1, "greedy_recover: max_paths must be >= 1");
    require(stop.residual_threshold >= 0.0,
            "greedy_recover: residual_threshold must be >= 0");

    const Whitener wh(frame, cfg);
    const DictionaryFactors f = build_factors(dict_cfg, frame, cfg, wh);
    if (f.columns() == 0) {
        throw degenerate_configuration_error("greedy_recover: dictionary has no columns");
    }

    const Eigen::VectorXcd wy = wh.apply(obs.y);
    Eigen::VectorXcd residual = wy;

    const int n_tau = static_cast<int>(f.tau_grid.size());
    const int n_theta = static_cast<int>(f.theta_grid.size());
    const int n_phi = static_cast<int>(f.phi_grid.size());

    std::vector<std::array<int, 3>> support;  // (t, a, p) per selected column
    Eigen::MatrixXcd selected(cfg.observation_size(), 0);
    Eigen::VectorXcd amplitudes;

    while (static_cast<int>(support.size()) < stop.max_paths &&
           residual.squaredNorm() >= stop.residual_threshold) {
        // Correlations against the residual factor through the (phi, block)
        // inner products, shared by every (tau, theta) pair.
        Eigen::MatrixXcd c(n_phi, cfg.blocks());
        for (int p = 0; p < n_phi; ++p) {
            for (int b = 0; b < cfg.blocks(); ++b) {
                c(p, b) = f.wbr[static_cast<std::size_t>(p)].row(b).dot(
                    residual.segment(b * cfg.n_rf_r, cfg.n_rf_r));
            }
        }
        double best = 0.0;
        int best_t = -1, best_a = -1, best_p = -1;
        for (int t = 0; t < n_tau; ++t) {
            for (int a = 0; a < n_theta; ++a) {
                for (int p = 0; p < n_phi; ++p) {
                    const double n2 = f.norm2(a, p);
                    if (n2 <= 1e-300) continue;
                    cd corr{0.0, 0.0};
                    for (int b = 0; b < cfg.blocks(); ++b) {
                        corr += std::conj(f.bt[static_cast<std::size_t>(a)](b) *
                                          f.ramp[static_cast<std::size_t>(t)](b % cfg.n_k)) *
                                c(p, b);
                    }
                    const double score = std::norm(corr) / n2;
                    if (score > best) {
                        best = score;
                        best_t = t;
                        best_a = a;
                        best_p = p;
                    }
                }
            }
        }
        if (best_t < 0) break;  // residual orthogonal to the whole dictionary

        const std::array<int, 3> pick{best_t, best_a, best_p};
        if (std::find(support.begin(), support.end(), pick) != support.end()) break;
        support.push_back(pick);

        selected.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(support.size()));
        selected.col(static_cast<Eigen::Index>(support.size()) - 1) =
            whitened_column(f, cfg, best_t, best_a, best_p);
        amplitudes = selected.colPivHouseholderQr().solve(wy);
        residual = wy - selected * amplitudes;
    }

    std::vector<RecoveredPath> out;
    out.reserve(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        RecoveredPath r;
        r.alpha = amplitudes(static_cast<Eigen::Index>(i));
        r.tau_index = support[i][0];
        r.theta_index = support[i][1];
        r.phi_index = support[i][2];
        r.delay = f.tau_grid[static_cast<std::size_t>(support[i][0])];
        r.aod = f.theta_grid[static_cast<std::size_t>(support[i][1])];
        r.daoa = f.phi_grid[static_cast<std::size_t>(support[i][2])];
        out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(), [](const RecoveredPath& a, const RecoveredPath& b) {
        return std::abs(a.alpha) > std::abs(b.alpha);
    });
    return out;
}

namespace {

// d/d(angle) of the steering vector: element n multiplied by j*pi*n*cos(angle).
Eigen::VectorXcd steering_derivative(int n, double angle) {
    Eigen::VectorXcd a = steering(n, angle);
    const double factor = kPi * std::cos(angle);
    for (int i = 0; i < n; ++i) {
        a(i) *= kJ * (factor * i);
    }
    return a;
}

}  // namespace

Eigen::MatrixXd measurement_fim(const std::vector<ChannelPath>& paths, const PilotFrame& frame,
                                const WaveformConfig& cfg) {
    cfg.validate();
    frame.validate_against(cfg);
    require(cfg.sigma_z2 > 0.0, "measurement_fim: sigma_z2 must be > 0");
    require(!paths.empty(), "measurement_fim: at least one path required");

    const auto np = static_cast<Eigen::Index>(paths.size());
    Eigen::MatrixXcd d(cfg.observation_size(), 3 * np);
    for (Eigen::Index i = 0; i < np; ++i) {
        const ChannelPath& p = paths[static_cast<std::size_t>(i)];
        const Eigen::VectorXcd at = steering(cfg.n_t, p.aod);
        const Eigen::VectorXcd dat = steering_derivative(cfg.n_t, p.aod);
        const Eigen::VectorXcd ar = steering(cfg.n_r, p.daoa);
        const Eigen::VectorXcd dar = steering_derivative(cfg.n_r, p.daoa);
        for (int s = 0; s < cfg.n_s; ++s) {
            for (int k = 0; k < cfg.n_k; ++k) {
                const int b = s * cfg.n_k + k;
                const auto& w = frame.combiners[static_cast<std::size_t>(b)];
                const auto& x = frame.pilots[static_cast<std::size_t>(b)];
                const cd bt = at.transpose() * x;
                const cd dbt = dat.transpose() * x;
                const Eigen::VectorXcd br = w.adjoint() * ar;
                const Eigen::VectorXcd dbr = w.adjoint() * dar;
                const cd ramp = std::exp(-kJ * (2.0 * kPi * k * cfg.delta_f * p.delay));
                const cd dramp = -kJ * (2.0 * kPi * k * cfg.delta_f) * ramp;
                for (int r = 0; r < cfg.n_rf_r; ++r) {
                    const int row = ComplexObservation::index(s, k, r, cfg);
                    d(row, 3 * i + 0) = p.alpha * br(r) * dbt * ramp;
                    d(row, 3 * i + 1) = p.alpha * dbr(r) * bt * ramp;
                    d(row, 3 * i + 2) = p.alpha * br(r) * bt * dramp;
                }
            }
        }
    }

    const Whitener wh(frame, cfg);
    const Eigen::MatrixXcd wd = wh.apply(d);
    return (2.0 / cfg.sigma_z2) * (wd.adjoint() * wd).real();
}

}  // namespace mpslam
