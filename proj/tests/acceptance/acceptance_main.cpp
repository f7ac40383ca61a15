// Acceptance harness: checks the end-to-end guarantees of the toolkit on
// freshly sampled ensembles and prints one [PASS]/[FAIL] line per criterion.
// Exit code is the number of failed criteria. --cli <path> points at the
// command-line binary (used by the byte-determinism criterion).

#include "mpslam/channel.hpp"
#include "mpslam/crlb.hpp"
#include "mpslam/dictionary.hpp"
#include "mpslam/errors.hpp"
#include "mpslam/geometry.hpp"
#include "mpslam/localization.hpp"
#include "mpslam/montecarlo.hpp"
#include "mpslam/orientation.hpp"
#include "mpslam/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace mpslam;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Harness {
    int failures = 0;

    void report(int id, bool pass, const std::string& what, const std::string& detail) {
        std::printf("[%s] criterion %2d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }

    void run(int id, const std::string& what,
             const std::function<std::pair<bool, std::string>()>& body) {
        try {
            const auto [pass, detail] = body();
            report(id, pass, what, detail);
        } catch (const std::exception& e) {
            report(id, false, what, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// Position errors of one estimator over every trial; failures count as +inf
// so they can never satisfy an error bound.
std::vector<double> position_errors(const std::vector<TrialRecord>& records) {
    std::vector<double> v;
    v.reserve(records.size());
    for (const TrialRecord& r : records) {
        v.push_back(r.ok() ? r.position_error : kInf);
    }
    return v;
}

double nearest_rank(std::vector<double> v, double prob) {
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(prob / 100.0 * static_cast<double>(v.size())));
    rank = std::max<std::size_t>(rank, 1);
    return v[rank - 1];
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- finite-difference oracle for the location-domain Jacobian -------------

Eigen::VectorXd measurement_stack(const Scene& scene) {
    const auto params = forward_model(scene, 1e-6);
    Eigen::VectorXd m(3 * static_cast<Eigen::Index>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m(3 * static_cast<Eigen::Index>(i) + 0) = params[i].aod;
        m(3 * static_cast<Eigen::Index>(i) + 1) = params[i].daoa;
        m(3 * static_cast<Eigen::Index>(i) + 2) = params[i].tdoa;
    }
    return m;
}

Scene perturbed(const Scene& s, int param, double h) {
    Scene p = s;
    switch (param) {
        case 0: p.rx_position.x() += h; break;
        case 1: p.rx_position.y() += h; break;
        case 2: p.clock_offset += h; break;
        case 3: p.orientation += h; break;
        default: {
            const int r = (param - 4) / 2;
            if ((param - 4) % 2 == 0) {
                p.reflectors[static_cast<std::size_t>(r)].x() += h;
            } else {
                p.reflectors[static_cast<std::size_t>(r)].y() += h;
            }
        }
    }
    return p;
}

double max_fd_row_error(const Scene& s, double h) {
    const TransformMatrix t = transform_matrix(s);
    const int np = s.n_paths();
    double worst = 0.0;
    for (int j = 0; j < 4 + 2 * np; ++j) {
        const Eigen::VectorXd plus = measurement_stack(perturbed(s, j, h));
        const Eigen::VectorXd minus = measurement_stack(perturbed(s, j, -h));
        for (int i = 0; i < 3 * np; ++i) {
            const double fd = (i % 3 == 2)
                                  ? (plus(i) - minus(i)) / (2.0 * h)
                                  : wrap_angle(plus(i) - minus(i)) / (2.0 * h);
            const double scale = t.t.row(i).cwiseAbs().maxCoeff();
            worst = std::max(worst, std::abs(t.t(i, j) - fd) / scale);
        }
    }
    return worst;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    }

    Harness h;

    // ------------------------------------------------------------------ 1
    h.run(1, "exact observations, known orientation: position error < 1e-6 m", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        ExperimentConfig cfg;
        cfg.n_sim = 200;
        cfg.master_seed = 10001;
        cfg.estimators = {EstimatorSpec::known_orientation()};
        const TrialTable table = run_trials(cfg);
        double worst = 0.0;
        int ok = 0;
        for (const TrialRecord& r : table[0]) {
            if (r.ok()) {
                ++ok;
                worst = std::max(worst, r.position_error);
            }
        }
        const double elapsed = seconds_since(t0);
        const bool pass = ok == cfg.n_sim && worst < 1e-6 && elapsed < 10.0;
        return std::make_pair(pass, "max_err=" + fmt(worst) + " m (limit 1e-6), ok=" +
                                        std::to_string(ok) + "/200, " + fmt(elapsed) +
                                        " s (limit 10)");
    });

    // ------------------------------------------------------------------ 2
    h.run(2, "blind robust solve on exact observations: micrometer-decade errors", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        ExperimentConfig cfg;
        cfg.n_sim = 200;
        cfg.master_seed = 10002;
        cfg.estimators = {EstimatorSpec::robust(GroupingStrategy::drop_one(),
                                                OrientationInit::Mode::BruteForce)};
        const TrialTable table = run_trials(cfg);
        std::vector<double> errs = position_errors(table[0]);
        const double median = nearest_rank(errs, 50.0);
        int in_decade = 0;
        for (double e : errs) {
            if (e >= 1e-6 && e < 1e-5) ++in_decade;
        }
        const double frac = static_cast<double>(in_decade) / static_cast<double>(errs.size());
        const double elapsed = seconds_since(t0);
        const bool pass = median < 1e-3 && frac >= 0.60 && elapsed < 120.0;
        return std::make_pair(pass, "median=" + fmt(median) + " m (limit 1e-3), decade[1e-6,1e-5)=" +
                                        fmt(100.0 * frac) + "% (need >= 60%), " + fmt(elapsed) +
                                        " s (limit 120)");
    });

    // ------------------------------------------------------------------ 3
    h.run(3, "64-level orientation sensor, perfect multipath: 80th pct in [0.05, 2] m", [&] {
        ExperimentConfig cfg;
        cfg.n_sim = 500;
        cfg.master_seed = 10003;
        cfg.estimators = {EstimatorSpec::quantized_sensor(64)};
        const TrialTable table = run_trials(cfg);
        const double p80 = nearest_rank(position_errors(table[0]), 80.0);
        const bool pass = p80 >= 0.05 && p80 <= 2.0;
        return std::make_pair(pass, "p80=" + fmt(p80) + " m (window [0.05, 2])");
    });

    // ------------------------------------------------------------------ 4
    h.run(4, "256-point arrival-angle quantization: 80th pct within budget", [&] {
        ExperimentConfig cfg;
        cfg.n_sim = 500;
        cfg.master_seed = 10004;
        cfg.corruption.mode = CorruptionSpec::Mode::QuantizeDaoa;
        cfg.corruption.k = 256;
        cfg.estimators = {EstimatorSpec::known_orientation(), EstimatorSpec::quantized_sensor(64)};
        const TrialTable table = run_trials(cfg);
        const double known = nearest_rank(position_errors(table[0]), 80.0);
        const double sensor = nearest_rank(position_errors(table[1]), 80.0);
        const bool pass = known < 2.5 && sensor < 4.5;
        return std::make_pair(pass, "known_phi p80=" + fmt(known) + " m (limit 2.5), sensor_q64 p80=" +
                                        fmt(sensor) + " m (limit 4.5)");
    });

    // ------------------------------------------------------------------ 5
    h.run(5, "closed-form position bound: sub-meter at 256 points, exact 1/k scaling", [&] {
        ScenarioConfig scen;
        std::vector<double> bounds;
        double worst_scaling = 0.0;
        int degenerate = 0;
        for (int t = 0; t < 500; ++t) {
            const Scene s = sample_scene(scen, derive_seed(10004, t));
            try {
                const double b256 = approx_crlb(s, 256);
                const double b512 = approx_crlb(s, 512);
                bounds.push_back(b256);
                worst_scaling = std::max(worst_scaling, std::abs(b256 / b512 - 2.0));
            } catch (const degenerate_configuration_error&) {
                ++degenerate;
            }
        }
        if (bounds.empty()) return std::make_pair(false, std::string("no usable scene"));
        const double p80 = nearest_rank(bounds, 80.0);
        const bool pass = p80 < 1.0 && worst_scaling < 1e-12;
        return std::make_pair(pass, "p80=" + fmt(p80) + " m (limit 1), halving-error=" +
                                        fmt(worst_scaling) + " (limit 1e-12), degenerate=" +
                                        std::to_string(degenerate));
    });

    // -------------------------------------------------------------- 6 and 7
    {
        std::vector<double> clock_by_k;
        std::vector<double> orient_by_k;
        const std::vector<int> k_list = {64, 128, 256, 512, 1024};
        bool sweep_ok = true;
        std::string sweep_err;
        try {
            ExperimentConfig cfg;
            cfg.n_sim = 400;
            cfg.master_seed = 10006;
            cfg.estimators = {EstimatorSpec::robust(GroupingStrategy::drop_one(),
                                                    OrientationInit::Mode::Sensor, 64)};
            const std::vector<SweepRow> rows = sweep(cfg, k_list, {80.0});
            for (int k : k_list) {
                for (const SweepRow& r : rows) {
                    if (r.k_phi != k) continue;
                    if (r.metric == "clock") clock_by_k.push_back(r.value);
                    if (r.metric == "orientation") orient_by_k.push_back(r.value);
                }
            }
        } catch (const std::exception& e) {
            sweep_ok = false;
            sweep_err = e.what();
        }

        h.run(6, "resolution sweep: clock error non-increasing, < 1 ns at 1024 points", [&] {
            if (!sweep_ok || clock_by_k.size() != k_list.size()) {
                return std::make_pair(false, "sweep failed: " + sweep_err);
            }
            bool monotone = true;
            for (std::size_t i = 1; i < clock_by_k.size(); ++i) {
                if (clock_by_k[i] > clock_by_k[i - 1] * 1.10) monotone = false;
            }
            std::string series;
            for (double v : clock_by_k) series += fmt(v) + " ";
            const bool pass = monotone && clock_by_k.back() < 1e-9;
            return std::make_pair(pass, "p80 clock by k: " + series +
                                            "s (10% slack, final limit 1e-9)");
        });

        h.run(7, "resolution sweep: orientation error <= 0.1 rad at 1024 points", [&] {
            if (!sweep_ok || orient_by_k.size() != k_list.size()) {
                return std::make_pair(false, "sweep failed: " + sweep_err);
            }
            const bool pass = orient_by_k.back() <= 0.1;
            return std::make_pair(pass,
                                  "p80 orientation at 1024 = " + fmt(orient_by_k.back()) +
                                      " rad (limit 0.1)");
        });
    }

    // ------------------------------------------------------------------ 8
    h.run(8, "analytic location Jacobian vs central differences on 100 scenes", [&] {
        ScenarioConfig scen;
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const Scene s = sample_scene(scen, derive_seed(10008, t));
            worst = std::max(worst, max_fd_row_error(s, 1e-6));
        }
        const bool pass = worst < 1e-6;
        return std::make_pair(pass, "max row-relative error=" + fmt(worst) + " (limit 1e-6)");
    });

    // ------------------------------------------------------------------ 9
    h.run(9, "measurement information matrix vs finite differences", [&] {
        WaveformConfig cfg;
        cfg.n_t = 8;
        cfg.n_r = 8;
        cfg.n_k = 16;
        cfg.n_s = 4;
        cfg.n_rf_r = 4;
        cfg.delta_f = 1.0;
        cfg.t_cp = 1.0;
        cfg.sigma_z2 = 0.01;
        const PilotFrame frame = PilotFrame::random_phases(cfg, 909);
        const std::vector<ChannelPath> paths = {
            {std::complex<double>(0.9, 0.2), 0.31, 0.45, -0.8},
            {std::complex<double>(-0.3, 0.6), 0.12, -1.1, 0.25}};

        const Eigen::MatrixXd j = measurement_fim(paths, frame, cfg);
        WaveformConfig clean = cfg;
        clean.sigma_z2 = 0.0;
        const double step = 1e-7;
        Eigen::MatrixXcd d_fd(cfg.observation_size(), 6);
        for (int i = 0; i < 2; ++i) {
            for (int c = 0; c < 3; ++c) {
                auto plus = paths;
                auto minus = paths;
                double* fp[3] = {&plus[i].aod, &plus[i].daoa, &plus[i].delay};
                double* fm[3] = {&minus[i].aod, &minus[i].daoa, &minus[i].delay};
                *fp[c] += step;
                *fm[c] -= step;
                d_fd.col(3 * i + c) =
                    (synthesize(plus, frame, clean, 0).y - synthesize(minus, frame, clean, 0).y) /
                    (2.0 * step);
            }
        }
        const Whitener wh(frame, cfg);
        const Eigen::MatrixXcd wd = wh.apply(d_fd);
        const Eigen::MatrixXd j_fd = (2.0 / cfg.sigma_z2) * (wd.adjoint() * wd).real();
        double worst = 0.0;
        for (int c = 0; c < 6; ++c) {
            worst = std::max(worst, (j.col(c) - j_fd.col(c)).norm() / j.col(c).norm());
        }
        const double asym = (j - j.transpose()).cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = es.eigenvalues().maxCoeff();
        const bool pass = worst < 1e-5 && asym <= 1e-9 * j.cwiseAbs().maxCoeff() &&
                          lmin > -1e-9 * lmax;
        return std::make_pair(pass, "max column rel err=" + fmt(worst) +
                                        " (limit 1e-5), asym=" + fmt(asym) +
                                        ", min eigenvalue=" + fmt(lmin));
    });

    // ----------------------------------------------------------------- 10
    h.run(10, "greedy recovery pins an on-grid path exactly", [&] {
        WaveformConfig cfg;
        cfg.n_k = 8;
        cfg.delta_f = 1e6;
        cfg.n_t = 4;
        cfg.n_r = 4;
        cfg.n_rf_r = 2;
        cfg.n_s = 2;
        cfg.t_cp = 1e-6;
        const PilotFrame frame = PilotFrame::random_phases(cfg, 1010);
        DictionaryConfig dict;
        dict.k_tau = 8;
        dict.k_theta = 8;
        dict.k_phi = 8;
        dict.t_cp = cfg.t_cp;

        const auto tau_g = delay_grid(dict.k_tau, dict.t_cp);
        const auto theta_g = angle_grid(dict.k_theta);
        const auto phi_g = angle_grid(dict.k_phi);
        ChannelPath truth;
        truth.alpha = std::complex<double>(0.7, 0.4);
        truth.delay = tau_g[3];
        truth.aod = theta_g[5];
        truth.daoa = phi_g[2];
        const auto y = synthesize({truth}, frame, cfg, 1);
        const auto rec = greedy_recover(y, dict, frame, cfg);

        // Exhaustive correlation oracle over all materialized columns.
        const Whitener wh(frame, cfg);
        const Eigen::VectorXcd wy = wh.apply(y.y);
        double best = -1.0;
        int bt = -1, ba = -1, bp = -1;
        for (int t = 0; t < dict.k_tau; ++t) {
            for (int a = 0; a < dict.k_theta; ++a) {
                for (int p = 0; p < dict.k_phi; ++p) {
                    const auto col =
                        wh.apply(dictionary_column(tau_g[t], theta_g[a], phi_g[p], frame, cfg).y);
                    const double score = std::norm(col.dot(wy)) / col.squaredNorm();
                    if (score > best) {
                        best = score;
                        bt = t;
                        ba = a;
                        bp = p;
                    }
                }
            }
        }
        const bool support_ok = rec.size() == 1 && rec[0].tau_index == 3 &&
                                rec[0].theta_index == 5 && rec[0].phi_index == 2;
        const bool oracle_ok =
            support_ok && bt == rec[0].tau_index && ba == rec[0].theta_index &&
            bp == rec[0].phi_index;
        const double alpha_err =
            rec.empty() ? kInf : std::abs(rec[0].alpha - truth.alpha) / std::abs(truth.alpha);
        const bool pass = support_ok && oracle_ok && alpha_err < 1e-6;
        return std::make_pair(pass, "support " + std::string(support_ok ? "exact" : "WRONG") +
                                        ", oracle " + std::string(oracle_ok ? "agrees" : "DISAGREES") +
                                        ", alpha rel err=" + fmt(alpha_err) + " (limit 1e-6)");
    });

    // ----------------------------------------------------------------- 11
    h.run(11, "command-line simulate output is byte-identical for any thread count", [&] {
        if (cli.empty()) {
            return std::make_pair(false, std::string("no --cli <path> given"));
        }
        namespace fs = std::filesystem;
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        const fs::path dir = fs::temp_directory_path();
        const fs::path a = dir / ("acc11_a_" + std::to_string(stamp) + ".csv");
        const fs::path b = dir / ("acc11_b_" + std::to_string(stamp) + ".csv");

        const std::string common = "\"" + cli +
                                   "\" simulate --seed 424242 --n-sim 24 --n-paths 8"
                                   " --corruption daoa --k 128"
                                   " --estimators known_phi,sensor_q64,robust_d1_sensor64";
        const int rc1 = std::system((common + " --threads 1 --out \"" + a.string() + "\"").c_str());
        const int rc4 = std::system((common + " --threads 4 --out \"" + b.string() + "\"").c_str());
        const std::string ca = read_file(a);
        const std::string cb = read_file(b);
        fs::remove(a);
        fs::remove(b);
        if (rc1 != 0 || rc4 != 0) {
            return std::make_pair(false, "cli exited with " + std::to_string(rc1) + " / " +
                                             std::to_string(rc4));
        }
        if (ca.empty()) return std::make_pair(false, std::string("no output produced"));
        const bool pass = ca == cb;
        return std::make_pair(pass, std::string(pass ? "identical" : "DIFFER") + ", " +
                                        std::to_string(ca.size()) + " bytes, 24 trials x 3 estimators");
    });

    std::printf("%d of 11 criteria passed\n", 11 - h.failures);
    return h.failures;
}
