#include "mpslam/montecarlo.hpp"

#include "mpslam/crlb.hpp"
#include "mpslam/dictionary.hpp"
#include "mpslam/errors.hpp"
#include "mpslam/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mpslam {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string CorruptionSpec::name() const {
    switch (mode) {
        case Mode::None:
            return "none";
        case Mode::QuantizeDaoa:
            return (daoa_mode == DaoaMode::Uniform ? "daoa_q" : "daoa_sg") + std::to_string(k);
        case Mode::QuantizeAod:
            return "aod_q" + std::to_string(k);
        case Mode::QuantizeTdoa:
            return "tdoa_q" + std::to_string(k);
    }
    return "none";
}

MultipathSet CorruptionSpec::apply(const MultipathSet& exact) const {
    if (mode == Mode::None) return exact;
    if (k < 1) throw std::invalid_argument("CorruptionSpec: grid size k must be >= 1");
    MultipathSet out = exact;
    out.provenance = Provenance::Quantized;
    for (PathObservation& p : out.paths) {
        switch (mode) {
            case Mode::QuantizeDaoa:
                p.daoa = (daoa_mode == DaoaMode::Uniform) ? quantize_uniform_angle(p.daoa, k)
                                                          : quantize_to_angle_grid(p.daoa, k);
                break;
            case Mode::QuantizeAod:
                p.aod = quantize_uniform_angle(p.aod, k);
                break;
            case Mode::QuantizeTdoa:
                p.tdoa = quantize_to_delay_grid(p.tdoa, k, t_cp);
                break;
            case Mode::None:
                break;
        }
    }
    return out;
}

std::string EstimatorSpec::name() const {
    switch (kind) {
        case Kind::KnownOrientation:
            return "known_phi";
        case Kind::QuantizedSensor:
            return "sensor_q" + std::to_string(n_q);
        case Kind::Robust: {
            std::string g;
            switch (grouping.kind) {
                case GroupingStrategy::Kind::ThreePath:
                    g = "3p";
                    break;
                case GroupingStrategy::Kind::DropOne:
                    g = "d1";
                    break;
                case GroupingStrategy::Kind::Custom:
                    g = "custom";
                    break;
            }
            const std::string init = (init_mode == OrientationInit::Mode::BruteForce)
                                         ? "brute"
                                         : "sensor" + std::to_string(n_q);
            return "robust_" + g + "_" + init;
        }
        case Kind::RandomGuess:
            return "random_guess";
    }
    return "unknown";
}

EstimatorSpec EstimatorSpec::known_orientation() {
    EstimatorSpec s;
    s.kind = Kind::KnownOrientation;
    return s;
}

EstimatorSpec EstimatorSpec::quantized_sensor(int n_q) {
    EstimatorSpec s;
    s.kind = Kind::QuantizedSensor;
    s.n_q = n_q;
    return s;
}

EstimatorSpec EstimatorSpec::robust(GroupingStrategy grouping, OrientationInit::Mode init,
                                    int n_q) {
    EstimatorSpec s;
    s.kind = Kind::Robust;
    s.grouping = std::move(grouping);
    s.init_mode = init;
    s.n_q = n_q;
    return s;
}

EstimatorSpec EstimatorSpec::random_guess() {
    EstimatorSpec s;
    s.kind = Kind::RandomGuess;
    return s;
}

void ExperimentConfig::validate() const {
    if (n_sim < 1) throw std::invalid_argument("ExperimentConfig: n_sim must be >= 1");
    if (estimators.empty()) {
        throw std::invalid_argument("ExperimentConfig: at least one estimator required");
    }
    if (threads < 0) throw std::invalid_argument("ExperimentConfig: threads must be >= 0");
    if (scenario.n_paths < 3) {
        throw std::invalid_argument("ExperimentConfig: scenario needs >= 3 paths");
    }
    for (const EstimatorSpec& e : estimators) {
        if ((e.kind == EstimatorSpec::Kind::QuantizedSensor ||
             (e.kind == EstimatorSpec::Kind::Robust &&
              e.init_mode == OrientationInit::Mode::Sensor)) &&
            e.n_q < 1) {
            throw std::invalid_argument("ExperimentConfig: sensor levels n_q must be >= 1");
        }
    }
}

namespace {

// Per-reflector distances between the estimate's mapped reflectors and the
// ground truth, index-aligned through used_paths.
std::vector<double> mapping_errors(const LocationEstimate& est, const Scene& scene) {
    std::vector<double> errs;
    errs.reserve(est.reflectors.size());
    for (std::size_t j = 0; j < est.reflectors.size(); ++j) {
        const int path = est.used_paths[j];
        errs.push_back(
            (est.reflectors[j] - scene.reflectors[static_cast<std::size_t>(path)]).norm());
    }
    return errs;
}

TrialRecord failed_record(std::uint64_t seed, std::string status) {
    TrialRecord r;
    r.seed = seed;
    r.position_error = kNan;
    r.clock_error = kNan;
    r.orientation_error = kNan;
    r.status = std::move(status);
    return r;
}

TrialRecord run_estimator(const EstimatorSpec& spec, const Scene& scene,
                          const MultipathSet& corrupted, std::uint64_t stream_seed,
                          const ScenarioConfig& scenario) {
    TrialRecord rec;
    rec.seed = stream_seed;
    try {
        switch (spec.kind) {
            case EstimatorSpec::Kind::KnownOrientation: {
                const LocationEstimate est = solve_location(corrupted, scene.orientation);
                rec.position_error = (est.rx_position - scene.rx_position).norm();
                rec.clock_error = std::abs(est.clock_offset - scene.clock_offset);
                rec.orientation_error = 0.0;
                rec.mapping_errors = mapping_errors(est, scene);
                break;
            }
            case EstimatorSpec::Kind::QuantizedSensor: {
                const double phi_hat = quantize_orientation(scene.orientation, spec.n_q);
                const LocationEstimate est = solve_location(corrupted, phi_hat);
                rec.position_error = (est.rx_position - scene.rx_position).norm();
                rec.clock_error = std::abs(est.clock_offset - scene.clock_offset);
                rec.orientation_error = circular_distance(phi_hat, scene.orientation);
                rec.mapping_errors = mapping_errors(est, scene);
                break;
            }
            case EstimatorSpec::Kind::Robust: {
                OrientationSolverConfig cfg = spec.solver;
                cfg.init = (spec.init_mode == OrientationInit::Mode::Sensor)
                               ? OrientationInit::sensor(
                                     quantize_orientation(scene.orientation, spec.n_q), spec.n_q)
                               : OrientationInit::brute_force();
                const RobustEstimate est = robust_locate(corrupted, spec.grouping, cfg);
                rec.position_error = (est.location.rx_position - scene.rx_position).norm();
                rec.clock_error = std::abs(est.location.clock_offset - scene.clock_offset);
                rec.orientation_error = circular_distance(est.phi_o, scene.orientation);
                rec.mapping_errors = mapping_errors(est.location, scene);
                break;
            }
            case EstimatorSpec::Kind::RandomGuess: {
                // Draw a fresh guess from the same prior the scenes use.
                RandomStream rng(stream_seed);
                const Eigen::Vector2d pos(rng.uniform(0.0, scenario.side),
                                          rng.uniform(0.0, scenario.side));
                const double phi = wrap_angle(rng.uniform(0.0, kTwoPi));
                const double clock = pos.norm() / kSpeedOfLight +
                                     rng.uniform(0.0, scenario.clock_offset_span);
                rec.position_error = (pos - scene.rx_position).norm();
                rec.clock_error = std::abs(clock - scene.clock_offset);
                rec.orientation_error = circular_distance(phi, scene.orientation);
                rec.mapping_errors.reserve(scene.reflectors.size());
                for (const Eigen::Vector2d& truth : scene.reflectors) {
                    const Eigen::Vector2d guess(rng.uniform(0.0, scenario.side),
                                                rng.uniform(0.0, scenario.side));
                    rec.mapping_errors.push_back((guess - truth).norm());
                }
                break;
            }
        }
    } catch (const insufficient_paths_error&) {
        return failed_record(stream_seed, "insufficient_paths");
    } catch (const degenerate_configuration_error&) {
        return failed_record(stream_seed, "degenerate_configuration");
    } catch (const orientation_unrecoverable_error&) {
        return failed_record(stream_seed, "orientation_unrecoverable");
    } catch (const std::exception&) {
        return failed_record(stream_seed, "error");
    }
    return rec;
}

}  // namespace

TrialTable run_trials(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_est = cfg.estimators.size();
    TrialTable records(n_est);
    for (auto& v : records) v.resize(static_cast<std::size_t>(cfg.n_sim));

    const auto run_one = [&](int t) {
        const std::uint64_t trial_seed =
            derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
        const Scene scene = sample_scene(cfg.scenario, trial_seed);
        const MultipathSet exact = exact_observations(scene, cfg.scenario.eps_geom);
        const MultipathSet corrupted = cfg.corruption.apply(exact);
        for (std::size_t e = 0; e < n_est; ++e) {
            const std::uint64_t stream =
                derive_seed(trial_seed, 1000 + static_cast<std::uint64_t>(e));
            records[e][static_cast<std::size_t>(t)] =
                run_estimator(cfg.estimators[e], scene, corrupted, stream, cfg.scenario);
        }
    };

    unsigned n_workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(cfg.n_sim));

    if (n_workers == 1) {
        for (int t = 0; t < cfg.n_sim; ++t) run_one(t);
    } else {
        // Every trial writes only its own preallocated slots, so the result
        // is identical for any worker count or schedule.
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < cfg.n_sim; t = next.fetch_add(1)) {
                    run_one(t);
                }
            });
        }
        for (std::thread& th : pool) th.join();
    }
    return records;
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Position:
            return "position";
        case Metric::Mapping:
            return "mapping";
        case Metric::Clock:
            return "clock";
        case Metric::Orientation:
            return "orientation";
    }
    return "unknown";
}

StatsTable cdf_and_percentiles(const std::vector<TrialRecord>& records, Metric metric,
                               const std::vector<double>& probs) {
    StatsTable out;
    for (const TrialRecord& r : records) {
        if (!r.ok()) {
            ++out.n_failed;
            continue;
        }
        ++out.n_ok;
        switch (metric) {
            case Metric::Position:
                out.sorted_values.push_back(r.position_error);
                break;
            case Metric::Mapping:
                out.sorted_values.insert(out.sorted_values.end(), r.mapping_errors.begin(),
                                         r.mapping_errors.end());
                break;
            case Metric::Clock:
                out.sorted_values.push_back(r.clock_error);
                break;
            case Metric::Orientation:
                out.sorted_values.push_back(r.orientation_error);
                break;
        }
    }
    if (out.n_ok == 0 || out.sorted_values.empty()) {
        throw empty_result_error("cdf_and_percentiles: no successful trial");
    }
    std::sort(out.sorted_values.begin(), out.sorted_values.end());

    const auto n = static_cast<double>(out.sorted_values.size());
    out.percentiles.reserve(probs.size());
    for (double p : probs) {
        if (!(p > 0.0) || p > 100.0) {
            throw std::invalid_argument("cdf_and_percentiles: probs must lie in (0, 100]");
        }
        auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
        rank = std::max<std::size_t>(rank, 1);
        out.percentiles.push_back({p, out.sorted_values[rank - 1]});
    }
    return out;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::vector<int>& k_phi_list,
                            const std::vector<double>& probs) {
    if (k_phi_list.empty()) throw std::invalid_argument("sweep: k_phi_list must be nonempty");
    cfg.validate();

    std::vector<SweepRow> rows;
    for (int k_phi : k_phi_list) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.corruption.mode = CorruptionSpec::Mode::QuantizeDaoa;
        run_cfg.corruption.k = k_phi;
        const TrialTable table = run_trials(run_cfg);

        // Position-bound percentile over the identical scene ensemble.
        std::vector<double> bounds;
        bounds.reserve(static_cast<std::size_t>(run_cfg.n_sim));
        for (int t = 0; t < run_cfg.n_sim; ++t) {
            const std::uint64_t trial_seed =
                derive_seed(run_cfg.master_seed, static_cast<std::uint64_t>(t));
            const Scene scene = sample_scene(run_cfg.scenario, trial_seed);
            try {
                bounds.push_back(approx_crlb(scene, k_phi));
            } catch (const degenerate_configuration_error&) {
                // A collinear ensemble member carries no bound; skip it.
            }
        }
        std::sort(bounds.begin(), bounds.end());
        const auto bound_at = [&](double p) {
            if (bounds.empty()) return kNan;
            auto rank = static_cast<std::size_t>(
                std::ceil(p / 100.0 * static_cast<double>(bounds.size())));
            rank = std::max<std::size_t>(rank, 1);
            return bounds[rank - 1];
        };

        for (std::size_t e = 0; e < run_cfg.estimators.size(); ++e) {
            for (Metric metric :
                 {Metric::Position, Metric::Mapping, Metric::Clock, Metric::Orientation}) {
                const StatsTable stats = cdf_and_percentiles(table[e], metric, probs);
                for (const PercentilePoint& pt : stats.percentiles) {
                    SweepRow row;
                    row.k_phi = k_phi;
                    row.estimator = run_cfg.estimators[e].name();
                    row.metric = metric_name(metric);
                    row.prob = pt.prob;
                    row.value = pt.value;
                    row.approx_bound = bound_at(pt.prob);
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

}  // namespace mpslam
