#pragma once

#include "mpslam/geometry.hpp"
#include "mpslam/orientation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mpslam {

// How the exact observations are degraded before they reach the estimators.
// Exactly one mode per run; estimation error is modeled as quantization of
// the true path parameters, not additive noise.
struct CorruptionSpec {
    enum class Mode { None, QuantizeDaoa, QuantizeAod, QuantizeTdoa };
    // DAoA quantizer flavor: Uniform = circular grid of step pi/k (matches
    // the (1/12)(pi/k)^2 variance model); SinGrid = projection onto the
    // sin-spaced dictionary grid, limited to [-pi/2, pi/2).
    enum class DaoaMode { Uniform, SinGrid };

    Mode mode = Mode::None;
    int k = 256;          // grid size of the active mode
    DaoaMode daoa_mode = DaoaMode::Uniform;
    double t_cp = 1e-6;   // seconds, delay-grid span for QuantizeTdoa

    /// Stable label for CSV output: none, daoa_q256, daoa_sg256, aod_q256,
    /// tdoa_q256.
    std::string name() const;

    MultipathSet apply(const MultipathSet& exact) const;
};

// One estimator variant of the roster. name() is the stable CSV identifier.
struct EstimatorSpec {
    enum class Kind { KnownOrientation, QuantizedSensor, Robust, RandomGuess };

    Kind kind = Kind::KnownOrientation;
    int n_q = 64;  // sensor levels for QuantizedSensor / Robust sensor init
    GroupingStrategy grouping = GroupingStrategy::drop_one();          // Robust
    OrientationInit::Mode init_mode = OrientationInit::Mode::BruteForce;  // Robust
    OrientationSolverConfig solver{};  // Robust refinement knobs

    std::string name() const;

    static EstimatorSpec known_orientation();
    static EstimatorSpec quantized_sensor(int n_q);
    static EstimatorSpec robust(GroupingStrategy grouping, OrientationInit::Mode init,
                                int n_q = 64);
    static EstimatorSpec random_guess();
};

// Outcome of one estimator on one trial. Failures are first-class: status
// holds a stable reason and the metric fields are NaN.
struct TrialRecord {
    std::uint64_t seed = 0;
    double position_error = 0.0;          // meters
    std::vector<double> mapping_errors;   // meters, per mapped reflector
    double clock_error = 0.0;             // seconds
    double orientation_error = 0.0;       // radians, circular, <= pi
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct ExperimentConfig {
    int n_sim = 1000;
    ScenarioConfig scenario{};
    CorruptionSpec corruption{};
    std::vector<EstimatorSpec> estimators;
    std::uint64_t master_seed = 0;
    int threads = 0;  // worker threads; 0 = all hardware cores

    void validate() const;
};

// records[e][t]: estimator e on trial t, order matching cfg.estimators.
using TrialTable = std::vector<std::vector<TrialRecord>>;

/// Runs the ensemble. Trial t derives its seed from (master_seed, t); every
/// estimator of a trial sees the identical corrupted observations. Output is
/// bitwise independent of the thread count.
TrialTable run_trials(const ExperimentConfig& cfg);

enum class Metric { Position, Mapping, Clock, Orientation };

std::string metric_name(Metric m);

struct PercentilePoint {
    double prob = 0.0;   // percent, in (0, 100]
    double value = 0.0;
};

// Empirical distribution of one metric over the ok trials of one estimator.
struct StatsTable {
    std::vector<double> sorted_values;          // ascending; CDF support
    std::vector<PercentilePoint> percentiles;   // nearest-rank
    int n_ok = 0;
    int n_failed = 0;
};

/// Nearest-rank percentiles (rank = ceil(p/100 * n)) of the chosen metric.
/// Mapping pools every per-reflector error across trials. Failed trials are
/// counted and excluded. Throws empty_result_error when no trial succeeded.
StatsTable cdf_and_percentiles(const std::vector<TrialRecord>& records, Metric metric,
                               const std::vector<double>& probs);

// One line of the resolution sweep: the metric percentile of an estimator at
// one DAoA dictionary size, next to the matching position-bound percentile.
struct SweepRow {
    int k_phi = 0;
    std::string estimator;
    std::string metric;
    double prob = 0.0;        // percent
    double value = 0.0;       // metric units
    double approx_bound = 0.0;  // meters, approx_crlb percentile over the ensemble
};

/// For each k in k_phi_list: rerun the ensemble with DAoA quantization at k
/// and emit one row per (estimator, metric, prob). The scene ensemble is
/// identical across k by the seeding scheme.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::vector<int>& k_phi_list,
                            const std::vector<double>& probs = {80.0});

}  // namespace mpslam
