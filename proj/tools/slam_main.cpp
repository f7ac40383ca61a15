// Command-line frontend: scene generation, single-shot localization, error
// bounds, and Monte Carlo experiment sweeps. All randomness flows from
// --seed; repeated invocations with the same flags produce identical bytes
// regardless of --threads.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include "mpslam/crlb.hpp"
#include "mpslam/dictionary.hpp"
#include "mpslam/errors.hpp"
#include "mpslam/geometry.hpp"
#include "mpslam/montecarlo.hpp"
#include "mpslam/orientation.hpp"
#include "mpslam/rng.hpp"
#include "mpslam/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using mpslam::format_double;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared option bundles

struct ScenarioOpts {
    double side = 100.0;
    int n_paths = 20;
    double clock_span = 40e-9;
    double eps_geom = 1.0;

    void add_flags(CLI::App* sub) {
        sub->add_option("--side", side, "scene square side (meters)");
        sub->add_option("--n-paths", n_paths, "reflectors per scene (count)");
        sub->add_option("--clock-span", clock_span,
                        "clock offset excess over the line-of-sight delay (seconds)");
        sub->add_option("--eps-geom", eps_geom,
                        "minimum reflector/terminal separation (meters)");
    }

    mpslam::ScenarioConfig to_config() const { return {side, n_paths, clock_span, eps_geom}; }
};

struct SolverOpts {
    int grid_points = 100;
    double refine_tol = 1e-9;
    int max_refine_iters = mpslam::OrientationSolverConfig{}.max_refine_iters;

    void add_flags(CLI::App* sub) {
        sub->add_option("--grid-points", grid_points,
                        "orientation grid candidates over a full turn (count)");
        sub->add_option("--refine-tol", refine_tol,
                        "orientation refinement bracket width floor (radians)");
        sub->add_option("--max-refine-iters", max_refine_iters,
                        "orientation refinement iteration cap (count)");
    }

    mpslam::OrientationSolverConfig to_config() const {
        mpslam::OrientationSolverConfig cfg;
        cfg.grid_points = grid_points;
        cfg.refine_tolerance = refine_tol;
        cfg.max_refine_iters = max_refine_iters;
        return cfg;
    }
};

struct CorruptionOpts {
    std::string corruption = "none";
    int k = 256;
    std::string daoa_mode = "uniform";
    double t_cp = 1e-6;

    void add_flags(CLI::App* sub) {
        sub->add_option("--corruption", corruption,
                        "observation corruption: none | daoa | aod | tdoa")
            ->check(CLI::IsMember({"none", "daoa", "aod", "tdoa"}));
        sub->add_option("--k", k, "quantizer grid size (count)");
        sub->add_option("--daoa-mode", daoa_mode,
                        "arrival-angle quantizer: uniform (step pi/k) | sin-grid")
            ->check(CLI::IsMember({"uniform", "sin-grid"}));
        sub->add_option("--t-cp", t_cp, "delay-grid span for tdoa quantization (seconds)");
    }

    mpslam::CorruptionSpec to_spec() const {
        mpslam::CorruptionSpec spec;
        if (corruption == "none") {
            spec.mode = mpslam::CorruptionSpec::Mode::None;
        } else if (corruption == "daoa") {
            spec.mode = mpslam::CorruptionSpec::Mode::QuantizeDaoa;
        } else if (corruption == "aod") {
            spec.mode = mpslam::CorruptionSpec::Mode::QuantizeAod;
        } else if (corruption == "tdoa") {
            spec.mode = mpslam::CorruptionSpec::Mode::QuantizeTdoa;
        } else {
            throw std::invalid_argument("--corruption: unknown corruption mode");
        }
        spec.k = k;
        spec.daoa_mode = (daoa_mode == "uniform") ? mpslam::CorruptionSpec::DaoaMode::Uniform
                                                  : mpslam::CorruptionSpec::DaoaMode::SinGrid;
        spec.t_cp = t_cp;
        return spec;
    }
};

// ---------------------------------------------------------------------------
// Estimator roster parsing: known_phi, sensor_q<N>, random_guess,
// robust_{3p|d1}_{brute|sensor<N>}.

mpslam::EstimatorSpec parse_estimator(const std::string& name, const SolverOpts& solver) {
    using mpslam::EstimatorSpec;
    using mpslam::GroupingStrategy;
    using mpslam::OrientationInit;

    const auto parse_suffix_int = [&](const std::string& s, const std::string& prefix) {
        const std::string digits = s.substr(prefix.size());
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("estimator \"" + name + "\": bad level count");
        }
        return std::stoi(digits);
    };

    if (name == "known_phi") return EstimatorSpec::known_orientation();
    if (name == "random_guess") return EstimatorSpec::random_guess();
    if (name.rfind("sensor_q", 0) == 0) {
        return EstimatorSpec::quantized_sensor(parse_suffix_int(name, "sensor_q"));
    }
    if (name.rfind("robust_", 0) == 0) {
        std::string rest = name.substr(7);
        GroupingStrategy grouping;
        if (rest.rfind("d1_", 0) == 0) {
            grouping = GroupingStrategy::drop_one();
            rest = rest.substr(3);
        } else if (rest.rfind("3p_", 0) == 0) {
            grouping = GroupingStrategy::three_path();
            rest = rest.substr(3);
        } else {
            throw std::invalid_argument("estimator \"" + name + "\": grouping must be d1 or 3p");
        }
        EstimatorSpec spec;
        if (rest == "brute") {
            spec = EstimatorSpec::robust(grouping, OrientationInit::Mode::BruteForce);
        } else if (rest.rfind("sensor", 0) == 0) {
            spec = EstimatorSpec::robust(grouping, OrientationInit::Mode::Sensor,
                                         parse_suffix_int(rest, "sensor"));
        } else {
            throw std::invalid_argument("estimator \"" + name +
                                        "\": init must be brute or sensor<N>");
        }
        spec.solver = solver.to_config();
        return spec;
    }
    throw std::invalid_argument("unknown estimator \"" + name + "\"");
}

std::vector<mpslam::EstimatorSpec> parse_estimators(const std::vector<std::string>& names,
                                                    const SolverOpts& solver) {
    std::vector<mpslam::EstimatorSpec> specs;
    specs.reserve(names.size());
    for (const std::string& n : names) specs.push_back(parse_estimator(n, solver));
    return specs;
}

// ---------------------------------------------------------------------------
// Output plumbing

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }

    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::string join_errors(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ';';
        out += format_double(v[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config file: a flat JSON document whose keys mirror the long flags
// (seed, n_sim, side, ...). Explicit command-line flags win.

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
    return j;
}

class ConfigMerger {
  public:
    ConfigMerger(const json& cfg, const CLI::App& sub) : cfg_(cfg), sub_(sub) {}

    template <typename T>
    void take(const char* key, const char* flag, T& target) {
        handled_.insert(key);
        if (cfg_.contains(key) && sub_.count(flag) == 0) {
            try {
                target = cfg_.at(key).get<T>();
            } catch (const json::exception&) {
                throw std::runtime_error(std::string("config key \"") + key +
                                         "\" has the wrong type");
            }
        }
    }

    void finish() const {
        for (const auto& item : cfg_.items()) {
            if (handled_.find(item.key()) == handled_.end()) {
                throw std::runtime_error("unknown config key \"" + item.key() + "\"");
            }
        }
    }

  private:
    const json& cfg_;
    const CLI::App& sub_;
    std::set<std::string> handled_;
};

// ---------------------------------------------------------------------------
// Subcommand payloads

struct SceneCmd {
    std::uint64_t seed = 0;
    ScenarioOpts scenario;
    std::string out;
    bool with_paths = false;

    int run() const {
        const mpslam::Scene scene = mpslam::sample_scene(scenario.to_config(), seed);
        json doc = mpslam::scene_to_json(scene);
        if (with_paths) {
            doc["paths"] = mpslam::multipath_to_json(
                mpslam::exact_observations(scene, scenario.eps_geom))["paths"];
        }
        Output output(out);
        output.stream() << doc.dump(2) << "\n";
        return 0;
    }
};

struct LocateCmd {
    std::string input;
    std::string phi0 = "known";
    std::string grouping = "d1";
    std::string init = "brute";
    int n_q = 64;
    SolverOpts solver;
    double eps_sing = 1e-6;
    double eps_los = 0.3;
    std::string out;

    int run() const {
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot open input file: " + input);
        json doc;
        in >> doc;

        std::optional<mpslam::Scene> truth;
        if (doc.contains("rx")) truth = mpslam::scene_from_json(doc);
        const mpslam::MultipathSet obs = mpslam::observations_from_json(doc);

        mpslam::LocateOptions opts;
        opts.eps_sing = eps_sing;
        opts.eps_los = eps_los;

        double phi_used = 0.0;
        std::optional<mpslam::OrientationDiagnostics> diag;
        if (phi0 == "known") {
            if (!truth) {
                throw std::runtime_error(
                    "--phi0 known needs a scene input that embeds the orientation");
            }
            phi_used = truth->orientation;
        } else if (phi0 == "estimate") {
            const mpslam::GroupingStrategy strategy = (grouping == "3p")
                                                          ? mpslam::GroupingStrategy::three_path()
                                                          : mpslam::GroupingStrategy::drop_one();
            mpslam::OrientationSolverConfig cfg = solver.to_config();
            if (init == "sensor") {
                if (!truth) {
                    throw std::runtime_error(
                        "--init sensor needs a scene input to read the sensor from");
                }
                cfg.init = mpslam::OrientationInit::sensor(
                    mpslam::quantize_orientation(truth->orientation, n_q), n_q);
            }
            auto [phi, d] = mpslam::estimate_orientation(obs, strategy, cfg, opts);
            phi_used = phi;
            diag = d;
        } else {
            try {
                std::size_t pos = 0;
                phi_used = std::stod(phi0, &pos);
                if (pos != phi0.size()) throw std::invalid_argument(phi0);
            } catch (const std::exception&) {
                throw std::runtime_error("--phi0 must be known, estimate, or a number (radians)");
            }
        }

        const mpslam::LocationEstimate est = mpslam::solve_location(obs, phi_used, opts);
        json result = mpslam::estimate_to_json(est);
        result["phi0_used"] = phi_used;
        if (diag) {
            result["orientation_cost"] = diag->final_cost;
            result["refine_iterations"] = diag->refine_iterations;
        }
        if (truth) {
            result["position_error_m"] = (est.rx_position - truth->rx_position).norm();
            result["clock_error_s"] = std::abs(est.clock_offset - truth->clock_offset);
            result["orientation_error_rad"] =
                mpslam::circular_distance(phi_used, truth->orientation);
            json refl_err = json::array();
            for (std::size_t i = 0; i < est.reflectors.size(); ++i) {
                const auto idx = static_cast<std::size_t>(est.used_paths[i]);
                refl_err.push_back((est.reflectors[i] - truth->reflectors[idx]).norm());
            }
            result["reflector_errors_m"] = refl_err;
        }
        Output output(out);
        output.stream() << result.dump(2) << "\n";
        return 0;
    }
};

struct SimulateCmd {
    std::uint64_t seed = 0;
    int n_sim = 1000;
    ScenarioOpts scenario;
    CorruptionOpts corruption;
    SolverOpts solver;
    std::vector<std::string> estimators = {"known_phi", "sensor_q64", "robust_d1_brute",
                                           "robust_d1_sensor64", "random_guess"};
    int threads = 0;
    std::string out;
    std::string config_path;
    CLI::App* sub = nullptr;

    void merge_config() {
        if (config_path.empty()) return;
        const json cfg = load_config(config_path);
        ConfigMerger m(cfg, *sub);
        m.take("seed", "--seed", seed);
        m.take("n_sim", "--n-sim", n_sim);
        m.take("side", "--side", scenario.side);
        m.take("n_paths", "--n-paths", scenario.n_paths);
        m.take("clock_span", "--clock-span", scenario.clock_span);
        m.take("eps_geom", "--eps-geom", scenario.eps_geom);
        m.take("corruption", "--corruption", corruption.corruption);
        m.take("k", "--k", corruption.k);
        m.take("daoa_mode", "--daoa-mode", corruption.daoa_mode);
        m.take("t_cp", "--t-cp", corruption.t_cp);
        m.take("grid_points", "--grid-points", solver.grid_points);
        m.take("refine_tol", "--refine-tol", solver.refine_tol);
        m.take("max_refine_iters", "--max-refine-iters", solver.max_refine_iters);
        m.take("estimators", "--estimators", estimators);
        m.take("threads", "--threads", threads);
        m.take("out", "--out", out);
        m.finish();
    }

    mpslam::ExperimentConfig experiment() const {
        mpslam::ExperimentConfig cfg;
        cfg.n_sim = n_sim;
        cfg.scenario = scenario.to_config();
        cfg.corruption = corruption.to_spec();
        cfg.estimators = parse_estimators(estimators, solver);
        cfg.master_seed = seed;
        cfg.threads = threads;
        return cfg;
    }

    int run() {
        merge_config();
        const mpslam::ExperimentConfig cfg = experiment();
        const mpslam::TrialTable table = mpslam::run_trials(cfg);

        Output output(out);
        std::ostream& os = output.stream();
        os << "trial,estimator,status,position_error_m,clock_error_s,orientation_error_rad,"
              "reflector_errors_m\n";
        for (int t = 0; t < cfg.n_sim; ++t) {
            for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
                const mpslam::TrialRecord& r = table[e][static_cast<std::size_t>(t)];
                std::string row = std::to_string(t);
                row += ',' + cfg.estimators[e].name();
                row += ',' + r.status;
                if (r.ok()) {
                    row += ',' + format_double(r.position_error);
                    row += ',' + format_double(r.clock_error);
                    row += ',' + format_double(r.orientation_error);
                    row += ',' + join_errors(r.mapping_errors);
                } else {
                    row += ",,,,";
                }
                row += '\n';
                os << row;
            }
        }
        return 0;
    }
};

struct SweepCmd {
    std::uint64_t seed = 0;
    int n_sim = 1000;
    ScenarioOpts scenario;
    SolverOpts solver;
    std::vector<int> k_phi_list = {64, 128, 256, 512, 1024};
    std::vector<double> probs = {80.0};
    std::string daoa_mode = "uniform";
    std::vector<std::string> estimators = {"known_phi", "sensor_q64", "robust_d1_brute",
                                           "robust_d1_sensor64", "random_guess"};
    int threads = 0;
    std::string out;
    std::string config_path;
    CLI::App* sub = nullptr;

    void merge_config() {
        if (config_path.empty()) return;
        const json cfg = load_config(config_path);
        ConfigMerger m(cfg, *sub);
        m.take("seed", "--seed", seed);
        m.take("n_sim", "--n-sim", n_sim);
        m.take("side", "--side", scenario.side);
        m.take("n_paths", "--n-paths", scenario.n_paths);
        m.take("clock_span", "--clock-span", scenario.clock_span);
        m.take("eps_geom", "--eps-geom", scenario.eps_geom);
        m.take("k_phi_list", "--k-phi-list", k_phi_list);
        m.take("probs", "--probs", probs);
        m.take("daoa_mode", "--daoa-mode", daoa_mode);
        m.take("grid_points", "--grid-points", solver.grid_points);
        m.take("refine_tol", "--refine-tol", solver.refine_tol);
        m.take("max_refine_iters", "--max-refine-iters", solver.max_refine_iters);
        m.take("estimators", "--estimators", estimators);
        m.take("threads", "--threads", threads);
        m.take("out", "--out", out);
        m.finish();
    }

    int run() {
        merge_config();
        mpslam::ExperimentConfig cfg;
        cfg.n_sim = n_sim;
        cfg.scenario = scenario.to_config();
        cfg.corruption.mode = mpslam::CorruptionSpec::Mode::QuantizeDaoa;
        cfg.corruption.daoa_mode = (daoa_mode == "uniform")
                                       ? mpslam::CorruptionSpec::DaoaMode::Uniform
                                       : mpslam::CorruptionSpec::DaoaMode::SinGrid;
        cfg.estimators = parse_estimators(estimators, solver);
        cfg.master_seed = seed;
        cfg.threads = threads;

        const std::vector<mpslam::SweepRow> rows = mpslam::sweep(cfg, k_phi_list, probs);
        Output output(out);
        std::ostream& os = output.stream();
        os << "k_phi,estimator,metric,prob_pct,value,approx_crlb\n";
        for (const mpslam::SweepRow& r : rows) {
            std::string row = std::to_string(r.k_phi);
            row += ',' + r.estimator;
            row += ',' + r.metric;
            row += ',' + format_double(r.prob);
            row += ',' + format_double(r.value);
            row += ',' + format_double(r.approx_bound);
            row += '\n';
            os << row;
        }
        return 0;
    }
};

struct CrlbCmd {
    std::uint64_t seed = 0;
    int n_scenes = 500;
    ScenarioOpts scenario;
    std::vector<int> k_phi_list = {256};
    std::vector<double> probs = {80.0};
    std::string out;
    std::string config_path;
    CLI::App* sub = nullptr;

    void merge_config() {
        if (config_path.empty()) return;
        const json cfg = load_config(config_path);
        ConfigMerger m(cfg, *sub);
        m.take("seed", "--seed", seed);
        m.take("n_scenes", "--n-scenes", n_scenes);
        m.take("side", "--side", scenario.side);
        m.take("n_paths", "--n-paths", scenario.n_paths);
        m.take("clock_span", "--clock-span", scenario.clock_span);
        m.take("eps_geom", "--eps-geom", scenario.eps_geom);
        m.take("k_phi_list", "--k-phi-list", k_phi_list);
        m.take("probs", "--probs", probs);
        m.take("out", "--out", out);
        m.finish();
    }

    int run() {
        merge_config();
        if (n_scenes < 1) throw std::runtime_error("--n-scenes must be >= 1");
        const mpslam::ScenarioConfig scen = scenario.to_config();

        Output output(out);
        std::ostream& os = output.stream();
        os << "k_phi,kind,id,value_m\n";
        for (int k_phi : k_phi_list) {
            std::vector<double> bounds;
            bounds.reserve(static_cast<std::size_t>(n_scenes));
            for (int t = 0; t < n_scenes; ++t) {
                const mpslam::Scene scene =
                    mpslam::sample_scene(scen, mpslam::derive_seed(seed, static_cast<std::uint64_t>(t)));
                double bound = 0.0;
                try {
                    bound = mpslam::approx_crlb(scene, k_phi);
                } catch (const mpslam::degenerate_configuration_error&) {
                    continue;  // no bound for a collinear draw; omit the row
                }
                bounds.push_back(bound);
                std::string row = std::to_string(k_phi);
                row += ",scene," + std::to_string(t);
                row += ',' + format_double(bound);
                row += '\n';
                os << row;
            }
            std::sort(bounds.begin(), bounds.end());
            for (double p : probs) {
                if (!(p > 0.0) || p > 100.0) {
                    throw std::runtime_error("--probs values must lie in (0, 100]");
                }
                if (bounds.empty()) continue;
                auto rank = static_cast<std::size_t>(
                    std::ceil(p / 100.0 * static_cast<double>(bounds.size())));
                rank = std::max<std::size_t>(rank, 1);
                std::string row = std::to_string(k_phi);
                row += ",pct," + format_double(p);
                row += ',' + format_double(bounds[rank - 1]);
                row += '\n';
                os << row;
            }
        }
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Clock- and orientation-robust single-anchor multipath localization toolkit"};
    app.require_subcommand(1);

    SceneCmd scene_cmd;
    {
        CLI::App* sub = app.add_subcommand("scene", "Emit a random scene as JSON");
        sub->add_option("--seed", scene_cmd.seed, "RNG seed (integer)");
        scene_cmd.scenario.add_flags(sub);
        sub->add_flag("--with-paths", scene_cmd.with_paths,
                      "embed the exact (tdoa, aod, daoa) path list");
        sub->add_option("--out", scene_cmd.out, "output path (default: stdout)");
    }

    LocateCmd locate_cmd;
    {
        CLI::App* sub = app.add_subcommand(
            "locate", "Single-shot localization from a scene or path-list JSON file");
        sub->add_option("--input", locate_cmd.input, "input JSON file (scene or paths)")
            ->required();
        sub->add_option("--phi0", locate_cmd.phi0,
                        "orientation: known | estimate | <radians>");
        sub->add_option("--grouping", locate_cmd.grouping,
                        "consensus grouping for --phi0 estimate: 3p | d1")
            ->check(CLI::IsMember({"3p", "d1"}));
        sub->add_option("--init", locate_cmd.init,
                        "refinement start for --phi0 estimate: brute | sensor")
            ->check(CLI::IsMember({"brute", "sensor"}));
        sub->add_option("--n-q", locate_cmd.n_q, "orientation sensor levels (count)");
        locate_cmd.solver.add_flags(sub);
        sub->add_option("--eps-sing", locate_cmd.eps_sing,
                        "singular-path threshold on |sin(aod - aoa)| (unitless)");
        sub->add_option("--eps-los", locate_cmd.eps_los,
                        "line-of-sight test slack (meters)");
        sub->add_option("--out", locate_cmd.out, "output path (default: stdout)");
    }

    SimulateCmd simulate_cmd;
    {
        CLI::App* sub = app.add_subcommand(
            "simulate", "Monte Carlo trials; one CSV row per (trial, estimator)");
        sub->add_option("--seed", simulate_cmd.seed, "master RNG seed (integer)");
        sub->add_option("--n-sim", simulate_cmd.n_sim, "number of trials (count)");
        simulate_cmd.scenario.add_flags(sub);
        simulate_cmd.corruption.add_flags(sub);
        simulate_cmd.solver.add_flags(sub);
        sub->add_option("--estimators", simulate_cmd.estimators,
                        "comma list: known_phi | sensor_q<N> | robust_{3p|d1}_{brute|sensor<N>}"
                        " | random_guess")
            ->delimiter(',');
        sub->add_option("--threads", simulate_cmd.threads,
                        "worker threads; 0 = all cores (count)");
        sub->add_option("--out", simulate_cmd.out, "output CSV path (default: stdout)");
        sub->add_option("--config", simulate_cmd.config_path,
                        "JSON config file; explicit flags win");
        simulate_cmd.sub = sub;
    }

    SweepCmd sweep_cmd;
    {
        CLI::App* sub = app.add_subcommand(
            "sweep", "Percentile-vs-dictionary-size sweep under DAoA quantization");
        sub->add_option("--seed", sweep_cmd.seed, "master RNG seed (integer)");
        sub->add_option("--n-sim", sweep_cmd.n_sim, "number of trials per grid size (count)");
        sweep_cmd.scenario.add_flags(sub);
        sub->add_option("--k-phi-list", sweep_cmd.k_phi_list,
                        "comma list of arrival-angle grid sizes (counts)")
            ->delimiter(',');
        sub->add_option("--probs", sweep_cmd.probs,
                        "comma list of percentile probabilities (percent)")
            ->delimiter(',');
        sub->add_option("--daoa-mode", sweep_cmd.daoa_mode,
                        "arrival-angle quantizer: uniform (step pi/k) | sin-grid")
            ->check(CLI::IsMember({"uniform", "sin-grid"}));
        sweep_cmd.solver.add_flags(sub);
        sub->add_option("--estimators", sweep_cmd.estimators,
                        "comma list: known_phi | sensor_q<N> | robust_{3p|d1}_{brute|sensor<N>}"
                        " | random_guess")
            ->delimiter(',');
        sub->add_option("--threads", sweep_cmd.threads,
                        "worker threads; 0 = all cores (count)");
        sub->add_option("--out", sweep_cmd.out, "output CSV path (default: stdout)");
        sub->add_option("--config", sweep_cmd.config_path,
                        "JSON config file; explicit flags win");
        sweep_cmd.sub = sub;
    }

    CrlbCmd crlb_cmd;
    {
        CLI::App* sub = app.add_subcommand(
            "crlb", "Approximate position bounds over a scene ensemble");
        sub->add_option("--seed", crlb_cmd.seed, "master RNG seed (integer)");
        sub->add_option("--n-scenes", crlb_cmd.n_scenes, "ensemble size (count)");
        crlb_cmd.scenario.add_flags(sub);
        sub->add_option("--k-phi-list", crlb_cmd.k_phi_list,
                        "comma list of arrival-angle grid sizes (counts)")
            ->delimiter(',');
        sub->add_option("--probs", crlb_cmd.probs,
                        "comma list of percentile probabilities (percent)")
            ->delimiter(',');
        sub->add_option("--out", crlb_cmd.out, "output CSV path (default: stdout)");
        sub->add_option("--config", crlb_cmd.config_path,
                        "JSON config file; explicit flags win");
        crlb_cmd.sub = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand("scene")) return scene_cmd.run();
        if (app.got_subcommand("locate")) return locate_cmd.run();
        if (app.got_subcommand("simulate")) return simulate_cmd.run();
        if (app.got_subcommand("sweep")) return sweep_cmd.run();
        if (app.got_subcommand("crlb")) return crlb_cmd.run();
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
