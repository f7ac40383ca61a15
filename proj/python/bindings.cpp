#include "mpslam/crlb.hpp"
#include "mpslam/dictionary.hpp"
#include "mpslam/geometry.hpp"
#include "mpslam/localization.hpp"
#include "mpslam/montecarlo.hpp"
#include "mpslam/orientation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;

namespace {

mpslam::GroupingStrategy grouping_from_name(const std::string& name) {
    if (name == "d1") return mpslam::GroupingStrategy::drop_one();
    if (name == "3p") return mpslam::GroupingStrategy::three_path();
    throw std::invalid_argument("grouping must be \"d1\" or \"3p\"");
}

mpslam::MultipathSet multipath_from_rows(const std::vector<std::array<double, 3>>& rows) {
    mpslam::MultipathSet obs;
    obs.paths.reserve(rows.size());
    for (const auto& r : rows) obs.paths.push_back({r[0], r[1], r[2]});
    return obs;
}

}  // namespace

PYBIND11_MODULE(_mpslam, m) {
    m.doc() = "Single-anchor multipath localization: forward model, clock-robust "
              "solver, orientation recovery, and error bounds";

    m.attr("SPEED_OF_LIGHT") = mpslam::kSpeedOfLight;

    m.def("wrap_angle", &mpslam::wrap_angle, py::arg("x"),
          "Wrap an angle in radians to (-pi, pi]");
    m.def("circular_distance", &mpslam::circular_distance, py::arg("a"), py::arg("b"),
          "Absolute angular distance in [0, pi]");

    py::class_<mpslam::Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("rx_position", &mpslam::Scene::rx_position)
        .def_readwrite("orientation", &mpslam::Scene::orientation)
        .def_readwrite("clock_offset", &mpslam::Scene::clock_offset)
        .def_readwrite("reflectors", &mpslam::Scene::reflectors)
        .def("n_paths", &mpslam::Scene::n_paths);

    py::class_<mpslam::PathObservation>(m, "PathObservation")
        .def(py::init([](double tdoa, double aod, double daoa) {
                 return mpslam::PathObservation{tdoa, aod, daoa};
             }),
             py::arg("tdoa"), py::arg("aod"), py::arg("daoa"))
        .def_readwrite("tdoa", &mpslam::PathObservation::tdoa)
        .def_readwrite("aod", &mpslam::PathObservation::aod)
        .def_readwrite("daoa", &mpslam::PathObservation::daoa);

    py::class_<mpslam::MultipathSet>(m, "MultipathSet")
        .def(py::init<>())
        .def(py::init(&multipath_from_rows), py::arg("rows"),
             "Build from [(tdoa, aod, daoa), ...]")
        .def_readwrite("paths", &mpslam::MultipathSet::paths)
        .def("size", &mpslam::MultipathSet::size);

    py::class_<mpslam::ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("side", &mpslam::ScenarioConfig::side)
        .def_readwrite("n_paths", &mpslam::ScenarioConfig::n_paths)
        .def_readwrite("clock_offset_span", &mpslam::ScenarioConfig::clock_offset_span)
        .def_readwrite("eps_geom", &mpslam::ScenarioConfig::eps_geom);

    m.def(
        "sample_scene",
        [](std::uint64_t seed, const mpslam::ScenarioConfig& cfg) {
            return mpslam::sample_scene(cfg, seed);
        },
        py::arg("seed"), py::arg("config") = mpslam::ScenarioConfig{},
        "Draw a random scene (receiver, orientation, clock, reflectors)");

    m.def("exact_observations", &mpslam::exact_observations, py::arg("scene"),
          py::arg("eps_geom") = 1.0, "Exact (tdoa, aod, daoa) triplets of every path");

    py::class_<mpslam::LocationEstimate>(m, "LocationEstimate")
        .def_readonly("rx_position", &mpslam::LocationEstimate::rx_position)
        .def_readonly("l_e", &mpslam::LocationEstimate::l_e)
        .def_readonly("clock_offset", &mpslam::LocationEstimate::clock_offset)
        .def_readonly("reflectors", &mpslam::LocationEstimate::reflectors)
        .def_readonly("los", &mpslam::LocationEstimate::los)
        .def_readonly("residual_norm", &mpslam::LocationEstimate::residual_norm)
        .def_readonly("used_paths", &mpslam::LocationEstimate::used_paths);

    m.def(
        "solve_location",
        [](const mpslam::MultipathSet& obs, double phi0) {
            return mpslam::solve_location(obs, phi0);
        },
        py::arg("obs"), py::arg("phi0"),
        "Clock-robust least-squares localization at a given orientation");

    py::class_<mpslam::RobustEstimate>(m, "RobustEstimate")
        .def_readonly("location", &mpslam::RobustEstimate::location)
        .def_readonly("phi_o", &mpslam::RobustEstimate::phi_o);

    m.def(
        "robust_locate",
        [](const mpslam::MultipathSet& obs, const std::string& grouping,
           const std::string& init, double sensor_value, int n_q, int grid_points,
           double refine_tol, int max_refine_iters) {
            mpslam::OrientationSolverConfig cfg;
            cfg.grid_points = grid_points;
            cfg.refine_tolerance = refine_tol;
            cfg.max_refine_iters = max_refine_iters;
            if (init == "sensor") {
                cfg.init = mpslam::OrientationInit::sensor(sensor_value, n_q);
            } else if (init != "brute") {
                throw std::invalid_argument("init must be \"brute\" or \"sensor\"");
            }
            return mpslam::robust_locate(obs, grouping_from_name(grouping), cfg);
        },
        py::arg("obs"), py::arg("grouping") = "d1", py::arg("init") = "brute",
        py::arg("sensor_value") = 0.0, py::arg("n_q") = 64, py::arg("grid_points") = 100,
        py::arg("refine_tol") = 1e-9, py::arg("max_refine_iters") = 25,
        "Joint orientation recovery and localization");

    m.def("quantize_uniform_angle", &mpslam::quantize_uniform_angle, py::arg("x"),
          py::arg("k"), "Snap to the circular grid of step pi/k");
    m.def("quantize_orientation", &mpslam::quantize_orientation, py::arg("phi"),
          py::arg("n_q"), "Snap to the n_q-level orientation sensor grid");
    m.def("quantize_to_delay_grid", &mpslam::quantize_to_delay_grid, py::arg("tdoa"),
          py::arg("k_tau"), py::arg("t_cp"), "Snap to the delay dictionary grid");
    m.def("quantize_to_angle_grid", &mpslam::quantize_to_angle_grid, py::arg("x"),
          py::arg("k"), "Snap to the sin-spaced angle dictionary grid");

    m.def(
        "transform_matrix",
        [](const mpslam::Scene& scene) { return mpslam::transform_matrix(scene).t; },
        py::arg("scene"),
        "Jacobian of stacked (aod, daoa, tdoa) rows w.r.t. "
        "(rx_x, rx_y, clock, orientation, refl_1x, refl_1y, ...)");

    m.def("approx_crlb", &mpslam::approx_crlb, py::arg("scene"), py::arg("k_phi"),
          "RMS receiver-position bound under DAoA quantization at grid size k_phi");
}
