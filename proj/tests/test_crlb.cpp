#include "mpslam/crlb.hpp"
#include "mpslam/errors.hpp"
#include "mpslam/geometry.hpp"
#include "mpslam/rng.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

using namespace mpslam;

namespace {

// Stacks the per-path measurements (aod, daoa, tdoa) of the exact forward
// model, the quantity the transform matrix differentiates.
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

// Central finite differences of the measurement stack; angle rows are
// differenced on the circle.
Eigen::MatrixXd fd_transform(const Scene& s, double h) {
    const int np = s.n_paths();
    const int dim = 4 + 2 * np;
    Eigen::MatrixXd t(3 * np, dim);
    for (int j = 0; j < dim; ++j) {
        const Eigen::VectorXd plus = measurement_stack(perturbed(s, j, h));
        const Eigen::VectorXd minus = measurement_stack(perturbed(s, j, -h));
        for (int i = 0; i < np; ++i) {
            t(3 * i + 0, j) = wrap_angle(plus(3 * i + 0) - minus(3 * i + 0)) / (2.0 * h);
            t(3 * i + 1, j) = wrap_angle(plus(3 * i + 1) - minus(3 * i + 1)) / (2.0 * h);
            t(3 * i + 2, j) = (plus(3 * i + 2) - minus(3 * i + 2)) / (2.0 * h);
        }
    }
    return t;
}

// Largest per-row relative deviation between the analytic and the
// finite-difference Jacobian.
double max_row_relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
        const double scale = analytic.row(r).cwiseAbs().maxCoeff();
        const double err = (analytic.row(r) - fd.row(r)).cwiseAbs().maxCoeff();
        worst = std::max(worst, err / scale);
    }
    return worst;
}

Scene five_path_scene(std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.n_paths = 5;
    return sample_scene(cfg, seed);
}

}  // namespace

TEST_CASE("transform matrix on the worked example") {
    Scene s;
    s.rx_position = Eigen::Vector2d(10.0, 0.0);
    s.reflectors = {Eigen::Vector2d(5.0, 5.0)};

    const TransformMatrix t = transform_matrix(s);
    REQUIRE(t.n_paths() == 1);
    REQUIRE(t.t.rows() == 3);
    REQUIRE(t.t.cols() == 6);

    // Arrival-angle sensitivity to the receiver position.
    CHECK(t.t(TransformMatrix::daoa_row(0), TransformMatrix::kColRxX) ==
          doctest::Approx(0.1).epsilon(1e-12));
    CHECK(t.t(TransformMatrix::daoa_row(0), TransformMatrix::kColRxY) ==
          doctest::Approx(0.1).epsilon(1e-12));

    // The departure angle never depends on the receiver state.
    CHECK(t.t(TransformMatrix::aod_row(0), TransformMatrix::kColRxX) == 0.0);
    CHECK(t.t(TransformMatrix::aod_row(0), TransformMatrix::kColRxY) == 0.0);
    CHECK(t.t(TransformMatrix::aod_row(0), TransformMatrix::kColClock) == 0.0);
    CHECK(t.t(TransformMatrix::aod_row(0), TransformMatrix::kColOrientation) == 0.0);

    // Clock and orientation enter their own rows with unit weight.
    CHECK(t.t(TransformMatrix::tdoa_row(0), TransformMatrix::kColClock) == -1.0);
    CHECK(t.t(TransformMatrix::daoa_row(0), TransformMatrix::kColOrientation) == -1.0);
    CHECK(t.t(TransformMatrix::tdoa_row(0), TransformMatrix::kColOrientation) == 0.0);
    CHECK(t.t(TransformMatrix::aod_row(0), TransformMatrix::reflector_col(0)) ==
          doctest::Approx(-5.0 / 50.0));
    CHECK(t.t(TransformMatrix::aod_row(0), TransformMatrix::reflector_col(0) + 1) ==
          doctest::Approx(5.0 / 50.0));
}

TEST_CASE("transform matrix agrees with central finite differences") {
    ScenarioConfig cfg;
    for (int rep = 0; rep < 25; ++rep) {
        const Scene s = sample_scene(cfg, derive_seed(2468, rep));
        const TransformMatrix t = transform_matrix(s);
        const Eigen::MatrixXd fd = fd_transform(s, 1e-6);
        CHECK(max_row_relative_error(t.t, fd) < 1e-6);
    }
}

TEST_CASE("transform matrix rejects degenerate reflectors") {
    Scene s;
    s.rx_position = Eigen::Vector2d(10.0, 0.0);
    s.reflectors = {Eigen::Vector2d(0.0, 0.0)};
    CHECK_THROWS_AS(transform_matrix(s), degenerate_geometry_error);
    s.reflectors = {s.rx_position};
    CHECK_THROWS_AS(transform_matrix(s), degenerate_geometry_error);
    s.reflectors.clear();
    CHECK_THROWS_AS(transform_matrix(s), std::invalid_argument);
}

TEST_CASE("location-domain information matrix") {
    const Scene s = five_path_scene(86420);
    const TransformMatrix t = transform_matrix(s);
    const int dim = 4 + 2 * s.n_paths();

    SUBCASE("identity measurement information gives T^T T") {
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3 * s.n_paths(), 3 * s.n_paths());
        const LocationBound b = location_fim(eye, t);
        CHECK((b.fim - t.t.transpose() * t.t).cwiseAbs().maxCoeff() <
              1e-9 * b.fim.cwiseAbs().maxCoeff());
        // Delay rows respond in seconds while the clock column is unit weight,
        // so unweighted information is numerically singular: near-null modes
        // (e.g. scaling the whole scene about the transmitter) answer ~1e16x
        // weaker than the clock direction. The bound must degrade to a
        // pseudo-inverse with an honest rank report instead of inverting.
        CHECK_FALSE(b.full_rank);
        CHECK(b.rank < dim);
        CHECK(b.rank + static_cast<int>(b.null_space.cols()) == dim);
        // Reported null directions are orthonormal and carry almost no
        // measurement response compared to the dominant rows.
        CHECK((b.null_space.transpose() * b.null_space -
               Eigen::MatrixXd::Identity(b.null_space.cols(), b.null_space.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
        const double response = (b.fim * b.null_space).cwiseAbs().maxCoeff();
        CHECK(response < 1e-12 * b.fim.cwiseAbs().maxCoeff());
        // Moore-Penrose identities hold even in the singular case.
        const double scale = b.fim.cwiseAbs().maxCoeff();
        CHECK((b.fim * b.covariance * b.fim - b.fim).cwiseAbs().maxCoeff() < 1e-8 * scale);
        CHECK((b.covariance * b.fim * b.covariance - b.covariance).cwiseAbs().maxCoeff() <
              1e-8 * b.covariance.cwiseAbs().maxCoeff());
    }

    SUBCASE("unit-balanced information is invertible") {
        // Express the clock in path-length meters (column 3 scaled by 1/c)
        // and weight delay rows by c^2 so every measurement is meter/radian
        // scaled; then the 14-parameter problem is numerically full rank.
        TransformMatrix bal = t;
        bal.t.col(TransformMatrix::kColClock) /= kSpeedOfLight;
        Eigen::MatrixXd j_m =
            Eigen::MatrixXd::Identity(3 * s.n_paths(), 3 * s.n_paths());
        for (int i = 0; i < s.n_paths(); ++i) {
            j_m(TransformMatrix::tdoa_row(i), TransformMatrix::tdoa_row(i)) =
                kSpeedOfLight * kSpeedOfLight;
        }
        const LocationBound b = location_fim(j_m, bal);
        CHECK(b.full_rank);
        CHECK(b.rank == dim);
        CHECK(b.null_space.cols() == 0);
        CHECK((b.fim * b.covariance - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
              1e-6);
    }

    SUBCASE("scaling the information scales the bound inversely") {
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3 * s.n_paths(), 3 * s.n_paths());
        const LocationBound b1 = location_fim(eye, t);
        const LocationBound b4 = location_fim(4.0 * eye, t);
        CHECK((b4.covariance - 0.25 * b1.covariance).cwiseAbs().maxCoeff() <
              1e-9 * b1.covariance.cwiseAbs().maxCoeff());
        CHECK(b4.user_block().trace() ==
              doctest::Approx(0.25 * b1.user_block().trace()).epsilon(1e-9));
    }

    SUBCASE("covariance is symmetric positive semidefinite") {
        Eigen::MatrixXd j_m = Eigen::MatrixXd::Identity(3 * s.n_paths(), 3 * s.n_paths());
        // A generic positive-diagonal weighting keeps the test nontrivial.
        for (int i = 0; i < 3 * s.n_paths(); ++i) j_m(i, i) = 1.0 + 0.1 * i;
        const LocationBound b = location_fim(j_m, t);
        CHECK((b.covariance - b.covariance.transpose()).cwiseAbs().maxCoeff() <
              1e-9 * b.covariance.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.covariance);
        CHECK(es.eigenvalues().minCoeff() > -1e-9 * es.eigenvalues().maxCoeff());
    }

    SUBCASE("an extra path never hurts the receiver-position bound") {
        Scene bigger = s;
        bigger.reflectors.push_back(Eigen::Vector2d(72.0, 31.0));
        const TransformMatrix t6 = transform_matrix(bigger);
        // Compare on the unit-balanced problem where both bounds invert; the
        // raw-unit pseudo-inverse truncates ranks and breaks Loewner order.
        const auto balanced = [](const TransformMatrix& tm) {
            TransformMatrix bal = tm;
            bal.t.col(TransformMatrix::kColClock) /= kSpeedOfLight;
            Eigen::MatrixXd j_m = Eigen::MatrixXd::Identity(tm.t.rows(), tm.t.rows());
            for (int i = 0; i < tm.n_paths(); ++i) {
                j_m(TransformMatrix::tdoa_row(i), TransformMatrix::tdoa_row(i)) =
                    kSpeedOfLight * kSpeedOfLight;
            }
            return location_fim(j_m, bal);
        };
        const LocationBound b5 = balanced(t);
        const LocationBound b6 = balanced(t6);
        REQUIRE(b5.full_rank);
        REQUIRE(b6.full_rank);
        CHECK(b6.user_block().trace() <= b5.user_block().trace() * (1.0 + 1e-9));
        // Information-side monotonicity: the shared 14 parameters gain a PSD
        // contribution from the extra path's rows.
        const Eigen::MatrixXd gain =
            b6.fim.topLeftCorner(dim, dim) - b5.fim;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gain);
        CHECK(es.eigenvalues().minCoeff() > -1e-9 * b5.fim.cwiseAbs().maxCoeff());
    }

    SUBCASE("rejects malformed measurement information") {
        CHECK_THROWS_AS(location_fim(Eigen::MatrixXd::Identity(4, 5), t), std::invalid_argument);
        CHECK_THROWS_AS(location_fim(Eigen::MatrixXd::Identity(7, 7), t), std::invalid_argument);
        Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3 * s.n_paths(), 3 * s.n_paths());
        asym(0, 1) = 0.5;  // no matching (1, 0) entry
        CHECK_THROWS_AS(location_fim(asym, t), std::invalid_argument);
    }
}

TEST_CASE("unobservable directions are reported instead of a bound") {
    // Three paths: 9 measurement rows cannot pin down 10 unknowns.
    ScenarioConfig cfg;
    cfg.n_paths = 3;
    const Scene s = sample_scene(cfg, 999);
    const TransformMatrix t = transform_matrix(s);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(9, 9);

    const LocationBound b = location_fim(eye, t);
    CHECK_FALSE(b.full_rank);
    CHECK(b.rank < 10);
    REQUIRE(b.null_space.cols() == 10 - b.rank);
    // Null-space columns really are information-free directions.
    CHECK((b.fim * b.null_space).cwiseAbs().maxCoeff() < 1e-6 * b.fim.cwiseAbs().maxCoeff());
    // The pseudo-inverse stays finite and symmetric.
    CHECK(b.covariance.allFinite());
}

TEST_CASE("closed-form position bound under arrival-angle quantization") {
    const Scene s = five_path_scene(11223);

    SUBCASE("halving the grid step halves the bound exactly") {
        for (int k : {64, 128, 256, 512}) {
            const double coarse = approx_crlb(s, k);
            const double fine = approx_crlb(s, 2 * k);
            CHECK(std::abs(coarse / fine - 2.0) < 1e-12);
            CHECK(coarse > 0.0);
        }
    }

    SUBCASE("matches the direct formula") {
        Eigen::MatrixXd t_o(s.n_paths(), 2);
        for (int i = 0; i < s.n_paths(); ++i) {
            const Eigen::Vector2d u = s.reflectors[static_cast<std::size_t>(i)] - s.rx_position;
            t_o(i, 0) = u.y() / u.squaredNorm();
            t_o(i, 1) = -u.x() / u.squaredNorm();
        }
        const double step = kPi / 256.0;
        const double expect =
            std::sqrt(step * step / 12.0 * (t_o.transpose() * t_o).inverse().trace());
        CHECK(approx_crlb(s, 256) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("collinear arrival directions are rejected") {
        Scene bad;
        bad.rx_position = Eigen::Vector2d(50.0, 50.0);
        bad.reflectors = {Eigen::Vector2d(55.0, 55.0), Eigen::Vector2d(60.0, 60.0),
                          Eigen::Vector2d(65.0, 65.0), Eigen::Vector2d(40.0, 40.0)};
        CHECK_THROWS_AS(approx_crlb(bad, 256), degenerate_configuration_error);
    }

    SUBCASE("grid size is validated") {
        CHECK_THROWS_AS(approx_crlb(s, 0), std::invalid_argument);
    }
}
