#pragma once

#include <stdexcept>

namespace mpslam {

// Reflector coincides with (or sits within the guard distance of) a terminal;
// the path geometry is undefined.
struct degenerate_geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Path whose direction is seen identically from transmitter and receiver;
// its linear-system coefficients diverge.
struct singular_path_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fewer than three usable paths after filtering.
struct insufficient_paths_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The linear system (or a derivative block) is numerically rank deficient.
struct degenerate_configuration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No feasible orientation candidate exists for the given observations.
struct orientation_unrecoverable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A combiner covariance block cannot be factorized.
struct rank_deficiency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A statistics request over zero successful trials.
struct empty_result_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mpslam
