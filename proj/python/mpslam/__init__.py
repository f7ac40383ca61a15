"""Single-anchor multipath localization: scenes, forward model, clock-robust
solver, orientation recovery, quantizers, and position error bounds."""

from ._mpslam import (
    SPEED_OF_LIGHT,
    LocationEstimate,
    MultipathSet,
    PathObservation,
    RobustEstimate,
    ScenarioConfig,
    Scene,
    approx_crlb,
    circular_distance,
    exact_observations,
    quantize_orientation,
    quantize_to_angle_grid,
    quantize_to_delay_grid,
    quantize_uniform_angle,
    robust_locate,
    sample_scene,
    solve_location,
    transform_matrix,
    wrap_angle,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "LocationEstimate",
    "MultipathSet",
    "PathObservation",
    "RobustEstimate",
    "ScenarioConfig",
    "Scene",
    "approx_crlb",
    "circular_distance",
    "exact_observations",
    "quantize_orientation",
    "quantize_to_angle_grid",
    "quantize_to_delay_grid",
    "quantize_uniform_angle",
    "robust_locate",
    "sample_scene",
    "solve_location",
    "transform_matrix",
    "wrap_angle",
]
