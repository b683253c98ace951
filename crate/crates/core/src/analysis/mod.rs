//! Scalar metrics, Ramsey fringes, robustness scans and parameter sweeps.

mod fringe;
mod metrics;
mod ramsey;
mod robustness;
mod sweep;

pub use fringe::{fit_fringe, FringeFit};
pub use metrics::{avg_intermediate_population, infidelity, DEFAULT_POPULATION_WINDOW};
pub use ramsey::{ramsey_maps, ramsey_signal, RamseyConfig, RamseyFringe, RamseyMaps, REFERENCE_PHASE};
pub use robustness::{
    coupling_angle, detuning_window, infidelity_curve, optimize_reference, pi_half_target, DetuningWindow,
    WindowOptions,
};
pub use sweep::{
    linear_fit, pearson, pi_pulse_infidelity_map, power_law_fit, ridge_minima, spearman, sweep, Axis, Grid2,
    InfidelityMap, Knob, Metric, PowerLaw, RidgePoint,
};
