use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fringe::{fit_fringe, wrap_phase, FringeFit};
use super::sweep::{Axis, Grid2};
use crate::algebra::{Level, Operator3, StateVector};
use crate::dynamics::{free_evolution, propagator, PropagationOptions, SystemParams};
use crate::error::{Error, Result};
use crate::par_map;
use crate::pulses::{PulseSpec, Scheme};

/// Fitted phase of ideal `pi/2` pulses: the signal is `-cos(delta tau)`.
pub const REFERENCE_PHASE: f64 = PI;

const MIN_PERIODS: f64 = 2.0;
const MIN_SAMPLES_PER_PERIOD: f64 = 32.0;

/// Double-quantum Ramsey sequence: pulse, free evolution for `tau`, the same
/// pulse again. Fringes are scanned through `delta` at fixed `tau`, so the
/// abscissa is the accumulated phase `delta tau`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyConfig {
    pub pulse: PulseSpec,
    /// Single-photon detuning during pulses and free evolution.
    pub detuning: f64,
    pub tau: f64,
    /// Values of `delta tau`.
    pub phase_scan: Vec<f64>,
}

impl RamseyConfig {
    pub const DEFAULT_TAU: f64 = 10.0;

    /// Two periods at 32 samples each.
    pub fn default_scan() -> Vec<f64> {
        let n = 64;
        (0..n).map(|k| 4.0 * PI * k as f64 / n as f64).collect()
    }

    pub fn new(pulse: PulseSpec, detuning: f64) -> Self {
        RamseyConfig { pulse, detuning, tau: Self::DEFAULT_TAU, phase_scan: Self::default_scan() }
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        if !(self.detuning.is_finite() && self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::validation("detuning must be finite and tau non-negative"));
        }
        let n = self.phase_scan.len();
        if n < 2 {
            return Err(Error::validation("phase scan needs at least two points"));
        }
        let lo = self.phase_scan.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.phase_scan.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let periods = (hi - lo) * n as f64 / ((n - 1) as f64 * 2.0 * PI);
        if periods < MIN_PERIODS * (1.0 - 1e-9) {
            return Err(Error::validation(format!("phase scan covers {periods:.3} periods, need {MIN_PERIODS}")));
        }
        if (n as f64) < MIN_SAMPLES_PER_PERIOD * periods * (1.0 - 1e-9) {
            return Err(Error::validation(format!("phase scan has {n} samples over {periods:.3} periods, need 32 per period")));
        }
        Ok(())
    }
}

/// Synthesized fringe: `(delta tau, P_+1 - P_-1)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyFringe {
    pub samples: Vec<(f64, f64)>,
}

impl RamseyFringe {
    pub fn fit(&self) -> Result<FringeFit> {
        fit_fringe(&self.samples)
    }

    /// Fitted phase relative to ideal pulses, in `(-pi, pi]`.
    pub fn relative_phase(fit: &FringeFit) -> f64 {
        wrap_phase(fit.phase_shift - REFERENCE_PHASE)
    }

    /// Fringe with offset removed and amplitude scaled to one.
    pub fn normalized(&self, fit: &FringeFit) -> Vec<(f64, f64)> {
        self.samples.iter().map(|&(t, y)| (t, fit.normalize(y))).collect()
    }
}

/// Propagator of one Ramsey pulse. The pulse runs at `delta = 0`; the scanned
/// two-photon detuning enters only through the free evolution.
fn pulse_unitary(pulse: &PulseSpec, detuning: f64, opts: &PropagationOptions) -> Result<Operator3> {
    let p = SystemParams::new(detuning, 0.0, *pulse)?;
    let (t0, t1) = p.window();
    propagator(&p, t0, t1, opts)
}

/// Runs the sequence for every point of the scan and returns the population
/// difference `P_+1 - P_-1`.
pub fn ramsey_signal(cfg: &RamseyConfig, opts: &PropagationOptions) -> Result<RamseyFringe> {
    cfg.validate()?;
    let u = pulse_unitary(&cfg.pulse, cfg.detuning, opts)?;
    let first = u.apply(&StateVector::basis(Level::Plus));
    let samples = cfg
        .phase_scan
        .iter()
        .map(|&theta| {
            let two_photon = if cfg.tau > 0.0 { theta / cfg.tau } else { 0.0 };
            let psi = u.apply(&free_evolution(cfg.tau, cfg.detuning, two_photon).apply(&first));
            (theta, psi.population(Level::Plus) - psi.population(Level::Minus))
        })
        .collect();
    Ok(RamseyFringe { samples })
}

/// Contrast and relative phase over areas (rows) x single-photon detunings
/// (columns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyMaps {
    pub scheme: Scheme,
    pub contrast: Grid2,
    /// Phase relative to ideal pulses; NaN where the fringe is degenerate.
    pub phase_shift: Grid2,
}

/// Fringes for every `(S, Delta)` with pulses built from `template` (its
/// area is replaced).
pub fn ramsey_maps(
    template: &PulseSpec,
    areas: &[f64],
    detunings: &[f64],
    tau: f64,
    phase_scan: &[f64],
    opts: &PropagationOptions,
) -> Result<RamseyMaps> {
    if areas.is_empty() || detunings.is_empty() {
        return Err(Error::validation("Ramsey map grid has zero size"));
    }
    let points: Vec<(f64, f64)> = areas.iter().flat_map(|&s| detunings.iter().map(move |&d| (s, d))).collect();
    let cells = par_map(&points, |&(s, d)| {
        let cfg = RamseyConfig { pulse: template.with_area(s), detuning: d, tau, phase_scan: phase_scan.to_vec() };
        match ramsey_signal(&cfg, opts)?.fit() {
            Ok(fit) => Ok((fit.contrast, RamseyFringe::relative_phase(&fit))),
            Err(Error::DegenerateFringe(c)) => Ok((c, f64::NAN)),
            Err(e) => Err(e),
        }
    });
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = Axis { name: "area_pi".into(), values: areas.iter().map(|s| s / PI).collect() };
    let cols = Axis { name: "detuning_tp".into(), values: detunings.iter().map(|d| d / (2.0 * PI)).collect() };
    Ok(RamseyMaps {
        scheme: template.scheme,
        contrast: Grid2::new(rows.clone(), cols.clone(), cells.iter().map(|c| c.0).collect())?,
        phase_shift: Grid2::new(rows, cols, cells.iter().map(|c| c.1).collect())?,
    })
}
