use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use super::metrics::infidelity;
use crate::algebra::{Level, StateVector, C64};
use crate::dynamics::{final_state, PropagationOptions, SystemParams};
use crate::error::{Error, Result};
use crate::optimize::{brent_minimize, Minimum};
use crate::par_map;
use crate::pulses::{omega_for_effective_area, PulseSpec, Scheme};

/// Equal superposition reached by a `pi/2` pulse from `|+1>`. The DE coupling
/// `H_t` is imaginary and gives `(|+1> + |-1>)/sqrt2`; the real AE coupling
/// gives `(|+1> + i sgn(Delta) |-1>)/sqrt2`.
pub fn pi_half_target(scheme: Scheme, detuning: f64) -> StateVector {
    let h = C64::from(FRAC_1_SQRT_2);
    let minus = match scheme {
        Scheme::Ae => C64::new(0.0, if detuning < 0.0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 }),
        _ => h,
    };
    StateVector::new([h, C64::from(0.0), minus]).expect("unit norm")
}

/// Rotation angle `atan2(|c_-1|, |c_+1|)` of the two-photon transition.
pub fn coupling_angle(psi: &StateVector) -> f64 {
    psi.amplitude(Level::Minus).norm().atan2(psi.amplitude(Level::Plus).norm())
}

/// Parameters at relative detuning `rel` around `reference`: for DE the
/// reference is `w_e` and `Delta = rel`; for AE it is the operating detuning
/// and `Delta = reference + rel`.
fn params_at(scheme: Scheme, area: f64, reference: f64, rel: f64) -> Result<SystemParams> {
    match scheme {
        Scheme::De => SystemParams::new(rel, 0.0, PulseSpec::de(area, reference)),
        Scheme::Ae => SystemParams::new(reference + rel, 0.0, PulseSpec::ae(area)),
        Scheme::FourPulseTrain => Err(Error::UnsupportedScheme(scheme.name())),
    }
}

fn pi_half_infidelity(scheme: Scheme, area: f64, reference: f64, rel: f64, opts: &PropagationOptions) -> Result<f64> {
    let p = params_at(scheme, area, reference, rel)?;
    let (t0, t1) = p.window();
    let psi = final_state(&p, &StateVector::basis(Level::Plus), t0, t1, opts)?;
    Ok(infidelity(&psi, &pi_half_target(scheme, reference)))
}

/// Operating point minimizing the `pi/2` infidelity at zero relative
/// detuning: `w_e` for DE, `Delta` for AE. The search is bracketed within 20%
/// of the effective-area estimate.
pub fn optimize_reference(scheme: Scheme, area: f64, opts: &PropagationOptions) -> Result<Minimum> {
    if scheme == Scheme::FourPulseTrain {
        return Err(Error::UnsupportedScheme(scheme.name()));
    }
    let guess = omega_for_effective_area(area, PI / 2.0, 1.0)?;
    let mut failure = None;
    let m = brent_minimize(
        |x| match pi_half_infidelity(scheme, area, x, 0.0, opts) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        0.8 * guess,
        1.2 * guess,
        1e-10,
        200,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// `pi/2` infidelity versus relative detuning around `reference`.
pub fn infidelity_curve(
    scheme: Scheme,
    area: f64,
    reference: f64,
    relative: &[f64],
    opts: &PropagationOptions,
) -> Result<Vec<f64>> {
    par_map(relative, |&rel| pi_half_infidelity(scheme, area, reference, rel, opts)).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowOptions {
    pub threshold: f64,
    /// Largest relative detuning scanned on each side.
    pub max_relative: f64,
    /// Relative accuracy of the width.
    pub width_tol: f64,
    /// Operating point; found with [`optimize_reference`] when `None`.
    pub reference: Option<f64>,
    pub propagation: PropagationOptions,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions {
            threshold: 1e-4,
            max_relative: 40.0,
            width_tol: 1e-3,
            reference: None,
            propagation: PropagationOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningWindow {
    pub scheme: Scheme,
    pub area: f64,
    pub reference: f64,
    pub infidelity_at_reference: f64,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    /// An edge reached `max_relative` without crossing the threshold.
    pub clipped: bool,
}

/// Width of the contiguous interval of relative single-photon detuning
/// around zero where the `pi/2` infidelity stays below the threshold.
///
/// Each edge is bracketed by a geometric outward scan and then bisected
/// until the width is known to `width_tol` relative accuracy.
pub fn detuning_window(scheme: Scheme, area: f64, opts: &WindowOptions) -> Result<DetuningWindow> {
    if !(opts.threshold > 0.0 && opts.max_relative > 0.0 && opts.width_tol > 0.0) {
        return Err(Error::validation("threshold, range and tolerance must be positive"));
    }
    let reference = match opts.reference {
        Some(r) => r,
        None => optimize_reference(scheme, area, &opts.propagation)?.x,
    };
    let popts = &opts.propagation;
    let eval = |rel: f64| pi_half_infidelity(scheme, area, reference, rel, popts);
    let at_zero = eval(0.0)?;
    if at_zero >= opts.threshold {
        return Err(Error::NoWindow { infidelity: at_zero, threshold: opts.threshold });
    }
    let first_step = 1e-3 * reference.abs().max(1.0);
    let bracket = |sign: f64| -> Result<(f64, f64, bool)> {
        let mut inside = 0.0;
        let mut step = first_step;
        loop {
            let x = (inside + step).min(opts.max_relative);
            if eval(sign * x)? >= opts.threshold {
                return Ok((inside, x, false));
            }
            if x >= opts.max_relative {
                return Ok((x, x, true));
            }
            inside = x;
            step *= 1.25;
        }
    };
    let (mut in_hi, mut out_hi, clip_hi) = bracket(1.0)?;
    let (mut in_lo, mut out_lo, clip_lo) = bracket(-1.0)?;
    // half the tolerance per edge, measured against the guaranteed width
    loop {
        let width = in_hi + in_lo;
        let tol = 0.5 * opts.width_tol * width.max(f64::MIN_POSITIVE);
        let hi_open = out_hi - in_hi > tol;
        let lo_open = out_lo - in_lo > tol;
        if !hi_open && !lo_open {
            break;
        }
        if hi_open {
            let mid = 0.5 * (in_hi + out_hi);
            if eval(mid)? < opts.threshold {
                in_hi = mid;
            } else {
                out_hi = mid;
            }
        }
        if lo_open {
            let mid = 0.5 * (in_lo + out_lo);
            if eval(-mid)? < opts.threshold {
                in_lo = mid;
            } else {
                out_lo = mid;
            }
        }
        if out_hi - in_hi < 1e-14 && out_lo - in_lo < 1e-14 {
            break;
        }
    }
    Ok(DetuningWindow {
        scheme,
        area,
        reference,
        infidelity_at_reference: at_zero,
        lo: -in_lo,
        hi: in_hi,
        width: in_hi + in_lo,
        clipped: clip_hi || clip_lo,
    })
}
