//! Closed-form adiabatic solution of the resonant DE problem.
//!
//! The integral of the dressed splitting starts at the window edge, where the
//! envelope has vanished, and the `2 w_e t` part is written out explicitly, so
//! the phase `Lambda(t)` carries the same trigonometric reference as the
//! fields themselves.

use super::{dressed_splitting, exact_effective_rabi, SystemParams};
use crate::algebra::{Operator3, StateVector, C64};
use crate::error::{Error, Result};
use crate::pulses::Scheme;
use crate::quad::adaptive_simpson;

const PHASE_TOL: f64 = 1e-10;

fn require_resonant_de(p: &SystemParams) -> Result<()> {
    if p.pulse.scheme != Scheme::De {
        return Err(Error::UnsupportedScheme(p.pulse.scheme.name()));
    }
    if p.detuning != 0.0 || p.two_photon_detuning != 0.0 {
        return Err(Error::validation("the analytic solution needs Delta = delta = 0"));
    }
    if p.pulse.phi != 0.0 || p.pulse.amp_p != p.pulse.amp_s {
        return Err(Error::validation("the analytic solution needs phi = 0 and equal amplitudes"));
    }
    p.validate()
}

fn rabi(p: &SystemParams, t: f64) -> f64 {
    p.pulse.amp_p.abs() * p.pulse.envelope(t)
}

fn excess_integral(p: &SystemParams, t: f64) -> f64 {
    let lo = -p.pulse.window;
    let hi = t.clamp(lo, p.pulse.window);
    if hi <= lo {
        return 0.0;
    }
    let w = p.pulse.omega_e;
    adaptive_simpson(|s| exact_effective_rabi(rabi(p, s), w), lo, hi, PHASE_TOL, 8)
}

/// `Lambda(t) = 2 w_e t + int_{-T_c}^t (Omega_e - 2 w_e) dt'`.
pub fn adiabatic_phase(t: f64, p: &SystemParams) -> Result<f64> {
    require_resonant_de(p)?;
    Ok(2.0 * p.pulse.omega_e * t + excess_integral(p, t))
}

/// Accumulated effective Rabi angle `Lambda/2 - w_e t`, half the integral of
/// the exact effective Rabi frequency.
pub fn rabi_angle(t: f64, p: &SystemParams) -> Result<f64> {
    require_resonant_de(p)?;
    Ok(0.5 * excess_integral(p, t))
}

fn propagator_entries(t: f64, p: &SystemParams) -> [[C64; 3]; 3] {
    let w = p.pulse.omega_e;
    let om = rabi(p, t);
    let split = dressed_splitting(om, w);
    let a = 2.0 * w / split;
    let b = om / split;
    let half = 0.5 * (2.0 * w * t + excess_integral(p, t));
    let (s, c) = half.sin_cos();
    let (sn, cs) = (w * t).sin_cos();
    let r = C64::from;
    let i = |x: f64| C64::new(0.0, x);
    [
        [r(a * c * cs + s * sn), i(b * cs), r(c * sn - a * s * cs)],
        [i(b * c), r(a), i(-b * s)],
        [r(s * cs - a * c * sn), i(-b * sn), r(a * s * sn + c * cs)],
    ]
}

/// Adiabatic propagator from the window start to `t`.
pub fn analytic_propagator(t: f64, p: &SystemParams) -> Result<Operator3> {
    require_resonant_de(p)?;
    Ok(Operator3::from_rows(propagator_entries(t, p)))
}

/// State at `t` starting from `|+1>`: the first column of
/// [`analytic_propagator`].
pub fn analytic_state(t: f64, p: &SystemParams) -> Result<StateVector> {
    require_resonant_de(p)?;
    let m = propagator_entries(t, p);
    Ok(StateVector::from_vector_unchecked(nalgebra::Vector3::new(m[0][0], m[1][0], m[2][0])))
}

/// State once the envelope has vanished: `cos(theta)|+1> + sin(theta)|-1>`
/// with `theta` the final Rabi angle.
pub fn end_of_pulse_state(p: &SystemParams) -> Result<StateVector> {
    let theta = rabi_angle(p.pulse.window, p)?;
    Ok(StateVector::from_vector_unchecked(nalgebra::Vector3::new(
        C64::from(theta.cos()),
        C64::from(0.0),
        C64::from(theta.sin()),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Level, ONE, ZERO};
    use crate::dynamics::{propagate, PropagationOptions};
    use crate::pulses::PulseSpec;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix3;
    use std::f64::consts::{PI, SQRT_2};

    fn fast() -> SystemParams {
        SystemParams::resonant(PulseSpec::de(10.0 * PI, 2.0 * PI * 10.0))
    }

    /// `R(t) U(t) E(Lambda - 2 w s) U(0)^-1 R(s)^-1` built from the frame
    /// transformations, with the reference time `s` where the field vanishes.
    fn product_form(t: f64, s: f64, rabi: f64, lambda: f64, w: f64) -> Matrix3<C64> {
        let rot = |t: f64| {
            let (sn, c) = (w * t).sin_cos();
            Matrix3::new(
                C64::from(c), ZERO, C64::from(sn),
                ZERO, ONE, ZERO,
                C64::from(-sn), ZERO, C64::from(c),
            )
        };
        let u = |om: f64| {
            let oe = (4.0 * w * w + om * om).sqrt();
            let x = C64::new(0.0, -SQRT_2 * w / oe);
            let y = C64::from(om / (SQRT_2 * oe));
            Matrix3::new(
                x, C64::new(0.0, om / oe), x,
                y, C64::from(2.0 * w / oe), y,
                C64::from(-1.0 / SQRT_2), ZERO, C64::from(1.0 / SQRT_2),
            )
        };
        let lam = lambda - 2.0 * w * s;
        let e = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C64::from_polar(1.0, 0.5 * lam),
            ONE,
            C64::from_polar(1.0, -0.5 * lam),
        ));
        rot(t) * u(rabi) * e * u(0.0).try_inverse().unwrap() * rot(s).try_inverse().unwrap()
    }

    #[test]
    fn matches_product_of_frame_transformations() {
        let p = fast();
        let w = p.pulse.omega_e;
        for &t in &[-1.3, -0.2, 0.0, 0.45, 2.2] {
            let got = analytic_propagator(t, &p).unwrap();
            let lambda = adiabatic_phase(t, &p).unwrap();
            let oracle = product_form(t, -p.pulse.window, p.pulse.envelope(t), lambda, w);
            assert!((got.matrix() - oracle).norm() < 1e-6, "t = {t}: {}", (got.matrix() - oracle).norm());
        }
    }

    #[test]
    fn no_field_is_identity() {
        let p = SystemParams::resonant(PulseSpec::de(0.0, 7.0));
        for &t in &[-3.0, -0.5, 0.0, 1.1, 3.9] {
            let u = analytic_propagator(t, &p).unwrap();
            assert!((u - Operator3::identity()).norm() < 1e-14);
            let psi = analytic_state(t, &p).unwrap();
            assert_abs_diff_eq!(psi.population(Level::Plus), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn first_column_is_state() {
        let p = fast();
        for &t in &[-2.0, 0.1, 1.7] {
            let u = analytic_propagator(t, &p).unwrap();
            let psi = analytic_state(t, &p).unwrap();
            for (k, l) in Level::ALL.iter().enumerate() {
                assert!((u.column(Level::Plus)[k] - psi.amplitude(*l)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unitary_at_many_times() {
        let p = fast();
        for k in 0..50 {
            let t = -4.0 + 8.0 * k as f64 / 49.0;
            assert!(analytic_propagator(t, &p).unwrap().is_unitary(1e-10));
        }
    }

    #[test]
    fn end_of_pulse_form() {
        let p = fast();
        let t = p.pulse.window;
        let psi = analytic_state(t, &p).unwrap();
        let end = end_of_pulse_state(&p).unwrap();
        assert!(psi.population(Level::Zero) < 1e-12);
        for l in Level::ALL {
            assert_abs_diff_eq!(psi.population(l), end.population(l), epsilon = 1e-10);
        }
    }

    #[test]
    fn agrees_with_propagator() {
        let p = fast();
        let (t0, t1) = p.window();
        let psi0 = StateVector::basis(Level::Plus);
        let traj = propagate(&p, &psi0, t0, t1, &PropagationOptions::default().with_samples(80)).unwrap();
        for (t, num) in traj.times().iter().zip(traj.states()) {
            let ana = analytic_state(*t, &p).unwrap();
            for l in Level::ALL {
                assert!((ana.population(l) - num.population(l)).abs() < 1e-2, "t = {t}");
            }
        }
    }

    #[test]
    fn rejects_detuning_and_other_schemes() {
        let p = fast().with_detuning(1.0);
        assert!(analytic_state(0.0, &p).is_err());
        let ae = SystemParams::resonant(PulseSpec::ae(PI));
        assert!(matches!(analytic_propagator(0.0, &ae), Err(Error::UnsupportedScheme(_))));
    }
}
