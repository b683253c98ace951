//! Three-level Lambda dynamics: the RWA Hamiltonian, numerical propagation,
//! Magnus effective Hamiltonians and the adiabatic analytical solution.

mod analytic;
mod magnus;
mod propagate;

pub use analytic::{
    adiabatic_phase, analytic_propagator, analytic_state, end_of_pulse_state, rabi_angle,
};
pub use magnus::{magnus_h1, magnus_h2, magnus_numeric, magnus_term};
pub use propagate::{
    final_state, propagate, propagator, PropagationOptions, Stepper, Trajectory,
};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::algebra::{Operator3, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::pulses::PulseSpec;

/// Detunings plus drive: everything needed to evaluate the Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Single-photon detuning `Delta`.
    pub detuning: f64,
    /// Two-photon detuning `delta`.
    pub two_photon_detuning: f64,
    pub pulse: PulseSpec,
}

impl SystemParams {
    pub fn resonant(pulse: PulseSpec) -> Self {
        SystemParams { detuning: 0.0, two_photon_detuning: 0.0, pulse }
    }

    pub fn new(detuning: f64, two_photon_detuning: f64, pulse: PulseSpec) -> Result<Self> {
        let p = SystemParams { detuning, two_photon_detuning, pulse };
        p.validate()?;
        Ok(p)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_pulse(mut self, pulse: PulseSpec) -> Self {
        self.pulse = pulse;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.detuning.is_finite() && self.two_photon_detuning.is_finite()) {
            return Err(Error::validation("detunings must be finite"));
        }
        self.pulse.validate()
    }

    /// `[-T_c, T_c]`.
    pub fn window(&self) -> (f64, f64) {
        (-self.pulse.window, self.pulse.window)
    }

    pub(crate) fn matrix_at(&self, t: f64) -> Matrix3<C64> {
        let (op, os) = self.pulse.fields(t);
        let p = C64::from(0.5 * op);
        let s = C64::from(0.5 * os);
        Matrix3::new(
            ZERO, p, ZERO,
            p, C64::from(self.detuning), s,
            ZERO, s, C64::from(-self.two_photon_detuning),
        )
    }

    /// Largest angular frequency in the problem; sets the default step.
    pub(crate) fn fastest_frequency(&self) -> f64 {
        let mut f = self.detuning.abs().max(self.two_photon_detuning.abs());
        f = f.max(self.pulse.peak_rabi() * self.pulse.amp_p.abs().max(self.pulse.amp_s.abs()));
        if self.pulse.scheme == crate::pulses::Scheme::De {
            f = f.max(self.pulse.omega_e);
        }
        f
    }
}

/// `H(t) = 1/2 [[0, Op, 0], [Op, 2 Delta, Os], [0, Os, -2 delta]]`.
pub fn hamiltonian_at(t: f64, p: &SystemParams) -> Operator3 {
    Operator3::from_matrix(p.matrix_at(t))
}

/// `|+1><+1| + e^{i delta tau}|-1><-1| + e^{-i Delta tau}|0><0|`.
pub fn free_evolution(tau: f64, detuning: f64, two_photon_detuning: f64) -> Operator3 {
    Operator3::diagonal([
        ONE,
        C64::from_polar(1.0, -detuning * tau),
        C64::from_polar(1.0, two_photon_detuning * tau),
    ])
}

/// `sqrt(4 w_e^2 + Omega^2) - 2 w_e`, evaluated without cancellation.
pub fn exact_effective_rabi(rabi: f64, omega_e: f64) -> f64 {
    let two_w = 2.0 * omega_e;
    rabi * rabi / ((two_w * two_w + rabi * rabi).sqrt() + two_w)
}

/// `int (sqrt(4 w_e^2 + Omega^2) - 2 w_e) dt` over the window: the
/// effective area beyond the quadratic rule, which it reproduces when
/// `w_e >> Omega_0`.
pub fn exact_effective_area(pulse: &PulseSpec) -> f64 {
    let w = pulse.omega_e;
    crate::quad::adaptive_simpson(|t| exact_effective_rabi(pulse.envelope(t), w), -pulse.window, pulse.window, 1e-12, 8)
}

/// `Omega_e(t) = sqrt(4 w_e^2 + Omega(t)^2)`.
pub(crate) fn dressed_splitting(rabi: f64, omega_e: f64) -> f64 {
    (4.0 * omega_e * omega_e + rabi * rabi).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Level, StateVector};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn hamiltonian_outside_window_is_diagonal() {
        let p = SystemParams::resonant(PulseSpec::de(10.0 * PI, 30.0));
        let h = hamiltonian_at(4.5, &p);
        assert!(h.norm() <= 1e-6 * p.pulse.peak_rabi());
        // just inside the window the envelope has decayed below 1e-6 too
        assert!(hamiltonian_at(3.99, &p).norm() <= 1e-6 * p.pulse.peak_rabi());
    }

    #[test]
    fn hamiltonian_diagonal_without_fields() {
        let p = SystemParams { detuning: 1.0, two_photon_detuning: 0.5, pulse: PulseSpec::de(0.0, 10.0) };
        let h = hamiltonian_at(0.3, &p);
        let expected = Operator3::diagonal([ZERO, C64::from(1.0), C64::from(-0.5)]);
        assert_abs_diff_eq!((h - expected).norm(), 0.0);
    }

    #[test]
    fn hamiltonian_layout() {
        let p = SystemParams { detuning: 0.7, two_photon_detuning: -0.2, pulse: PulseSpec::de(3.0, 5.0) };
        let t = 0.4;
        let (op, os) = crate::pulses::rabi_pair(t, &p.pulse).unwrap();
        let h = hamiltonian_at(t, &p);
        assert_abs_diff_eq!(h.entry(Level::Plus, Level::Zero).re, op / 2.0);
        assert_abs_diff_eq!(h.entry(Level::Zero, Level::Minus).re, os / 2.0);
        assert_abs_diff_eq!(h.entry(Level::Plus, Level::Minus).norm(), 0.0);
    }

    #[test]
    fn free_evolution_phases() {
        assert_abs_diff_eq!((free_evolution(0.0, 3.0, 2.0) - Operator3::identity()).norm(), 0.0);
        let tau = 1.7;
        let u = free_evolution(tau, 0.0, PI / tau);
        assert_abs_diff_eq!(u.entry(Level::Minus, Level::Minus).re, -1.0, epsilon = 1e-15);
        let u = free_evolution(tau, PI / 2.0 / tau, 0.0);
        let z = u.entry(Level::Zero, Level::Zero);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, -1.0, epsilon = 1e-15);
        let psi = StateVector::basis(Level::Plus);
        assert_eq!(u.apply(&psi), psi);
    }

    #[test]
    fn exact_effective_rabi_limits() {
        assert_eq!(exact_effective_rabi(0.0, 3.0), 0.0);
        let w = 2.0;
        assert_abs_diff_eq!(exact_effective_rabi(2.0 * w, w), 2.0 * w * (2f64.sqrt() - 1.0), epsilon = 1e-14);
        let rabi = 0.37;
        let w = 100.0 * rabi;
        let magnus = rabi * rabi / (4.0 * w);
        assert!((exact_effective_rabi(rabi, w) / magnus - 1.0).abs() < 1e-4);
        // direct formula agrees away from cancellation
        let direct = (4.0 * 1.5f64.powi(2) + 2.0f64.powi(2)).sqrt() - 3.0;
        assert_abs_diff_eq!(exact_effective_rabi(2.0, 1.5), direct, epsilon = 1e-14);
    }

    #[test]
    fn exact_effective_area_approaches_rule() {
        let s = 4.0 * PI;
        let w = 400.0;
        let rule = crate::pulses::effective_area(s, w, 1.0).unwrap();
        assert!((exact_effective_area(&PulseSpec::de(s, w)) / rule - 1.0).abs() < 1e-3);
        // strong drive: the square root saturates below the quadratic rule
        assert!(exact_effective_area(&PulseSpec::de(10.0 * PI, 10.0)) < crate::pulses::effective_area(10.0 * PI, 10.0, 1.0).unwrap());
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(t in -5.0f64..5.0, d in -50.0f64..50.0, dd in -5.0f64..5.0,
                                    s in 0.0f64..40.0, w in 0.1f64..80.0, phi in -3.0f64..3.0) {
            let p = SystemParams { detuning: d, two_photon_detuning: dd, pulse: PulseSpec::de(s, w).with_phase(phi) };
            prop_assert!(hamiltonian_at(t, &p).is_hermitian(1e-12));
        }

        #[test]
        fn exact_effective_rabi_monotone(a in 0.0f64..50.0, b in 0.0f64..50.0, w in 0.01f64..50.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(exact_effective_rabi(lo, w) <= exact_effective_rabi(hi, w));
        }
    }
}
