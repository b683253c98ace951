use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::SystemParams;
use crate::algebra::{exp_step, Operator3, StateVector, C64};
use crate::error::{Error, Result};

/// Exponential one-step scheme. Both are unitary by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    /// `exp(-i H(t + h/2) h)`, second order.
    Midpoint,
    /// Two-point Gauss-Legendre Magnus step with the commutator correction,
    /// fourth order.
    Magnus4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub stepper: Stepper,
    /// Initial step bound; `None` picks one from the fastest frequency.
    pub dt_max: Option<f64>,
    /// Accept once doubling the step count moves the result by less than
    /// this (vector 2-norm for states, Frobenius norm for propagators).
    pub tolerance: f64,
    pub max_refinements: usize,
    /// Number of recorded intervals; the trajectory has `samples + 1` points.
    pub samples: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            stepper: Stepper::Magnus4,
            dt_max: None,
            tolerance: 1e-9,
            max_refinements: 14,
            samples: 1,
        }
    }
}

impl PropagationOptions {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_stepper(mut self, stepper: Stepper) -> Self {
        self.stepper = stepper;
        self
    }

    fn initial_dt(&self, p: &SystemParams) -> f64 {
        if let Some(dt) = self.dt_max {
            return dt;
        }
        let f = p.fastest_frequency();
        let period = if f > 0.0 { 2.0 * PI / f } else { f64::INFINITY };
        match self.stepper {
            Stepper::Midpoint => (0.02 * period).min(0.01),
            Stepper::Magnus4 => (0.05 * period).min(0.02),
        }
    }
}

/// Sampled solution of one propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    /// Steps used by the accepted refinement level.
    pub steps: usize,
    /// Change in the final state between the last two refinement levels.
    pub refinement_difference: f64,
}

impl Trajectory {
    #[cfg(test)]
    pub(crate) fn from_parts(times: Vec<f64>, states: Vec<StateVector>) -> Self {
        Trajectory { times, states, steps: 0, refinement_difference: 0.0 }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn populations(&self) -> Vec<[f64; 3]> {
        self.states.iter().map(StateVector::populations).collect()
    }

    pub fn final_state(&self) -> StateVector {
        *self.states.last().expect("trajectory has at least one sample")
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `t,re_c1,im_c1,re_c0,im_c0,re_cm1,im_cm1,p1,p0,pm1`, times in units of
    /// `t_p`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,re_c1,im_c1,re_c0,im_c0,re_cm1,im_cm1,p1,p0,pm1")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let [a, b, c] = s.amplitudes();
            let [p1, p0, pm1] = s.populations();
            writeln!(
                w,
                "{t:?},{:?},{:?},{:?},{:?},{:?},{:?},{p1:?},{p0:?},{pm1:?}",
                a.re, a.im, b.re, b.im, c.re, c.im
            )?;
        }
        Ok(())
    }
}

fn step_generator(p: &SystemParams, stepper: Stepper, t: f64, h: f64) -> Matrix3<C64> {
    match stepper {
        Stepper::Midpoint => p.matrix_at(t + 0.5 * h),
        Stepper::Magnus4 => {
            const C: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6
            const K: f64 = 0.144_337_567_297_406_4; // sqrt(3)/12
            let h1 = p.matrix_at(t + (0.5 - C) * h);
            let h2 = p.matrix_at(t + (0.5 + C) * h);
            let comm = h2 * h1 - h1 * h2;
            (h1 + h2) * C64::from(0.5) - comm * C64::new(0.0, K * h)
        }
    }
}

/// Runs `n` equal steps from `t0` to `t1`, calling `visit` on every step
/// matrix in order.
fn march<F: FnMut(usize, &Matrix3<C64>)>(p: &SystemParams, stepper: Stepper, t0: f64, t1: f64, n: usize, mut visit: F) {
    let h = (t1 - t0) / n as f64;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let g = step_generator(p, stepper, t, h);
        visit(k, &exp_step(&g, h));
    }
}

fn check_span(t0: f64, t1: f64) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::validation(format!("propagation span [{t0}, {t1}] is empty or invalid")));
    }
    Ok(())
}

/// Doubles the step count from an initial guess until two consecutive levels
/// agree. `run(n)` returns the result at `n` steps and `distance` compares two
/// results.
fn refine<T, R, D>(opts: &PropagationOptions, initial_steps: usize, mut run: R, distance: D) -> Result<(T, usize, f64)>
where
    R: FnMut(usize) -> T,
    D: Fn(&T, &T) -> f64,
{
    if !(opts.tolerance > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let mut n = initial_steps.max(1);
    let mut previous = run(n);
    let mut diff = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        n *= 2;
        let current = run(n);
        diff = distance(&previous, &current);
        if diff < opts.tolerance {
            return Ok((current, n, diff));
        }
        previous = current;
    }
    Err(Error::Convergence { refinements: opts.max_refinements, difference: diff, tolerance: opts.tolerance })
}

fn steps_for(opts: &PropagationOptions, p: &SystemParams, t0: f64, t1: f64, multiple: usize) -> usize {
    let dt = opts.initial_dt(p);
    let per = ((t1 - t0) / (dt * multiple as f64)).ceil().max(1.0) as usize;
    per * multiple
}

/// Integrates the Schrodinger equation from `psi0` at `t0` to `t1` and
/// samples the state at `opts.samples + 1` equally spaced times.
pub fn propagate(
    p: &SystemParams,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    check_span(t0, t1)?;
    let samples = opts.samples.max(1);
    let initial = steps_for(opts, p, t0, t1, samples);
    let run = |n: usize| {
        let stride = n / samples;
        let mut psi: Vector3<C64> = *psi0.as_vector();
        let mut states = Vec::with_capacity(samples + 1);
        states.push(*psi0);
        march(p, opts.stepper, t0, t1, n, |k, u| {
            psi = u * psi;
            if (k + 1) % stride == 0 {
                states.push(StateVector::from_vector_unchecked(psi));
            }
        });
        states
    };
    let (states, steps, diff) = refine(opts, initial, run, |a: &Vec<StateVector>, b: &Vec<StateVector>| {
        a.last().unwrap().distance(b.last().unwrap())
    })?;
    let times = (0..=samples).map(|k| t0 + (t1 - t0) * k as f64 / samples as f64).collect();
    Ok(Trajectory { times, states, steps, refinement_difference: diff })
}

/// Final state only; cheaper than [`propagate`] when no samples are needed.
pub fn final_state(
    p: &SystemParams,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    opts: &PropagationOptions,
) -> Result<StateVector> {
    let opts = PropagationOptions { samples: 1, ..opts.clone() };
    propagate(p, psi0, t0, t1, &opts).map(|t| t.final_state())
}

/// Full propagator `U(t1, t0)`.
pub fn propagator(p: &SystemParams, t0: f64, t1: f64, opts: &PropagationOptions) -> Result<Operator3> {
    check_span(t0, t1)?;
    let initial = steps_for(opts, p, t0, t1, 1);
    let run = |n: usize| {
        let mut u: Matrix3<C64> = Matrix3::identity();
        march(p, opts.stepper, t0, t1, n, |_, step| u = step * u);
        u
    };
    let (u, _, _) = refine(opts, initial, run, |a: &Matrix3<C64>, b: &Matrix3<C64>| (a - b).norm())?;
    Ok(Operator3::from_matrix(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Level, ONE, ZERO};
    use crate::pulses::PulseSpec;
    use approx::assert_abs_diff_eq;

    fn ground_plus() -> StateVector {
        StateVector::basis(Level::Plus)
    }

    fn pi_transfer() -> SystemParams {
        SystemParams::resonant(PulseSpec::de_with_effective_area(10.0 * PI, PI).unwrap())
    }

    #[test]
    fn no_drive_is_trivial() {
        let p = SystemParams::resonant(PulseSpec::de(0.0, 5.0));
        let psi0 = ground_plus();
        let traj = propagate(&p, &psi0, -4.0, 4.0, &PropagationOptions::default()).unwrap();
        assert_abs_diff_eq!(traj.final_state().distance(&psi0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_photon_detuning_phase() {
        let (dd, tau) = (0.8, 2.5);
        let p = SystemParams { detuning: 0.0, two_photon_detuning: dd, pulse: PulseSpec::de(0.0, 5.0) };
        let psi0 = StateVector::normalized([ONE, ZERO, ONE]).unwrap();
        let out = final_state(&p, &psi0, 0.0, tau, &PropagationOptions::default()).unwrap();
        let rel = out.amplitude(Level::Minus) / out.amplitude(Level::Plus);
        let expected = C64::from_polar(1.0, dd * tau);
        assert_abs_diff_eq!((rel - expected).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn complete_transfer() {
        let p = pi_transfer();
        let traj = propagate(&p, &ground_plus(), -4.0, 4.0, &PropagationOptions::default().with_samples(200)).unwrap();
        let [_, p0, pm1] = traj.final_state().populations();
        assert!(pm1 >= 0.999, "P(-1) = {pm1}");
        assert!(p0 < 1e-3, "P(0) = {p0}");
        assert!(traj.max_norm_drift() < 1e-9);
        assert_eq!(traj.len(), 201);
        assert!(traj.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn midpoint_and_magnus_agree() {
        let p = pi_transfer();
        let a = final_state(&p, &ground_plus(), -4.0, 4.0, &PropagationOptions::default()).unwrap();
        let b = final_state(&p, &ground_plus(), -4.0, 4.0, &PropagationOptions::default().with_stepper(Stepper::Midpoint))
            .unwrap();
        assert!(a.distance(&b) < 1e-8, "{}", a.distance(&b));
    }

    #[test]
    fn propagator_first_column_matches_state() {
        let p = SystemParams { detuning: 3.0, two_photon_detuning: 0.2, pulse: PulseSpec::de(6.0 * PI, 20.0) };
        let u = propagator(&p, -4.0, 4.0, &PropagationOptions::default()).unwrap();
        assert!(u.is_unitary(1e-10));
        let psi = final_state(&p, &ground_plus(), -4.0, 4.0, &PropagationOptions::default()).unwrap();
        let col = StateVector::normalized(u.column(Level::Plus)).unwrap();
        assert!(col.distance(&psi) < 1e-8);
    }

    #[test]
    fn convergence_failure_reports_difference() {
        let opts = PropagationOptions { max_refinements: 1, dt_max: Some(0.5), ..Default::default() };
        match propagate(&pi_transfer(), &ground_plus(), -4.0, 4.0, &opts) {
            Err(Error::Convergence { refinements, difference, .. }) => {
                assert_eq!(refinements, 1);
                assert!(difference > 1e-9);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_span() {
        assert!(propagate(&pi_transfer(), &ground_plus(), 1.0, 1.0, &PropagationOptions::default()).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let traj = propagate(&pi_transfer(), &ground_plus(), -4.0, 4.0, &PropagationOptions::default().with_samples(4)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,re_c1,im_c1,re_c0,im_c0,re_cm1,im_cm1,p1,p0,pm1");
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first.len(), 10);
        assert_eq!(first[0], -4.0);
        assert_eq!(first[7], 1.0);
        assert_eq!(text.lines().count(), 6);
    }
}
