use crate::algebra::{Level, StateVector};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// `[-t_p/2, t_p/2]`.
pub const DEFAULT_POPULATION_WINDOW: (f64, f64) = (-0.5, 0.5);

/// `1 - |<target|final>|^2`, clamped to `[0, 1]` against rounding.
pub fn infidelity(final_state: &StateVector, target: &StateVector) -> f64 {
    (1.0 - target.overlap(final_state).norm_sqr()).clamp(0.0, 1.0)
}

/// Time average of `|c_0|^2` over `window` (default
/// [`DEFAULT_POPULATION_WINDOW`]) by the trapezoidal rule on the trajectory
/// samples, with linear interpolation at the window edges.
pub fn avg_intermediate_population(traj: &Trajectory, window: Option<(f64, f64)>) -> Result<f64> {
    let (lo, hi) = window.unwrap_or(DEFAULT_POPULATION_WINDOW);
    if !(lo < hi) {
        return Err(Error::validation(format!("empty averaging window [{lo}, {hi}]")));
    }
    let (t0, t1) = traj.span();
    if lo < t0 || hi > t1 {
        return Err(Error::validation(format!("window [{lo}, {hi}] is outside the trajectory span [{t0}, {t1}]")));
    }
    let times = traj.times();
    let p0: Vec<f64> = traj.states().iter().map(|s| s.population(Level::Zero)).collect();
    let at = |t: f64| -> f64 {
        let k = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1);
        let (ta, tb) = (times[k - 1], times[k]);
        let f = (t - ta) / (tb - ta);
        p0[k - 1] + f * (p0[k] - p0[k - 1])
    };
    let mut pts = vec![(lo, at(lo))];
    pts.extend(times.iter().zip(&p0).filter(|(t, _)| **t > lo && **t < hi).map(|(t, p)| (*t, *p)));
    pts.push((hi, at(hi)));
    let integral: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    Ok(integral / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{C64, ONE, ZERO};
    use crate::dynamics::{propagate, PropagationOptions, SystemParams};
    use crate::pulses::PulseSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn infidelity_examples() {
        let plus = StateVector::basis(Level::Plus);
        let minus = StateVector::basis(Level::Minus);
        assert_eq!(infidelity(&plus, &plus), 0.0);
        assert_eq!(infidelity(&plus, &minus), 1.0);
        let sup = StateVector::normalized([ONE, ZERO, ONE]).unwrap();
        assert_abs_diff_eq!(infidelity(&sup, &minus), 0.5, epsilon = 1e-15);
    }

    fn constant_trajectory(c0: f64) -> Trajectory {
        let c1 = (1.0 - c0 * c0).sqrt();
        let state = StateVector::new([C64::from(c1), C64::from(c0), ZERO]).unwrap();
        let times: Vec<f64> = (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect();
        let states = vec![state; times.len()];
        Trajectory::from_parts(times, states)
    }

    #[test]
    fn average_of_constant() {
        assert_eq!(avg_intermediate_population(&constant_trajectory(0.0), None).unwrap(), 0.0);
        let avg = avg_intermediate_population(&constant_trajectory(0.5), Some((-1.33, 0.71))).unwrap();
        assert_abs_diff_eq!(avg, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn average_rejects_bad_windows() {
        let traj = constant_trajectory(0.5);
        assert!(avg_intermediate_population(&traj, Some((0.3, 0.3))).is_err());
        assert!(avg_intermediate_population(&traj, Some((-3.0, 0.0))).is_err());
    }

    #[test]
    fn transfer_average_population() {
        let p = SystemParams::resonant(PulseSpec::de_with_effective_area(10.0 * PI, PI).unwrap());
        let psi0 = StateVector::basis(Level::Plus);
        let traj = propagate(&p, &psi0, -4.0, 4.0, &PropagationOptions::default().with_samples(800)).unwrap();
        let avg = avg_intermediate_population(&traj, None).unwrap();
        assert!(avg > 0.0 && avg < 0.1, "{avg}");
        assert!(traj.final_state().population(Level::Zero) < 1e-3);
    }

    proptest! {
        #[test]
        fn global_phase_invariance(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0,
                                   g1 in -PI..PI, g2 in -PI..PI) {
            prop_assume!(a.abs() + b.abs() > 1e-3 && c.abs() + d.abs() > 1e-3);
            let x = StateVector::normalized([C64::new(a, b), C64::new(b, 0.3), ZERO]).unwrap();
            let y = StateVector::normalized([C64::new(c, 0.1), ZERO, C64::new(d, c)]).unwrap();
            let base = infidelity(&x, &y);
            let rotated = infidelity(&x.scaled(C64::from_polar(1.0, g1)), &y.scaled(C64::from_polar(1.0, g2)));
            prop_assert!((base - rotated).abs() < 1e-14);
            prop_assert!((0.0..=1.0).contains(&base));
        }
    }
}
