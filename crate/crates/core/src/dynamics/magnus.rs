//! Effective Hamiltonians over one modulation period with the envelope frozen
//! at its value at the period's center.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use super::SystemParams;
use crate::algebra::{Level, Operator3, C64, I, ZERO};
use crate::error::{Error, Result};
use crate::pulses::{target_hamiltonian, Scheme};
use crate::quad::GaussLegendre;

const RULE_LOW: usize = 20;
const RULE_HIGH: usize = 28;
const QUAD_TOL: f64 = 1e-10;

fn require_de(p: &SystemParams) -> Result<()> {
    if p.pulse.scheme != Scheme::De {
        return Err(Error::UnsupportedScheme(p.pulse.scheme.name()));
    }
    if !(p.pulse.omega_e > 0.0) {
        return Err(Error::validation("Magnus terms need w_e > 0"));
    }
    Ok(())
}

/// Period average of the Hamiltonian: `Delta|0><0| - delta|-1><-1|`.
pub fn magnus_h1(p: &SystemParams) -> Operator3 {
    Operator3::diagonal([ZERO, C64::from(p.detuning), C64::from(-p.two_photon_detuning)])
}

/// Second-order term for the period centered on `t`.
///
/// With `Omega = Omega(t)`, `w = w_e` and `Y_k = -i|k><0| + i|0><k|`:
///
/// `a_p a_s cos(phi) Omega^2/(4w) H_t
///   + a_p Delta Omega cos(w t)/(2w) Y_{+1}
///   - a_s (Delta + delta) Omega sin(w t + phi)/(2w) Y_{-1}`
///
/// At resonance only the `H_t` coupling survives.
pub fn magnus_h2(p: &SystemParams, t: f64) -> Result<Operator3> {
    require_de(p)?;
    let pulse = &p.pulse;
    let w = pulse.omega_e;
    let rabi = pulse.envelope(t);
    let coupling = pulse.amp_p * pulse.amp_s * pulse.phi.cos() * rabi * rabi / (4.0 * w);
    let pump = pulse.amp_p * p.detuning * rabi * (w * t).cos() / (2.0 * w);
    let stokes = -pulse.amp_s * (p.detuning + p.two_photon_detuning) * rabi * (w * t + pulse.phi).sin() / (2.0 * w);
    Ok(target_hamiltonian() * coupling + y_operator(Level::Plus) * pump + y_operator(Level::Minus) * stokes)
}

fn y_operator(k: Level) -> Operator3 {
    Operator3::ket_bra(k, Level::Zero).scale(-I) + Operator3::ket_bra(Level::Zero, k).scale(I)
}

/// Hamiltonian with the envelope held at `rabi`.
fn frozen(p: &SystemParams, rabi: f64) -> impl Fn(f64) -> Matrix3<C64> + '_ {
    move |t| {
        let pulse = &p.pulse;
        let hp = C64::from(0.5 * pulse.amp_p * rabi * (pulse.omega_e * t).sin());
        let hs = C64::from(0.5 * pulse.amp_s * rabi * (pulse.omega_e * t + pulse.phi).cos());
        Matrix3::new(
            ZERO, hp, ZERO,
            hp, C64::from(p.detuning), hs,
            ZERO, hs, C64::from(-p.two_photon_detuning),
        )
    }
}

fn comm(a: &Matrix3<C64>, b: &Matrix3<C64>) -> Matrix3<C64> {
    a * b - b * a
}

fn term_with_rule(order: usize, p: &SystemParams, t_center: f64, gl: &GaussLegendre) -> Matrix3<C64> {
    let period = 2.0 * PI / p.pulse.omega_e;
    let a = t_center - 0.5 * period;
    let b = a + period;
    let h = frozen(p, p.pulse.envelope(t_center));
    let mut acc = Matrix3::<C64>::zeros();
    match order {
        1 => {
            for (t1, w1) in gl.mapped(a, b) {
                acc += h(t1) * C64::from(w1);
            }
            acc / C64::from(period)
        }
        2 => {
            for (t1, w1) in gl.mapped(a, b) {
                let h1 = h(t1);
                for (t2, w2) in gl.mapped(a, t1) {
                    acc += comm(&h1, &h(t2)) * C64::from(w1 * w2);
                }
            }
            acc * C64::new(0.0, -0.5 / period)
        }
        3 => {
            for (t1, w1) in gl.mapped(a, b) {
                let h1 = h(t1);
                for (t2, w2) in gl.mapped(a, t1) {
                    let h2 = h(t2);
                    for (t3, w3) in gl.mapped(a, t2) {
                        let h3 = h(t3);
                        let nested = comm(&h1, &comm(&h2, &h3)) + comm(&h3, &comm(&h2, &h1));
                        acc += nested * C64::from(w1 * w2 * w3);
                    }
                }
            }
            acc * C64::from(-1.0 / (6.0 * period))
        }
        _ => unreachable!(),
    }
}

/// The `order`-th Magnus term alone, by nested Gauss-Legendre quadrature over
/// the simplex `t_3 < t_2 < t_1` of one period. Two rule sizes are compared
/// and a convergence error is returned if they differ by more than `1e-10`.
pub fn magnus_term(order: usize, p: &SystemParams, t_center: f64) -> Result<Operator3> {
    if !(1..=3).contains(&order) {
        return Err(Error::validation(format!("Magnus order must be 1, 2 or 3, got {order}")));
    }
    require_de(p)?;
    p.validate()?;
    let coarse = term_with_rule(order, p, t_center, &GaussLegendre::new(RULE_LOW));
    let fine = term_with_rule(order, p, t_center, &GaussLegendre::new(RULE_HIGH));
    let difference = (fine - coarse).norm();
    if difference > QUAD_TOL {
        return Err(Error::Convergence { refinements: 1, difference, tolerance: QUAD_TOL });
    }
    Ok(Operator3::from_matrix(fine))
}

/// Effective Hamiltonian through `order`: the sum of terms `1..=order`.
pub fn magnus_numeric(order: usize, p: &SystemParams, t_center: f64) -> Result<Operator3> {
    if !(1..=3).contains(&order) {
        return Err(Error::validation(format!("Magnus order must be 1, 2 or 3, got {order}")));
    }
    let mut sum = Operator3::zeros();
    for k in 1..=order {
        sum = sum + magnus_term(k, p, t_center)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(d: f64, dd: f64, s: f64, w: f64) -> SystemParams {
        SystemParams { detuning: d, two_photon_detuning: dd, pulse: PulseSpec::de(s, w) }
    }

    #[test]
    fn h1_examples() {
        assert_eq!(magnus_h1(&params(0.0, 0.0, 10.0, 5.0)).norm(), 0.0);
        let h = magnus_h1(&params(2.0, -1.0, 10.0, 5.0));
        let expected = Operator3::diagonal([ZERO, C64::from(2.0), C64::from(1.0)]);
        assert_eq!(h, expected);
        assert_eq!(h, magnus_h1(&params(2.0, -1.0, 3.0, 40.0)));
    }

    #[test]
    fn h2_resonant_entry() {
        let p = params(0.0, 0.0, 8.0 * PI, 30.0);
        let t = 0.3;
        let rabi = p.pulse.envelope(t);
        let h = magnus_h2(&p, t).unwrap();
        let e = h.entry(Level::Minus, Level::Plus);
        assert_abs_diff_eq!(e.re, 0.0);
        assert_abs_diff_eq!(e.im, rabi * rabi / (8.0 * 30.0), epsilon = 1e-14);
        for l in Level::ALL {
            assert_eq!(h.entry(l, l), ZERO);
        }
    }

    #[test]
    fn h2_vanishes_without_field_and_scales_inverse_w() {
        let p = params(1.5, 0.0, 8.0 * PI, 30.0);
        assert_eq!(magnus_h2(&p, 5.0).unwrap().norm(), 0.0);
        let t = 0.0;
        let a = magnus_h2(&p, t).unwrap();
        let b = magnus_h2(&p.with_pulse(p.pulse.with_omega_e(15.0)), t).unwrap();
        assert_abs_diff_eq!((b - a * 2.0).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn rejects_other_schemes_and_orders() {
        let ae = SystemParams::resonant(PulseSpec::ae(PI));
        assert!(matches!(magnus_h2(&ae, 0.0), Err(Error::UnsupportedScheme(_))));
        let p = params(0.0, 0.0, 5.0, 20.0);
        assert!(matches!(magnus_numeric(0, &p, 0.0), Err(Error::Validation(_))));
        assert!(matches!(magnus_numeric(4, &p, 0.0), Err(Error::Validation(_))));
    }

    #[test]
    fn order_one_resonant_is_zero() {
        let p = params(0.0, 0.0, 10.0 * PI, 31.0);
        assert!(magnus_numeric(1, &p, 0.2).unwrap().norm() < 1e-10);
    }

    #[test]
    fn order_two_matches_closed_form() {
        let p = params(0.0, 0.0, 10.0 * PI, 31.0);
        let tc = 0.1;
        let num = magnus_numeric(2, &p, tc).unwrap();
        let closed = magnus_h1(&p) + magnus_h2(&p, tc).unwrap();
        assert!((num - closed).norm() <= 1e-8 * closed.norm());
    }

    #[test]
    fn second_order_resonant_structure() {
        let p = params(0.0, 0.0, 6.0 * PI, 25.0);
        let second = magnus_numeric(2, &p, -0.4).unwrap() - magnus_numeric(1, &p, -0.4).unwrap();
        assert!(second.trace().norm() < 1e-12);
        for l in Level::ALL {
            assert!(second.entry(l, l).norm() < 1e-12);
        }
        assert!(second.entry(Level::Minus, Level::Plus).norm() > 1e-3);
    }

    #[test]
    fn third_order_at_resonance_couples_intermediate_state() {
        let (s, w) = (6.0 * PI, 25.0);
        let p = params(0.0, 0.0, s, w);
        let h3 = magnus_term(3, &p, 0.0).unwrap();
        let rabi = p.pulse.envelope(0.0);
        let expected = -rabi.powi(3) / (16.0 * w * w);
        assert_abs_diff_eq!(h3.entry(Level::Zero, Level::Minus).re, expected, epsilon = 1e-10);
        assert!(h3.entry(Level::Minus, Level::Plus).norm() < 1e-12);
        assert!(h3.is_hermitian(1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn closed_form_matches_quadrature(d in -20.0f64..20.0, dd in -5.0f64..5.0, s in 1.0f64..35.0,
                                          w in 5.0f64..80.0, tc in -1.5f64..1.5, phi in -1.5f64..1.5,
                                          ap in 0.5f64..1.5, as_ in 0.5f64..1.5) {
            let p = SystemParams {
                detuning: d,
                two_photon_detuning: dd,
                pulse: PulseSpec::de(s, w).with_phase(phi).with_amplitudes(ap, as_),
            };
            let num = magnus_numeric(2, &p, tc).unwrap();
            let h2 = magnus_h2(&p, tc).unwrap();
            let closed = magnus_h1(&p) + h2;
            prop_assert!((num - closed).norm() <= 1e-8 * h2.norm().max(1e-300) + 1e-12,
                         "diff {}", (num - closed).norm());
        }
    }
}
