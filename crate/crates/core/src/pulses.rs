//! Pulse envelopes and modulation schemes.
//!
//! All times are in units of the pulse duration `t_p` and all angular
//! frequencies in units of `1/t_p`. The envelope is the Gaussian
//! `Omega(t) = Omega_0 exp(-t^2)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::algebra::{expm_hermitian, Level, Operator3, C64};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Envelope area left outside the truncation window, relative to `S`.
pub const MAX_RESIDUAL_AREA: f64 = 1e-6;

/// Drive scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Dynamical elimination: `sin(w t)` / `cos(w t + phi)` modulated pump and
    /// Stokes under a common envelope.
    #[serde(rename = "de")]
    De,
    /// Adiabatic elimination: unmodulated, equal pump and Stokes envelopes,
    /// driven far from single-photon resonance.
    #[serde(rename = "ae")]
    Ae,
    /// Idealized Stokes-pump-Stokes-pump sequence of short pulses.
    #[serde(rename = "four_pulse_train")]
    FourPulseTrain,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::De => "de",
            Scheme::Ae => "ae",
            Scheme::FourPulseTrain => "four_pulse_train",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "de" => Ok(Scheme::De),
            "ae" => Ok(Scheme::Ae),
            "four_pulse_train" | "four-pulse-train" | "train" => Ok(Scheme::FourPulseTrain),
            other => Err(Error::validation(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Full description of the drive fields, in units of `t_p`.
///
/// On the wire this is a flat JSON object with the keys `scheme`, `area_pi`
/// (`S/pi`), `omega_e_tp` (`(w_e/2pi) t_p`), `phi_rad`, `amp_p`, `amp_s`,
/// `window_tp` and `train_area_pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseSpecWire", into = "PulseSpecWire")]
pub struct PulseSpec {
    pub scheme: Scheme,
    /// Envelope area `S = int sqrt(Omega_p^2 + Omega_s^2) dt` for the nominal
    /// (balanced, in-phase) fields.
    pub area: f64,
    /// Modulation angular frequency `w_e` (DE only).
    pub omega_e: f64,
    /// Phase added to the Stokes modulation, `cos(w_e t + phi)` (DE only).
    pub phi: f64,
    pub amp_p: f64,
    pub amp_s: f64,
    /// Half-width `T_c` of the support `[-T_c, T_c]`.
    pub window: f64,
    /// Per-pulse area of the four-pulse train.
    pub train_area: f64,
}

impl PulseSpec {
    pub const DEFAULT_WINDOW: f64 = 4.0;

    fn base(scheme: Scheme) -> Self {
        PulseSpec {
            scheme,
            area: 0.0,
            omega_e: 0.0,
            phi: 0.0,
            amp_p: 1.0,
            amp_s: 1.0,
            window: Self::DEFAULT_WINDOW,
            train_area: 0.0,
        }
    }

    pub fn de(area: f64, omega_e: f64) -> Self {
        PulseSpec { area, omega_e, ..Self::base(Scheme::De) }
    }

    /// DE pulse whose modulation frequency is fixed by the quadratic
    /// effective-area rule.
    pub fn de_with_effective_area(area: f64, effective_area: f64) -> Result<Self> {
        let omega_e = omega_for_effective_area(area, effective_area, 1.0)?;
        Ok(Self::de(area, omega_e))
    }

    pub fn ae(area: f64) -> Self {
        PulseSpec { area, ..Self::base(Scheme::Ae) }
    }

    pub fn four_pulse_train(train_area: f64) -> Self {
        PulseSpec { train_area, ..Self::base(Scheme::FourPulseTrain) }
    }

    pub fn with_phase(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_amplitudes(mut self, amp_p: f64, amp_s: f64) -> Self {
        self.amp_p = amp_p;
        self.amp_s = amp_s;
        self
    }

    /// Amplitude imbalance as a mixing angle: `(sqrt2 cos a, sqrt2 sin a)`,
    /// so `a = pi/4` is the balanced drive.
    pub fn with_mixing_angle(self, alpha: f64) -> Self {
        self.with_amplitudes(SQRT_2 * alpha.cos(), SQRT_2 * alpha.sin())
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    pub fn with_area(mut self, area: f64) -> Self {
        self.area = area;
        self
    }

    pub fn with_omega_e(mut self, omega_e: f64) -> Self {
        self.omega_e = omega_e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.area, self.omega_e, self.phi, self.amp_p, self.amp_s, self.window, self.train_area];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("pulse parameters must be finite"));
        }
        match self.scheme {
            Scheme::FourPulseTrain => {
                if self.train_area < 0.0 {
                    return Err(Error::validation("train area must be non-negative"));
                }
                return Ok(());
            }
            Scheme::De if self.omega_e <= 0.0 => {
                return Err(Error::validation("DE modulation frequency must be positive"));
            }
            _ => {}
        }
        if self.area < 0.0 {
            return Err(Error::validation("envelope area must be non-negative"));
        }
        if self.window <= 0.0 {
            return Err(Error::validation("truncation window must be positive"));
        }
        let residual = self.residual_area();
        if residual > MAX_RESIDUAL_AREA * self.area {
            return Err(Error::validation(format!(
                "envelope area outside the window is {:.3e} of S (limit {MAX_RESIDUAL_AREA:e})",
                residual / self.area
            )));
        }
        Ok(())
    }

    /// Peak `Omega_0` of the shared envelope. For AE this is the per-field
    /// peak, `1/sqrt2` of the combined norm at equal envelope area.
    pub fn peak_rabi(&self) -> f64 {
        match self.scheme {
            Scheme::De => self.area / SQRT_PI,
            Scheme::Ae => self.area / (SQRT_PI * SQRT_2),
            Scheme::FourPulseTrain => 0.0,
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        if t.abs() > self.window {
            0.0
        } else {
            gaussian_envelope(t, self.peak_rabi(), 1.0)
        }
    }

    /// `(Omega_p, Omega_s)` without the scheme check; the train has no
    /// continuous fields and yields zeros.
    pub(crate) fn fields(&self, t: f64) -> (f64, f64) {
        let env = self.envelope(t);
        match self.scheme {
            Scheme::De => (
                self.amp_p * env * (self.omega_e * t).sin(),
                self.amp_s * env * (self.omega_e * t + self.phi).cos(),
            ),
            Scheme::Ae => (self.amp_p * env, self.amp_s * env),
            Scheme::FourPulseTrain => (0.0, 0.0),
        }
    }

    /// Two-sided envelope area outside `[-T_c, T_c]`.
    fn residual_area(&self) -> f64 {
        let peak = self.peak_rabi() * self.amp_p.abs().max(self.amp_s.abs()).max(1.0);
        let tail = adaptive_simpson(|t| gaussian_envelope(t, peak, 1.0), self.window, self.window + 12.0, 1e-14, 8);
        2.0 * SQRT_2 * tail
    }

    /// Number of modulation periods in the window, used to size quadrature
    /// panels.
    pub(crate) fn oscillation_panels(&self) -> usize {
        let fast = match self.scheme {
            Scheme::De => self.omega_e,
            _ => 0.0,
        };
        let periods = 2.0 * self.window * fast / (2.0 * PI);
        8 + (4.0 * periods).ceil() as usize
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PulseSpecWire {
    scheme: Scheme,
    area_pi: f64,
    omega_e_tp: f64,
    phi_rad: f64,
    amp_p: f64,
    amp_s: f64,
    window_tp: f64,
    train_area_pi: f64,
}

impl From<PulseSpec> for PulseSpecWire {
    fn from(p: PulseSpec) -> Self {
        PulseSpecWire {
            scheme: p.scheme,
            area_pi: p.area / PI,
            omega_e_tp: p.omega_e / (2.0 * PI),
            phi_rad: p.phi,
            amp_p: p.amp_p,
            amp_s: p.amp_s,
            window_tp: p.window,
            train_area_pi: p.train_area / PI,
        }
    }
}

impl TryFrom<PulseSpecWire> for PulseSpec {
    type Error = Error;
    fn try_from(w: PulseSpecWire) -> Result<Self> {
        let spec = PulseSpec {
            scheme: w.scheme,
            area: w.area_pi * PI,
            omega_e: w.omega_e_tp * 2.0 * PI,
            phi: w.phi_rad,
            amp_p: w.amp_p,
            amp_s: w.amp_s,
            window: w.window_tp,
            train_area: w.train_area_pi * PI,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `Omega_0 exp(-t^2 / t_p^2)`.
pub fn gaussian_envelope(t: f64, peak: f64, duration: f64) -> f64 {
    let x = t / duration;
    peak * (-x * x).exp()
}

/// Pump and Stokes Rabi frequencies at time `t`.
pub fn rabi_pair(t: f64, spec: &PulseSpec) -> Result<(f64, f64)> {
    if spec.scheme == Scheme::FourPulseTrain {
        return Err(Error::UnsupportedScheme(spec.scheme.name()));
    }
    Ok(spec.fields(t))
}

/// `int sqrt(Omega_p^2 + Omega_s^2) dt` over the truncation window.
pub fn envelope_area(spec: &PulseSpec) -> f64 {
    match spec.scheme {
        Scheme::FourPulseTrain => 4.0 * spec.train_area,
        _ => {
            if spec.area == 0.0 {
                return 0.0;
            }
            let tol = 1e-12 * spec.area.max(1.0);
            adaptive_simpson(
                |t| {
                    let (p, s) = spec.fields(t);
                    p.hypot(s)
                },
                -spec.window,
                spec.window,
                tol,
                spec.oscillation_panels(),
            )
        }
    }
}

/// Quadratic effective-area rule `S_eff = sqrt2 S^2 / (8 sqrt(pi) w_e t_p)`.
pub fn effective_area(area: f64, omega_e: f64, duration: f64) -> Result<f64> {
    let denom = omega_e * duration;
    if denom == 0.0 {
        return Err(Error::DivisionByZero("w_e t_p is zero"));
    }
    if !(denom > 0.0 && area.is_finite()) {
        return Err(Error::validation("w_e t_p must be positive and S finite"));
    }
    Ok(SQRT_2 * area * area / (8.0 * SQRT_PI * denom))
}

/// Inverse of [`effective_area`] for the modulation frequency.
pub fn omega_for_effective_area(area: f64, effective_area: f64, duration: f64) -> Result<f64> {
    let denom = effective_area * duration;
    if denom == 0.0 {
        return Err(Error::DivisionByZero("S_eff t_p is zero"));
    }
    if !(denom > 0.0 && area > 0.0) {
        return Err(Error::validation("S, S_eff and t_p must be positive"));
    }
    Ok(SQRT_2 * area * area / (8.0 * SQRT_PI * denom))
}

/// `H_p = (|+1><0| + h.c.) / 2`
pub fn pump_hamiltonian() -> Operator3 {
    (Operator3::ket_bra(Level::Plus, Level::Zero) + Operator3::ket_bra(Level::Zero, Level::Plus)) * 0.5
}

/// `H_s = (|-1><0| + h.c.) / 2`
pub fn stokes_hamiltonian() -> Operator3 {
    (Operator3::ket_bra(Level::Minus, Level::Zero) + Operator3::ket_bra(Level::Zero, Level::Minus)) * 0.5
}

/// `H_t = (i/2)|-1><+1| + h.c. = 2i [H_s, H_p]`
pub fn target_hamiltonian() -> Operator3 {
    let half_i = C64::new(0.0, 0.5);
    Operator3::ket_bra(Level::Minus, Level::Plus).scale(half_i) + Operator3::ket_bra(Level::Plus, Level::Minus).scale(-half_i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourPulseMode {
    /// Product of the four exact pulse propagators.
    Exact,
    /// `I - (i/2) H_t S^2`.
    FirstOrder,
}

/// Propagator of the Stokes-pump-Stokes-pump train with per-pulse area `S`,
/// where one pump and one Stokes pulse carry a sign flip.
pub fn four_pulse_unitary(train_area: f64, mode: FourPulseMode) -> Result<Operator3> {
    if !(train_area >= 0.0 && train_area.is_finite()) {
        return Err(Error::validation("train area must be finite and non-negative"));
    }
    let s = train_area;
    match mode {
        FourPulseMode::Exact => {
            let hp = pump_hamiltonian();
            let hs = stokes_hamiltonian();
            // rightmost factor acts first
            Ok(expm_hermitian(&hs, s)? * expm_hermitian(&hp, -s)? * expm_hermitian(&hs, -s)? * expm_hermitian(&hp, s)?)
        }
        FourPulseMode::FirstOrder => Ok(Operator3::identity() + target_hamiltonian().scale(C64::new(0.0, -0.5 * s * s))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn gaussian_envelope_points() {
        assert_abs_diff_eq!(gaussian_envelope(0.0, 2.5, 1.0), 2.5);
        assert_abs_diff_eq!(gaussian_envelope(1.3, 2.5, 1.3), 2.5 / E, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_envelope_integral() {
        // S = sqrt(pi) Omega_0 t_p
        let (peak, tp) = (3.0, 0.7);
        let v = adaptive_simpson(|t| gaussian_envelope(t, peak, tp), -10.0 * tp, 10.0 * tp, 1e-13, 8);
        assert_abs_diff_eq!(v, SQRT_PI * peak * tp, epsilon = 1e-11);
    }

    #[test]
    fn rabi_pair_de_and_ae() {
        let de = PulseSpec::de(10.0 * PI, 30.0);
        let (p, s) = rabi_pair(0.0, &de).unwrap();
        assert_abs_diff_eq!(p, 0.0);
        assert_abs_diff_eq!(s, de.peak_rabi());
        for k in 0..50 {
            let t = -3.0 + 0.123 * k as f64;
            let (p, s) = rabi_pair(t, &de).unwrap();
            assert_abs_diff_eq!(p * p + s * s, de.envelope(t).powi(2), epsilon = 1e-12);
        }
        let ae = PulseSpec::ae(4.0);
        let (p, s) = rabi_pair(0.4, &ae).unwrap();
        assert_eq!(p, s);
        assert_abs_diff_eq!(p, ae.peak_rabi() * (-0.16f64).exp(), epsilon = 1e-15);
        assert!(matches!(rabi_pair(0.0, &PulseSpec::four_pulse_train(0.1)), Err(Error::UnsupportedScheme(_))));
    }

    #[test]
    fn envelope_area_matches_nominal_area() {
        let s = 10.0 * PI;
        let de = PulseSpec::de(s, 31.33);
        assert_abs_diff_eq!(envelope_area(&de), s, epsilon = 1e-6 * s);
        assert_eq!(envelope_area(&PulseSpec::de(0.0, 5.0)), 0.0);
        // AE: integrand sqrt2 Omega(t), so area sqrt2 sqrt(pi) Omega_0 erf(T_c);
        // 1 - erf(4) = 1.5417e-8
        let ae = PulseSpec::ae(4.0 * PI);
        let expected = SQRT_2 * SQRT_PI * ae.peak_rabi() * (1.0 - 1.541_725_790_028e-8);
        assert_abs_diff_eq!(envelope_area(&ae), expected, epsilon = 1e-10 * expected);
    }

    #[test]
    fn envelope_area_under_relative_phase() {
        // sin^2(wt) + cos^2(wt + phi) = 1 - sin(phi) sin(2wt + phi): the area
        // only equals S at phi = 0 (mod pi), and is 2pi-periodic in phi.
        let base = PulseSpec::de(6.0 * PI, 40.0);
        let reference = envelope_area(&base);
        for phi in [0.3, 1.1] {
            let spec = base.with_phase(phi);
            let direct = adaptive_simpson(
                |t| spec.envelope(t) * (1.0 - phi.sin() * (80.0 * t + phi).sin()).sqrt(),
                -4.0,
                4.0,
                1e-12,
                400,
            );
            assert_abs_diff_eq!(envelope_area(&spec), direct, epsilon = 1e-8 * reference);
            let shifted = envelope_area(&base.with_phase(phi + 2.0 * PI));
            assert_abs_diff_eq!(envelope_area(&spec), shifted, epsilon = 1e-8 * reference);
        }
        assert_abs_diff_eq!(envelope_area(&base.with_phase(PI)), reference, epsilon = 1e-8 * reference);
    }

    #[test]
    fn zero_area_modulation() {
        let s = 10.0 * PI;
        let spec = PulseSpec::de(s, 2.0 * PI * 4.0);
        let pump = adaptive_simpson(|t| spec.fields(t).0, -4.0, 4.0, 1e-12, 200);
        let stokes = adaptive_simpson(|t| spec.fields(t).1, -4.0, 4.0, 1e-12, 200);
        assert!(pump.abs() < 1e-8 * s);
        assert!(stokes.abs() < 1e-6 * s, "stokes area {stokes:e}");
    }

    #[test]
    fn effective_area_rule() {
        let s = 10.0 * PI;
        let w = omega_for_effective_area(s, PI, 1.0).unwrap();
        assert_abs_diff_eq!(w, 12.5 * (2.0 * PI).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w / (2.0 * PI), 4.987, epsilon = 1e-3);
        assert_abs_diff_eq!(effective_area(s, w, 1.0).unwrap(), PI, epsilon = 1e-13);
        assert_eq!(effective_area(0.0, w, 1.0).unwrap(), 0.0);
        let single = effective_area(3.0, 7.0, 1.0).unwrap();
        assert_abs_diff_eq!(effective_area(6.0, 7.0, 1.0).unwrap(), 4.0 * single, epsilon = 1e-14);
        assert!(matches!(effective_area(1.0, 0.0, 1.0), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(PulseSpec::de(PI, 0.0).validate().is_err());
        assert!(PulseSpec::de(-1.0, 1.0).validate().is_err());
        assert!(PulseSpec::de(PI, 10.0).with_window(1.5).validate().is_err());
        assert!(PulseSpec::de(PI, 10.0).validate().is_ok());
        assert!(PulseSpec::ae(PI).validate().is_ok());
    }

    #[test]
    fn json_keys_and_roundtrip() {
        let spec = PulseSpec::de(10.0 * PI, 2.0 * PI * 5.0).with_phase(0.25);
        let json = serde_json::to_value(spec).unwrap();
        let mut keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["amp_p", "amp_s", "area_pi", "omega_e_tp", "phi_rad", "scheme", "train_area_pi", "window_tp"]
        );
        assert_abs_diff_eq!(json["area_pi"].as_f64().unwrap(), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(json["omega_e_tp"].as_f64().unwrap(), 5.0, epsilon = 1e-12);
        assert_eq!(json["scheme"], "de");
        let back: PulseSpec = serde_json::from_value(json).unwrap();
        assert_abs_diff_eq!(back.area, spec.area, epsilon = 1e-12);
        assert_abs_diff_eq!(back.omega_e, spec.omega_e, epsilon = 1e-12);

        let bad = r#"{"scheme":"de","area_pi":1,"omega_e_tp":0,"phi_rad":0,"amp_p":1,"amp_s":1,"window_tp":4,"train_area_pi":0}"#;
        assert!(serde_json::from_str::<PulseSpec>(bad).is_err());
        let extra = r#"{"scheme":"ae","area_pi":1,"omega_e_tp":0,"phi_rad":0,"amp_p":1,"amp_s":1,"window_tp":4,"train_area_pi":0,"x":1}"#;
        assert!(serde_json::from_str::<PulseSpec>(extra).is_err());
    }

    #[test]
    fn target_hamiltonian_is_commutator() {
        let ht = target_hamiltonian();
        let comm = stokes_hamiltonian().commutator(&pump_hamiltonian()).scale(C64::new(0.0, 2.0));
        assert_abs_diff_eq!((ht - comm).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn four_pulse_identity_and_first_order_entries() {
        for mode in [FourPulseMode::Exact, FourPulseMode::FirstOrder] {
            let u = four_pulse_unitary(0.0, mode).unwrap();
            assert_abs_diff_eq!((u - Operator3::identity()).norm(), 0.0, epsilon = 1e-14);
        }
        let s = 0.3;
        let u = four_pulse_unitary(s, FourPulseMode::FirstOrder).unwrap();
        let e = u.entry(Level::Minus, Level::Plus);
        assert_abs_diff_eq!(e.re, s * s / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, 0.0);
        assert_abs_diff_eq!(u.entry(Level::Plus, Level::Minus).re, -s * s / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn four_pulse_exact_is_unitary() {
        for k in 0..40 {
            let s = 0.25 * k as f64;
            assert!(four_pulse_unitary(s, FourPulseMode::Exact).unwrap().is_unitary(1e-12));
        }
    }

    #[test]
    fn four_pulse_error_is_third_order() {
        let err = |s: f64| {
            (four_pulse_unitary(s, FourPulseMode::Exact).unwrap() - four_pulse_unitary(s, FourPulseMode::FirstOrder).unwrap())
                .norm()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 8.0).abs() < 0.05, "ratio {ratio}");
    }
}
