//! WebAssembly bindings for the browser demo. Every export takes plain
//! numbers in CLI units (areas in multiples of pi, frequencies in cycles per
//! pulse duration) and returns a JSON string.

use std::f64::consts::PI;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use lambda_de::analysis::{pi_pulse_infidelity_map, ramsey_signal, RamseyConfig, RamseyFringe};
use lambda_de::dynamics::{propagate, PropagationOptions, SystemParams};
use lambda_de::pulses::{rabi_pair, PulseSpec, Scheme};
use lambda_de::{Level, StateVector};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Serialize)]
struct Dynamics {
    t: Vec<f64>,
    omega_p: Vec<f64>,
    omega_s: Vec<f64>,
    p1: Vec<f64>,
    p0: Vec<f64>,
    pm1: Vec<f64>,
}

#[derive(Serialize)]
struct InfidelityRow {
    freq_tp: Vec<f64>,
    infidelity: Vec<f64>,
}

#[derive(Serialize)]
struct Fringe {
    delta_tau: Vec<f64>,
    signal: Vec<f64>,
    normalized: Vec<f64>,
    contrast: f64,
    relative_phase: Option<f64>,
}

fn scheme_of(name: &str) -> Result<Scheme, String> {
    match name {
        "de" => Ok(Scheme::De),
        "ae" => Ok(Scheme::Ae),
        _ => Err(format!("unknown scheme {name:?}")),
    }
}

fn params_for(scheme: Scheme, area_pi: f64, freq_tp: f64) -> lambda_de::Result<SystemParams> {
    match scheme {
        Scheme::Ae => SystemParams::new(TWO_PI * freq_tp, 0.0, PulseSpec::ae(area_pi * PI)),
        _ => SystemParams::new(0.0, 0.0, PulseSpec::de(area_pi * PI, TWO_PI * freq_tp)),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn dynamics_json(area_pi: f64, omega_e_tp: f64, detuning_tp: f64, phase: f64, samples: usize) -> Result<String, String> {
    let pulse = PulseSpec::de(area_pi * PI, TWO_PI * omega_e_tp).with_phase(phase);
    let p = SystemParams::new(TWO_PI * detuning_tp, 0.0, pulse).map_err(|e| e.to_string())?;
    let (t0, t1) = p.window();
    let opts = PropagationOptions::default().with_samples(samples.clamp(1, 2000));
    let traj = propagate(&p, &StateVector::basis(Level::Plus), t0, t1, &opts).map_err(|e| e.to_string())?;
    let mut d = Dynamics { t: vec![], omega_p: vec![], omega_s: vec![], p1: vec![], p0: vec![], pm1: vec![] };
    for (&t, s) in traj.times().iter().zip(traj.states()) {
        let (wp, ws) = rabi_pair(t, &p.pulse).map_err(|e| e.to_string())?;
        let [a, b, c] = s.populations();
        d.t.push(t);
        d.omega_p.push(wp);
        d.omega_s.push(ws);
        d.p1.push(a);
        d.p0.push(b);
        d.pm1.push(c);
    }
    to_json(&d)
}

pub fn infidelity_row_json(scheme: &str, area_pi: f64, freq_min: f64, freq_max: f64, points: usize) -> Result<String, String> {
    let scheme = scheme_of(scheme)?;
    let n = points.clamp(2, 400);
    let freqs: Vec<f64> = (0..n).map(|k| freq_min + (freq_max - freq_min) * k as f64 / (n - 1) as f64).collect();
    let natural: Vec<f64> = freqs.iter().map(|f| TWO_PI * f).collect();
    let map = pi_pulse_infidelity_map(scheme, &[area_pi * PI], &natural, false, &PropagationOptions::default())
        .map_err(|e| e.to_string())?;
    to_json(&InfidelityRow { freq_tp: freqs, infidelity: map.infidelity.row(0).to_vec() })
}

pub fn ramsey_fringe_json(scheme: &str, area_pi: f64, detuning_tp: f64, omega_e_tp: f64) -> Result<String, String> {
    let scheme = scheme_of(scheme)?;
    let pulse = params_for(scheme, area_pi, omega_e_tp).map_err(|e| e.to_string())?.pulse;
    let cfg = RamseyConfig::new(pulse, TWO_PI * detuning_tp);
    let fringe = ramsey_signal(&cfg, &PropagationOptions::default()).map_err(|e| e.to_string())?;
    let fit = fringe.fit().ok();
    to_json(&Fringe {
        delta_tau: fringe.samples.iter().map(|s| s.0).collect(),
        signal: fringe.samples.iter().map(|s| s.1).collect(),
        normalized: fringe.samples.iter().map(|s| fit.as_ref().map_or(f64::NAN, |f| f.normalize(s.1))).collect(),
        contrast: fit.as_ref().map_or(0.0, |f| f.contrast),
        relative_phase: fit.as_ref().map(RamseyFringe::relative_phase),
    })
}

/// Field shapes and populations of one DE pulse started in |+1>.
#[wasm_bindgen]
pub fn dynamics(area_pi: f64, omega_e_tp: f64, detuning_tp: f64, phase: f64, samples: usize) -> Result<String, JsValue> {
    dynamics_json(area_pi, omega_e_tp, detuning_tp, phase, samples).map_err(|e| JsValue::from_str(&e))
}

/// Pi-pulse infidelity at fixed area versus omega_e (DE) or Delta (AE).
#[wasm_bindgen]
pub fn infidelity_row(scheme: &str, area_pi: f64, freq_min: f64, freq_max: f64, points: usize) -> Result<String, JsValue> {
    infidelity_row_json(scheme, area_pi, freq_min, freq_max, points).map_err(|e| JsValue::from_str(&e))
}

/// Ramsey fringe with its contrast-normalized copy.
#[wasm_bindgen]
pub fn ramsey_fringe(scheme: &str, area_pi: f64, detuning_tp: f64, omega_e_tp: f64) -> Result<String, JsValue> {
    ramsey_fringe_json(scheme, area_pi, detuning_tp, omega_e_tp).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn dynamics_transfers() {
        let v: Value = serde_json::from_str(&dynamics_json(10.0, 4.9868, 0.0, 0.0, 50).unwrap()).unwrap();
        let pm1 = v["pm1"].as_array().unwrap();
        assert_eq!(pm1.len(), 51);
        assert!(pm1.last().unwrap().as_f64().unwrap() > 0.999);
    }

    #[test]
    fn row_has_requested_length() {
        let v: Value = serde_json::from_str(&infidelity_row_json("ae", 6.0, 1.0, 4.0, 5).unwrap()).unwrap();
        assert_eq!(v["infidelity"].as_array().unwrap().len(), 5);
        assert!(infidelity_row_json("xx", 6.0, 1.0, 4.0, 5).is_err());
    }

    #[test]
    fn ideal_fringe() {
        let v: Value = serde_json::from_str(&ramsey_fringe_json("de", 10.0, 0.0, 10.0).unwrap()).unwrap();
        assert!(v["contrast"].as_f64().unwrap() > 0.99);
        assert!(v["relative_phase"].as_f64().unwrap().abs() < 1e-3);
    }
}
