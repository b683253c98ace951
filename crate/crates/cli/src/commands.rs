use std::f64::consts::{FRAC_PI_4, PI};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lambda_de::analysis::{
    detuning_window, infidelity_curve, optimize_reference, pi_pulse_infidelity_map, ramsey_maps, ramsey_signal,
    ridge_minima, spearman, sweep as run_sweep, DetuningWindow, Knob, Metric, RamseyConfig, RamseyFringe,
    WindowOptions,
};
use lambda_de::dynamics::{propagate, SystemParams};
use lambda_de::pulses::{omega_for_effective_area, rabi_pair, PulseSpec, Scheme};
use lambda_de::{Error, Level, StateVector};

use crate::output::{usage, CliError, Output};
use crate::GlobalArgs;

const TWO_PI: f64 = 2.0 * PI;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    /// Dynamical elimination: modulated pump and Stokes on resonance.
    De,
    /// Adiabatic elimination: unmodulated fields at large detuning.
    Ae,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::De => Scheme::De,
            SchemeArg::Ae => Scheme::Ae,
        }
    }
}

/// `n` equally spaced values from `lo` to `hi`; a single point sits at `lo`.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                lo * (1.0 - f) + hi * f
            })
            .collect(),
    }
}

fn check_range(name: &str, lo: f64, hi: f64) -> Result<(), CliError> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(usage(format!("{name}: need finite bounds with min <= max, got {lo}..{hi}")));
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[derive(Args, Debug, Serialize)]
pub struct DynamicsArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::De)]
    pub scheme: SchemeArg,

    /// Envelope area S/pi.
    #[arg(long, default_value_t = 10.0)]
    pub area_pi: f64,

    /// Effective two-photon area S_eff/pi; sets omega_e (DE) or Delta (AE).
    /// Defaults to 1 when neither frequency is given.
    #[arg(long, conflicts_with = "omega_e")]
    pub seff_pi: Option<f64>,

    /// Modulation frequency (omega_e/2pi) t_p. DE only.
    #[arg(long)]
    pub omega_e: Option<f64>,

    /// Single-photon detuning (Delta/2pi) t_p. Defaults to 0 for DE; for AE it
    /// is the operating detuning and conflicts with --seff-pi.
    #[arg(long, allow_negative_numbers = true)]
    pub detuning: Option<f64>,

    /// Two-photon detuning (delta/2pi) t_p.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub two_photon_detuning: f64,

    /// Relative Stokes modulation phase phi in rad. DE only.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase: f64,

    /// Amplitude mixing angle alpha in rad; pump gets sqrt2 cos(alpha), Stokes
    /// sqrt2 sin(alpha). DE only.
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub mixing_angle: f64,

    /// Number of recorded time intervals across the pulse window.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

fn dynamics_params(a: &DynamicsArgs) -> Result<(SystemParams, f64), CliError> {
    let area = a.area_pi * PI;
    let seff = a.seff_pi.unwrap_or(1.0) * PI;
    let delta = TWO_PI * a.two_photon_detuning;
    match a.scheme {
        SchemeArg::De => {
            let omega_e = match a.omega_e {
                Some(f) => TWO_PI * f,
                // the modulation frequency is irrelevant without a field
                None if area == 0.0 => TWO_PI,
                None => omega_for_effective_area(area, seff, 1.0)?,
            };
            let pulse = PulseSpec::de(area, omega_e).with_phase(a.phase).with_mixing_angle(a.mixing_angle);
            let p = SystemParams::new(TWO_PI * a.detuning.unwrap_or(0.0), delta, pulse)?;
            Ok((p, omega_e))
        }
        SchemeArg::Ae => {
            if a.omega_e.is_some() {
                return Err(usage("--omega-e applies to the DE scheme only"));
            }
            if a.seff_pi.is_some() && a.detuning.is_some() {
                return Err(usage("--seff-pi and --detuning both fix the AE detuning; give one"));
            }
            let detuning = match a.detuning {
                Some(d) => TWO_PI * d,
                None if area == 0.0 => TWO_PI,
                None => omega_for_effective_area(area, seff, 1.0)?,
            };
            let p = SystemParams::new(detuning, delta, PulseSpec::ae(area))?;
            Ok((p, detuning))
        }
    }
}

pub fn dynamics(a: &DynamicsArgs, g: &GlobalArgs, out: &mut Output) -> Result<Value, CliError> {
    if a.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let (p, freq) = dynamics_params(a)?;
    let (t0, t1) = p.window();
    let opts = g.propagation().with_samples(a.samples);
    let traj = propagate(&p, &StateVector::basis(Level::Plus), t0, t1, &opts)?;

    let mut pulse_rows = Vec::with_capacity(a.samples + 1);
    for &t in traj.times() {
        let (wp, ws) = rabi_pair(t, &p.pulse)?;
        pulse_rows.push(vec![t, wp, ws]);
    }
    out.table("dynamics_pulse", &["t", "omega_p", "omega_s"], &pulse_rows)?;

    let traj_rows: Vec<Vec<f64>> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| {
            let [c1, c0, cm1] = s.amplitudes();
            let [p1, p0, pm1] = s.populations();
            vec![t, c1.re, c1.im, c0.re, c0.im, cm1.re, cm1.im, p1, p0, pm1]
        })
        .collect();
    let header = ["t", "re_c1", "im_c1", "re_c0", "im_c0", "re_cm1", "im_cm1", "p1", "p0", "pm1"];
    out.table("dynamics_trajectory", &header, &traj_rows)?;

    let [p1, p0, pm1] = traj.final_state().populations();
    let label = if a.scheme == SchemeArg::De { "omega_e" } else { "Delta" };
    println!("{label}/2pi * t_p = {:.6}", freq / TWO_PI);
    println!("final populations: P(+1) = {p1:.6}  P(0) = {p0:.3e}  P(-1) = {pm1:.6}");
    println!("max norm drift {:.2e}, {} steps", traj.max_norm_drift(), traj.steps);
    Ok(json!({
        "args": to_value(a),
        "resolved": { "frequency_tp": freq / TWO_PI, "pulse": to_value(&p.pulse) },
        "final_populations": [p1, p0, pm1],
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct MapArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::De)]
    pub scheme: SchemeArg,

    /// Smallest envelope area S/pi.
    #[arg(long, default_value_t = 4.0)]
    pub area_min_pi: f64,

    /// Largest envelope area S/pi.
    #[arg(long, default_value_t = 12.0)]
    pub area_max_pi: f64,

    /// Area grid points (default 20, 80 with --fine).
    #[arg(long)]
    pub area_points: Option<usize>,

    /// Lowest frequency (omega_e/2pi) t_p for DE or (Delta/2pi) t_p for AE.
    #[arg(long, default_value_t = 0.5)]
    pub freq_min: f64,

    /// Highest frequency, same units as --freq-min.
    #[arg(long, default_value_t = 8.0)]
    pub freq_max: f64,

    /// Frequency grid points (default 20, 80 with --fine).
    #[arg(long)]
    pub freq_points: Option<usize>,

    /// Also write time-averaged and final |0> populations on the same grid.
    #[arg(long)]
    pub populations: bool,

    /// Publication density grid (80 x 80). Takes tens of minutes on one core.
    #[arg(long)]
    pub fine: bool,
}

pub fn infidelity_map(a: &MapArgs, g: &GlobalArgs, out: &mut Output) -> Result<Value, CliError> {
    check_range("area", a.area_min_pi, a.area_max_pi)?;
    check_range("frequency", a.freq_min, a.freq_max)?;
    let default_points = if a.fine { 80 } else { 20 };
    let areas = linspace(a.area_min_pi * PI, a.area_max_pi * PI, a.area_points.unwrap_or(default_points));
    let freqs = linspace(TWO_PI * a.freq_min, TWO_PI * a.freq_max, a.freq_points.unwrap_or(default_points));
    if areas.is_empty() || freqs.is_empty() {
        return Err(usage("grid has zero size"));
    }
    let scheme: Scheme = a.scheme.into();
    let map = pi_pulse_infidelity_map(scheme, &areas, &freqs, a.populations, &g.propagation())?;
    let params = to_value(a);
    let stem = format!("map_{}", scheme.name());
    out.grid(&format!("{stem}_infidelity"), &map.infidelity, "infidelity_map", scheme.name(), "pi_infidelity", &params)?;
    if let (Some(avg), Some(fin)) = (&map.avg_p0, &map.final_p0) {
        out.grid(&format!("{stem}_avg_p0"), avg, "infidelity_map", scheme.name(), "avg_p0", &params)?;
        out.grid(&format!("{stem}_final_p0"), fin, "infidelity_map", scheme.name(), "final_p0", &params)?;
    }

    let ridge = ridge_minima(&map.infidelity);
    let rows: Vec<Vec<f64>> = ridge.iter().map(|r| vec![r.row_value, r.col_value, r.value]).collect();
    let col_name = map.infidelity.cols.name.clone();
    out.table(&format!("{stem}_ridge"), &["area_pi", &col_name, "infidelity"], &rows)?;
    let s2: Vec<f64> = ridge.iter().map(|r| r.row_value * r.row_value).collect();
    let knob: Vec<f64> = ridge.iter().map(|r| r.col_value).collect();
    let rho = if ridge.len() >= 2 { spearman(&s2, &knob) } else { f64::NAN };
    println!("{} ridge points; Spearman(S^2, {col_name}) = {rho:.4}", ridge.len());
    Ok(json!({ "args": params, "ridge_points": ridge.len(), "ridge_spearman": rho }))
}

#[derive(Args, Debug, Serialize)]
pub struct RobustnessArgs {
    /// Envelope areas S/pi, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0])]
    pub areas_pi: Vec<f64>,

    /// Infidelity threshold defining the detuning window.
    #[arg(long, default_value_t = 1e-4)]
    pub threshold: f64,

    /// Largest relative detuning searched for a window edge, (Delta/2pi) t_p.
    #[arg(long, default_value_t = 8.0)]
    pub max_relative: f64,

    /// Half range of the written curves, (Delta/2pi) t_p. Defaults to twice
    /// the DE window width.
    #[arg(long)]
    pub span: Option<f64>,

    /// Points per curve (default 201, 801 with --fine).
    #[arg(long)]
    pub curve_points: Option<usize>,

    /// Denser curves.
    #[arg(long)]
    pub fine: bool,
}

#[derive(Serialize)]
struct WindowSummary {
    reference_tp: f64,
    infidelity_at_reference: f64,
    lo_tp: f64,
    hi_tp: f64,
    width_tp: f64,
    clipped: bool,
}

impl From<&DetuningWindow> for WindowSummary {
    fn from(w: &DetuningWindow) -> Self {
        WindowSummary {
            reference_tp: w.reference / TWO_PI,
            infidelity_at_reference: w.infidelity_at_reference,
            lo_tp: w.lo / TWO_PI,
            hi_tp: w.hi / TWO_PI,
            width_tp: w.width / TWO_PI,
            clipped: w.clipped,
        }
    }
}

#[derive(Serialize)]
struct AreaSummary {
    area_pi: f64,
    threshold: f64,
    de: WindowSummary,
    ae: WindowSummary,
    width_ratio: f64,
    curve: String,
}

pub fn robustness(a: &RobustnessArgs, g: &GlobalArgs, out: &mut Output) -> Result<Value, CliError> {
    if a.areas_pi.is_empty() || a.areas_pi.iter().any(|s| !(*s > 0.0)) {
        return Err(usage("--areas-pi needs positive areas"));
    }
    let points = a.curve_points.unwrap_or(if a.fine { 801 } else { 201 });
    if points < 2 {
        return Err(usage("--curve-points must be at least 2"));
    }
    let popts = g.propagation();
    let mut summaries = Vec::new();
    for &s_pi in &a.areas_pi {
        let area = s_pi * PI;
        let mut windows = Vec::new();
        for scheme in [Scheme::De, Scheme::Ae] {
            let reference = optimize_reference(scheme, area, &popts)?.x;
            let opts = WindowOptions {
                threshold: a.threshold,
                max_relative: TWO_PI * a.max_relative,
                reference: Some(reference),
                propagation: popts.clone(),
                ..Default::default()
            };
            windows.push(detuning_window(scheme, area, &opts)?);
        }
        let (de, ae) = (windows[0], windows[1]);
        let span = a.span.map(|s| TWO_PI * s).unwrap_or(2.0 * de.width);
        let rel = linspace(-span, span, points);
        let de_curve = infidelity_curve(Scheme::De, area, de.reference, &rel, &popts)?;
        let ae_curve = infidelity_curve(Scheme::Ae, area, ae.reference, &rel, &popts)?;
        let rows: Vec<Vec<f64>> = (0..rel.len()).map(|k| vec![rel[k] / TWO_PI, de_curve[k], ae_curve[k]]).collect();
        let stem = format!("robustness_{}pi", fmt_num(s_pi));
        out.table(&stem, &["relative_detuning_tp", "de_infidelity", "ae_infidelity"], &rows)?;
        let ratio = de.width / ae.width;
        println!(
            "S = {s_pi} pi: DE window {:.4}, AE window {:.4} (Delta/2pi) t_p, ratio {ratio:.3}{}",
            de.width / TWO_PI,
            ae.width / TWO_PI,
            if de.clipped || ae.clipped { " (clipped at --max-relative)" } else { "" }
        );
        summaries.push(AreaSummary {
            area_pi: s_pi,
            threshold: a.threshold,
            de: (&de).into(),
            ae: (&ae).into(),
            width_ratio: ratio,
            curve: stem,
        });
    }
    out.json("robustness_summary", &summaries)?;
    Ok(json!({ "args": to_value(a), "ratios": summaries.iter().map(|s| s.width_ratio).collect::<Vec<_>>() }))
}

/// `10` for whole numbers, `2.5` otherwise; used in file names.
fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x}").replace('.', "p")
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RamseyArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::De)]
    pub scheme: SchemeArg,

    /// Modulation frequency (omega_e/2pi) t_p. DE only.
    #[arg(long, default_value_t = 10.0)]
    pub omega_e: f64,

    /// Free evolution time between the pulses, in t_p.
    #[arg(long, default_value_t = RamseyConfig::DEFAULT_TAU)]
    pub tau: f64,

    /// Periods of delta*tau covered by each fringe.
    #[arg(long, default_value_t = 2.0)]
    pub periods: f64,

    /// Samples per fringe; at least 32 per period.
    #[arg(long, default_value_t = 64)]
    pub scan_points: usize,

    /// Fringe to write, as S/pi:(Delta/2pi)t_p. Repeat for several. Defaults to
    /// 10:0 and 5:20 for DE, 10:10 and 5:2.5 for AE.
    #[arg(long = "fringe")]
    pub fringes: Vec<String>,

    /// Smallest map area S/pi.
    #[arg(long, default_value_t = 1.0)]
    pub area_min_pi: f64,

    /// Largest map area S/pi.
    #[arg(long, default_value_t = 15.0)]
    pub area_max_pi: f64,

    /// Map area points (default 15, 57 with --fine).
    #[arg(long)]
    pub area_points: Option<usize>,

    /// Smallest map detuning (Delta/2pi) t_p.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning_min: f64,

    /// Largest map detuning (Delta/2pi) t_p.
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub detuning_max: f64,

    /// Map detuning points (default 16, 61 with --fine).
    #[arg(long)]
    pub detuning_points: Option<usize>,

    /// Only write the fringes.
    #[arg(long)]
    pub skip_maps: bool,

    /// Denser maps. About an hour on one core.
    #[arg(long)]
    pub fine: bool,
}

impl RamseyArgs {
    fn template(&self, area: f64) -> PulseSpec {
        match self.scheme {
            SchemeArg::De => PulseSpec::de(area, TWO_PI * self.omega_e),
            SchemeArg::Ae => PulseSpec::ae(area),
        }
    }

    fn scan(&self) -> Vec<f64> {
        let n = self.scan_points;
        let span = TWO_PI * self.periods;
        (0..n).map(|k| span * k as f64 / n as f64).collect()
    }

    fn fringe_pairs(&self) -> Result<Vec<(f64, f64)>, CliError> {
        let defaults: &[&str] = match self.scheme {
            SchemeArg::De => &["10:0", "5:20"],
            SchemeArg::Ae => &["10:10", "5:2.5"],
        };
        let given: Vec<&str> = if self.fringes.is_empty() { defaults.to_vec() } else { self.fringes.iter().map(|s| s.as_str()).collect() };
        given
            .iter()
            .map(|s| {
                let (a, d) = s.split_once(':').ok_or_else(|| usage(format!("--fringe {s:?}: expected S_PI:DELTA_TP")))?;
                let a: f64 = a.trim().parse().map_err(|_| usage(format!("--fringe {s:?}: bad area")))?;
                let d: f64 = d.trim().parse().map_err(|_| usage(format!("--fringe {s:?}: bad detuning")))?;
                Ok((a, d))
            })
            .collect()
    }
}

#[derive(Serialize)]
struct FringeSummary {
    file: String,
    area_pi: f64,
    detuning_tp: f64,
    contrast: f64,
    offset: Option<f64>,
    phase_shift: Option<f64>,
    relative_phase: Option<f64>,
    residual: Option<f64>,
}

pub fn ramsey(a: &RamseyArgs, g: &GlobalArgs, out: &mut Output) -> Result<Value, CliError> {
    let scan = a.scan();
    let opts = g.propagation();
    let scheme: Scheme = a.scheme.into();
    let mut fringes = Vec::new();
    for (k, (s_pi, d)) in a.fringe_pairs()?.into_iter().enumerate() {
        let cfg = RamseyConfig { pulse: a.template(s_pi * PI), detuning: TWO_PI * d, tau: a.tau, phase_scan: scan.clone() };
        let fringe = ramsey_signal(&cfg, &opts)?;
        let fit = match fringe.fit() {
            Ok(f) => Some(f),
            Err(Error::DegenerateFringe(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let rows: Vec<Vec<f64>> = fringe
            .samples
            .iter()
            .map(|&(x, y)| vec![x, y, fit.as_ref().map_or(f64::NAN, |f| f.normalize(y))])
            .collect();
        let stem = format!("ramsey_{}_fringe_{k}", scheme.name());
        out.table(&stem, &["delta_tau", "signal", "normalized"], &rows)?;
        let contrast = fit.as_ref().map_or(0.0, |f| f.contrast);
        let rel = fit.as_ref().map(RamseyFringe::relative_phase);
        println!(
            "fringe {k}: S = {s_pi} pi, Delta/2pi t_p = {d}: contrast {contrast:.4}, phase shift {}",
            rel.map_or("undefined".to_string(), |r| format!("{r:.3e} rad"))
        );
        fringes.push(FringeSummary {
            file: stem,
            area_pi: s_pi,
            detuning_tp: d,
            contrast,
            offset: fit.as_ref().map(|f| f.offset),
            phase_shift: fit.as_ref().map(|f| f.phase_shift),
            relative_phase: rel,
            residual: fit.as_ref().map(|f| f.residual),
        });
    }
    out.json(&format!("ramsey_{}_fringes", scheme.name()), &fringes)?;

    let params = to_value(a);
    if !a.skip_maps {
        check_range("area", a.area_min_pi, a.area_max_pi)?;
        check_range("detuning", a.detuning_min, a.detuning_max)?;
        let areas = linspace(a.area_min_pi * PI, a.area_max_pi * PI, a.area_points.unwrap_or(if a.fine { 57 } else { 15 }));
        let dets =
            linspace(TWO_PI * a.detuning_min, TWO_PI * a.detuning_max, a.detuning_points.unwrap_or(if a.fine { 61 } else { 16 }));
        if areas.is_empty() || dets.is_empty() {
            return Err(usage("map grid has zero size"));
        }
        let maps = ramsey_maps(&a.template(PI), &areas, &dets, a.tau, &scan, &opts)?;
        let stem = format!("ramsey_{}", scheme.name());
        out.grid(&format!("{stem}_contrast"), &maps.contrast, "ramsey_map", scheme.name(), "contrast", &params)?;
        out.grid(&format!("{stem}_phase_shift"), &maps.phase_shift, "ramsey_map", scheme.name(), "phase_shift_rad", &params)?;
        let c_max = maps.contrast.values.iter().cloned().fold(0.0, f64::max);
        println!("maps: {} x {}, max contrast {c_max:.4}", areas.len(), dets.len());
    }
    Ok(json!({ "args": params }))
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_knob(s: &str) -> Result<Knob, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::De)]
    pub scheme: SchemeArg,

    /// pi-infidelity, pi-half-infidelity, final-p0, avg-p0 or final-pm1.
    #[arg(long, value_parser = parse_metric, default_value = "pi-infidelity")]
    pub metric: Metric,

    /// Scanned parameter: omega-e, detuning, two-photon-detuning (all in
    /// (omega/2pi) t_p), phase or mixing-angle (rad).
    #[arg(long, value_parser = parse_knob, default_value = "omega-e")]
    pub knob: Knob,

    /// First knob value, in the knob's units.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub knob_min: f64,

    /// Last knob value, in the knob's units.
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub knob_max: f64,

    /// Knob grid points.
    #[arg(long, default_value_t = 16)]
    pub knob_points: usize,

    /// Smallest envelope area S/pi.
    #[arg(long, default_value_t = 4.0)]
    pub area_min_pi: f64,

    /// Largest envelope area S/pi.
    #[arg(long, default_value_t = 12.0)]
    pub area_max_pi: f64,

    /// Area grid points.
    #[arg(long, default_value_t = 9)]
    pub area_points: usize,

    /// Base modulation frequency (omega_e/2pi) t_p. DE only.
    #[arg(long, default_value_t = 5.0)]
    pub omega_e: f64,

    /// Base single-photon detuning (Delta/2pi) t_p.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,

    /// Base two-photon detuning (delta/2pi) t_p.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub two_photon_detuning: f64,

    /// Base relative phase phi in rad. DE only.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase: f64,

    /// Base mixing angle alpha in rad. DE only.
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub mixing_angle: f64,

    /// Four times the default grid density in each direction.
    #[arg(long)]
    pub fine: bool,
}

pub fn sweep(a: &SweepArgs, g: &GlobalArgs, out: &mut Output) -> Result<Value, CliError> {
    check_range("area", a.area_min_pi, a.area_max_pi)?;
    check_range("knob", a.knob_min, a.knob_max)?;
    let scale = if a.fine { 4 } else { 1 };
    let areas = linspace(a.area_min_pi * PI, a.area_max_pi * PI, a.area_points * scale);
    let to_natural = 1.0 / a.knob.display_scale();
    let knobs = linspace(a.knob_min * to_natural, a.knob_max * to_natural, a.knob_points * scale);
    if areas.is_empty() || knobs.is_empty() {
        return Err(usage("grid has zero size"));
    }
    let pulse = match a.scheme {
        SchemeArg::De => PulseSpec::de(PI, TWO_PI * a.omega_e).with_phase(a.phase).with_mixing_angle(a.mixing_angle),
        SchemeArg::Ae => {
            if matches!(a.knob, Knob::OmegaE | Knob::Phase | Knob::MixingAngle) {
                return Err(usage(format!("knob {} does not apply to the AE scheme", a.knob.name())));
            }
            PulseSpec::ae(PI)
        }
    };
    let base = SystemParams::new(TWO_PI * a.detuning, TWO_PI * a.two_photon_detuning, pulse)?;
    let grid = run_sweep(&base, &areas, a.knob, &knobs, a.metric, &g.propagation())?;
    let scheme: Scheme = a.scheme.into();
    let params = to_value(a);
    let stem = format!("sweep_{}_{}_{}", scheme.name(), a.metric.name(), a.knob.name());
    out.grid(&stem, &grid, "sweep", scheme.name(), a.metric.name(), &params)?;
    let (lo, hi) = grid.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    println!("{} x {} grid, {} in [{lo:.3e}, {hi:.3e}]", areas.len(), knobs.len(), a.metric.name());
    Ok(json!({ "args": params }))
}
