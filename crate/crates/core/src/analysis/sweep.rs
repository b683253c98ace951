use std::f64::consts::PI;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::metrics::{avg_intermediate_population, infidelity};
use super::robustness::pi_half_target;
use crate::algebra::{Level, StateVector};
use crate::dynamics::{propagate, PropagationOptions, SystemParams};
use crate::error::{Error, Result};
use crate::par_map;
use crate::pulses::{PulseSpec, Scheme};

/// Labeled axis. Values are stored in the units written to CSV: areas in
/// multiples of pi, frequencies in cycles per `t_p`, angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Row-major matrix over (rows x cols).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub rows: Axis,
    pub cols: Axis,
    pub values: Vec<f64>,
}

impl Grid2 {
    pub fn new(rows: Axis, cols: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows.values.len() * cols.values.len() {
            return Err(Error::validation(format!(
                "grid has {} values for {} x {} axes",
                values.len(),
                rows.values.len(),
                cols.values.len()
            )));
        }
        Ok(Grid2 { rows, cols, values })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.values.len(), self.cols.values.len())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols.values.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.cols.values.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// First row is the column axis, first column the row axis; the corner
    /// cell names both.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "{}\\{}", self.rows.name, self.cols.name)?;
        for c in &self.cols.values {
            write!(w, ",{c:?}")?;
        }
        writeln!(w)?;
        for (i, r) in self.rows.values.iter().enumerate() {
            write!(w, "{r:?}")?;
            for v in self.row(i) {
                write!(w, ",{v:?}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Parameter scanned along the columns of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    /// `w_e`; displayed as `(w_e/2pi) t_p`.
    OmegaE,
    /// `Delta`; displayed as `(Delta/2pi) t_p`.
    Detuning,
    /// `delta`; displayed as `(delta/2pi) t_p`.
    TwoPhotonDetuning,
    /// Relative Stokes phase in radians.
    Phase,
    /// Amplitude mixing angle in radians.
    MixingAngle,
}

impl Knob {
    pub fn name(self) -> &'static str {
        match self {
            Knob::OmegaE => "omega_e_tp",
            Knob::Detuning => "detuning_tp",
            Knob::TwoPhotonDetuning => "two_photon_detuning_tp",
            Knob::Phase => "phi_rad",
            Knob::MixingAngle => "alpha_rad",
        }
    }

    /// Factor from the natural value to the displayed one.
    pub fn display_scale(self) -> f64 {
        match self {
            Knob::OmegaE | Knob::Detuning | Knob::TwoPhotonDetuning => 1.0 / (2.0 * PI),
            Knob::Phase | Knob::MixingAngle => 1.0,
        }
    }

    pub fn apply(self, p: &SystemParams, value: f64) -> SystemParams {
        let mut q = *p;
        match self {
            Knob::OmegaE => q.pulse = q.pulse.with_omega_e(value),
            Knob::Detuning => q.detuning = value,
            Knob::TwoPhotonDetuning => q.two_photon_detuning = value,
            Knob::Phase => q.pulse = q.pulse.with_phase(value),
            Knob::MixingAngle => q.pulse = q.pulse.with_mixing_angle(value),
        }
        q
    }
}

impl FromStr for Knob {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_e" | "omega-e" => Ok(Knob::OmegaE),
            "detuning" => Ok(Knob::Detuning),
            "two_photon_detuning" | "two-photon-detuning" => Ok(Knob::TwoPhotonDetuning),
            "phase" | "phi" => Ok(Knob::Phase),
            "mixing_angle" | "mixing-angle" | "alpha" => Ok(Knob::MixingAngle),
            other => Err(Error::validation(format!("unknown knob '{other}'"))),
        }
    }
}

/// Scalar extracted from one propagation from `|+1>` over the pulse window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `1 - P_-1` at the end.
    PiInfidelity,
    /// Infidelity against the scheme's equal-superposition target.
    PiHalfInfidelity,
    FinalP0,
    /// Time-averaged `|c_0|^2` over `[-t_p/2, t_p/2]`.
    AvgP0,
    FinalPMinus,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::PiInfidelity => "pi_infidelity",
            Metric::PiHalfInfidelity => "pi_half_infidelity",
            Metric::FinalP0 => "final_p0",
            Metric::AvgP0 => "avg_p0",
            Metric::FinalPMinus => "final_pm1",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "pi_infidelity" | "infidelity" => Ok(Metric::PiInfidelity),
            "pi_half_infidelity" => Ok(Metric::PiHalfInfidelity),
            "final_p0" => Ok(Metric::FinalP0),
            "avg_p0" => Ok(Metric::AvgP0),
            "final_pm1" => Ok(Metric::FinalPMinus),
            other => Err(Error::validation(format!("unknown metric '{other}'"))),
        }
    }
}

/// Samples recorded when the time-averaged population is needed.
const AVG_SAMPLES: usize = 400;

struct PointResult {
    final_state: StateVector,
    avg_p0: Option<f64>,
}

fn run_point(p: &SystemParams, want_avg: bool, opts: &PropagationOptions) -> Result<PointResult> {
    let (t0, t1) = p.window();
    let samples = if want_avg { AVG_SAMPLES } else { 1 };
    let traj = propagate(p, &StateVector::basis(Level::Plus), t0, t1, &PropagationOptions { samples, ..opts.clone() })?;
    let avg_p0 = if want_avg { Some(avg_intermediate_population(&traj, None)?) } else { None };
    Ok(PointResult { final_state: traj.final_state(), avg_p0 })
}

fn evaluate(metric: Metric, p: &SystemParams, r: &PointResult) -> f64 {
    let psi = &r.final_state;
    match metric {
        Metric::PiInfidelity => infidelity(psi, &StateVector::basis(Level::Minus)),
        Metric::PiHalfInfidelity => infidelity(psi, &pi_half_target(p.pulse.scheme, p.detuning)),
        Metric::FinalP0 => psi.population(Level::Zero),
        Metric::AvgP0 => r.avg_p0.expect("average requested"),
        Metric::FinalPMinus => psi.population(Level::Minus),
    }
}

fn area_axis(areas: &[f64]) -> Axis {
    Axis { name: "area_pi".into(), values: areas.iter().map(|s| s / PI).collect() }
}

fn knob_axis(knob: Knob, values: &[f64]) -> Axis {
    Axis { name: knob.name().into(), values: values.iter().map(|v| v * knob.display_scale()).collect() }
}

fn check_grid(areas: &[f64], knob_values: &[f64]) -> Result<()> {
    if areas.is_empty() || knob_values.is_empty() {
        return Err(Error::validation("sweep grid has zero size"));
    }
    Ok(())
}

/// Evaluates `metric` over areas (rows, radians) x knob values (columns,
/// natural units) starting from `base`.
pub fn sweep(
    base: &SystemParams,
    areas: &[f64],
    knob: Knob,
    knob_values: &[f64],
    metric: Metric,
    opts: &PropagationOptions,
) -> Result<Grid2> {
    check_grid(areas, knob_values)?;
    let points: Vec<(f64, f64)> = areas.iter().flat_map(|&s| knob_values.iter().map(move |&k| (s, k))).collect();
    let values = par_map(&points, |&(s, k)| {
        let p = knob.apply(&base.with_pulse(base.pulse.with_area(s)), k);
        p.validate()?;
        let r = run_point(&p, metric == Metric::AvgP0, opts)?;
        Ok(evaluate(metric, &p, &r))
    });
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Grid2::new(area_axis(areas), knob_axis(knob, knob_values), values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfidelityMap {
    pub scheme: Scheme,
    pub infidelity: Grid2,
    pub avg_p0: Option<Grid2>,
    pub final_p0: Option<Grid2>,
}

fn pi_params(scheme: Scheme, area: f64, knob: f64) -> Result<SystemParams> {
    match scheme {
        Scheme::De => SystemParams::new(0.0, 0.0, PulseSpec::de(area, knob)),
        Scheme::Ae => SystemParams::new(knob, 0.0, PulseSpec::ae(area)),
        Scheme::FourPulseTrain => Err(Error::UnsupportedScheme(scheme.name())),
    }
}

/// `pi`-pulse infidelity `1 - P_-1` over areas x knob, where the knob is
/// `w_e` for DE and `Delta` for AE. With `populations` the average and final
/// intermediate populations are returned on the same grid.
pub fn pi_pulse_infidelity_map(
    scheme: Scheme,
    areas: &[f64],
    knob_values: &[f64],
    populations: bool,
    opts: &PropagationOptions,
) -> Result<InfidelityMap> {
    check_grid(areas, knob_values)?;
    let knob = if scheme == Scheme::Ae { Knob::Detuning } else { Knob::OmegaE };
    let points: Vec<(f64, f64)> = areas.iter().flat_map(|&s| knob_values.iter().map(move |&k| (s, k))).collect();
    let results = par_map(&points, |&(s, k)| {
        let p = pi_params(scheme, s, k)?;
        let r = run_point(&p, populations, opts)?;
        Ok((evaluate(Metric::PiInfidelity, &p, &r), r.final_state.population(Level::Zero), r.avg_p0))
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = area_axis(areas);
    let cols = knob_axis(knob, knob_values);
    let infid = Grid2::new(rows.clone(), cols.clone(), results.iter().map(|r| r.0).collect())?;
    let (avg_p0, final_p0) = if populations {
        (
            Some(Grid2::new(rows.clone(), cols.clone(), results.iter().map(|r| r.2.unwrap_or(f64::NAN)).collect())?),
            Some(Grid2::new(rows, cols, results.iter().map(|r| r.1).collect())?),
        )
    } else {
        (None, None)
    };
    Ok(InfidelityMap { scheme, infidelity: infid, avg_p0, final_p0 })
}

/// Per-row minimum of a map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgePoint {
    pub row: usize,
    pub col: usize,
    pub row_value: f64,
    pub col_value: f64,
    pub value: f64,
}

/// For every row, the interior local minimum at the largest column index
/// (the first-order ridge of the effective-area law sits at the largest
/// knob, higher orders below it). Rows without an interior minimum fall
/// back to their global minimum.
pub fn ridge_minima(grid: &Grid2) -> Vec<RidgePoint> {
    let (nr, nc) = grid.shape();
    (0..nr)
        .map(|i| {
            let row = grid.row(i);
            let local = (1..nc.saturating_sub(1)).rev().find(|&j| row[j] <= row[j - 1] && row[j] <= row[j + 1]);
            let col = local.unwrap_or_else(|| {
                (0..nc).min_by(|&a, &b| row[a].total_cmp(&row[b])).expect("non-empty row")
            });
            RidgePoint {
                row: i,
                col,
                row_value: grid.rows.values[i],
                col_value: grid.cols.values[col],
                value: row[col],
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `y = A x^k` in log-log space.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<PowerLaw> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::validation("power-law fit needs two or more paired points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::validation("power-law fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&lx, &ly)?;
    Ok(PowerLaw { exponent: slope, prefactor: intercept.exp(), r_squared: r2 })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("linear fit needs distinct abscissae"));
    }
    let a = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((a, my - a * mx, r2))
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut j = k;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[k]] {
            j += 1;
        }
        let avg = 0.5 * (k + j) as f64 + 1.0;
        for &i in &idx[k..=j] {
            r[i] = avg;
        }
        k = j + 1;
    }
    r
}

/// Spearman rank correlation, ties sharing their average rank.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&ranks(xs), &ranks(ys))
}
