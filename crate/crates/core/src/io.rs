//! CSV and JSON artifacts. Every grid CSV gets a `.json` sidecar describing
//! its axes so downstream tools never guess units.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::Grid2;
use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::pulses::PulseSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisInfo {
    pub name: String,
    pub unit: String,
    pub min: f64,
    pub max: f64,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub csv: String,
    pub kind: String,
    pub scheme: String,
    pub metric: String,
    pub rows: AxisInfo,
    pub cols: AxisInfo,
    pub tolerances: serde_json::Value,
    pub parameters: serde_json::Value,
}

pub fn unit_for(axis: &str) -> &'static str {
    match axis {
        "area_pi" => "S/pi",
        "omega_e_tp" => "(omega_e/2pi) t_p",
        "detuning_tp" => "(Delta/2pi) t_p",
        "two_photon_detuning_tp" => "(delta/2pi) t_p",
        "phi_rad" | "alpha_rad" => "rad",
        _ => "",
    }
}

fn axis_info(axis: &crate::analysis::Axis) -> AxisInfo {
    let min = axis.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = axis.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    AxisInfo { name: axis.name.clone(), unit: unit_for(&axis.name).into(), min, max, len: axis.values.len() }
}

impl GridMetadata {
    pub fn for_grid(grid: &Grid2, csv: &str, kind: &str, scheme: &str, metric: &str) -> Self {
        GridMetadata {
            csv: csv.into(),
            kind: kind.into(),
            scheme: scheme.into(),
            metric: metric.into(),
            rows: axis_info(&grid.rows),
            cols: axis_info(&grid.cols),
            tolerances: serde_json::Value::Null,
            parameters: serde_json::Value::Null,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`; returns both paths.
pub fn write_grid(dir: &Path, stem: &str, grid: &Grid2, meta: &GridMetadata) -> Result<(PathBuf, PathBuf)> {
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    let mut w = create(&csv)?;
    grid.write_csv(&mut w)?;
    w.flush()?;
    write_json(&json, meta)?;
    Ok((csv, json))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = create(path)?;
    traj.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

/// `t,omega_p,omega_s` on `n + 1` equally spaced times across the window.
pub fn write_pulse_shape(path: &Path, spec: &PulseSpec, n: usize) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,omega_p,omega_s")?;
    let n = n.max(1);
    for k in 0..=n {
        let t = -spec.window + 2.0 * spec.window * k as f64 / n as f64;
        let (p, s) = crate::pulses::rabi_pair(t, spec)?;
        writeln!(w, "{t:?},{p:?},{s:?}")?;
    }
    w.flush()?;
    Ok(())
}

/// Generic CSV from a header and rows of numbers. Values use the shortest
/// representation that round-trips.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Axis;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("lambda-de-io-{}-{name}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn grid_and_sidecar() {
        let grid = Grid2::new(
            Axis { name: "area_pi".into(), values: vec![4.0, 8.0] },
            Axis { name: "omega_e_tp".into(), values: vec![1.0, 2.0, 3.0] },
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        )
        .unwrap();
        let dir = tmp("grid");
        let meta = GridMetadata::for_grid(&grid, "m.csv", "infidelity_map", "de", "pi_infidelity");
        let (csv, json) = write_grid(&dir, "m", &grid, &meta).unwrap();
        let text = std::fs::read_to_string(csv).unwrap();
        assert!(text.starts_with("area_pi\\omega_e_tp,1.0,2.0,3.0\n4.0,0.1,0.2,0.3\n"));
        let back: GridMetadata = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
        assert_eq!(back.rows.len, 2);
        assert_eq!(back.cols.unit, "(omega_e/2pi) t_p");
        assert_eq!(back.cols.max, 3.0);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn pulse_shape_file() {
        let dir = tmp("pulse");
        let path = dir.join("p.csv");
        write_pulse_shape(&path, &PulseSpec::de(10.0, 5.0), 10).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert_eq!(text.lines().next().unwrap(), "t,omega_p,omega_s");
        std::fs::remove_dir_all(dir).unwrap();
    }
}
