//! File formats: filter JSON, estimate-parameter JSON, sweep CSV.
//!
//! All writers go through a temp-file-plus-rename so partially written
//! files never appear under the target path. Coefficients round-trip
//! exactly (shortest-representation decimal serialization).

use crate::design::{DesignProblem, DesignResult, Engine};
use crate::error::{Error, Result};
use crate::estimate::EstimateParams;
use crate::fir::{FirFilter, LinearPhaseType};
use crate::pulses::PulseKind;
use crate::search::{SweepGrid, SweepMeta, SWEEP_SENTINEL};
use crate::BandSpec;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub const FILTER_SCHEMA_VERSION: u32 = 1;

/// On-disk form of a designed equalizer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterRecord {
    pub schema_version: u32,
    pub pulse: PulseKind,
    pub nb: u32,
    pub filter_type: LinearPhaseType,
    pub order: u32,
    pub bandwidth_over_pi: f64,
    #[serde(rename = "delay_K")]
    pub delay_k: f64,
    pub delta_achieved: f64,
    pub engine: Engine,
    pub coefficients: Vec<f64>,
}

impl FilterRecord {
    pub fn from_design(problem: &DesignProblem, result: &DesignResult) -> Self {
        Self {
            schema_version: FILTER_SCHEMA_VERSION,
            pulse: problem.kind(),
            nb: problem.band().nb(),
            filter_type: problem.filter_type(),
            order: result.filter.order(),
            bandwidth_over_pi: problem.band().bandwidth() / PI,
            delay_k: problem.delay().samples(),
            delta_achieved: result.delta,
            engine: result.engine,
            coefficients: result.filter.coefficients().to_vec(),
        }
    }

    /// Rebuilds the validated problem and filter from the record.
    pub fn restore(&self) -> Result<(DesignProblem, FirFilter)> {
        if self.schema_version != FILTER_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "unsupported filter schema version {}",
                self.schema_version
            )));
        }
        let band = BandSpec::new(self.nb, self.bandwidth_over_pi * PI)?;
        let problem = DesignProblem::new(self.pulse, band, self.filter_type, self.order)?;
        let filter = FirFilter::new(self.filter_type, self.coefficients.clone())?;
        if filter.order() != self.order {
            return Err(Error::Format(format!(
                "order field {} does not match {} coefficients",
                self.order,
                self.coefficients.len()
            )));
        }
        Ok((problem, filter))
    }
}

/// On-disk form of an estimate parameter set: the Table-style columns plus
/// provenance, with `eps_max` when known.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamsRecord {
    #[serde(flatten)]
    pub params: EstimateParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_max: Option<f64>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_filter(path: &Path) -> Result<FilterRecord> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn read_params(path: &Path) -> Result<ParamsRecord> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Sweep cache: a plain CSV with a mandatory header and one row per cell,
/// in row-major order. Failed cells leave `n_min` empty. The grid metadata
/// lives in a sidecar `<path>.meta.json`.
pub fn write_sweep(path: &Path, grid: &SweepGrid) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["B_over_pi", "delta", "n_min", "delta_achieved", "engine_iterations"])?;
    for (i, &b) in grid.b_values.iter().enumerate() {
        for (j, &delta) in grid.delta_values.iter().enumerate() {
            let idx = grid.idx(i, j);
            let n = grid.n_min[idx];
            let (n_s, d_s, it_s) = if n == SWEEP_SENTINEL {
                (String::new(), String::new(), String::new())
            } else {
                (
                    n.to_string(),
                    format_f64(grid.delta_achieved[idx]),
                    grid.iterations[idx].to_string(),
                )
            };
            w.write_record([
                format_f64(b / PI),
                format_f64(delta),
                n_s,
                d_s,
                it_s,
            ])?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv flush: {e}")))?;
    write_atomic(path, &bytes)?;
    write_json(&meta_path(path), &grid.meta)
}

/// Loads a sweep cache with its metadata sidecar. Rows are matched to the
/// axes recomputed from the data itself; cells absent from the file stay
/// sentinel.
pub fn read_sweep(path: &Path) -> Result<SweepGrid> {
    let meta: SweepMeta = {
        let bytes = std::fs::read(meta_path(path))?;
        serde_json::from_slice(&bytes)?
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;

    #[derive(Deserialize)]
    struct RowRec {
        #[serde(rename = "B_over_pi")]
        b_over_pi: f64,
        delta: f64,
        n_min: Option<i64>,
        delta_achieved: Option<f64>,
        engine_iterations: Option<u32>,
    }

    let mut rows: Vec<RowRec> = Vec::new();
    for rec in reader.deserialize() {
        rows.push(rec?);
    }
    if rows.is_empty() {
        return Err(Error::Format("sweep cache has no rows".into()));
    }

    // Recover the axes in file order (row-major: delta cycles fastest).
    let mut b_values: Vec<f64> = Vec::new();
    let mut delta_values: Vec<f64> = Vec::new();
    for r in &rows {
        let b = r.b_over_pi * PI;
        if b_values.last().is_none_or(|&last| !close(last, b)) {
            b_values.push(b);
        }
        if b_values.len() == 1 {
            delta_values.push(r.delta);
        }
    }
    let n_delta = delta_values.len();
    if n_delta == 0 || rows.len() != b_values.len() * n_delta {
        return Err(Error::Format(format!(
            "sweep cache is not a complete rectangle: {} rows for {}x{}",
            rows.len(),
            b_values.len(),
            n_delta
        )));
    }

    let cells = rows.len();
    let mut grid = SweepGrid {
        meta,
        b_values,
        delta_values,
        n_min: vec![SWEEP_SENTINEL; cells],
        delta_achieved: vec![f64::NAN; cells],
        iterations: vec![0; cells],
    };
    for (k, r) in rows.iter().enumerate() {
        if let Some(n) = r.n_min {
            grid.n_min[k] = n;
            grid.delta_achieved[k] = r.delta_achieved.unwrap_or(f64::NAN);
            grid.iterations[k] = r.engine_iterations.unwrap_or(0);
        }
    }
    Ok(grid)
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Shortest decimal representation that round-trips the exact f64.
fn format_f64(v: f64) -> String {
    let mut buf = ryu_format(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // serde_json's f64 formatting is shortest-round-trip; reuse it.
    serde_json::to_string(&v).unwrap_or_else(|_| v.to_string())
}

/// Writes through a temp file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(format!(".tmp.{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
