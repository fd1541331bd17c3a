//! On-disk formats shared by the CLI, generator, and benchmark: matrix CSV,
//! a packed little-endian binary variant, score files, JSON specs/reports.
//!
//! All decimal output uses locale-independent scientific notation with 17
//! significant digits, which round-trips 64-bit floats exactly.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{DatasetSpec, ProcessCurveDataset};
use crate::metrics::{auc, stauc, tauc, GroundTruth, IntegrationRule, ScoreSeries};

/// Magic bytes opening every packed matrix file.
pub const PACKED_MAGIC: &[u8; 8] = b"DRIFTBIN";
/// Current packed-format version.
pub const PACKED_VERSION: u32 = 1;

/// Format a float with 17 significant digits, locale-independent.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path_str(path), e))
}

/// How matrices are stored on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    /// Comma-separated decimals, one curve per line, no header.
    Csv,
    /// `DRIFTBIN` header followed by row-major little-endian 64-bit floats.
    Packed,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Packed => "bin",
        }
    }
}

/// Write a matrix as comma-separated decimals, one row per line.
pub fn write_matrix_csv(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let mut out = String::with_capacity(matrix.len() * 25 + matrix.nrows());
    for row in matrix.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_f64(*v));
        }
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

/// Read a matrix written by [`write_matrix_csv`]; rows must be rectangular
/// and every value finite.
pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = read_to_string(path)?;
    let mut flat: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let start = flat.len();
        for field in line.split(',') {
            let v: f64 = field.parse().map_err(|e| {
                Error::malformed(path_str(path), format!("line {}: {e}", i + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::malformed(
                    path_str(path),
                    format!("line {}: non-finite value {v}", i + 1),
                ));
            }
            flat.push(v);
        }
        let this_width = flat.len() - start;
        match width {
            None => width = Some(this_width),
            Some(w) if w == this_width => {}
            Some(w) => {
                return Err(Error::malformed(
                    path_str(path),
                    format!("line {}: expected {w} columns, got {this_width}", i + 1),
                ))
            }
        }
        rows += 1;
    }
    let width = width.ok_or_else(|| Error::malformed(path_str(path), "no rows"))?;
    Array2::from_shape_vec((rows, width), flat)
        .map_err(|e| Error::malformed(path_str(path), e.to_string()))
}

/// Write a matrix in the packed binary format: magic, version, row and
/// column counts (u32 little-endian), then row-major f64 values.
pub fn write_matrix_packed(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let (rows, cols) = matrix.dim();
    if rows > u32::MAX as usize || cols > u32::MAX as usize {
        return Err(Error::config("matrix too large for the packed format"));
    }
    let mut buf = Vec::with_capacity(20 + matrix.len() * 8);
    buf.extend_from_slice(PACKED_MAGIC);
    buf.extend_from_slice(&PACKED_VERSION.to_le_bytes());
    buf.extend_from_slice(&(rows as u32).to_le_bytes());
    buf.extend_from_slice(&(cols as u32).to_le_bytes());
    for row in matrix.rows() {
        for v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    write_bytes(path, &buf)
}

/// Read a matrix written by [`write_matrix_packed`].
pub fn read_matrix_packed(path: &Path) -> Result<Array2<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path_str(path), e))?;
    if bytes.len() < 20 {
        return Err(Error::malformed(path_str(path), "truncated header"));
    }
    if &bytes[..8] != PACKED_MAGIC {
        return Err(Error::malformed(path_str(path), "bad magic bytes"));
    }
    let u32_at = |offset: usize| {
        u32::from_le_bytes(bytes[offset..offset + 4].try_into().expect("4 bytes"))
    };
    let version = u32_at(8);
    if version != PACKED_VERSION {
        return Err(Error::malformed(
            path_str(path),
            format!("unsupported version {version}"),
        ));
    }
    let rows = u32_at(12) as usize;
    let cols = u32_at(16) as usize;
    let expected = 20 + rows.checked_mul(cols).and_then(|n| n.checked_mul(8)).ok_or_else(
        || Error::malformed(path_str(path), "size overflow"),
    )?;
    if bytes.len() != expected {
        return Err(Error::malformed(
            path_str(path),
            format!("expected {expected} bytes, got {}", bytes.len()),
        ));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for chunk in bytes[20..].chunks_exact(8) {
        let v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        if !v.is_finite() {
            return Err(Error::malformed(path_str(path), "non-finite value"));
        }
        flat.push(v);
    }
    Array2::from_shape_vec((rows, cols), flat)
        .map_err(|e| Error::malformed(path_str(path), e.to_string()))
}

fn write_matrix(path: &Path, matrix: &Array2<f64>, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Csv => write_matrix_csv(path, matrix),
        MatrixFormat::Packed => write_matrix_packed(path, matrix),
    }
}

fn read_matrix_auto(dir: &Path, stem: &str) -> Result<Array2<f64>> {
    let csv = dir.join(format!("{stem}.csv"));
    if csv.is_file() {
        return read_matrix_csv(&csv);
    }
    let bin = dir.join(format!("{stem}.bin"));
    if bin.is_file() {
        return read_matrix_packed(&bin);
    }
    Err(Error::malformed(
        path_str(dir),
        format!("missing {stem}.csv / {stem}.bin"),
    ))
}

/// Serialize a value as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::malformed(path_str(path), e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Parse a JSON file into any deserializable value.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::malformed(path_str(path), e.to_string()))
}

/// Write one score per line.
pub fn write_scores(path: &Path, scores: &ScoreSeries) -> Result<()> {
    let mut out = String::with_capacity(scores.len() * 25);
    for v in scores.values() {
        out.push_str(&format_f64(*v));
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

/// Read a score file written by [`write_scores`].
pub fn read_scores(path: &Path) -> Result<ScoreSeries> {
    let text = read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        values.push(line.parse::<f64>().map_err(|e| {
            Error::malformed(path_str(path), format!("line {}: {e}", i + 1))
        })?);
    }
    ScoreSeries::new(values).map_err(|e| Error::malformed(path_str(path), e.to_string()))
}

/// A dataset read back from its directory; the solver report is not
/// persisted and therefore not part of this view.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub curves: Array2<f64>,
    pub sample_grids: Array2<f64>,
    pub latents: Array2<f64>,
    pub ground_truth: GroundTruth,
    pub spec: DatasetSpec,
}

/// Write the dataset directory: curves, grid, and latents matrices in the
/// chosen format plus `ground_truth.json` and `spec.json`.
pub fn write_dataset(dir: &Path, data: &ProcessCurveDataset, format: MatrixFormat) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(path_str(dir), e))?;
    let ext = format.extension();
    write_matrix(&dir.join(format!("curves.{ext}")), &data.curves, format)?;
    write_matrix(&dir.join(format!("grid.{ext}")), &data.sample_grids, format)?;
    write_matrix(&dir.join(format!("latents.{ext}")), &data.latents, format)?;
    write_json(&dir.join("ground_truth.json"), &data.ground_truth)?;
    write_json(&dir.join("spec.json"), &data.spec)
}

/// Read a dataset directory written by [`write_dataset`], validating that
/// the pieces agree on the execution count.
pub fn read_dataset(dir: &Path) -> Result<LoadedDataset> {
    let curves = read_matrix_auto(dir, "curves")?;
    let sample_grids = read_matrix_auto(dir, "grid")?;
    let latents = read_matrix_auto(dir, "latents")?;
    let ground_truth: GroundTruth = read_json(&dir.join("ground_truth.json"))?;
    let spec: DatasetSpec = read_json(&dir.join("spec.json"))?;
    if curves.dim() != sample_grids.dim() {
        return Err(Error::malformed(
            path_str(dir),
            format!(
                "curves are {:?} but grid is {:?}",
                curves.dim(),
                sample_grids.dim()
            ),
        ));
    }
    if latents.nrows() != curves.nrows() {
        return Err(Error::malformed(
            path_str(dir),
            format!(
                "curves have {} rows but latents have {}",
                curves.nrows(),
                latents.nrows()
            ),
        ));
    }
    if ground_truth.executions() != curves.nrows() {
        return Err(Error::malformed(
            path_str(dir),
            format!(
                "ground truth covers {} executions but curves have {} rows",
                ground_truth.executions(),
                curves.nrows()
            ),
        ));
    }
    Ok(LoadedDataset {
        curves,
        sample_grids,
        latents,
        ground_truth,
        spec,
    })
}

/// The metric report emitted by the scoring command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub tauc_step: f64,
    pub tauc_trapezoid: f64,
    pub stauc_step: f64,
    pub stauc_trapezoid: f64,
    pub auc: f64,
}

impl MetricReport {
    /// Evaluate all five summary metrics for one score series.
    pub fn compute(gt: &GroundTruth, scores: &ScoreSeries) -> Result<Self> {
        Ok(MetricReport {
            tauc_step: tauc(gt, scores, IntegrationRule::Step)?,
            tauc_trapezoid: tauc(gt, scores, IntegrationRule::Trapezoid)?,
            stauc_step: stauc(gt, scores, IntegrationRule::Step)?,
            stauc_trapezoid: stauc(gt, scores, IntegrationRule::Trapezoid)?,
            auc: auc(gt, scores)?,
        })
    }
}

/// Render threshold-curve points (collapsed upper envelope) as CSV.
pub fn curve_points_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("fpr,value\n");
    for (fpr, value) in points {
        out.push_str(&format!("{},{}\n", format_f64(*fpr), format_f64(*value)));
    }
    out
}
