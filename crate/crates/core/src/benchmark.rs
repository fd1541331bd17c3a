//! The evaluation loop: presets × seeds × detectors, with per-run metrics,
//! per-detector aggregates, and TAUC-vs-AUC correlations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{self, DetectorSpec};
use crate::error::{Error, Result};
use crate::generator::{generate, preset, ProcessCurveDataset};
use crate::io::format_f64;
use crate::metrics::{auc, stauc, tauc, IntegrationRule};
use crate::plot;

/// One preset instantiation inside a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchDataset {
    /// Preset name, e.g. `dataset-1`.
    pub preset: String,
    /// Size multiplier applied to the preset's execution count.
    pub scale: f64,
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}

fn default_rules() -> Vec<IntegrationRule> {
    vec![IntegrationRule::Step, IntegrationRule::Trapezoid]
}

/// Full description of a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    /// Datasets to generate, one label per preset.
    pub datasets: Vec<BenchDataset>,
    /// Root seeds; every dataset is regenerated once per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Detectors evaluated on every (dataset, seed) pair.
    pub detectors: Vec<DetectorSpec>,
    /// Integration rules highlighted in the bar charts; the CSV always
    /// reports both.
    #[serde(default = "default_rules")]
    pub rules: Vec<IntegrationRule>,
    /// Where reports land when the caller does not override it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::config("benchmark needs at least one dataset"));
        }
        if self.detectors.is_empty() {
            return Err(Error::config("benchmark needs at least one detector"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("benchmark needs at least one seed"));
        }
        if self.rules.is_empty() {
            return Err(Error::config("benchmark needs at least one integration rule"));
        }
        for (i, a) in self.datasets.iter().enumerate() {
            for b in &self.datasets[..i] {
                if a.preset == b.preset {
                    return Err(Error::config(format!(
                        "duplicate dataset label '{}'",
                        a.preset
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Metrics of one (dataset, seed, detector) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub seed: u64,
    pub detector: String,
    pub tauc_step: f64,
    pub tauc_trap: f64,
    pub stauc_step: f64,
    pub stauc_trap: f64,
    pub auc: f64,
    /// Scoring plus metric time, excluding dataset generation.  Reported in
    /// timings.csv, never in results.csv, so the latter stays reproducible.
    pub wall_time_ms: u64,
}

/// Mean/standard deviation of every metric over the seed list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub detector: String,
    pub tauc_step_mean: f64,
    pub tauc_step_std: f64,
    pub tauc_trap_mean: f64,
    pub tauc_trap_std: f64,
    pub stauc_step_mean: f64,
    pub stauc_step_std: f64,
    pub stauc_trap_mean: f64,
    pub stauc_trap_std: f64,
    pub auc_mean: f64,
    pub auc_std: f64,
}

/// Score series kept for plotting: first seed of each (dataset, detector).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTrace {
    pub dataset: String,
    pub detector: String,
    pub scores: Vec<f64>,
    pub segments: Vec<(usize, usize)>,
}

/// Everything a benchmark run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    /// One row per (dataset, seed, detector), in spec order.
    pub rows: Vec<BenchRow>,
    /// One row per (dataset, detector).
    pub summaries: Vec<SummaryRow>,
    /// Pearson r between mean trapezoid TAUC and mean AUC across detectors,
    /// per dataset; `None` when undefined (too few detectors, zero variance).
    pub correlations: Vec<(String, Option<f64>)>,
    /// Per-dataset score traces for the report's trace plots.
    pub traces: Vec<ScoreTrace>,
    /// Integration rules the spec asked to highlight.
    pub rules: Vec<IntegrationRule>,
}

/// Worker budget from a `DRIFTLAB_WORKERS`-style value: positive integers
/// cap the pool, anything else falls back to the default (all cores).
pub fn worker_budget(raw: Option<&str>) -> Option<usize> {
    raw.and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let workers = worker_budget(std::env::var("DRIFTLAB_WORKERS").ok().as_deref());
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))
}

fn evaluate(
    dataset_label: &str,
    seed: u64,
    detector: &DetectorSpec,
    data: &ProcessCurveDataset,
    keep_trace: bool,
) -> Result<(BenchRow, Option<ScoreTrace>)> {
    let start = Instant::now();
    let scores = detectors::score(detector, data.curves.view(), data.sample_grids.view())?;
    let gt = &data.ground_truth;
    let row = BenchRow {
        dataset: dataset_label.to_string(),
        seed,
        detector: detector.to_string(),
        tauc_step: tauc(gt, &scores, IntegrationRule::Step)?,
        tauc_trap: tauc(gt, &scores, IntegrationRule::Trapezoid)?,
        stauc_step: stauc(gt, &scores, IntegrationRule::Step)?,
        stauc_trap: stauc(gt, &scores, IntegrationRule::Trapezoid)?,
        auc: auc(gt, &scores)?,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let trace = keep_trace.then(|| ScoreTrace {
        dataset: dataset_label.to_string(),
        detector: detector.to_string(),
        scores: scores.values().to_vec(),
        segments: gt.segments().to_vec(),
    });
    Ok((row, trace))
}

/// Run the full loop: every dataset is generated once per seed, then all
/// detectors score it concurrently (bounded by `DRIFTLAB_WORKERS`).
///
/// All triples are attempted; if any fail, the first failure is returned,
/// tagged with its (dataset, seed, detector) triple.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchResult> {
    spec.validate()?;
    let pool = thread_pool()?;
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let mut failures: Vec<Error> = Vec::new();

    for dataset in &spec.datasets {
        for (seed_idx, &seed) in spec.seeds.iter().enumerate() {
            let tag = |detector: String, e: Error| Error::BenchTriple {
                triple: format!("{}/seed {}/{}", dataset.preset, seed, detector),
                source: Box::new(e),
            };
            let data = match preset(&dataset.preset, dataset.scale, seed).and_then(|s| generate(&s))
            {
                Ok(data) => data,
                Err(e) => {
                    failures.push(tag("*".to_string(), e));
                    continue;
                }
            };
            let outcomes: Vec<Result<(BenchRow, Option<ScoreTrace>)>> = pool.install(|| {
                spec.detectors
                    .par_iter()
                    .map(|detector| {
                        evaluate(&dataset.preset, seed, detector, &data, seed_idx == 0)
                            .map_err(|e| tag(detector.to_string(), e))
                    })
                    .collect()
            });
            for outcome in outcomes {
                match outcome {
                    Ok((row, trace)) => {
                        rows.push(row);
                        traces.extend(trace);
                    }
                    Err(e) => failures.push(e),
                }
            }
        }
    }

    if let Some(first) = failures.into_iter().next() {
        return Err(first);
    }

    let summaries = summarize(spec, &rows);
    let mut result = BenchResult {
        rows,
        summaries,
        correlations: Vec::new(),
        traces,
        rules: spec.rules.clone(),
    };
    result.correlations = spec
        .datasets
        .iter()
        .map(|d| (d.preset.clone(), correlate(&result, &d.preset).ok()))
        .collect();
    Ok(result)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(spec: &BenchSpec, rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for dataset in &spec.datasets {
        for detector in &spec.detectors {
            let label = detector.to_string();
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.dataset == dataset.preset && r.detector == label)
                .collect();
            if group.is_empty() {
                continue;
            }
            let collect = |f: fn(&BenchRow) -> f64| -> Vec<f64> {
                group.iter().map(|r| f(r)).collect()
            };
            let (tauc_step_mean, tauc_step_std) = mean_std(&collect(|r| r.tauc_step));
            let (tauc_trap_mean, tauc_trap_std) = mean_std(&collect(|r| r.tauc_trap));
            let (stauc_step_mean, stauc_step_std) = mean_std(&collect(|r| r.stauc_step));
            let (stauc_trap_mean, stauc_trap_std) = mean_std(&collect(|r| r.stauc_trap));
            let (auc_mean, auc_std) = mean_std(&collect(|r| r.auc));
            out.push(SummaryRow {
                dataset: dataset.preset.clone(),
                detector: label,
                tauc_step_mean,
                tauc_step_std,
                tauc_trap_mean,
                tauc_trap_std,
                stauc_step_mean,
                stauc_step_std,
                stauc_trap_mean,
                stauc_trap_std,
                auc_mean,
                auc_std,
            });
        }
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "zero variance in one coordinate".to_string(),
        ));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Pearson correlation between per-detector mean trapezoid TAUC and mean
/// AUC on one dataset.  Needs at least three detectors and nonzero variance
/// in both coordinates.
pub fn correlate(result: &BenchResult, dataset: &str) -> Result<f64> {
    let mut order: Vec<&str> = Vec::new();
    let mut sums: Vec<(f64, f64, usize)> = Vec::new();
    for row in result.rows.iter().filter(|r| r.dataset == dataset) {
        let idx = match order.iter().position(|d| *d == row.detector) {
            Some(i) => i,
            None => {
                order.push(&row.detector);
                sums.push((0.0, 0.0, 0));
                order.len() - 1
            }
        };
        sums[idx].0 += row.tauc_trap;
        sums[idx].1 += row.auc;
        sums[idx].2 += 1;
    }
    if order.len() < 3 {
        return Err(Error::UndefinedCorrelation(format!(
            "dataset '{dataset}' has {} detectors, need at least 3",
            order.len()
        )));
    }
    let xs: Vec<f64> = sums.iter().map(|(t, _, n)| t / *n as f64).collect();
    let ys: Vec<f64> = sums.iter().map(|(_, a, n)| a / *n as f64).collect();
    pearson(&xs, &ys)
}

pub const RESULTS_CSV_HEADER: &str =
    "dataset,seed,detector,tauc_step,tauc_trap,stauc_step,stauc_trap,auc";

/// Render all result rows as CSV (header included).
///
/// Wall time is deliberately left out: results.csv holds only quantities
/// that are a pure function of the spec, so rerunning an identical spec
/// reproduces the file byte for byte.  Timings land in timings.csv.
pub fn results_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.dataset,
            r.seed,
            r.detector,
            format_f64(r.tauc_step),
            format_f64(r.tauc_trap),
            format_f64(r.stauc_step),
            format_f64(r.stauc_trap),
            format_f64(r.auc),
        ));
    }
    out
}

fn timings_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("dataset,seed,detector,wall_time_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.dataset, r.seed, r.detector, r.wall_time_ms
        ));
    }
    out
}

/// Parse a results CSV produced by [`results_to_csv`] back into rows.
///
/// The file carries no timings (see [`results_to_csv`]), so `wall_time_ms`
/// comes back as 0.
pub fn parse_results_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim_end() == RESULTS_CSV_HEADER => {}
        other => {
            return Err(Error::malformed(
                "results.csv",
                format!("unexpected header {other:?}"),
            ))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::malformed(
                "results.csv",
                format!("line {}: expected 8 fields, got {}", idx + 2, fields.len()),
            ));
        }
        let float = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|e| {
                Error::malformed("results.csv", format!("line {}: {e}", idx + 2))
            })
        };
        rows.push(BenchRow {
            dataset: fields[0].to_string(),
            seed: fields[1]
                .parse()
                .map_err(|e| Error::malformed("results.csv", format!("line {}: {e}", idx + 2)))?,
            detector: fields[2].to_string(),
            tauc_step: float(3)?,
            tauc_trap: float(4)?,
            stauc_step: float(5)?,
            stauc_trap: float(6)?,
            auc: float(7)?,
            wall_time_ms: 0,
        });
    }
    Ok(rows)
}

fn summary_to_csv(summaries: &[SummaryRow]) -> String {
    let mut out = String::from(
        "dataset,detector,tauc_step_mean,tauc_step_std,tauc_trap_mean,tauc_trap_std,\
         stauc_step_mean,stauc_step_std,stauc_trap_mean,stauc_trap_std,auc_mean,auc_std\n",
    );
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.dataset,
            s.detector,
            format_f64(s.tauc_step_mean),
            format_f64(s.tauc_step_std),
            format_f64(s.tauc_trap_mean),
            format_f64(s.tauc_trap_std),
            format_f64(s.stauc_step_mean),
            format_f64(s.stauc_step_std),
            format_f64(s.stauc_trap_mean),
            format_f64(s.stauc_trap_std),
            format_f64(s.auc_mean),
            format_f64(s.auc_std),
        ));
    }
    out
}

fn correlations_to_csv(correlations: &[(String, Option<f64>)]) -> String {
    let mut out = String::from("dataset,tauc_auc_pearson\n");
    for (dataset, r) in correlations {
        match r {
            Some(v) => out.push_str(&format!("{dataset},{}\n", format_f64(*v))),
            None => out.push_str(&format!("{dataset},\n")),
        }
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Write results.csv, timings.csv, summary.csv, correlations.csv, and
/// per-dataset bar chart and score-trace SVGs into `dir` (created if
/// missing).
pub fn emit_report(result: &BenchResult, dir: &Path) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::EmptyBenchResult(
            "no rows to report; run the benchmark first".to_string(),
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    write_text(&dir.join("results.csv"), &results_to_csv(&result.rows))?;
    write_text(&dir.join("timings.csv"), &timings_to_csv(&result.rows))?;
    write_text(&dir.join("summary.csv"), &summary_to_csv(&result.summaries))?;
    write_text(
        &dir.join("correlations.csv"),
        &correlations_to_csv(&result.correlations),
    )?;

    let mut datasets: Vec<&str> = Vec::new();
    for row in &result.rows {
        if !datasets.contains(&row.dataset.as_str()) {
            datasets.push(&row.dataset);
        }
    }
    for dataset in datasets {
        let summaries: Vec<&SummaryRow> = result
            .summaries
            .iter()
            .filter(|s| s.dataset == dataset)
            .collect();
        let groups: Vec<plot::BarGroup> = summaries
            .iter()
            .map(|s| {
                let mut values = Vec::new();
                for rule in &result.rules {
                    match rule {
                        IntegrationRule::Step => {
                            values.push(("TAUC step".to_string(), s.tauc_step_mean))
                        }
                        IntegrationRule::Trapezoid => {
                            values.push(("TAUC trapezoid".to_string(), s.tauc_trap_mean))
                        }
                    }
                }
                values.push(("AUC".to_string(), s.auc_mean));
                plot::BarGroup {
                    label: s.detector.clone(),
                    values,
                }
            })
            .collect();
        let chart = plot::render_bar_chart(&format!("{dataset}: mean metrics per detector"), &groups);
        write_text(&dir.join(format!("bars_{dataset}.svg")), &chart)?;

        let traces: Vec<&ScoreTrace> = result
            .traces
            .iter()
            .filter(|t| t.dataset == dataset)
            .collect();
        if let Some(first) = traces.first() {
            let panels: Vec<plot::TracePanel> = traces
                .iter()
                .map(|t| plot::TracePanel {
                    label: t.detector.clone(),
                    scores: t.scores.clone(),
                })
                .collect();
            let svg = plot::render_traces(
                &format!("{dataset}: score traces (first seed)"),
                &first.segments,
                &panels,
            );
            write_text(&dir.join(format!("trace_{dataset}.svg")), &svg)?;
        }
    }
    Ok(())
}
