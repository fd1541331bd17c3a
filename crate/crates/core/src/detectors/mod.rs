//! The drift-detector zoo.
//!
//! Every detector follows the same three-stage pipeline — feature
//! extraction, windowing/aggregation, score computation — and emits one
//! suspicion score per execution.  Detectors see only the curves and their
//! sample grids, never the ground truth, and are deterministic functions of
//! their configuration (including any seeds it contains).

pub mod autoencoder;
pub mod kmeans;
pub mod stats;
pub mod window;

use ndarray::{ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ScoreSeries;
use crate::rng::{substream, StreamKind};

use autoencoder::{ae_train, AeTrainSpec};
use kmeans::{kmeans_fit, kmeans_score};
use window::{kswin_score, mmd_window_score, rolling_mean, rolling_std};

/// Internal stream tag for the clustering detector, which has no seed field.
const CLUSTER_FIT_SEED: u64 = 0x6b6d_6561;
/// Stream index for the uniform baseline's draws.
const RANDOM_GUESS_STREAM: u64 = 7;

/// Configuration of a single drift detector.
///
/// The JSON form is tagged by `kind` and mirrors the field names, e.g.
/// `{"kind": "SlidingKSWIN", "m_r": 50, "m_o": 50, "delta": 10}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DetectorSpec {
    /// Absolute change of the rolling mean of per-curve maxima.
    RollingMeanDifference { m_r: usize },
    /// Rolling standard deviation of the rolling mean of per-curve maxima.
    RollingMeanStdDev { m_r: usize },
    /// Sliding two-window KS test over per-curve means.
    SlidingKSWIN {
        m_r: usize,
        m_o: usize,
        #[serde(default)]
        delta: usize,
    },
    /// Distance to the nearest of `n_c` k-means centroids fit on all curves.
    Cluster { n_c: usize },
    /// Sliding KS test over the mean of `k` autoencoder latents.
    AEMeanKS {
        k: usize,
        m_r: usize,
        m_o: usize,
        #[serde(default)]
        delta: usize,
        /// Training hyper-parameters; its `latent_dim` is superseded by `k`.
        #[serde(default)]
        ae: AeTrainSpec,
    },
    /// Sliding maximum mean discrepancy over autoencoder latent vectors.
    AEMMD {
        k: usize,
        m_r: usize,
        m_o: usize,
        #[serde(default)]
        delta: usize,
        /// Training hyper-parameters; its `latent_dim` is superseded by `k`.
        #[serde(default)]
        ae: AeTrainSpec,
    },
    /// I.i.d. uniform [0, 1) scores drawn from `seed`.
    RandomGuess { seed: u64 },
    /// Constant 1 — flags every execution.
    Always,
    /// Constant 0 — never flags anything.
    Never,
}

fn check_window_size(value: usize, name: &str) -> Result<()> {
    if value < 2 {
        return Err(Error::config(format!(
            "{name} must be at least 2, got {value}"
        )));
    }
    Ok(())
}

fn check_reach(parts: &[usize], executions: usize, what: &str) -> Result<()> {
    let needed = parts
        .iter()
        .try_fold(0usize, |acc, &p| acc.checked_add(p))
        .ok_or_else(|| Error::config(format!("{what} window sizes overflow")))?;
    if needed > executions {
        return Err(Error::config(format!(
            "{what} needs {needed} executions but the dataset has {executions}"
        )));
    }
    Ok(())
}

impl DetectorSpec {
    /// Check that this configuration can score a dataset of `executions`
    /// curves: window sizes at least 2, windows that fit, sane counts.
    pub fn validate(&self, executions: usize) -> Result<()> {
        if executions == 0 {
            return Err(Error::config("cannot score an empty dataset"));
        }
        match self {
            Self::RollingMeanDifference { m_r } => {
                check_window_size(*m_r, "m_r")?;
                check_reach(&[*m_r, 1], executions, "rolling mean difference")
            }
            Self::RollingMeanStdDev { m_r } => {
                check_window_size(*m_r, "m_r")?;
                check_reach(&[*m_r, *m_r - 1], executions, "rolling mean std-dev")
            }
            Self::SlidingKSWIN { m_r, m_o, delta } => {
                check_window_size(*m_r, "m_r")?;
                check_window_size(*m_o, "m_o")?;
                check_reach(&[*m_r, *delta, *m_o], executions, "sliding KS")
            }
            Self::Cluster { n_c } => {
                if *n_c == 0 {
                    return Err(Error::config("n_c must be at least 1"));
                }
                if *n_c > executions {
                    return Err(Error::config(format!(
                        "n_c = {n_c} exceeds the {executions} available curves"
                    )));
                }
                Ok(())
            }
            Self::AEMeanKS {
                k,
                m_r,
                m_o,
                delta,
                ae,
            }
            | Self::AEMMD {
                k,
                m_r,
                m_o,
                delta,
                ae,
            } => {
                if *k == 0 {
                    return Err(Error::config("latent width k must be at least 1"));
                }
                check_window_size(*m_r, "m_r")?;
                check_window_size(*m_o, "m_o")?;
                check_reach(&[*m_r, *delta, *m_o], executions, "latent window")?;
                if ae.batch_size > executions {
                    return Err(Error::config(format!(
                        "batch size {} exceeds the {executions} available curves",
                        ae.batch_size
                    )));
                }
                Ok(())
            }
            Self::RandomGuess { .. } | Self::Always | Self::Never => Ok(()),
        }
    }

}

impl std::fmt::Display for DetectorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::RollingMeanDifference { m_r } => {
                write!(f, "RollingMeanDifference(m_r={m_r})")
            }
            Self::RollingMeanStdDev { m_r } => write!(f, "RollingMeanStdDev(m_r={m_r})"),
            Self::SlidingKSWIN { m_r, m_o, delta } => {
                write!(f, "SlidingKSWIN(m_r={m_r}; m_o={m_o}; delta={delta})")
            }
            Self::Cluster { n_c } => write!(f, "Cluster(n_c={n_c})"),
            Self::AEMeanKS {
                k, m_r, m_o, delta, ..
            } => write!(f, "AEMeanKS(k={k}; m_r={m_r}; m_o={m_o}; delta={delta})"),
            Self::AEMMD {
                k, m_r, m_o, delta, ..
            } => write!(f, "AEMMD(k={k}; m_r={m_r}; m_o={m_o}; delta={delta})"),
            Self::RandomGuess { seed } => write!(f, "RandomGuess(seed={seed})"),
            Self::Always => write!(f, "Always"),
            Self::Never => write!(f, "Never"),
        }
    }
}

fn row_maxima(values: &ndarray::Array2<f64>) -> Vec<f64> {
    values
        .rows()
        .into_iter()
        .map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

fn row_means(values: ArrayView2<f64>) -> Vec<f64> {
    values
        .mean_axis(Axis(1))
        .expect("row means of a non-empty matrix")
        .to_vec()
}

/// Score every execution of a dataset with one detector.
///
/// `curves` and `grids` are the `T × m` curve values and their sample
/// positions; ground truth is deliberately not part of the interface.
/// Positions with insufficient window history score exactly 0.
pub fn score(
    spec: &DetectorSpec,
    curves: ArrayView2<f64>,
    grids: ArrayView2<f64>,
) -> Result<ScoreSeries> {
    if curves.dim() != grids.dim() {
        return Err(Error::DimensionMismatch {
            expected: curves.len(),
            got: grids.len(),
            context: "curve and grid matrices",
        });
    }
    if curves.ncols() == 0 {
        return Err(Error::config("curves must have at least one sample each"));
    }
    let executions = curves.nrows();
    spec.validate(executions)?;

    let values = match spec {
        DetectorSpec::RollingMeanDifference { m_r } => {
            let means = rolling_mean(curves, *m_r)?;
            let maxima = row_maxima(&means);
            let mut out = vec![0.0; executions];
            for t in *m_r..executions {
                out[t] = (maxima[t] - maxima[t - 1]).abs();
            }
            out
        }
        DetectorSpec::RollingMeanStdDev { m_r } => {
            let means = rolling_mean(curves, *m_r)?;
            let maxima = row_maxima(&means);
            // Only the positions with a full mean window feed the std pass;
            // including warm-up zeros would fabricate variance.
            let stds = rolling_std(&maxima[*m_r - 1..], *m_r)?;
            let mut out = vec![0.0; executions];
            out[*m_r - 1..].copy_from_slice(&stds);
            out
        }
        DetectorSpec::SlidingKSWIN { m_r, m_o, delta } => {
            kswin_score(&row_means(curves), *m_r, *m_o, *delta)?
        }
        DetectorSpec::Cluster { n_c } => {
            let mut rng = substream(CLUSTER_FIT_SEED, StreamKind::Detector, &[0]);
            let centers = kmeans_fit(curves, *n_c, &mut rng)?;
            kmeans_score(curves, centers.view())?
        }
        DetectorSpec::AEMeanKS {
            k,
            m_r,
            m_o,
            delta,
            ae,
        } => {
            let train = AeTrainSpec {
                latent_dim: *k,
                ..ae.clone()
            };
            let model = ae_train(curves, &train)?;
            let latents = model.encode(curves)?;
            kswin_score(&row_means(latents.view()), *m_r, *m_o, *delta)?
        }
        DetectorSpec::AEMMD {
            k,
            m_r,
            m_o,
            delta,
            ae,
        } => {
            let train = AeTrainSpec {
                latent_dim: *k,
                ..ae.clone()
            };
            let model = ae_train(curves, &train)?;
            let latents = model.encode(curves)?;
            mmd_window_score(latents.view(), *m_r, *m_o, *delta)?
        }
        DetectorSpec::RandomGuess { seed } => {
            let mut rng = substream(*seed, StreamKind::Detector, &[RANDOM_GUESS_STREAM]);
            (0..executions).map(|_| rng.gen::<f64>()).collect()
        }
        DetectorSpec::Always => vec![1.0; executions],
        DetectorSpec::Never => vec![0.0; executions],
    };
    ScoreSeries::new(values)
}
