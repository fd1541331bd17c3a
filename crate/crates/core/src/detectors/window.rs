//! Rolling and sliding window aggregations over execution-indexed data.
//!
//! All outputs are aligned with the input: position `t` (0-based) holds the
//! aggregate of the window ending at `t`.  Positions with insufficient
//! history — warm-up — are exactly 0 by contract, so they can never look
//! suspicious to downstream thresholding.

use ndarray::{Array2, ArrayView2};

use crate::detectors::stats::{ks_two_sample, median_pairwise_distance, mmd};
use crate::error::{Error, Result};

fn check_window(window: usize, len: usize, what: &str) -> Result<()> {
    if window < 2 {
        return Err(Error::config(format!(
            "{what} window must cover at least 2 executions, got {window}"
        )));
    }
    if window > len {
        return Err(Error::config(format!(
            "{what} window of {window} exceeds the {len} available executions"
        )));
    }
    Ok(())
}

/// Per-column rolling mean over a window of `window` rows.
///
/// Output row `t` is the mean of input rows `t−window+1 ..= t`; rows with
/// insufficient history are zero (warm-up).
pub fn rolling_mean(values: ArrayView2<f64>, window: usize) -> Result<Array2<f64>> {
    check_window(window, values.nrows(), "rolling mean")?;
    let (rows, cols) = values.dim();
    let mut out = Array2::zeros((rows, cols));
    let mut running = vec![0.0f64; cols];
    for t in 0..rows {
        for (c, acc) in running.iter_mut().enumerate() {
            *acc += values[[t, c]];
            if t >= window {
                *acc -= values[[t - window, c]];
            }
        }
        if t + 1 >= window {
            for (c, acc) in running.iter().enumerate() {
                out[[t, c]] = acc / window as f64;
            }
        }
    }
    Ok(out)
}

/// Rolling sample standard deviation (divisor `window − 1`) of a scalar
/// series; warm-up positions are zero.
///
/// Each window is reduced independently with Welford's update.  A streaming
/// add/remove variant would be O(T), but its cancellation error grows with
/// the series length and can exceed the 1e-12 agreement this function
/// guarantees against a two-pass computation.
pub fn rolling_std(values: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(window, values.len(), "rolling standard deviation")?;
    let mut out = vec![0.0f64; values.len()];
    for t in window - 1..values.len() {
        let mut mean = 0.0f64;
        let mut m2 = 0.0f64;
        for (i, &value) in values[t + 1 - window..=t].iter().enumerate() {
            let delta = value - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (value - mean);
        }
        out[t] = (m2.max(0.0) / (window - 1) as f64).sqrt();
    }
    Ok(out)
}

/// Sliding two-window Kolmogorov–Smirnov score.
///
/// At each execution `t` (1-based, `t ≥ m_r + δ + m_o`) the observation
/// window holds the `m_o` most recent values and the reference window the
/// `m_r` values ending `m_o + δ` executions earlier; the score is
/// `log(1 + 1/p_t)`.  Warm-up positions are zero.
pub fn kswin_score(values: &[f64], m_r: usize, m_o: usize, delta: usize) -> Result<Vec<f64>> {
    check_window(m_r, values.len(), "KS reference")?;
    check_window(m_o, values.len(), "KS observation")?;
    let first = m_r + delta + m_o;
    if first > values.len() {
        return Err(Error::config(format!(
            "KS windows need {first} executions, got {}",
            values.len()
        )));
    }
    let mut out = vec![0.0f64; values.len()];
    for t in first..=values.len() {
        let observation = &values[t - m_o..t];
        let reference = &values[t - m_o - delta - m_r..t - m_o - delta];
        let test = ks_two_sample(reference, observation)?;
        out[t - 1] = (1.0 + 1.0 / test.p_value).ln();
    }
    Ok(out)
}

/// Sliding two-window maximum mean discrepancy score over row vectors.
///
/// Window layout matches [`kswin_score`]; the RBF bandwidth is the median
/// pairwise distance of the two windows pooled, recomputed per position.
pub fn mmd_window_score(
    values: ArrayView2<f64>,
    m_r: usize,
    m_o: usize,
    delta: usize,
) -> Result<Vec<f64>> {
    check_window(m_r, values.nrows(), "MMD reference")?;
    check_window(m_o, values.nrows(), "MMD observation")?;
    let rows = values.nrows();
    let first = m_r + delta + m_o;
    if first > rows {
        return Err(Error::config(format!(
            "MMD windows need {first} executions, got {rows}"
        )));
    }
    let mut out = vec![0.0f64; rows];
    for t in first..=rows {
        let observation = values.slice(ndarray::s![t - m_o..t, ..]);
        let reference = values.slice(ndarray::s![t - m_o - delta - m_r..t - m_o - delta, ..]);
        let pooled = ndarray::concatenate(ndarray::Axis(0), &[reference, observation])
            .expect("windows share a column count");
        // A zero median (mostly-identical windows) would break the kernel;
        // any tiny positive bandwidth keeps identical points at kernel 1.
        let bandwidth = median_pairwise_distance(pooled.view()).max(1e-12);
        out[t - 1] = mmd(reference, observation, bandwidth)?;
    }
    Ok(out)
}
