//! A small dense autoencoder used to compress process curves into a latent
//! representation before window-based comparison.
//!
//! Architecture: input `m` → tanh hidden layer → linear latent `k` → tanh
//! hidden layer → linear output `m`, trained with Adam on mean squared
//! reconstruction error.  Inputs are globally min–max normalised to [0, 1]
//! with parameters frozen at training time.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, StreamKind};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPSILON: f64 = 1e-8;
/// Guards the normalisation divisor when all inputs share one value.
const MIN_NORMALISATION_SPAN: f64 = 1e-12;

/// Training configuration for [`ae_train`].  Every field has a default so
/// partial JSON specs stay usable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AeTrainSpec {
    /// Width of the latent bottleneck.
    pub latent_dim: usize,
    /// Width of the two tanh hidden layers.
    pub hidden_width: usize,
    /// Full passes over the training curves.
    pub epochs: usize,
    /// Mini-batch size; the final short batch is still used.
    pub batch_size: usize,
    /// Adam step size.
    pub learning_rate: f64,
    /// Seed for weight initialisation and epoch shuffling.
    pub seed: u64,
}

impl Default for AeTrainSpec {
    fn default() -> Self {
        Self {
            latent_dim: 4,
            hidden_width: 64,
            epochs: 50,
            batch_size: 64,
            learning_rate: 1e-3,
            seed: 0,
        }
    }
}

impl AeTrainSpec {
    fn validate(&self, samples: usize, features: usize) -> Result<()> {
        if self.latent_dim == 0 || self.hidden_width == 0 {
            return Err(Error::config("autoencoder layer widths must be positive"));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::config(
                "autoencoder needs at least one epoch and a positive batch size",
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if samples == 0 || features == 0 {
            return Err(Error::config("cannot train an autoencoder on empty data"));
        }
        if self.batch_size > samples {
            return Err(Error::config(format!(
                "batch size {} exceeds the {} available curves",
                self.batch_size, samples
            )));
        }
        Ok(())
    }
}

/// A trained autoencoder: weights plus the frozen input normalisation.
#[derive(Debug, Clone)]
pub struct AeModel {
    w1: Array2<f64>,
    b1: Array1<f64>,
    w2: Array2<f64>,
    b2: Array1<f64>,
    w3: Array2<f64>,
    b3: Array1<f64>,
    w4: Array2<f64>,
    b4: Array1<f64>,
    input_min: f64,
    input_span: f64,
    epoch_losses: Vec<f64>,
}

impl AeModel {
    /// Latent width `k`.
    pub fn latent_dim(&self) -> usize {
        self.w2.ncols()
    }

    /// Expected input width `m`.
    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    /// Mean squared reconstruction error after each training epoch.
    pub fn epoch_losses(&self) -> &[f64] {
        &self.epoch_losses
    }

    fn normalise(&self, curves: ArrayView2<f64>) -> Array2<f64> {
        curves.mapv(|v| (v - self.input_min) / self.input_span)
    }

    /// Map curves (rows) to their latent representation, a `T × k` array.
    pub fn encode(&self, curves: ArrayView2<f64>) -> Result<Array2<f64>> {
        if curves.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: curves.ncols(),
                context: "autoencoder input width",
            });
        }
        let x = self.normalise(curves);
        let h1 = (x.dot(&self.w1) + &self.b1).mapv(f64::tanh);
        Ok(h1.dot(&self.w2) + &self.b2)
    }

    /// Reconstruct curves in normalised space; exposed for loss inspection.
    pub fn reconstruct_normalised(&self, curves: ArrayView2<f64>) -> Result<Array2<f64>> {
        let z = self.encode(curves)?;
        let h2 = (z.dot(&self.w3) + &self.b3).mapv(f64::tanh);
        Ok(h2.dot(&self.w4) + &self.b4)
    }
}

fn xavier_uniform<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-limit..limit))
}

struct AdamSlot<D: ndarray::Dimension> {
    first: ndarray::Array<f64, D>,
    second: ndarray::Array<f64, D>,
}

impl<D: ndarray::Dimension> AdamSlot<D> {
    fn like(shape: &ndarray::Array<f64, D>) -> Self {
        Self {
            first: ndarray::Array::zeros(shape.raw_dim()),
            second: ndarray::Array::zeros(shape.raw_dim()),
        }
    }

    fn apply(
        &mut self,
        param: &mut ndarray::Array<f64, D>,
        grad: &ndarray::Array<f64, D>,
        learning_rate: f64,
        step: i32,
    ) {
        let correction1 = 1.0 - ADAM_BETA1.powi(step);
        let correction2 = 1.0 - ADAM_BETA2.powi(step);
        Zip::from(param)
            .and(grad)
            .and(&mut self.first)
            .and(&mut self.second)
            .for_each(|p, &g, m, v| {
                *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                let m_hat = *m / correction1;
                let v_hat = *v / correction2;
                *p -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
            });
    }
}

fn column_sums(grad: &Array2<f64>) -> Array1<f64> {
    grad.sum_axis(Axis(0))
}

/// Train an autoencoder on the rows of `curves`.
///
/// Deterministic for a fixed `(curves, spec)` pair: initialisation and the
/// per-epoch shuffles derive from `spec.seed` alone.
pub fn ae_train(curves: ArrayView2<f64>, spec: &AeTrainSpec) -> Result<AeModel> {
    let (samples, features) = curves.dim();
    spec.validate(samples, features)?;
    for &v in curves.iter() {
        if !v.is_finite() {
            return Err(Error::config(
                "autoencoder training data contains non-finite values",
            ));
        }
    }

    let mut init_rng = substream(spec.seed, StreamKind::Detector, &[0]);
    let (m, h, k) = (features, spec.hidden_width, spec.latent_dim);
    let mut model = AeModel {
        w1: xavier_uniform(m, h, &mut init_rng),
        b1: Array1::zeros(h),
        w2: xavier_uniform(h, k, &mut init_rng),
        b2: Array1::zeros(k),
        w3: xavier_uniform(k, h, &mut init_rng),
        b3: Array1::zeros(h),
        w4: xavier_uniform(h, m, &mut init_rng),
        b4: Array1::zeros(m),
        input_min: 0.0,
        input_span: 1.0,
        epoch_losses: Vec::with_capacity(spec.epochs),
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in curves.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    model.input_min = lo;
    model.input_span = (hi - lo).max(MIN_NORMALISATION_SPAN);
    let data = model.normalise(curves);

    let mut slot_w1 = AdamSlot::like(&model.w1);
    let mut slot_b1 = AdamSlot::like(&model.b1);
    let mut slot_w2 = AdamSlot::like(&model.w2);
    let mut slot_b2 = AdamSlot::like(&model.b2);
    let mut slot_w3 = AdamSlot::like(&model.w3);
    let mut slot_b3 = AdamSlot::like(&model.b3);
    let mut slot_w4 = AdamSlot::like(&model.w4);
    let mut slot_b4 = AdamSlot::like(&model.b4);

    let mut order: Vec<usize> = (0..samples).collect();
    let mut step = 0i32;
    for epoch in 0..spec.epochs {
        let mut shuffle_rng = substream(spec.seed, StreamKind::Detector, &[1, epoch as u64]);
        order.shuffle(&mut shuffle_rng);
        let mut squared_error = 0.0f64;
        for chunk in order.chunks(spec.batch_size) {
            let batch = data.select(Axis(0), chunk);
            let rows = chunk.len() as f64;

            let h1 = (batch.dot(&model.w1) + &model.b1).mapv(f64::tanh);
            let z = h1.dot(&model.w2) + &model.b2;
            let h2 = (z.dot(&model.w3) + &model.b3).mapv(f64::tanh);
            let out = h2.dot(&model.w4) + &model.b4;

            let diff = &out - &batch;
            squared_error += diff.iter().map(|d| d * d).sum::<f64>();

            // d(mean squared error)/d(out) for this batch.
            let d_out = diff.mapv(|d| 2.0 * d / (rows * m as f64));
            let g_w4 = h2.t().dot(&d_out);
            let g_b4 = column_sums(&d_out);
            let d_a3 = d_out.dot(&model.w4.t()) * h2.mapv(|v| 1.0 - v * v);
            let g_w3 = z.t().dot(&d_a3);
            let g_b3 = column_sums(&d_a3);
            let d_z = d_a3.dot(&model.w3.t());
            let g_w2 = h1.t().dot(&d_z);
            let g_b2 = column_sums(&d_z);
            let d_a1 = d_z.dot(&model.w2.t()) * h1.mapv(|v| 1.0 - v * v);
            let g_w1 = batch.t().dot(&d_a1);
            let g_b1 = column_sums(&d_a1);

            step += 1;
            slot_w1.apply(&mut model.w1, &g_w1, spec.learning_rate, step);
            slot_b1.apply(&mut model.b1, &g_b1, spec.learning_rate, step);
            slot_w2.apply(&mut model.w2, &g_w2, spec.learning_rate, step);
            slot_b2.apply(&mut model.b2, &g_b2, spec.learning_rate, step);
            slot_w3.apply(&mut model.w3, &g_w3, spec.learning_rate, step);
            slot_b3.apply(&mut model.b3, &g_b3, spec.learning_rate, step);
            slot_w4.apply(&mut model.w4, &g_w4, spec.learning_rate, step);
            slot_b4.apply(&mut model.b4, &g_b4, spec.learning_rate, step);
        }
        let epoch_loss = squared_error / (samples as f64 * m as f64);
        if !epoch_loss.is_finite() {
            return Err(Error::NumericFailure {
                context: "autoencoder reconstruction loss became non-finite",
                execution: None,
            });
        }
        model.epoch_losses.push(epoch_loss);
    }
    Ok(model)
}
