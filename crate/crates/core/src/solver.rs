//! Damped least-squares solver for support-condition sets.
//!
//! Recovers the parameter vector of a family member from prescribed
//! derivative values via Levenberg–Marquardt: repeatedly solve the damped
//! normal equations, accept steps that reduce the weighted residual norm,
//! and adapt the damping factor multiplicatively.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{residuals, FunctionFamily, SupportCondition};

/// Tuning knobs for [`solve_support`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// Iteration cap; the solver returns its best parameters when reached.
    pub max_iters: usize,
    /// Convergence threshold on the weighted residual norm.
    pub residual_tol: f64,
    /// Initial damping factor for the normal equations.
    pub damping_init: f64,
    /// Whether dataset generation should start each solve from the previous
    /// execution's solution instead of a fresh perturbed origin.
    pub warm_start: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_iters: 200,
            residual_tol: 1e-10,
            damping_init: 1e-3,
            warm_start: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::config("solver max_iters must be at least 1"));
        }
        if !(self.residual_tol.is_finite() && self.residual_tol > 0.0)
            || !(self.damping_init.is_finite() && self.damping_init > 0.0)
        {
            return Err(Error::config(
                "solver residual_tol and damping_init must be strictly positive and finite",
            ));
        }
        Ok(())
    }
}

/// Damping growth/shrink factor on rejected/accepted steps.
const DAMPING_STEP: f64 = 10.0;
/// Damping ceiling; exceeding it means the iteration has stalled.
const DAMPING_MAX: f64 = 1e14;
/// Damping floor, keeping the normal equations positive definite.
const DAMPING_MIN: f64 = 1e-12;

/// Solve for parameters satisfying `conditions` in the weighted
/// least-squares sense, starting from `init`.
///
/// Returns the best parameters found and their weighted residual norm.  A
/// residual norm above `settings.residual_tol` signals non-convergence (for
/// example an over-determined, inconsistent condition set); that is reported
/// through the returned norm, not as an error.  Errors are reserved for
/// invalid inputs and non-finite arithmetic.
pub fn solve_support(
    family: &FunctionFamily,
    conditions: &[SupportCondition],
    weights: &[f64],
    init: &[f64],
    settings: &SolverSettings,
) -> Result<(Vec<f64>, f64)> {
    settings.validate()?;
    if conditions.is_empty() {
        return Err(Error::config("support condition set must be non-empty"));
    }
    let dim = family.param_dim();
    if init.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: init.len(),
            context: "solver initial parameters",
        });
    }

    let mut params = init.to_vec();
    let mut residual = residuals(family, &params, conditions, weights)?;
    let mut cost = norm_sq(&residual);
    ensure_finite(cost)?;
    if cost.sqrt() < settings.residual_tol {
        return Ok((params, cost.sqrt()));
    }

    let mut damping = settings.damping_init;
    for _ in 0..settings.max_iters {
        // Weighted Jacobian: row per condition, column per parameter.
        let mut jacobian = vec![vec![0.0; dim]; conditions.len()];
        for (row, c) in jacobian.iter_mut().zip(conditions) {
            let weight = crate::family::order_weight(weights, c.order)?;
            let grad = family.grad_params_deriv(&params, c.x, c.order)?;
            for (dst, g) in row.iter_mut().zip(grad) {
                *dst = weight.sqrt() * g;
            }
        }

        // Normal equations: (J^T J + damping * D) step = -J^T r, with D the
        // diagonal of J^T J (floored), so damping respects column scaling.
        let mut normal = vec![vec![0.0; dim]; dim];
        let mut gradient = vec![0.0; dim];
        for (row, r) in jacobian.iter().zip(&residual) {
            for i in 0..dim {
                gradient[i] += row[i] * r;
                for j in 0..dim {
                    normal[i][j] += row[i] * row[j];
                }
            }
        }
        if gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NumericFailure {
                context: "non-finite gradient in least-squares solve",
                execution: None,
            });
        }

        let mut accepted = false;
        while damping <= DAMPING_MAX {
            let mut damped = normal.clone();
            for i in 0..dim {
                damped[i][i] += damping * normal[i][i].max(1e-10);
            }
            let step = match cholesky_solve(&damped, &gradient) {
                Some(step) => step,
                None => {
                    damping *= DAMPING_STEP;
                    continue;
                }
            };
            let candidate: Vec<f64> = params.iter().zip(&step).map(|(p, s)| p - s).collect();
            let cand_residual = residuals(family, &candidate, conditions, weights)?;
            let cand_cost = norm_sq(&cand_residual);
            ensure_finite(cand_cost)?;
            if cand_cost < cost {
                params = candidate;
                residual = cand_residual;
                cost = cand_cost;
                damping = (damping / DAMPING_STEP).max(DAMPING_MIN);
                accepted = true;
                break;
            }
            damping *= DAMPING_STEP;
        }
        if cost.sqrt() < settings.residual_tol || !accepted {
            break;
        }
    }
    Ok((params, cost.sqrt()))
}

fn norm_sq(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

fn ensure_finite(cost: f64) -> Result<()> {
    if cost.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericFailure {
            context: "non-finite residual in least-squares solve",
            execution: None,
        })
    }
}

/// Solve the symmetric positive-definite system `matrix * x = rhs` by
/// Cholesky factorization.  Returns `None` when a pivot is not positive,
/// letting the caller raise the damping and retry.
fn cholesky_solve(matrix: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut chol = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = matrix[i][j];
            for (&a, &b) in chol[i][..j].iter().zip(&chol[j][..j]) {
                sum -= a * b;
            }
            if i == j {
                if !sum.is_finite() || sum <= 0.0 {
                    return None;
                }
                chol[i][j] = sum.sqrt();
            } else {
                chol[i][j] = sum / chol[j][j];
            }
        }
    }
    // Forward then backward substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = rhs[i];
        for k in 0..i {
            sum -= chol[i][k] * y[k];
        }
        y[i] = sum / chol[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= chol[k][i] * x[k];
        }
        x[i] = sum / chol[i][i];
    }
    Some(x)
}
