//! Parametric families of process curves and their derivative conditions.
//!
//! A family member is a scalar function `f(params, x)`.  Curves are pinned
//! down by *support conditions*: prescribed values of the function or of one
//! of its x-derivatives at chosen positions.  The solver in [`crate::solver`]
//! recovers the parameter vector that satisfies a condition set in the
//! least-squares sense.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest x-derivative order any family evaluates.  Orders 0..=2 are what
/// condition sets in practice use; 3 is kept as headroom.
pub const MAX_DERIVATIVE_ORDER: usize = 3;

/// A parametric curve family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionFamily {
    /// `f(w, x) = sum_i w[i] * x^i` with `degree + 1` coefficients.
    Polynomial { degree: usize },
    /// `f(w, x) = w[0] * x * sin(pi * x - w[1]) + w[2] * x`.
    ///
    /// A growing-amplitude oscillation whose phase and linear trend are free;
    /// useful for curves with a pronounced interior extremum.
    SineProduct,
}

impl FunctionFamily {
    /// Number of free parameters of a family member.
    pub fn param_dim(&self) -> usize {
        match self {
            FunctionFamily::Polynomial { degree } => degree + 1,
            FunctionFamily::SineProduct => 3,
        }
    }

    /// Highest supported x-derivative order.
    pub fn max_order(&self) -> usize {
        MAX_DERIVATIVE_ORDER
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                got: params.len(),
                context: "parameter vector",
            });
        }
        Ok(())
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order() {
            return Err(Error::UnsupportedOrder {
                order,
                max: self.max_order(),
            });
        }
        Ok(())
    }

    /// Evaluate the `order`-th x-derivative of `f(params, x)` (order 0 is the
    /// function itself).
    pub fn eval_deriv(&self, params: &[f64], x: f64, order: usize) -> Result<f64> {
        self.check_params(params)?;
        self.check_order(order)?;
        Ok(match self {
            FunctionFamily::Polynomial { .. } => {
                // Differentiating sum w_i x^i shifts coefficients down by
                // `order` and scales them with falling factorials; evaluate
                // the shifted polynomial by Horner's rule.
                let mut acc = 0.0;
                for i in (order..params.len()).rev() {
                    acc = acc * x + falling_factorial(i, order) * params[i];
                }
                acc
            }
            FunctionFamily::SineProduct => {
                let (w0, w1, w2) = (params[0], params[1], params[2]);
                let theta = std::f64::consts::PI * x - w1;
                let pi = std::f64::consts::PI;
                let (sin, cos) = theta.sin_cos();
                match order {
                    0 => w0 * x * sin + w2 * x,
                    1 => w0 * (sin + pi * x * cos) + w2,
                    2 => w0 * (2.0 * pi * cos - pi * pi * x * sin),
                    3 => w0 * (-3.0 * pi * pi * sin - pi * pi * pi * x * cos),
                    _ => unreachable!("order checked against MAX_DERIVATIVE_ORDER"),
                }
            }
        })
    }

    /// Gradient of `eval_deriv` with respect to the parameters.
    ///
    /// For `Polynomial` the result does not depend on `params` (the family is
    /// linear in its coefficients); it is returned for a uniform interface.
    pub fn grad_params_deriv(&self, params: &[f64], x: f64, order: usize) -> Result<Vec<f64>> {
        self.check_params(params)?;
        self.check_order(order)?;
        Ok(match self {
            FunctionFamily::Polynomial { .. } => {
                let mut grad = vec![0.0; params.len()];
                for (i, g) in grad.iter_mut().enumerate().skip(order) {
                    *g = falling_factorial(i, order) * x.powi((i - order) as i32);
                }
                grad
            }
            FunctionFamily::SineProduct => {
                let w0 = params[0];
                let theta = std::f64::consts::PI * x - w1_of(params);
                let pi = std::f64::consts::PI;
                let (sin, cos) = theta.sin_cos();
                // d(theta)/d(w1) = -1, so each w1 component flips sign and
                // swaps sin/cos relative to differentiating theta directly.
                match order {
                    0 => vec![x * sin, -w0 * x * cos, x],
                    1 => vec![sin + pi * x * cos, w0 * (-cos + pi * x * sin), 1.0],
                    2 => vec![
                        2.0 * pi * cos - pi * pi * x * sin,
                        w0 * (2.0 * pi * sin + pi * pi * x * cos),
                        0.0,
                    ],
                    3 => vec![
                        -3.0 * pi * pi * sin - pi * pi * pi * x * cos,
                        w0 * (3.0 * pi * pi * cos - pi * pi * pi * x * sin),
                        0.0,
                    ],
                    _ => unreachable!("order checked against MAX_DERIVATIVE_ORDER"),
                }
            }
        })
    }
}

fn w1_of(params: &[f64]) -> f64 {
    params[1]
}

/// `i * (i-1) * ... * (i-order+1)` as a float; 1 for order 0.
fn falling_factorial(i: usize, order: usize) -> f64 {
    let mut acc = 1.0;
    for step in 0..order {
        acc *= (i - step) as f64;
    }
    acc
}

/// A prescribed derivative value: the `order`-th derivative at position `x`
/// must equal `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportCondition {
    /// Derivative order the condition constrains (0 = function value).
    pub order: usize,
    /// Position the condition applies at.
    pub x: f64,
    /// Prescribed value of the derivative at `x`.
    pub y: f64,
}

impl SupportCondition {
    pub fn new(order: usize, x: f64, y: f64) -> Self {
        SupportCondition { order, x, y }
    }
}

/// Weighted residual vector of a condition set.
///
/// Entry `j` is `sqrt(weights[order_j]) * (eval_deriv(x_j) - y_j)`, so that
/// the squared norm of the result is the weighted least-squares objective.
/// `weights` is indexed by derivative order and must cover every order that
/// occurs; all weights must be strictly positive.
pub fn residuals(
    family: &FunctionFamily,
    params: &[f64],
    conditions: &[SupportCondition],
    weights: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(conditions.len());
    for c in conditions {
        let weight = order_weight(weights, c.order)?;
        let value = family.eval_deriv(params, c.x, c.order)?;
        out.push(weight.sqrt() * (value - c.y));
    }
    Ok(out)
}

pub(crate) fn order_weight(weights: &[f64], order: usize) -> Result<f64> {
    match weights.get(order) {
        Some(&w) if w > 0.0 && w.is_finite() => Ok(w),
        Some(_) => Err(Error::config(format!(
            "weight for derivative order {order} must be strictly positive and finite"
        ))),
        None => Err(Error::config(format!(
            "no weight supplied for derivative order {order} (got {} weights)",
            weights.len()
        ))),
    }
}
