//! Time evolution of support conditions: drift ramps and coordinate jitter.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SupportCondition;

/// A linear ramp of one scalar value across executions `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    /// First execution of the ramp (1-based, inclusive).
    pub start: usize,
    /// Last execution of the ramp (1-based, inclusive; must exceed `start`).
    pub end: usize,
    /// Value held before the ramp begins.
    pub from: f64,
    /// Value reached at `end` and held afterwards.
    pub to: f64,
}

impl DriftSpec {
    pub fn new(start: usize, end: usize, from: f64, to: f64) -> Self {
        DriftSpec {
            start,
            end,
            from,
            to,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.start == 0 || self.start >= self.end {
            return Err(Error::config(format!(
                "drift window [{}, {}] must satisfy 1 <= start < end",
                self.start, self.end
            )));
        }
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::config("drift endpoint values must be finite"));
        }
        Ok(())
    }
}

/// Which coordinate of a support condition a schedule moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftCoordinate {
    X,
    Y,
    /// The condition stays at its template values (jitter is disabled too).
    None,
}

/// A support condition template plus its evolution over executions.
///
/// The drifting coordinate follows a piecewise-linear profile: the first
/// ramp's `from` value before it starts, linear interpolation inside each
/// ramp, and the most recently completed ramp's `to` value between and after
/// ramps.  On top of the profile the coordinate receives independent
/// Gaussian jitter of width `noise_sigma` per execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSchedule {
    /// Template condition; the non-drifting coordinate keeps these values.
    pub condition: SupportCondition,
    /// Coordinate moved by `drifts` and jittered by `noise_sigma`.
    pub drifting: DriftCoordinate,
    /// Disjoint, ascending drift ramps applied to the drifting coordinate.
    #[serde(default)]
    pub drifts: Vec<DriftSpec>,
    /// Standard deviation of per-execution jitter on the drifting coordinate.
    #[serde(default)]
    pub noise_sigma: f64,
}

impl SupportSchedule {
    /// A schedule that never moves: the condition is repeated verbatim.
    pub fn fixed(condition: SupportCondition) -> Self {
        SupportSchedule {
            condition,
            drifting: DriftCoordinate::None,
            drifts: Vec::new(),
            noise_sigma: 0.0,
        }
    }

    /// Validate ramp ordering and bounds against the execution count.
    pub fn validate(&self, executions: usize) -> Result<()> {
        if self.noise_sigma < 0.0 || !self.noise_sigma.is_finite() {
            return Err(Error::config("schedule noise_sigma must be >= 0 and finite"));
        }
        if matches!(self.drifting, DriftCoordinate::None)
            && (!self.drifts.is_empty() || self.noise_sigma > 0.0)
        {
            return Err(Error::config(
                "a schedule without a drifting coordinate cannot carry drifts or jitter",
            ));
        }
        let mut prev_end = 0usize;
        for drift in &self.drifts {
            drift.validate()?;
            if drift.start <= prev_end {
                return Err(Error::config(
                    "drift windows must be disjoint and in ascending order",
                ));
            }
            if drift.end > executions {
                return Err(Error::config(format!(
                    "drift window [{}, {}] exceeds the execution count {executions}",
                    drift.start, drift.end
                )));
            }
            prev_end = drift.end;
        }
        Ok(())
    }

    /// Noise-free profile value of the drifting coordinate at execution `t`.
    /// For schedules without ramps this is the template coordinate itself.
    pub fn profile(&self, t: usize) -> f64 {
        let base = match self.drifting {
            DriftCoordinate::X => self.condition.x,
            DriftCoordinate::Y => self.condition.y,
            DriftCoordinate::None => return self.condition.x,
        };
        let Some(first) = self.drifts.first() else {
            return base;
        };
        if t < first.start {
            return first.from;
        }
        let mut plateau = first.from;
        for drift in &self.drifts {
            if t < drift.start {
                return plateau;
            }
            if t <= drift.end {
                let progress = (t - drift.start) as f64 / (drift.end - drift.start) as f64;
                return drift.from + (drift.to - drift.from) * progress;
            }
            plateau = drift.to;
        }
        plateau
    }

    /// Materialize the condition at execution `t`, drawing jitter from `rng`.
    pub fn condition_at(&self, t: usize, rng: &mut impl Rng) -> SupportCondition {
        let mut condition = self.condition;
        let coordinate = match self.drifting {
            DriftCoordinate::X => &mut condition.x,
            DriftCoordinate::Y => &mut condition.y,
            DriftCoordinate::None => return condition,
        };
        *coordinate = self.profile(t);
        if self.noise_sigma > 0.0 {
            let normal = Normal::new(0.0, self.noise_sigma).expect("sigma validated");
            *coordinate += normal.sample(rng);
        }
        condition
    }

    /// Drift windows as 1-based inclusive `(start, end)` pairs.
    pub fn drift_windows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.drifts.iter().map(|d| (d.start, d.end))
    }
}
