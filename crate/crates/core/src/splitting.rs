//! The relaxed splitting operator `T_λ = (1−λ)·Id + λ·R_B R_A` and its orbits.
//!
//! `λ = 1/2` is classical Douglas–Rachford, `λ = 1` is Peaceman–Rachford.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::Vector;
use crate::operators::ResolventOperator;

/// Consecutive small shadow steps required before [`StopRule`] fires.
pub const SHADOW_STREAK: usize = 10;

#[derive(Debug, Clone)]
pub struct SplittingOperator {
    a: ResolventOperator,
    b: ResolventOperator,
    lambda: f64,
}

/// One application of `T_λ` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// `J_A x`.
    pub shadow: Vector,
    /// `J_B R_A x`.
    pub reflected_shadow: Vector,
    /// `T_λ x`.
    pub next: Vector,
}

impl SplittingOperator {
    pub fn new(a: ResolventOperator, b: ResolventOperator, lambda: f64) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        check_lambda(lambda)?;
        Ok(SplittingOperator { a, b, lambda })
    }

    pub fn a(&self) -> &ResolventOperator {
        &self.a
    }

    pub fn b(&self) -> &ResolventOperator {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Same pair of operators with a different relaxation parameter.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), lambda)
    }

    /// Evaluates `T_λ x = x − 2λ·J_A x + 2λ·J_B(2J_A x − x)` along with the
    /// two shadows.
    pub fn step(&self, x: &Vector) -> Result<Step> {
        let shadow = self.a.resolvent(x)?;
        let reflected = x.add_scaled(-2.0, &(x - &shadow));
        let reflected_shadow = self.b.resolvent(&reflected)?;
        let two_lambda = 2.0 * self.lambda;
        let next = x.add_scaled(-two_lambda, &(&shadow - &reflected_shadow));
        Ok(Step {
            shadow,
            reflected_shadow,
            next,
        })
    }

    /// `T_λ x`.
    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        Ok(self.step(x)?.next)
    }

    /// `T_λⁿ x`.
    pub fn power(&self, x: &Vector, n: usize) -> Result<Vector> {
        let mut current = x.clone();
        for step in 0..n {
            current = self.evaluate(&current)?;
            if !current.is_finite() {
                return Err(Error::Diverged { step });
            }
        }
        Ok(current)
    }

    /// Runs the governing sequence from `x0` until `stop` fires.
    pub fn iterate(&self, x0: &Vector, stop: &StopRule) -> Result<IterationTrace> {
        x0.ensure_dim(self.dim())?;
        x0.ensure_finite("starting point")?;
        let mut rows: Vec<TraceRow> = Vec::new();
        let mut x = x0.clone();
        let mut streak = 0;
        let mut reason = StopReason::MaxIterations;
        for n in 0..stop.max_iters {
            let step = self.step(&x).map_err(|e| match e {
                Error::NonFinite(_) => Error::Diverged { step: n },
                other => other,
            })?;
            if !step.next.is_finite() {
                return Err(Error::Diverged { step: n });
            }
            let step_diff = &x - &step.next;
            if let Some(prev) = rows.last() {
                if step.shadow.distance(&prev.shadow) < stop.shadow_tol {
                    streak += 1;
                } else {
                    streak = 0;
                }
            }
            rows.push(TraceRow {
                x,
                shadow: step.shadow,
                reflected_shadow: step.reflected_shadow,
                step_diff,
            });
            x = step.next;
            if streak >= SHADOW_STREAK {
                reason = StopReason::ShadowConverged;
                break;
            }
        }
        Ok(IterationTrace {
            lambda: self.lambda,
            rows,
            last: x,
            stop_reason: reason,
        })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("lambda must lie in (0, 1], got {lambda}")))
    }
}

/// Termination: at most `max_iters` applications of `T_λ`, or earlier once
/// `‖s_{n+1} − s_n‖ < shadow_tol` for [`SHADOW_STREAK`] consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    max_iters: usize,
    shadow_tol: f64,
}

impl StopRule {
    pub fn new(max_iters: usize, shadow_tol: f64) -> Result<Self> {
        if max_iters == 0 {
            return Err(invalid("max_iters must be positive"));
        }
        if !(shadow_tol > 0.0 && shadow_tol.is_finite()) {
            return Err(invalid(format!("shadow_tol must be positive, got {shadow_tol}")));
        }
        Ok(StopRule {
            max_iters,
            shadow_tol,
        })
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn shadow_tol(&self) -> f64 {
        self.shadow_tol
    }
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_iters: 100_000,
            shadow_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ShadowConverged,
    MaxIterations,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::ShadowConverged => "shadow_converged",
            StopReason::MaxIterations => "max_iterations",
        })
    }
}

/// State at step n: `x_n`, `s_n = J_A x_n`, `t_n = J_B R_A x_n` and
/// `d_n = x_n − x_{n+1} = 2λ(s_n − t_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub x: Vector,
    pub shadow: Vector,
    pub reflected_shadow: Vector,
    pub step_diff: Vector,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    lambda: f64,
    rows: Vec<TraceRow>,
    last: Vector,
    stop_reason: StopReason,
}

impl IterationTrace {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last_row(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// The governing iterate after the last recorded step.
    pub fn final_point(&self) -> &Vector {
        &self.last
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    pub fn dim(&self) -> usize {
        self.last.dim()
    }
}
