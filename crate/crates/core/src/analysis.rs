//! Estimation of the minimal displacement vector and of normal solutions,
//! plus numerical certificates for the identities satisfied by the relaxed
//! splitting operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{NormalCone, PrimitiveSet, Vector};
use crate::operators::ResolventOperator;
use crate::splitting::{IterationTrace, SplittingOperator, StopRule};

/// Rows averaged by [`estimate_displacement`].
pub const TAIL_WINDOW: usize = 10;
/// Minimum trace length accepted by [`estimate_displacement`].
pub const MIN_TRACE_LEN: usize = 20;
/// Step length below which the shifted iteration is considered converged.
pub const SHIFTED_STEP_TOL: f64 = 1e-11;
/// Cyclic sums above this count as violations of cyclic monotonicity.
pub const CYCLE_VIOLATION_TOL: f64 = 1e-6;
/// Boundary tolerance used when locating normal cones at computed points.
pub const INCLUSION_TOL: f64 = 1e-7;

/// Estimate of `v` from the tail of a trace: `d_n/(2λ) → v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementEstimate {
    pub v: Vector,
    pub lambda: f64,
    /// Largest deviation of `d_n/(2λ)` from `v` over the averaged window.
    pub tail_residual: f64,
}

pub fn estimate_displacement(trace: &IterationTrace) -> Result<DisplacementEstimate> {
    let lambda = trace.lambda();
    if lambda >= 1.0 {
        return Err(Error::Unsupported(
            "displacement estimation needs an averaged operator (lambda < 1)".into(),
        ));
    }
    if trace.len() < MIN_TRACE_LEN {
        return Err(Error::TraceTooShort {
            needed: MIN_TRACE_LEN,
            have: trace.len(),
        });
    }
    let scale = 1.0 / (2.0 * lambda);
    let tail: Vec<Vector> = trace.rows()[trace.len() - TAIL_WINDOW..]
        .iter()
        .map(|row| scale * &row.step_diff)
        .collect();
    let mut v = Vector::zeros(trace.dim());
    for d in &tail {
        v = &v + d;
    }
    let v = (1.0 / TAIL_WINDOW as f64) * v;
    let tail_residual = tail.iter().map(|d| d.distance(&v)).fold(0.0, f64::max);
    Ok(DisplacementEstimate {
        v,
        lambda,
        tail_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub estimates: Vec<DisplacementEstimate>,
    /// Largest pairwise distance between the normalized estimates.
    pub max_pairwise_deviation: f64,
}

/// Estimates `v` at each λ. Since `v_λ = 2λv`, the normalized estimates
/// should agree.
pub fn scaling_law_check(
    a: &ResolventOperator,
    b: &ResolventOperator,
    x0: &Vector,
    lambdas: &[f64],
    stop: &StopRule,
) -> Result<ScalingReport> {
    let mut estimates = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let split = SplittingOperator::new(a.clone(), b.clone(), lambda)?;
        estimates.push(estimate_displacement(&split.iterate(x0, stop)?)?);
    }
    let mut max_pairwise_deviation: f64 = 0.0;
    for (i, e) in estimates.iter().enumerate() {
        for f in &estimates[i + 1..] {
            max_pairwise_deviation = max_pairwise_deviation.max(e.v.distance(&f.v));
        }
    }
    Ok(ScalingReport {
        estimates,
        max_pairwise_deviation,
    })
}

/// A point `y ∈ Fix(v + T)` and the normal solution `x̄ = J_A y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalSolution {
    pub xbar: Vector,
    pub fixed_point: Vector,
    /// `‖v + T y − y‖` with `T` the Douglas–Rachford operator (λ = 1/2).
    pub residual: f64,
    pub iterations: usize,
}

/// Iterates the averaged map `x ↦ 2λv + T_λ x`, whose fixed points are
/// `Fix(v + T)` for every λ ∈ (0,1). Fails with [`Error::NoConvergence`]
/// when the steps do not drop below [`SHIFTED_STEP_TOL`] within the budget,
/// which is what happens when the set of normal solutions is empty.
pub fn solve_shifted_fixed_point(
    a: &ResolventOperator,
    b: &ResolventOperator,
    lambda: f64,
    v: &Vector,
    x0: &Vector,
    stop: &StopRule,
) -> Result<NormalSolution> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!(
            "shifted fixed-point iteration needs lambda in (0, 1), got {lambda}"
        )));
    }
    let split = SplittingOperator::new(a.clone(), b.clone(), lambda)?;
    v.ensure_dim(split.dim())?;
    v.ensure_finite("displacement vector")?;
    x0.ensure_dim(split.dim())?;
    let shift = (2.0 * lambda) * v;
    let mut x = x0.clone();
    let mut last_step = f64::INFINITY;
    for k in 0..stop.max_iters() {
        let next = &shift + &split.evaluate(&x)?;
        if !next.is_finite() {
            return Err(Error::Diverged { step: k });
        }
        last_step = next.distance(&x);
        x = next;
        if last_step < SHIFTED_STEP_TOL {
            let dr = split.with_lambda(0.5)?;
            let residual = (v + &dr.evaluate(&x)?).distance(&x);
            return Ok(NormalSolution {
                xbar: a.resolvent(&x)?,
                fixed_point: x,
                residual,
                iterations: k + 1,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: stop.max_iters(),
        last_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslationReport {
    /// `max_{n ≤ N} ‖T_λⁿ y − (y − 2λn·v)‖`.
    pub max_orbit_residual: f64,
    /// `max_{n ≤ N} ‖J_A T_λⁿ y − J_A y‖`.
    pub max_shadow_drift: f64,
}

/// Checks that the orbit of a point of `Fix(v + T)` is a pure translation
/// by `−2λv` per step, with a constant shadow.
pub fn translation_identity_check(
    split: &SplittingOperator,
    y: &Vector,
    v: &Vector,
    steps: usize,
) -> Result<TranslationReport> {
    v.ensure_dim(split.dim())?;
    let two_lambda = 2.0 * split.lambda();
    let shadow0 = split.a().resolvent(y)?;
    let mut z = y.clone();
    let mut report = TranslationReport {
        max_orbit_residual: 0.0,
        max_shadow_drift: 0.0,
    };
    for n in 1..=steps {
        let step = split.step(&z)?;
        z = step.next;
        let predicted = y.add_scaled(-two_lambda * n as f64, v);
        report.max_orbit_residual = report.max_orbit_residual.max(z.distance(&predicted));
        let shadow = split.a().resolvent(&z)?;
        report.max_shadow_drift = report.max_shadow_drift.max(shadow.distance(&shadow0));
    }
    Ok(report)
}

/// Both sides of
/// `λ‖x−y‖² − λ‖T_λx−T_λy‖² − (1−λ)‖(Id−T_λ)x−(Id−T_λ)y‖²
///   = 4λ²⟨J_Ax−J_Ay, J_{A⁻¹}x−J_{A⁻¹}y⟩ + 4λ²⟨J_BR_Ax−J_BR_Ay, J_{B⁻¹}R_Ax−J_{B⁻¹}R_Ay⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// `⟨J_Ax−J_Ay, J_{A⁻¹}x−J_{A⁻¹}y⟩ ≥ 0`.
    pub a_term: f64,
    /// `⟨J_BR_Ax−J_BR_Ay, J_{B⁻¹}R_Ax−J_{B⁻¹}R_Ay⟩ ≥ 0`.
    pub b_term: f64,
    /// `‖x−y‖² − ‖T_λx−T_λy‖²`.
    pub decrease: f64,
    /// `λ‖x−y‖²`, the magnitude of the terms that cancel in `lhs`.
    pub scale: f64,
    pub lambda: f64,
}

impl PairIdentity {
    /// `|lhs − rhs|` relative to `λ‖x−y‖²`.
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.scale.max(f64::MIN_POSITIVE)
    }

    /// Slack in `‖x−y‖² − ‖Tx−Ty‖² ≥ 4λ·a_term` (negative means violated).
    pub fn a_slack(&self) -> f64 {
        self.decrease - 4.0 * self.lambda * self.a_term
    }

    /// Slack in `‖x−y‖² − ‖Tx−Ty‖² ≥ 4λ·b_term` (negative means violated).
    pub fn b_slack(&self) -> f64 {
        self.decrease - 4.0 * self.lambda * self.b_term
    }
}

pub fn pair_identity(split: &SplittingOperator, x: &Vector, y: &Vector) -> Result<PairIdentity> {
    let lambda = split.lambda();
    let (sx, sy) = (split.step(x)?, split.step(y)?);
    let dxy = x - y;
    let dt = &sx.next - &sy.next;
    let dres = &(x - &sx.next) - &(y - &sy.next);
    let lhs = lambda * dxy.norm_squared() - lambda * dt.norm_squared() - (1.0 - lambda) * dres.norm_squared();

    let (ax, ay) = (split.a().inverse_resolvent(x)?, split.a().inverse_resolvent(y)?);
    let a_term = (&sx.shadow - &sy.shadow).dot(&(&ax - &ay));
    let (rx, ry) = (split.a().reflected(x)?, split.a().reflected(y)?);
    let (bx, by) = (split.b().inverse_resolvent(&rx)?, split.b().inverse_resolvent(&ry)?);
    let b_term = (&sx.reflected_shadow - &sy.reflected_shadow).dot(&(&bx - &by));

    Ok(PairIdentity {
        lhs,
        rhs: 4.0 * lambda * lambda * (a_term + b_term),
        a_term,
        b_term,
        decrease: dxy.norm_squared() - dt.norm_squared(),
        scale: lambda * dxy.norm_squared(),
        lambda,
    })
}

/// `dist(0, −v + A x̄ + B(x̄ − v))` for structured operators, i.e. how far
/// `x̄` is from being a normal solution. `None` when either operator has an
/// unknown graph.
pub fn normal_solution_residual(
    a: &ResolventOperator,
    b: &ResolventOperator,
    xbar: &Vector,
    v: &Vector,
) -> Option<f64> {
    let y = xbar - v;
    let g = &(&a.single_valued_part(xbar)? + &b.single_valued_part(&y)?) - v;
    let cone_at = |op: &ResolventOperator, p: &Vector| match op.constraint_set() {
        None => Some(NormalCone::Trivial),
        Some(set) => set.normal_cone(p, INCLUSION_TOL),
    };
    let (Some(ka), Some(kb)) = (cone_at(a, xbar), cone_at(b, &y)) else {
        return Some(f64::INFINITY);
    };
    Some(cone_sum_distance(&g, &ka, &kb))
}

/// `min ‖g + n₁ + n₂‖` over `n₁ ∈ K₁`, `n₂ ∈ K₂` by block coordinate descent.
fn cone_sum_distance(g: &Vector, k1: &NormalCone, k2: &NormalCone) -> f64 {
    let neg_g = -g;
    let mut n2 = Vector::zeros(g.dim());
    let mut best = g.norm();
    for _ in 0..10_000 {
        let n1 = k1.project(&(&neg_g - &n2));
        n2 = k2.project(&(&neg_g - &n1));
        let r = (&(g + &n1) + &n2).norm();
        if best - r <= 1e-16 * (1.0 + best) {
            best = best.min(r);
            break;
        }
        best = r;
    }
    best
}

/// Graph points `(J z, z − J z)` of a sampled cycle and its cyclic sum
/// `Σ ⟨x_{i+1} − x_i, x_i*⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleViolation {
    pub points: Vec<Vector>,
    pub duals: Vec<Vector>,
    pub cyclic_sum: f64,
    /// Number of cycles evaluated before the search ended.
    pub trials_used: usize,
}

/// Perturbation steps spent refining each random cycle.
const CLIMB_STEPS: usize = 49;

/// Seeded random search with hill climbing for a cycle of graph points whose
/// cyclic sum exceeds [`CYCLE_VIOLATION_TOL`]. Each evaluated cycle counts as
/// one trial. Returns the best violating cycle, or `None`.
pub fn cyclic_monotonicity_search(
    op: &ResolventOperator,
    cycle_len: usize,
    trials: usize,
    sample_box: &PrimitiveSet,
    seed: u64,
) -> Result<Option<CycleViolation>> {
    if cycle_len < 3 {
        return Err(invalid(format!("cycle length must be at least 3, got {cycle_len}")));
    }
    let (lo, hi) = box_bounds(sample_box, op.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width: f64 = lo.iter().zip(hi.iter()).map(|(l, h)| h - l).fold(0.0, f64::max);

    let mut best: Option<(f64, Vec<Vector>)> = None;
    let mut used = 0;
    while used < trials {
        let mut zs: Vec<Vector> = (0..cycle_len).map(|_| sample_in(&mut rng, &lo, &hi)).collect();
        let mut current = cyclic_sum(op, &zs)?;
        used += 1;
        let mut sigma = 0.1 * width;
        for _ in 0..CLIMB_STEPS {
            if used >= trials {
                break;
            }
            let i = rng.gen_range(0..cycle_len);
            let old = zs[i].clone();
            let moved: Vec<f64> = old
                .iter()
                .enumerate()
                .map(|(k, &c)| (c + sigma * rng.gen_range(-1.0..1.0)).clamp(lo[k], hi[k]))
                .collect();
            zs[i] = Vector::from(moved);
            let candidate = cyclic_sum(op, &zs)?;
            used += 1;
            if candidate > current {
                current = candidate;
            } else {
                zs[i] = old;
                sigma *= 0.9;
            }
        }
        if best.as_ref().is_none_or(|(s, _)| current > *s) {
            best = Some((current, zs));
        }
    }
    match best {
        Some((sum, zs)) if sum > CYCLE_VIOLATION_TOL => {
            let mut points = Vec::with_capacity(zs.len());
            let mut duals = Vec::with_capacity(zs.len());
            for z in &zs {
                let j = op.resolvent(z)?;
                duals.push(z - &j);
                points.push(j);
            }
            Ok(Some(CycleViolation {
                points,
                duals,
                cyclic_sum: sum,
                trials_used: used,
            }))
        }
        _ => Ok(None),
    }
}

fn cyclic_sum(op: &ResolventOperator, zs: &[Vector]) -> Result<f64> {
    let mut pts = Vec::with_capacity(zs.len());
    for z in zs {
        pts.push((op.resolvent(z)?, z));
    }
    let n = pts.len();
    Ok((0..n)
        .map(|i| {
            let (xi, zi) = &pts[i];
            let dual = *zi - xi;
            (&pts[(i + 1) % n].0 - xi).dot(&dual)
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// Minimum of `⟨x − y, x* − y*⟩` over sampled graph pairs.
    pub min_inner: f64,
    /// Minimum of `⟨x − y, x* − y*⟩ / ‖x − y‖²` over pairs with `x ≠ y`;
    /// a lower estimate of the strong monotonicity constant.
    pub min_ratio: f64,
}

/// Samples graph pairs through the Minty parametrization and reports the
/// smallest monotonicity inner product.
pub fn monotonicity_certificate(
    op: &ResolventOperator,
    pairs: usize,
    sample_box: &PrimitiveSet,
    seed: u64,
) -> Result<MonotonicityReport> {
    let (lo, hi) = box_bounds(sample_box, op.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MonotonicityReport {
        min_inner: f64::INFINITY,
        min_ratio: f64::INFINITY,
    };
    for _ in 0..pairs {
        let (z, w) = (sample_in(&mut rng, &lo, &hi), sample_in(&mut rng, &lo, &hi));
        let (jz, jw) = (op.resolvent(&z)?, op.resolvent(&w)?);
        let dx = &jz - &jw;
        let inner = dx.dot(&(&(&z - &jz) - &(&w - &jw)));
        report.min_inner = report.min_inner.min(inner);
        let sq = dx.norm_squared();
        if sq > 1e-12 {
            report.min_ratio = report.min_ratio.min(inner / sq);
        }
    }
    Ok(report)
}

fn box_bounds(set: &PrimitiveSet, dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    set.validate()?;
    match set {
        PrimitiveSet::Box { lo, hi } => {
            lo.ensure_dim(dim)?;
            Ok((lo.as_slice().to_vec(), hi.as_slice().to_vec()))
        }
        _ => Err(invalid("sampling region must be a box")),
    }
}

fn sample_in(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]) -> Vector {
    Vector::from(
        lo.iter()
            .zip(hi)
            .map(|(&l, &h)| if h > l { rng.gen_range(l..h) } else { l })
            .collect::<Vec<_>>(),
    )
}
