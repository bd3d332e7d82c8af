//! Maximally monotone operators on R^n, each represented by its resolvent
//! `J = (Id + A)⁻¹`.
//!
//! Every catalogue operator has the form `A(u) = M(u) + N_C(u)` where `M` is
//! single-valued (linear or affine) and `C` is a primitive set (or the whole
//! space). That structure is kept alongside the closed-form resolvent so the
//! graph of `A` can be queried directly, which the analysis module uses for
//! inclusion checks.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Matrix2, PrimitiveSet, Vector};

/// Tolerance for the algebraic invariants of [`SkewLinearSpec`].
const SKEW_TOL: f64 = 1e-12;
/// How far `w` may sit off the line in [`prox_quadratic_on_line`].
const ON_LINE_TOL: f64 = 1e-9;
/// Tiny negative radicands below this magnitude are treated as rounding.
const RADICAND_TOL: f64 = 1e-12;

/// Parameters of `A = α·Id + β·S` with `S` skew and `S² = −γ·Id`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewLinearSpec {
    alpha: f64,
    beta: f64,
    gamma: f64,
    s: Matrix2,
}

impl SkewLinearSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, s: Matrix2) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite() && s.is_finite()) {
            return Err(Error::NonFinite("skew-linear parameters"));
        }
        if alpha < 0.0 {
            return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
        }
        if gamma < 0.0 {
            return Err(invalid(format!("gamma must be nonnegative, got {gamma}")));
        }
        let sym = s.add(&s.transpose());
        if sym.max_abs_entry() > SKEW_TOL {
            return Err(invalid("S must be skew (S and −S monotone)"));
        }
        let square = s.mul(&s).add(&Matrix2::identity().scale(gamma));
        if square.max_abs_entry() > SKEW_TOL {
            return Err(invalid(format!("S² must equal −{gamma}·Id")));
        }
        Ok(SkewLinearSpec { alpha, beta, gamma, s })
    }

    /// `R_θ = cos θ·Id + sin θ·S` with `S` the quarter turn.
    pub fn rotation(theta: f64) -> Result<Self> {
        let (sin, cos) = theta.sin_cos();
        Self::new(cos, sin, 1.0, Matrix2::quarter_turn())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn s(&self) -> Matrix2 {
        self.s
    }

    /// `α·Id + β·S`.
    pub fn matrix(&self) -> Matrix2 {
        Matrix2::identity().scale(self.alpha).add(&self.s.scale(self.beta))
    }

    fn denominator(&self) -> f64 {
        (1.0 + self.alpha).powi(2) + self.beta * self.beta * self.gamma
    }

    /// `((1+α)·Id − β·S) / ((1+α)² + β²γ)`.
    pub fn resolvent_matrix(&self) -> Matrix2 {
        Matrix2::identity()
            .scale(1.0 + self.alpha)
            .add(&self.s.scale(-self.beta))
            .scale(1.0 / self.denominator())
    }

    /// `((1 − α² − β²γ)·Id − 2β·S) / ((1+α)² + β²γ)`.
    pub fn reflected_matrix(&self) -> Matrix2 {
        let d = self.denominator();
        Matrix2::identity()
            .scale((1.0 - self.alpha * self.alpha - self.beta * self.beta * self.gamma) / d)
            .add(&self.s.scale(-2.0 * self.beta / d))
    }
}

type Evaluator = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Zero,
    SkewLinear(SkewLinearSpec),
    SkewLinearBall {
        spec: SkewLinearSpec,
        ball: PrimitiveSet,
    },
    LinearHalfspace {
        l: Matrix2,
        j_l: Matrix2,
        u: Vector,
        u_perp: Vector,
        kappa: f64,
        set: PrimitiveSet,
    },
    ShiftedBallNormal {
        b: Vector,
        ball: PrimitiveSet,
    },
    QuadraticOnLine {
        gamma: f64,
        w: Vector,
        line: PrimitiveSet,
    },
    BoxIndicator {
        set: PrimitiveSet,
    },
    Custom(Evaluator),
}

/// A maximally monotone operator, evaluated through its resolvent.
#[derive(Clone)]
pub struct ResolventOperator {
    kind: Kind,
    label: String,
    dim: usize,
}

impl fmt::Debug for ResolventOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResolventOperator")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}

impl ResolventOperator {
    /// The zero operator; its resolvent is the identity.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(ResolventOperator {
            kind: Kind::Zero,
            label: "0".into(),
            dim,
        })
    }

    /// Wraps a user-supplied resolvent. The caller is responsible for it
    /// being firmly nonexpansive; graph queries are unavailable.
    pub fn custom<F>(label: impl Into<String>, dim: usize, evaluator: F) -> Result<Self>
    where
        F: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(ResolventOperator {
            kind: Kind::Custom(Arc::new(evaluator)),
            label: label.into(),
            dim,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, x: &Vector) -> Result<()> {
        x.ensure_dim(self.dim)?;
        x.ensure_finite("resolvent argument")
    }

    /// `J(x)`.
    pub fn resolvent(&self, x: &Vector) -> Result<Vector> {
        self.check(x)?;
        let out = self.eval(x);
        out.ensure_finite("resolvent value")?;
        Ok(out)
    }

    /// `R(x) = 2·J(x) − x`.
    pub fn reflected(&self, x: &Vector) -> Result<Vector> {
        let j = self.resolvent(x)?;
        Ok(x.add_scaled(-2.0, &(x - &j)))
    }

    /// `J_{A⁻¹}(x) = x − J(x)`.
    pub fn inverse_resolvent(&self, x: &Vector) -> Result<Vector> {
        let j = self.resolvent(x)?;
        Ok(x - &j)
    }

    pub(crate) fn eval(&self, x: &Vector) -> Vector {
        match &self.kind {
            Kind::Zero => x.clone(),
            Kind::SkewLinear(spec) => spec.resolvent_matrix().apply_unchecked(x),
            Kind::SkewLinearBall { spec, .. } => skew_linear_ball(spec, x),
            Kind::LinearHalfspace {
                j_l,
                u,
                u_perp,
                kappa,
                ..
            } => {
                let z = j_l.apply_unchecked(x);
                // On ⟨J_L x, u⟩ = 0 both branches coincide; take the second.
                if z.dot(u) < 0.0 {
                    z
                } else {
                    (x.dot(u_perp) / kappa) * u_perp
                }
            }
            Kind::ShiftedBallNormal { b, ball } => ball.project_unchecked(&(x - b)),
            Kind::QuadraticOnLine { gamma, w, line } => {
                let target = (1.0 / (1.0 + gamma)) * x.add_scaled(*gamma, w);
                line.project_unchecked(&target)
            }
            Kind::BoxIndicator { set } => set.project_unchecked(x),
            Kind::Custom(f) => f(x),
        }
    }

    /// The set `C` in `A = M + N_C`; `None` for operators with full domain
    /// or an unknown structure.
    pub fn constraint_set(&self) -> Option<&PrimitiveSet> {
        match &self.kind {
            Kind::SkewLinearBall { ball, .. } => Some(ball),
            Kind::LinearHalfspace { set, .. } => Some(set),
            Kind::ShiftedBallNormal { ball, .. } => Some(ball),
            Kind::QuadraticOnLine { line, .. } => Some(line),
            Kind::BoxIndicator { set } => Some(set),
            Kind::Zero | Kind::SkewLinear(_) | Kind::Custom(_) => None,
        }
    }

    /// The single-valued part `M(u)` of `A(u) = M(u) + N_C(u)`; `None` for
    /// custom operators.
    pub fn single_valued_part(&self, u: &Vector) -> Option<Vector> {
        if u.dim() != self.dim {
            return None;
        }
        let m = match &self.kind {
            Kind::Zero | Kind::BoxIndicator { .. } => Vector::zeros(self.dim),
            Kind::SkewLinear(spec) | Kind::SkewLinearBall { spec, .. } => {
                spec.matrix().apply_unchecked(u)
            }
            Kind::LinearHalfspace { l, .. } => l.apply_unchecked(u),
            Kind::ShiftedBallNormal { b, .. } => b.clone(),
            Kind::QuadraticOnLine { gamma, w, .. } => *gamma * &(u - w),
            Kind::Custom(_) => return None,
        };
        Some(m)
    }

    /// Distance from `w` to `A(u)`: infinite when `u ∉ dom A` (beyond `tol`),
    /// `None` when the operator's structure is unknown.
    pub fn graph_residual(&self, u: &Vector, w: &Vector, tol: f64) -> Option<f64> {
        if w.dim() != self.dim {
            return None;
        }
        let m = self.single_valued_part(u)?;
        let g = w - &m;
        match self.constraint_set() {
            None => Some(g.norm()),
            Some(set) => Some(match set.normal_cone(u, tol) {
                Some(cone) => cone.distance(&g),
                None => f64::INFINITY,
            }),
        }
    }
}

fn skew_linear_ball(spec: &SkewLinearSpec, x: &Vector) -> Vector {
    let n2 = x.norm_squared();
    if n2 <= spec.denominator() {
        return spec.resolvent_matrix().apply_unchecked(x);
    }
    let mut radicand = n2 - spec.gamma * spec.beta * spec.beta;
    if radicand < 0.0 && radicand > -RADICAND_TOL {
        radicand = 0.0;
    }
    let sx = spec.s.apply_unchecked(x);
    (1.0 / n2) * radicand.sqrt() * x - (spec.beta / n2) * &sx
}

/// Resolvent of `A = α·Id + β·S`.
pub fn resolvent_skew_linear(spec: SkewLinearSpec) -> ResolventOperator {
    ResolventOperator {
        label: format!(
            "{}·Id + {}·S (S²=−{}·Id)",
            spec.alpha, spec.beta, spec.gamma
        ),
        kind: Kind::SkewLinear(spec),
        dim: 2,
    }
}

/// Resolvent of `A = α·Id + β·S + N_{ball(0,1)}`.
pub fn resolvent_skew_linear_ball(spec: SkewLinearSpec) -> ResolventOperator {
    ResolventOperator {
        label: format!(
            "{}·Id + {}·S + N_ball(0,1) (S²=−{}·Id)",
            spec.alpha, spec.beta, spec.gamma
        ),
        kind: Kind::SkewLinearBall {
            spec,
            ball: PrimitiveSet::ball(Vector::zeros(2), 1.0).expect("unit ball"),
        },
        dim: 2,
    }
}

/// Resolvent of `A = R_θ + N_{ball(0,1)}` for `θ ∈ [0, π/2)`.
pub fn resolvent_rotation_ball(theta: f64) -> Result<ResolventOperator> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(invalid(format!("theta must lie in [0, π/2), got {theta}")));
    }
    let mut op = resolvent_skew_linear_ball(SkewLinearSpec::rotation(theta)?);
    op.label = format!("R_{theta} + N_ball(0,1)");
    Ok(op)
}

/// Resolvent of `A = L + N_K` with `K = {x : ⟨x, u⟩ ≤ 0}` and `L` a monotone
/// 2×2 matrix.
pub fn resolvent_linear_halfspace(l: Matrix2, u: Vector) -> Result<ResolventOperator> {
    if !l.is_finite() {
        return Err(Error::NonFinite("matrix L"));
    }
    if !l.is_monotone() {
        return Err(invalid("L must be monotone"));
    }
    u.ensure_dim(2)?;
    let set = PrimitiveSet::halfspace(u)?;
    let PrimitiveSet::Halfspace { normal: u } = &set else {
        unreachable!()
    };
    let u = u.clone();
    let u_perp = Vector::from([-u[1], u[0]]);
    let kappa = 1.0 + u_perp.dot(&l.apply_unchecked(&u_perp));
    let j_l = Matrix2::identity()
        .add(&l)
        .inverse()
        .ok_or_else(|| invalid("Id + L is singular"))?;
    Ok(ResolventOperator {
        label: format!("L + N_K (K = {{⟨x,{u}⟩ ≤ 0}})"),
        kind: Kind::LinearHalfspace {
            l,
            j_l,
            u,
            u_perp,
            kappa,
            set,
        },
        dim: 2,
    })
}

/// Resolvent of `B = b + N_{ball(c,r)}`, i.e. `x ↦ P_{ball(c,r)}(x − b)`.
pub fn resolvent_shifted_ball_normal(b: Vector, c: Vector, r: f64) -> Result<ResolventOperator> {
    b.ensure_finite("shift b")?;
    b.ensure_dim(c.dim())?;
    let ball = PrimitiveSet::ball(c.clone(), r)?;
    Ok(ResolventOperator {
        label: format!("{b} + N_ball({c},{r})"),
        dim: b.dim(),
        kind: Kind::ShiftedBallNormal { b, ball },
    })
}

/// Proximal map of `f = (γ/2)‖· − w‖² + ι_U` for a line `U` through the
/// origin containing `w`: `x ↦ P_U((x + γw)/(1 + γ))`.
pub fn prox_quadratic_on_line(gamma: f64, w: Vector, line: PrimitiveSet) -> Result<ResolventOperator> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    line.validate()?;
    if !matches!(line, PrimitiveSet::LineThroughOrigin { .. }) {
        return Err(invalid("the constraint of the quadratic prox must be a line through the origin"));
    }
    w.ensure_finite("anchor w")?;
    w.ensure_dim(line.dim())?;
    let off = w.distance(&line.project_unchecked(&w));
    if off > ON_LINE_TOL {
        return Err(invalid(format!("w must lie on U (distance {off:e})")));
    }
    Ok(ResolventOperator {
        label: format!("prox[({gamma}/2)‖·−{w}‖² + ι_U]"),
        dim: w.dim(),
        kind: Kind::QuadraticOnLine { gamma, w, line },
    })
}

/// Proximal map of the indicator of the box `[lo, hi]` (componentwise clamp).
pub fn prox_box_indicator(lo: Vector, hi: Vector) -> Result<ResolventOperator> {
    let set = PrimitiveSet::boxed(lo.clone(), hi.clone())?;
    Ok(ResolventOperator {
        label: format!("ι_[{lo},{hi}]"),
        dim: lo.dim(),
        kind: Kind::BoxIndicator { set },
    })
}
