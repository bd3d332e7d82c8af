//! Vector and matrix primitives plus Euclidean projections onto the
//! primitive sets used by every resolvent formula.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance on the unit-norm invariant of halfspace normals and line directions.
const UNIT_TOL: f64 = 1e-12;

/// A point of R^n.
///
/// Arithmetic operators panic on mismatched dimensions; every public
/// operation of the library checks dimensions first and reports
/// [`Error::DimensionMismatch`] instead.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("vector dimension must be at least 1"));
        }
        let v = Vector(coords);
        v.ensure_finite("vector construction")?;
        Ok(v)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        (self - other).norm()
    }

    /// `self + t * direction`.
    pub fn add_scaled(&self, t: f64, direction: &Vector) -> Vector {
        assert_eq!(self.dim(), direction.dim(), "add_scaled: dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(&direction.0)
                .map(|(a, d)| a + t * d)
                .collect(),
        )
    }

    fn zip_with(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&a| f(a)).collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(coords: [f64; N]) -> Self {
        Vector(coords.to_vec())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(coords: Vec<f64>) -> Self {
        Vector(coords)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        &self + &rhs
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        &self - &rhs
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.map(|a| self * a)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: Vector) -> Vector {
        self * &rhs
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.map(|a| -a)
    }
}

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub const fn identity() -> Self {
        Matrix2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        Matrix2::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Counter-clockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    /// Quarter turn `[[0,-1],[1,0]]`, so that `rotation(t) = cos t·I + sin t·quarter_turn()`.
    pub const fn quarter_turn() -> Self {
        Matrix2::new(0.0, -1.0, 1.0, 0.0)
    }

    pub fn scale(&self, t: f64) -> Self {
        Matrix2::new(t * self.a11, t * self.a12, t * self.a21, t * self.a22)
    }

    pub fn add(&self, other: &Matrix2) -> Self {
        Matrix2::new(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
        )
    }

    pub fn mul(&self, o: &Matrix2) -> Self {
        Matrix2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn transpose(&self) -> Self {
        Matrix2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn determinant(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Direct 2×2 inverse; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Matrix2::new(self.a22, -self.a12, -self.a21, self.a11).scale(1.0 / det))
    }

    pub fn max_abs_entry(&self) -> f64 {
        [self.a11, self.a12, self.a21, self.a22]
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }

    /// `⟨x, Mx⟩ ≥ 0` for all x, i.e. `a11 ≥ 0`, `a22 ≥ 0` and
    /// `4·a11·a22 ≥ (a12 + a21)²`.
    pub fn is_monotone(&self) -> bool {
        self.a11 >= 0.0
            && self.a22 >= 0.0
            && 4.0 * self.a11 * self.a22 >= (self.a12 + self.a21).powi(2)
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|a| a.is_finite())
    }

    /// Matrix-vector product; `x` must be two-dimensional.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.ensure_dim(2)?;
        x.ensure_finite("matrix argument")?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        Vector::from([
            self.a11 * x[0] + self.a12 * x[1],
            self.a21 * x[0] + self.a22 * x[1],
        ])
    }
}

/// Closed convex sets with closed-form projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PrimitiveSet {
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    /// `{x : ⟨x, normal⟩ ≤ 0}`.
    Halfspace { normal: Vector },
    /// `R·direction`.
    LineThroughOrigin { direction: Vector },
}

impl PrimitiveSet {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        center.ensure_finite("ball center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(PrimitiveSet::Ball { center, radius })
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        lo.ensure_finite("box lower bound")?;
        hi.ensure_finite("box upper bound")?;
        hi.ensure_dim(lo.dim())?;
        if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
            return Err(invalid(format!(
                "box bounds inverted in coordinate {i}: {} > {}",
                lo[i], hi[i]
            )));
        }
        Ok(PrimitiveSet::Box { lo, hi })
    }

    /// `{x : ⟨x, normal⟩ ≤ 0}`; `normal` is rescaled to unit length.
    pub fn halfspace(normal: Vector) -> Result<Self> {
        Ok(PrimitiveSet::Halfspace {
            normal: unit(normal, "halfspace normal")?,
        })
    }

    /// The line spanned by `direction`; `direction` is rescaled to unit length.
    pub fn line(direction: Vector) -> Result<Self> {
        Ok(PrimitiveSet::LineThroughOrigin {
            direction: unit(direction, "line direction")?,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            PrimitiveSet::Ball { center, .. } => center.dim(),
            PrimitiveSet::Box { lo, .. } => lo.dim(),
            PrimitiveSet::Halfspace { normal } => normal.dim(),
            PrimitiveSet::LineThroughOrigin { direction } => direction.dim(),
        }
    }

    /// Checks the variant invariants (relevant for sets built literally
    /// rather than through the constructors).
    pub fn validate(&self) -> Result<()> {
        match self {
            PrimitiveSet::Ball { center, radius } => {
                PrimitiveSet::ball(center.clone(), *radius).map(|_| ())
            }
            PrimitiveSet::Box { lo, hi } => PrimitiveSet::boxed(lo.clone(), hi.clone()).map(|_| ()),
            PrimitiveSet::Halfspace { normal: d } | PrimitiveSet::LineThroughOrigin { direction: d } => {
                d.ensure_finite("set direction")?;
                if (d.norm() - 1.0).abs() > UNIT_TOL {
                    return Err(invalid(format!("direction must have unit norm, got {}", d.norm())));
                }
                Ok(())
            }
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.validate()?;
        x.ensure_dim(self.dim())?;
        x.ensure_finite("projection argument")?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        match self {
            PrimitiveSet::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center.add_scaled(radius / n, &d)
                }
            }
            PrimitiveSet::Box { lo, hi } => Vector(
                x.iter()
                    .zip(lo.iter().zip(hi.iter()))
                    .map(|(&xi, (&l, &h))| xi.max(l).min(h))
                    .collect(),
            ),
            PrimitiveSet::Halfspace { normal } => {
                let t = x.dot(normal);
                if t <= 0.0 {
                    x.clone()
                } else {
                    x.add_scaled(-t, normal)
                }
            }
            PrimitiveSet::LineThroughOrigin { direction } => x.dot(direction) * direction,
        }
    }

    /// Membership up to `tol` in the set's defining inequalities.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            PrimitiveSet::Ball { center, radius } => x.distance(center) <= radius + tol,
            PrimitiveSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi.iter()))
                .all(|(&xi, (&l, &h))| xi >= l - tol && xi <= h + tol),
            PrimitiveSet::Halfspace { normal } => x.dot(normal) <= tol,
            PrimitiveSet::LineThroughOrigin { direction } => {
                x.distance(&(x.dot(direction) * direction)) <= tol
            }
        }
    }

    /// Normal cone at `p`, or `None` when `p` is farther than `tol` from the set.
    /// Points within `tol` of the boundary are treated as boundary points.
    pub fn normal_cone(&self, p: &Vector, tol: f64) -> Option<NormalCone> {
        if !self.contains(p, tol) {
            return None;
        }
        let cone = match self {
            PrimitiveSet::Ball { center, radius } => {
                let d = p - center;
                let n = d.norm();
                if n < radius - tol || n == 0.0 {
                    NormalCone::Trivial
                } else {
                    NormalCone::Ray((1.0 / n) * d)
                }
            }
            PrimitiveSet::Box { lo, hi } => NormalCone::Orthant(
                p.iter()
                    .zip(lo.iter().zip(hi.iter()))
                    .map(|(&pi, (&l, &h))| {
                        let at_lo = (pi - l).abs() <= tol;
                        let at_hi = (pi - h).abs() <= tol;
                        match (at_lo, at_hi) {
                            (true, true) => ConeSign::Free,
                            (true, false) => ConeSign::NonPositive,
                            (false, true) => ConeSign::NonNegative,
                            (false, false) => ConeSign::Zero,
                        }
                    })
                    .collect(),
            ),
            PrimitiveSet::Halfspace { normal } => {
                if p.dot(normal) < -tol {
                    NormalCone::Trivial
                } else {
                    NormalCone::Ray(normal.clone())
                }
            }
            PrimitiveSet::LineThroughOrigin { direction } => {
                NormalCone::OrthogonalComplement(direction.clone())
            }
        };
        Some(cone)
    }
}

fn unit(v: Vector, what: &'static str) -> Result<Vector> {
    v.ensure_finite(what)?;
    let n = v.norm();
    if n == 0.0 {
        return Err(invalid(format!("{what} must be nonzero")));
    }
    Ok((1.0 / n) * v)
}

/// Sign constraint of one coordinate of a box normal cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSign {
    Zero,
    NonNegative,
    NonPositive,
    Free,
}

/// Normal cones of the primitive sets, all closed convex cones with
/// closed-form projections.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalCone {
    /// `{0}` (interior points, or the whole-space constraint).
    Trivial,
    /// `R₊·d` for a unit vector d.
    Ray(Vector),
    /// `{g : ⟨g, d⟩ = 0}` for a unit vector d.
    OrthogonalComplement(Vector),
    /// Product of per-coordinate sign constraints.
    Orthant(Vec<ConeSign>),
}

impl NormalCone {
    pub fn project(&self, g: &Vector) -> Vector {
        match self {
            NormalCone::Trivial => Vector::zeros(g.dim()),
            NormalCone::Ray(d) => g.dot(d).max(0.0) * d,
            NormalCone::OrthogonalComplement(d) => g.add_scaled(-g.dot(d), d),
            NormalCone::Orthant(signs) => Vector(
                g.iter()
                    .zip(signs)
                    .map(|(&gi, s)| match s {
                        ConeSign::Zero => 0.0,
                        ConeSign::NonNegative => gi.max(0.0),
                        ConeSign::NonPositive => gi.min(0.0),
                        ConeSign::Free => gi,
                    })
                    .collect(),
            ),
        }
    }

    pub fn distance(&self, g: &Vector) -> f64 {
        g.distance(&self.project(g))
    }
}
