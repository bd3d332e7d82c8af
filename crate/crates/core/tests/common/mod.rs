//! Independent reference implementations used by the integration tests.
//!
//! Resolvents are recomputed from the defining inclusion
//! `0 ∈ u + M(u) + N_C(u) − x` by a projected forward-backward loop, with
//! plain arrays and hand-written projections, sharing no code with the
//! library beyond the operator under test.

#![allow(dead_code, clippy::approx_constant)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitfix::geometry::{Matrix2, PrimitiveSet};
use splitfix::operators::*;
use splitfix::{ResolventOperator, Vector};

pub type P = [f64; 2];

pub fn add(a: P, b: P) -> P {
    [a[0] + b[0], a[1] + b[1]]
}
pub fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}
pub fn mul(t: f64, a: P) -> P {
    [t * a[0], t * a[1]]
}
pub fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
pub fn norm(a: P) -> f64 {
    dot(a, a).sqrt()
}
pub fn mat(m: [[f64; 2]; 2], x: P) -> P {
    [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
}

pub fn to_p(v: &Vector) -> P {
    [v[0], v[1]]
}
pub fn to_v(p: P) -> Vector {
    Vector::from(p)
}

#[derive(Clone, Copy)]
pub enum Set {
    Whole,
    Ball(P, f64),
    Box(P, P),
    /// `{x : ⟨x, n⟩ ≤ 0}`, `n` not necessarily unit.
    Half(P),
}

impl Set {
    pub fn project(&self, x: P) -> P {
        match *self {
            Set::Whole => x,
            Set::Ball(c, r) => {
                let d = sub(x, c);
                let n = norm(d);
                if n <= r {
                    x
                } else {
                    add(c, mul(r / n, d))
                }
            }
            Set::Box(lo, hi) => [x[0].max(lo[0]).min(hi[0]), x[1].max(lo[1]).min(hi[1])],
            Set::Half(n) => {
                let s = dot(x, n);
                if s <= 0.0 {
                    x
                } else {
                    sub(x, mul(s / dot(n, n), n))
                }
            }
        }
    }
}

/// `A = M + N_C` with `M(u) = L u + q` affine monotone.
#[derive(Clone, Copy)]
pub struct AffinePlusCone {
    pub l: [[f64; 2]; 2],
    pub q: P,
    pub set: Set,
}

impl AffinePlusCone {
    /// Forward-backward on the strongly monotone inclusion; step `1/‖I+L‖_F²`.
    pub fn resolvent(&self, x: P) -> P {
        let il = [[1.0 + self.l[0][0], self.l[0][1]], [self.l[1][0], 1.0 + self.l[1][1]]];
        let fro2: f64 = il.iter().flatten().map(|e| e * e).sum();
        let tau = 1.0 / fro2;
        let mut u = self.set.project(x);
        for _ in 0..2_000_000 {
            let g = sub(add(mat(il, u), self.q), x);
            let next = self.set.project(sub(u, mul(tau, g)));
            let moved = norm(sub(next, u));
            u = next;
            if moved < 1e-15 {
                break;
            }
        }
        u
    }
}

/// Golden-section search for `argmin_t (γ/2)‖t d − w‖² + ½‖t d − x‖²`.
pub fn line_prox(gamma: f64, w: P, d: P, x: P) -> P {
    let f = |t: f64| {
        let p = mul(t, d);
        0.5 * gamma * dot(sub(p, w), sub(p, w)) + 0.5 * dot(sub(p, x), sub(p, x))
    };
    let (mut a, mut b) = (-1e3, 1e3);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut e = a + phi * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while b - a > 1e-11 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + phi * (b - a);
            fe = f(e);
        }
    }
    mul(0.5 * (a + b), d)
}

pub enum Oracle {
    Affine(AffinePlusCone),
    Line { gamma: f64, w: P, d: P },
}

impl Oracle {
    pub fn resolvent(&self, x: P) -> P {
        match self {
            Oracle::Affine(a) => a.resolvent(x),
            Oracle::Line { gamma, w, d } => line_prox(*gamma, *w, *d, x),
        }
    }
}

pub struct Entry {
    pub name: &'static str,
    pub op: ResolventOperator,
    pub oracle: Oracle,
}

const QT: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];
const ZERO: [[f64; 2]; 2] = [[0.0, 0.0], [0.0, 0.0]];

fn rot(t: f64) -> [[f64; 2]; 2] {
    [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
}

fn affine(l: [[f64; 2]; 2], q: P, set: Set) -> Oracle {
    Oracle::Affine(AffinePlusCone { l, q, set })
}

fn m2(m: [[f64; 2]; 2]) -> Matrix2 {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Every operator family of the library, with a few parameter choices each.
pub fn catalogue() -> Vec<Entry> {
    let s2 = [[0.0, -2.0], [2.0, 0.0]];
    let skew = |alpha: f64, beta: f64, gamma: f64, s: [[f64; 2]; 2]| {
        SkewLinearSpec::new(alpha, beta, gamma, m2(s)).unwrap()
    };
    let lin = |alpha: f64, beta: f64, s: [[f64; 2]; 2]| {
        [[alpha + beta * s[0][0], beta * s[0][1]], [beta * s[1][0], alpha + beta * s[1][1]]]
    };
    let sym = [[2.0, 1.0], [1.0, 3.0]];
    let nonsym = [[1.0, 2.0], [-2.0, 0.5]];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Entry { name: "zero", op: ResolventOperator::zero(2).unwrap(), oracle: affine(ZERO, [0.0; 2], Set::Whole) },
        Entry {
            name: "skew_linear(0.5,1.3,1)",
            op: resolvent_skew_linear(skew(0.5, 1.3, 1.0, QT)),
            oracle: affine(lin(0.5, 1.3, QT), [0.0; 2], Set::Whole),
        },
        Entry {
            name: "skew_linear(0,2,4)",
            op: resolvent_skew_linear(skew(0.0, 2.0, 4.0, s2)),
            oracle: affine(lin(0.0, 2.0, s2), [0.0; 2], Set::Whole),
        },
        Entry {
            name: "skew_linear_ball(0.3,0.8,1)",
            op: resolvent_skew_linear_ball(skew(0.3, 0.8, 1.0, QT)),
            oracle: affine(lin(0.3, 0.8, QT), [0.0; 2], Set::Ball([0.0; 2], 1.0)),
        },
        Entry {
            name: "skew_linear_ball(0,0.5,4)",
            op: resolvent_skew_linear_ball(skew(0.0, 0.5, 4.0, s2)),
            oracle: affine(lin(0.0, 0.5, s2), [0.0; 2], Set::Ball([0.0; 2], 1.0)),
        },
        Entry {
            name: "rotation_ball(pi/4)",
            op: resolvent_rotation_ball(std::f64::consts::FRAC_PI_4).unwrap(),
            oracle: affine(rot(std::f64::consts::FRAC_PI_4), [0.0; 2], Set::Ball([0.0; 2], 1.0)),
        },
        Entry {
            name: "rotation_ball(0)",
            op: resolvent_rotation_ball(0.0).unwrap(),
            oracle: affine(rot(0.0), [0.0; 2], Set::Ball([0.0; 2], 1.0)),
        },
        Entry {
            name: "rotation_ball(1.4)",
            op: resolvent_rotation_ball(1.4).unwrap(),
            oracle: affine(rot(1.4), [0.0; 2], Set::Ball([0.0; 2], 1.0)),
        },
        Entry {
            name: "linear_halfspace(R_pi/3, e1)",
            op: resolvent_linear_halfspace(Matrix2::rotation(std::f64::consts::FRAC_PI_3), to_v([1.0, 0.0])).unwrap(),
            oracle: affine(rot(std::f64::consts::FRAC_PI_3), [0.0; 2], Set::Half([1.0, 0.0])),
        },
        Entry {
            name: "linear_halfspace(sym, diag)",
            op: resolvent_linear_halfspace(m2(sym), to_v([1.0, 1.0])).unwrap(),
            oracle: affine(sym, [0.0; 2], Set::Half([h, h])),
        },
        Entry {
            name: "linear_halfspace(nonsym, -e2)",
            op: resolvent_linear_halfspace(m2(nonsym), to_v([0.0, -1.0])).unwrap(),
            oracle: affine(nonsym, [0.0; 2], Set::Half([0.0, -1.0])),
        },
        Entry {
            name: "shifted_ball_normal",
            op: resolvent_shifted_ball_normal(to_v([0.0, 0.7071068]), to_v([-3.5, 0.0]), 1.5).unwrap(),
            oracle: affine(ZERO, [0.0, 0.7071068], Set::Ball([-3.5, 0.0], 1.5)),
        },
        Entry {
            name: "shifted_ball_normal(off-axis)",
            op: resolvent_shifted_ball_normal(to_v([1.0, -2.0]), to_v([0.5, 2.0]), 0.25).unwrap(),
            oracle: affine(ZERO, [1.0, -2.0], Set::Ball([0.5, 2.0], 0.25)),
        },
        Entry {
            name: "quadratic_on_line(1,(1,0),x-axis)",
            op: prox_quadratic_on_line(1.0, to_v([1.0, 0.0]), PrimitiveSet::line(to_v([1.0, 0.0])).unwrap()).unwrap(),
            oracle: Oracle::Line { gamma: 1.0, w: [1.0, 0.0], d: [1.0, 0.0] },
        },
        Entry {
            name: "quadratic_on_line(3,(1,2),(1,2))",
            op: prox_quadratic_on_line(3.0, to_v([1.0, 2.0]), PrimitiveSet::line(to_v([1.0, 2.0])).unwrap()).unwrap(),
            oracle: Oracle::Line { gamma: 3.0, w: [1.0, 2.0], d: [1.0, 2.0] },
        },
        Entry {
            name: "box_indicator",
            op: prox_box_indicator(to_v([-1.0, 1.0]), to_v([1.0, 3.0])).unwrap(),
            oracle: affine(ZERO, [0.0; 2], Set::Box([-1.0, 1.0], [1.0, 3.0])),
        },
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, half_width: f64) -> P {
    [rng.gen_range(-half_width..half_width), rng.gen_range(-half_width..half_width)]
}

/// Largest `‖J x − oracle(x)‖` over `samples` random inputs.
pub fn oracle_max_error(entry: &Entry, samples: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    (0..samples)
        .map(|_| {
            let x = random_point(&mut rng, 6.0);
            let got = to_p(&entry.op.resolvent(&to_v(x)).unwrap());
            norm(sub(got, entry.oracle.resolvent(x)))
        })
        .fold(0.0, f64::max)
}

/// Smallest slack of `⟨Jx − Jy, x − y⟩ − ‖Jx − Jy‖² ≥ 0` over random pairs.
pub fn firm_nonexpansive_min_slack(op: &ResolventOperator, pairs: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    (0..pairs)
        .map(|_| {
            let (x, y) = (random_point(&mut rng, 10.0), random_point(&mut rng, 10.0));
            let jx = to_p(&op.resolvent(&to_v(x)).unwrap());
            let jy = to_p(&op.resolvent(&to_v(y)).unwrap());
            let d = sub(jx, jy);
            dot(d, sub(x, y)) - dot(d, d)
        })
        .fold(f64::INFINITY, f64::min)
}
