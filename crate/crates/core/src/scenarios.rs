//! The two worked configurations, with closed-form reference values.
//!
//! * `two_balls`: `A = R_θ + N_ball(0,1)`, `B = (0,β) + N_ball((γ,0),r)`.
//! * `line_box`: `A = ∂f` with `f = (γ/2)‖x − w‖² + ι_U`, `U` the first
//!   coordinate axis and `w = (w1, 0)`; `B = N_V` with `V = [a1,b1]×[a2,b2]`.
//!
//! Parameters can be overridden by name through [`build`], which is what the
//! command-line runner uses.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{PrimitiveSet, Vector};
use crate::operators::{
    prox_box_indicator, prox_quadratic_on_line, resolvent_rotation_ball,
    resolvent_shifted_ball_normal, ResolventOperator,
};
use crate::splitting::{check_lambda, SplittingOperator};

pub const TWO_BALLS: &str = "two_balls";
pub const LINE_BOX: &str = "line_box";
pub const SCENARIO_NAMES: [&str; 2] = [TWO_BALLS, LINE_BOX];

/// How close β must be to `−sign(γ)·sin θ` for the reference to report
/// normal solutions in the separated two-balls configuration.
pub const BETA_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub name: String,
    pub a: ResolventOperator,
    pub b: ResolventOperator,
    pub lambda: f64,
    pub x0: Vector,
    pub params: BTreeMap<String, f64>,
}

impl ScenarioSpec {
    pub fn splitting(&self) -> Result<SplittingOperator> {
        SplittingOperator::new(self.a.clone(), self.b.clone(), self.lambda)
    }

    /// Constraint sets of `A` and `B`, in that order, for plotting.
    pub fn constraint_sets(&self) -> Vec<&PrimitiveSet> {
        self.a.constraint_set().into_iter().chain(self.b.constraint_set()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReference {
    pub v: Option<Vector>,
    pub xbar: Option<Vector>,
    pub reflected_shadow_limit: Option<Vector>,
    pub consistent: bool,
    /// Whether the set of normal solutions is nonempty.
    pub normal_solutions_exist: bool,
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn preset_two_balls(
    theta: f64,
    beta: f64,
    gamma: f64,
    r: f64,
    lambda: f64,
) -> Result<(ScenarioSpec, ScenarioReference)> {
    check_lambda(lambda)?;
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(invalid(format!(
            "two_balls needs a finite nonzero gamma (its sign picks the side of the ball), got {gamma}"
        )));
    }
    let a = resolvent_rotation_ball(theta)?;
    let b = resolvent_shifted_ball_normal(Vector::from([0.0, beta]), Vector::from([gamma, 0.0]), r)?;

    let s = sign(gamma);
    let gap = r + 1.0 - gamma.abs();
    let v = Vector::from([s * gap.min(0.0), 0.0]);
    let consistent = gap > 0.0;
    let separated_solvable = !consistent && (beta + s * theta.sin()).abs() <= BETA_MATCH_TOL;
    let (xbar, limit) = if separated_solvable {
        (
            Some(Vector::from([s, 0.0])),
            Some(Vector::from([gamma - s * r, 0.0])),
        )
    } else {
        (None, None)
    };
    let params = BTreeMap::from([
        ("theta".to_string(), theta),
        ("beta".to_string(), beta),
        ("gamma".to_string(), gamma),
        ("r".to_string(), r),
    ]);
    Ok((
        ScenarioSpec {
            name: TWO_BALLS.into(),
            a,
            b,
            lambda,
            x0: Vector::zeros(2),
            params,
        },
        ScenarioReference {
            v: Some(v),
            xbar,
            reflected_shadow_limit: limit,
            consistent,
            // A is strongly monotone, so A + B has a zero whenever the sum is
            // maximally monotone, which holds when the domains overlap in an
            // interior point.
            normal_solutions_exist: consistent || separated_solvable,
        },
    ))
}

pub fn preset_line_box(
    gamma: f64,
    w1: f64,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    lambda: f64,
) -> Result<(ScenarioSpec, ScenarioReference)> {
    check_lambda(lambda)?;
    let line = PrimitiveSet::line(Vector::from([1.0, 0.0]))?;
    let a = prox_quadratic_on_line(gamma, Vector::from([w1, 0.0]), line)?;
    let b = prox_box_indicator(Vector::from([a1, a2]), Vector::from([b1, b2]))?;

    let v = Vector::from([0.0, (-b2).max(0.0).min(-a2)]);
    let xbar = Vector::from([w1.clamp(a1, b1), 0.0]);
    let limit = &xbar - &v;
    let params = BTreeMap::from([
        ("gamma".to_string(), gamma),
        ("w1".to_string(), w1),
        ("a1".to_string(), a1),
        ("b1".to_string(), b1),
        ("a2".to_string(), a2),
        ("b2".to_string(), b2),
    ]);
    Ok((
        ScenarioSpec {
            name: LINE_BOX.into(),
            a,
            b,
            lambda,
            x0: Vector::zeros(2),
            params,
        },
        ScenarioReference {
            consistent: a2 <= 0.0 && 0.0 <= b2,
            v: Some(v),
            xbar: Some(xbar),
            reflected_shadow_limit: Some(limit),
            normal_solutions_exist: true,
        },
    ))
}

/// Parameter names accepted by a registered scenario.
pub fn parameter_names(name: &str) -> Result<&'static [&'static str]> {
    match name {
        TWO_BALLS => Ok(&["theta", "beta", "gamma", "r"]),
        LINE_BOX => Ok(&["gamma", "w1", "a1", "b1", "a2", "b2"]),
        other => Err(invalid(format!(
            "unknown scenario {other:?} (expected one of {})",
            SCENARIO_NAMES.join(", ")
        ))),
    }
}

/// Builds a registered scenario from its defaults plus named overrides.
/// Unknown scenario or parameter names are rejected.
///
/// Two-balls defaults are `θ = π/4`, `γ = −3.5`, `r = 1.5` and, unless given,
/// `β = −sign(γ)·sin θ` evaluated on the final θ and γ. Line-box defaults are
/// `γ = 1`, `w1 = 1`, `V = [−1,1]×[1,3]`.
pub fn build(
    name: &str,
    overrides: &BTreeMap<String, f64>,
    lambda: f64,
) -> Result<(ScenarioSpec, ScenarioReference)> {
    let names = parameter_names(name)?;
    if let Some(bad) = overrides.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(invalid(format!(
            "scenario {name} has no parameter {bad:?} (known: {})",
            names.join(", ")
        )));
    }
    let get = |key: &str, default: f64| overrides.get(key).copied().unwrap_or(default);
    match name {
        TWO_BALLS => {
            let theta = get("theta", FRAC_PI_4);
            let gamma = get("gamma", -3.5);
            let beta = get("beta", -sign(gamma) * theta.sin());
            preset_two_balls(theta, beta, gamma, get("r", 1.5), lambda)
        }
        _ => preset_line_box(
            get("gamma", 1.0),
            get("w1", 1.0),
            get("a1", -1.0),
            get("b1", 1.0),
            get("a2", 1.0),
            get("b2", 3.0),
            lambda,
        ),
    }
}

#[cfg(test)]
// The worked configuration quotes β = 0.7071068 literally.
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::analysis::{estimate_displacement, solve_shifted_fixed_point};
    use crate::error::Error;
    use crate::splitting::StopRule;

    fn v2(a: f64, b: f64) -> Vector {
        Vector::from([a, b])
    }

    fn close(a: &Option<Vector>, b: Vector) -> bool {
        a.as_ref().is_some_and(|a| a.distance(&b) < 1e-12)
    }

    #[test]
    fn two_balls_figure_configuration() {
        let (spec, r) = preset_two_balls(FRAC_PI_4, 0.7071068, -3.5, 1.5, 0.5).unwrap();
        assert_eq!(spec.name, "two_balls");
        assert!(close(&r.v, v2(1.0, 0.0)));
        assert!(close(&r.xbar, v2(-1.0, 0.0)));
        assert!(close(&r.reflected_shadow_limit, v2(-2.0, 0.0)));
        assert!(!r.consistent && r.normal_solutions_exist);
        assert_eq!(spec.constraint_sets().len(), 2);
    }

    #[test]
    fn two_balls_consistent_and_empty_cases() {
        let (_, r) = preset_two_balls(FRAC_PI_4, 0.3, -2.0, 1.5, 0.5).unwrap();
        assert!(r.consistent && r.normal_solutions_exist);
        assert!(close(&r.v, v2(0.0, 0.0)));
        let (_, r) = preset_two_balls(FRAC_PI_4, 0.0, -3.5, 1.5, 0.5).unwrap();
        assert!(!r.normal_solutions_exist && r.xbar.is_none() && r.reflected_shadow_limit.is_none());
        // Positive γ flips every sign.
        let (_, r) = preset_two_balls(FRAC_PI_4, -FRAC_PI_4.sin(), 4.0, 1.5, 0.5).unwrap();
        assert!(close(&r.v, v2(-1.5, 0.0)));
        assert!(close(&r.xbar, v2(1.0, 0.0)));
        assert!(close(&r.reflected_shadow_limit, v2(2.5, 0.0)));
    }

    #[test]
    fn two_balls_rejects_bad_parameters() {
        assert!(preset_two_balls(FRAC_PI_4, 0.7, 0.0, 1.5, 0.5).is_err());
        assert!(preset_two_balls(2.0, 0.7, -3.5, 1.5, 0.5).is_err());
        assert!(preset_two_balls(FRAC_PI_4, 0.7, -3.5, 0.0, 0.5).is_err());
        assert!(preset_two_balls(FRAC_PI_4, 0.7, -3.5, 1.5, 0.0).is_err());
        assert!(preset_two_balls(FRAC_PI_4, 0.7, -3.5, 1.5, 1.5).is_err());
    }

    #[test]
    fn line_box_examples() {
        let (spec, r) = preset_line_box(1.0, 1.0, -1.0, 1.0, 1.0, 3.0, 0.5).unwrap();
        assert_eq!(spec.name, "line_box");
        assert!(close(&r.v, v2(0.0, -1.0)));
        assert!(close(&r.xbar, v2(1.0, 0.0)));
        assert!(close(&r.reflected_shadow_limit, v2(1.0, 1.0)));
        assert!(!r.consistent);
        let (_, r) = preset_line_box(1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 0.5).unwrap();
        assert!(r.consistent && close(&r.v, v2(0.0, 0.0)));
        let (_, r) = preset_line_box(1.0, 5.0, -1.0, 1.0, 1.0, 3.0, 0.5).unwrap();
        assert!(close(&r.xbar, v2(1.0, 0.0)));
        // Box entirely below the axis.
        let (_, r) = preset_line_box(2.0, -3.0, -1.0, 1.0, -4.0, -2.0, 0.5).unwrap();
        assert!(close(&r.v, v2(0.0, 2.0)));
        assert!(close(&r.xbar, v2(-1.0, 0.0)));
        assert!(preset_line_box(1.0, 1.0, 1.0, -1.0, 1.0, 3.0, 0.5).is_err());
        assert!(preset_line_box(0.0, 1.0, -1.0, 1.0, 1.0, 3.0, 0.5).is_err());
    }

    #[test]
    fn references_invariants() {
        let cases = [
            preset_two_balls(FRAC_PI_4, 0.7071068, -3.5, 1.5, 0.5).unwrap().1,
            preset_two_balls(0.2, 0.0, 2.0, 1.5, 0.5).unwrap().1,
            preset_two_balls(0.2, -0.2f64.sin(), 6.0, 0.5, 0.5).unwrap().1,
            preset_line_box(1.0, 1.0, -1.0, 1.0, 1.0, 3.0, 0.5).unwrap().1,
            preset_line_box(1.0, 1.0, -1.0, 1.0, -5.0, 3.0, 0.5).unwrap().1,
        ];
        for r in cases {
            if r.consistent {
                assert!(r.v.as_ref().unwrap().norm() == 0.0);
            }
            if let (Some(x), Some(l)) = (&r.xbar, &r.reflected_shadow_limit) {
                assert!(l.distance(&(x - r.v.as_ref().unwrap())) < 1e-15);
            }
        }
    }

    #[test]
    fn reference_v_is_least_norm_point_of_domain_difference() {
        let origin = v2(0.0, 0.0);
        for (gamma, r) in [(-3.5, 1.5), (-2.0, 1.5), (4.0, 0.5), (2.5, 1.5), (-7.0, 3.0)] {
            let (_, reference) = preset_two_balls(0.4, 0.0, gamma, r, 0.5).unwrap();
            let diff = PrimitiveSet::ball(v2(-gamma, 0.0), r + 1.0).unwrap();
            let p = diff.project(&origin).unwrap();
            assert!(p.distance(reference.v.as_ref().unwrap()) < 1e-12, "{gamma} {r}");
        }
        for (a2, b2) in [(1.0, 3.0), (-1.0, 1.0), (-4.0, -2.0), (0.0, 0.5)] {
            let (_, reference) = preset_line_box(1.0, 1.0, -1.0, 1.0, a2, b2, 0.5).unwrap();
            let diff = PrimitiveSet::boxed(v2(-1e9, -b2), v2(1e9, -a2)).unwrap();
            let p = diff.project(&origin).unwrap();
            assert!(p.distance(reference.v.as_ref().unwrap()) < 1e-12, "{a2} {b2}");
        }
    }

    #[test]
    fn references_rederived_numerically() {
        // A fixed budget, since fast cases settle their shadow within 20 steps.
        let stop = StopRule::new(3_000, 1e-300).unwrap();
        for (spec, r) in [
            build(TWO_BALLS, &BTreeMap::new(), 0.5).unwrap(),
            build(LINE_BOX, &BTreeMap::new(), 0.5).unwrap(),
            build(LINE_BOX, &BTreeMap::from([("w1".into(), -0.3), ("gamma".into(), 2.0)]), 0.7).unwrap(),
        ] {
            let split = spec.splitting().unwrap();
            let trace = split.iterate(&spec.x0, &stop).unwrap();
            let v = r.v.unwrap();
            let xbar = r.xbar.unwrap();
            let last = trace.last_row().unwrap();
            assert!(estimate_displacement(&trace).unwrap().v.distance(&v) < 1e-6);
            assert!(last.shadow.distance(&xbar) < 1e-6);
            assert!(last.reflected_shadow.distance(r.reflected_shadow_limit.as_ref().unwrap()) < 1e-6);
            let sol = solve_shifted_fixed_point(&spec.a, &spec.b, spec.lambda, &v, &spec.x0, &StopRule::default())
                .unwrap();
            assert!(sol.xbar.distance(&xbar) < 1e-6);
        }
    }

    #[test]
    fn registry_defaults_and_overrides() {
        let (spec, r) = build(TWO_BALLS, &BTreeMap::new(), 0.5).unwrap();
        assert_eq!(spec.params["beta"], FRAC_PI_4.sin());
        assert!(r.normal_solutions_exist);
        let (spec, r) = build(TWO_BALLS, &BTreeMap::from([("beta".into(), 0.0)]), 1.0).unwrap();
        assert_eq!(spec.lambda, 1.0);
        assert!(!r.normal_solutions_exist);
        let (spec, _) = build(TWO_BALLS, &BTreeMap::from([("gamma".into(), 3.0)]), 0.5).unwrap();
        assert_eq!(spec.params["beta"], -FRAC_PI_4.sin());
        let (spec, _) = build(LINE_BOX, &BTreeMap::from([("b2".into(), 5.0)]), 0.5).unwrap();
        assert_eq!(spec.params["b2"], 5.0);
        assert!(matches!(build("three_balls", &BTreeMap::new(), 0.5), Err(Error::InvalidParameter(_))));
        assert!(build(LINE_BOX, &BTreeMap::from([("beta".into(), 0.0)]), 0.5).is_err());
    }
}
