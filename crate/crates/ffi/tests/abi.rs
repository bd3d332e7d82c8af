use std::ffi::{CStr, CString};
use std::ptr;

use splitfix_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(splitfix_last_error()) }.to_string_lossy().into_owned()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[test]
fn scenario_round_trip() {
    unsafe {
        let name = CString::new("two_balls").unwrap();
        let mut sc = ptr::null_mut();
        assert_eq!(splitfix_scenario_new(name.as_ptr(), ptr::null(), ptr::null(), 0, 0.5, &mut sc), SplitfixStatus::Ok);
        let mut reference = SplitfixReference::default();
        assert_eq!(splitfix_scenario_reference(sc, &mut reference), SplitfixStatus::Ok);
        assert!(reference.has_xbar && reference.normal_solutions_exist && !reference.consistent);
        assert_eq!(reference.xbar, [-1.0, 0.0]);

        let mut split = ptr::null_mut();
        assert_eq!(splitfix_scenario_splitting(sc, &mut split), SplitfixStatus::Ok);
        let mut x0 = [f64::NAN; 2];
        assert_eq!(splitfix_scenario_x0(sc, x0.as_mut_ptr()), SplitfixStatus::Ok);
        let mut trace = ptr::null_mut();
        assert_eq!(splitfix_splitting_iterate(split, x0.as_ptr(), 2, 10_000, 1e-10, &mut trace), SplitfixStatus::Ok);
        let n = splitfix_trace_len(trace);
        assert!(n > 20);
        assert_eq!(splitfix_trace_dim(trace), 2);
        let mut shadow = [0.0; 2];
        let mut reflected = [0.0; 2];
        assert_eq!(
            splitfix_trace_row(trace, n - 1, ptr::null_mut(), shadow.as_mut_ptr(), reflected.as_mut_ptr(), ptr::null_mut()),
            SplitfixStatus::Ok
        );
        assert!(dist(shadow, reference.xbar) < 1e-6);
        assert!(dist(reflected, reference.reflected_shadow_limit) < 1e-6);
        assert_eq!(splitfix_trace_row(trace, n, shadow.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), SplitfixStatus::OutOfRange);
        assert!(last_error().contains("out of range"));

        let mut v = [0.0; 2];
        let mut tail = -1.0;
        assert_eq!(splitfix_estimate_displacement(trace, v.as_mut_ptr(), &mut tail), SplitfixStatus::Ok);
        assert!(dist(v, [1.0, 0.0]) < 1e-6 && tail >= 0.0);

        let (mut xbar, mut y, mut residual) = ([0.0; 2], [0.0; 2], f64::NAN);
        assert_eq!(
            splitfix_solve_shifted_fixed_point(split, reference.v.as_ptr(), x0.as_ptr(), 2, 100_000, xbar.as_mut_ptr(), y.as_mut_ptr(), &mut residual),
            SplitfixStatus::Ok
        );
        assert!(dist(xbar, [-1.0, 0.0]) < 1e-6 && residual < 1e-9);

        splitfix_trace_free(trace);
        splitfix_splitting_free(split);
        splitfix_scenario_free(sc);
    }
}

#[test]
fn overrides_and_empty_normal_solution_set() {
    unsafe {
        let name = CString::new("two_balls").unwrap();
        let key = CString::new("beta").unwrap();
        let keys = [key.as_ptr()];
        let values = [0.0];
        let mut sc = ptr::null_mut();
        assert_eq!(splitfix_scenario_new(name.as_ptr(), keys.as_ptr(), values.as_ptr(), 1, 0.5, &mut sc), SplitfixStatus::Ok);
        let mut reference = SplitfixReference::default();
        splitfix_scenario_reference(sc, &mut reference);
        assert!(!reference.normal_solutions_exist && !reference.has_xbar);
        let mut split = ptr::null_mut();
        splitfix_scenario_splitting(sc, &mut split);
        let x0 = [0.0; 2];
        let (mut xbar, mut y) = ([0.0; 2], [0.0; 2]);
        let status = splitfix_solve_shifted_fixed_point(split, reference.v.as_ptr(), x0.as_ptr(), 2, 20_000, xbar.as_mut_ptr(), y.as_mut_ptr(), ptr::null_mut());
        assert_eq!(status, SplitfixStatus::NoConvergence);
        assert!(last_error().contains("no convergence"));
        splitfix_splitting_free(split);
        splitfix_scenario_free(sc);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let bad = CString::new("three_balls").unwrap();
        let mut sc = ptr::null_mut();
        assert_eq!(splitfix_scenario_new(bad.as_ptr(), ptr::null(), ptr::null(), 0, 0.5, &mut sc), SplitfixStatus::InvalidArgument);
        assert!(sc.is_null());
        assert!(last_error().contains("three_balls"));
        assert_eq!(splitfix_scenario_new(ptr::null(), ptr::null(), ptr::null(), 0, 0.5, &mut sc), SplitfixStatus::NullPointer);

        let mut op = ptr::null_mut();
        assert_eq!(splitfix_operator_rotation_ball(2.0, &mut op), SplitfixStatus::InvalidArgument);
        assert_eq!(splitfix_operator_rotation_ball(0.5, ptr::null_mut()), SplitfixStatus::NullPointer);
        assert_eq!(splitfix_operator_rotation_ball(0.5, &mut op), SplitfixStatus::Ok);
        assert!(last_error().is_empty());
        let x = [f64::INFINITY, 0.0];
        let mut out = [0.0; 2];
        assert_eq!(splitfix_operator_resolvent(op, x.as_ptr(), 2, out.as_mut_ptr()), SplitfixStatus::NonFinite);
        let x3 = [1.0, 2.0, 3.0];
        assert_eq!(splitfix_operator_resolvent(op, x3.as_ptr(), 3, out.as_mut_ptr()), SplitfixStatus::DimensionMismatch);

        let mut zero3 = ptr::null_mut();
        assert_eq!(splitfix_operator_zero(3, &mut zero3), SplitfixStatus::Ok);
        let mut split = ptr::null_mut();
        assert_eq!(splitfix_splitting_new(op, zero3, 0.5, &mut split), SplitfixStatus::DimensionMismatch);
        assert_eq!(splitfix_splitting_new(op, op, 1.5, &mut split), SplitfixStatus::InvalidArgument);
        assert_eq!(splitfix_splitting_new(op, op, 1.0, &mut split), SplitfixStatus::Ok);
        let mut trace = ptr::null_mut();
        let x0 = [3.0, 1.0];
        assert_eq!(splitfix_splitting_iterate(split, x0.as_ptr(), 2, 50, 1e-10, &mut trace), SplitfixStatus::Ok);
        let mut v = [0.0; 2];
        assert_eq!(splitfix_estimate_displacement(trace, v.as_mut_ptr(), ptr::null_mut()), SplitfixStatus::Unsupported);

        assert_eq!(splitfix_operator_dim(ptr::null()), 0);
        assert_eq!(splitfix_trace_len(ptr::null()), 0);
        splitfix_operator_free(ptr::null_mut());
        splitfix_trace_free(trace);
        splitfix_splitting_free(split);
        splitfix_operator_free(zero3);
        splitfix_operator_free(op);
    }
}

#[test]
fn operators_and_evaluation() {
    unsafe {
        let (lo, hi) = ([-1.0, 1.0], [1.0, 3.0]);
        let mut boxed = ptr::null_mut();
        assert_eq!(splitfix_operator_box(lo.as_ptr(), hi.as_ptr(), 2, &mut boxed), SplitfixStatus::Ok);
        assert_eq!(splitfix_operator_dim(boxed), 2);
        let mut out = [0.0; 2];
        let x = [5.0, 0.0];
        splitfix_operator_resolvent(boxed, x.as_ptr(), 2, out.as_mut_ptr());
        assert_eq!(out, [1.0, 1.0]);
        assert_eq!(splitfix_operator_box(hi.as_ptr(), lo.as_ptr(), 2, &mut boxed), SplitfixStatus::InvalidArgument);

        let (w, d) = ([1.0, 0.0], [1.0, 0.0]);
        let mut line = ptr::null_mut();
        assert_eq!(splitfix_operator_quadratic_on_line(1.0, w.as_ptr(), d.as_ptr(), 2, &mut line), SplitfixStatus::Ok);
        let x = [3.0, 5.0];
        splitfix_operator_resolvent(line, x.as_ptr(), 2, out.as_mut_ptr());
        assert!(dist(out, [2.0, 0.0]) < 1e-15);

        let (b, c) = ([0.0, 0.5], [-3.5, 0.0]);
        let mut ball = ptr::null_mut();
        assert_eq!(splitfix_operator_shifted_ball_normal(b.as_ptr(), c.as_ptr(), 1.5, &mut ball), SplitfixStatus::Ok);

        let (l, u) = ([1.0, 0.0, 0.0, 1.0], [1.0, 0.0]);
        let mut half = ptr::null_mut();
        assert_eq!(splitfix_operator_linear_halfspace(l.as_ptr(), u.as_ptr(), &mut half), SplitfixStatus::Ok);
        let x = [-4.0, 2.0];
        splitfix_operator_resolvent(half, x.as_ptr(), 2, out.as_mut_ptr());
        assert!(dist(out, [-2.0, 1.0]) < 1e-15);

        let mut split = ptr::null_mut();
        assert_eq!(splitfix_splitting_new(line, boxed, 0.5, &mut split), SplitfixStatus::Ok);
        let x = [0.0, 0.0];
        assert_eq!(splitfix_splitting_evaluate(split, x.as_ptr(), 2, out.as_mut_ptr()), SplitfixStatus::Ok);
        // J_A 0 = (1/2, 0); R_A 0 = (1, 0); J_B (1, 0) = (1, 1); T 0 = 0 − (1/2, 0) + (1, 1).
        assert!(dist(out, [0.5, 1.0]) < 1e-15);

        assert!(!CStr::from_ptr(splitfix_version()).to_bytes().is_empty());
        for op in [boxed, line, ball, half] {
            splitfix_operator_free(op);
        }
        splitfix_splitting_free(split);
    }
}
