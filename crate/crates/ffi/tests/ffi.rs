use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use reciprocal_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rc_last_error()) }.to_str().unwrap().to_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    rc_string_free(s);
    out
}

#[test]
fn expressions_round_trip() {
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(rc_expr_parse(c("x^2*y + 1/x").as_ptr(), &mut e), RcStatus::Ok);
        let mut d = ptr::null_mut();
        assert_eq!(rc_expr_diff(e, c("x").as_ptr(), &mut d), RcStatus::Ok);
        let mut want = ptr::null_mut();
        assert_eq!(rc_expr_parse(c("2*x*y - 1/x^2").as_ptr(), &mut want), RcStatus::Ok);
        let mut eq: c_int = 0;
        assert_eq!(rc_expr_equal(d, want, &mut eq), RcStatus::Ok);
        assert_eq!(eq, 1);
        let mut s = ptr::null_mut();
        assert_eq!(rc_expr_to_string(e, &mut s), RcStatus::Ok);
        assert!(!take(s).is_empty());
        rc_expr_free(e);
        rc_expr_free(d);
        rc_expr_free(want);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(rc_expr_parse(c("x +* 2").as_ptr(), &mut e), RcStatus::Parse);
        assert!(e.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(rc_expr_parse(ptr::null(), &mut e), RcStatus::NullPointer);
        let mut m = ptr::null_mut();
        assert_eq!(rc_map_catalog(c("nope").as_ptr(), ptr::null(), &mut m), RcStatus::UnknownEntry);
        assert_eq!(rc_map_from_json(c("{").as_ptr(), &mut m), RcStatus::Input);
        let mut g = ptr::null_mut();
        assert_eq!(rc_generator_named(c("X9").as_ptr(), &mut g), RcStatus::UnknownEntry);
        let mut pass = 0;
        assert_eq!(rc_criterion_run(11, 1, &mut pass, ptr::null_mut()), RcStatus::InvalidParams);

        assert_eq!(rc_expr_parse(c("1").as_ptr(), &mut e), RcStatus::Ok);
        assert!(last_error().is_empty());
        rc_expr_free(e);
        rc_expr_free(ptr::null_mut());
    }
}

#[test]
fn catalog_map_verifies() {
    unsafe {
        let mut m = ptr::null_mut();
        let p = c(r#"{"b1": "2", "b2": "1/3", "b3": "1", "b4": "0"}"#);
        assert_eq!(rc_map_catalog(c("bateman").as_ptr(), p.as_ptr(), &mut m), RcStatus::Ok, "{}", last_error());
        let mut pass = 0;
        let mut report = ptr::null_mut();
        assert_eq!(rc_map_verify(m, 7, &mut pass, &mut report), RcStatus::Ok);
        assert_eq!(pass, 1);
        let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(v["pass"], true);
        rc_map_free(m);
    }
}

#[test]
fn broken_map_fails_without_error() {
    let json = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/broken.json")).unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(rc_map_from_json(c(&json).as_ptr(), &mut m), RcStatus::Ok, "{}", last_error());
        let mut pass = 1;
        assert_eq!(rc_map_verify(m, 7, &mut pass, ptr::null_mut()), RcStatus::Ok);
        assert_eq!(pass, 0);
        rc_map_free(m);
    }
}

#[test]
fn generators_satisfy_determining_equations() {
    unsafe {
        for name in ["X1", "X2", "X3", "X4", "X5", "Y"] {
            let mut g = ptr::null_mut();
            assert_eq!(rc_generator_named(c(name).as_ptr(), &mut g), RcStatus::Ok);
            let mut pass = 0;
            assert_eq!(rc_generator_verify(g, &mut pass, ptr::null_mut()), RcStatus::Ok);
            assert_eq!(pass, 1, "{name}");
            rc_generator_free(g);
        }
        let json = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/x4.json")).unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(rc_generator_from_json(c(&json).as_ptr(), &mut g), RcStatus::Ok, "{}", last_error());
        rc_generator_free(g);
    }
}

#[test]
fn solutions_on_grids() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            rc_solution_make(c("constant").as_ptr(), ptr::null(), 0.0, 1.0, 0.0, 1.0, 9, &mut s),
            RcStatus::Ok,
            "{}",
            last_error()
        );
        let (mut o, mut h, mut n) = ([0.0; 2], [0.0; 2], [0usize; 2]);
        assert_eq!(rc_solution_grid(s, &mut o, &mut h, &mut n), RcStatus::Ok);
        assert_eq!(n, [9, 9]);
        assert!((h[0] - 0.125).abs() < 1e-15);

        let mut buf = vec![0.0; 81];
        assert_eq!(rc_solution_field(s, 0, buf.as_mut_ptr(), buf.len()), RcStatus::Ok);
        assert!(buf.iter().all(|&r| r > 0.0));
        assert_eq!(rc_solution_field(s, 0, buf.as_mut_ptr(), 10), RcStatus::InvalidParams);
        assert_eq!(rc_solution_field(s, 5, buf.as_mut_ptr(), 81), RcStatus::InvalidParams);

        let mut r = [1.0; 4];
        assert_eq!(rc_solution_fd_residuals(s, &mut r), RcStatus::Ok);
        assert!(r.iter().all(|x| x.abs() < 1e-9), "{r:?}");

        let mut m = ptr::null_mut();
        let p = c(r#"{"b1": "1", "b2": "0", "b3": "1", "b4": "0"}"#);
        assert_eq!(rc_map_catalog(c("bateman").as_ptr(), p.as_ptr(), &mut m), RcStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(rc_solution_transform(s, m, &mut t), RcStatus::Ok, "{}", last_error());
        assert_eq!(rc_solution_fd_residuals(t, &mut r), RcStatus::Ok);
        assert!(r.iter().all(|x| x.abs() < 1e-6), "{r:?}");

        let mut loop_err = 1.0;
        assert_eq!(rc_loop_closedness(s, m, 0.0, 0.0, &mut loop_err), RcStatus::Ok, "{}", last_error());
        assert!(loop_err < 1e-8);

        rc_solution_free(t);
        rc_solution_free(s);
        rc_map_free(m);
    }
}

#[test]
fn criterion_through_the_boundary() {
    unsafe {
        let mut pass = 0;
        let mut report = ptr::null_mut();
        assert_eq!(rc_criterion_run(1, 20240801, &mut pass, &mut report), RcStatus::Ok);
        assert_eq!(pass, 1);
        let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(v["id"], 1);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/reciprocal.h")).unwrap();
    for sym in ["RcStatus rc_expr_parse(", "typedef struct RcMap RcMap;", "RC_STATUS_PANIC = 10", "rc_criterion_run(", "const char *rc_last_error(void);"] {
        assert!(h.contains(sym), "{sym}");
    }
    assert!(unsafe { CStr::from_ptr(rc_version()) }.to_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
}
