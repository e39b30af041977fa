use std::collections::BTreeMap;

use reciprocal_core::liealg::lrt::{x1, x3, x4, x5, x_f, y};
use reciprocal_core::liealg::{automorphism_constraints, lrt, verify_automorphism_solution, AutomorphismMatrix};
use reciprocal_core::symkernel::{ex, Expr};
use reciprocal_core::transforms::catalog::{self, TheoremParams};
use reciprocal_core::transforms::{
    self, appendix_pde_residuals, automorphism_matrix, catalog as lookup, compose, composition_check,
    decompose, invert, lie_equation_check, normal_form, pushforward, pushforward_raw, verify_point_symmetry,
    verify_reciprocal, CatalogEntry, MapFile, ReciprocalMap, SampleConfig,
};
use reciprocal_core::Error;

fn s() -> Expr {
    Expr::var("S")
}

fn bateman_sym() -> ReciprocalMap {
    catalog::bateman(&ex("b1"), &ex("b2"), &ex("b3"), &ex("b4"), &s()).unwrap()
}

fn bateman_num() -> ReciprocalMap {
    catalog::bateman(&ex("2"), &ex("1/3"), &ex("-3/2"), &ex("5"), &s()).unwrap()
}

fn params(p: &[(&str, &str)]) -> BTreeMap<String, Expr> {
    p.iter().map(|(k, v)| (k.to_string(), ex(v))).collect()
}

fn theorem_num(a11: i64) -> ReciprocalMap {
    catalog::theorem(&TheoremParams {
        a34: ex("1/2"),
        a35: ex("3"),
        a45: ex("-2"),
        alpha: ex("3"),
        beta: ex("4"),
        k: ex("2/3"),
        a11: Expr::int(a11),
        psi: ex("psi(S)"),
        f: s(),
    })
    .unwrap()
}

#[test]
fn reciprocal_catalog_entries_pass() {
    for m in [
        ReciprocalMap::identity(),
        bateman_sym(),
        catalog::bateman(&ex("b1"), &ex("b2"), &ex("b3"), &ex("b4"), &ex("F(S)")).unwrap(),
        catalog::remark(&ex("b3"), &ex("b4"), &s()).unwrap(),
        theorem_num(1),
        theorem_num(-1),
    ] {
        let r = verify_reciprocal(&m);
        assert!(r.pass, "{}: {:?}", m.name, r.failing());
        assert!(r.witness.is_none());
    }
}

#[test]
fn symbolic_theorem_map_passes() {
    let CatalogEntry::Reciprocal(m) = lookup("theorem", &BTreeMap::new()).unwrap() else { panic!() };
    assert!(verify_reciprocal(&m).pass);
}

#[test]
fn mu_branches() {
    let plus = match lookup("mu_plus", &BTreeMap::new()).unwrap() {
        CatalogEntry::Reciprocal(m) => m,
        _ => panic!(),
    };
    let r = verify_reciprocal(&plus);
    assert!(r.pass, "{:?}", r.failing());
    assert!(r.form_constant);

    let minus = match lookup("mu_minus", &BTreeMap::new()).unwrap() {
        CatalogEntry::Reciprocal(m) => m,
        _ => panic!(),
    };
    let r = verify_reciprocal(&minus);
    assert!(!r.pass);
    let w = r.witness.expect("witness point");
    assert_ne!(w.value, "0");
    assert!(w.point.contains_key("S_y"));
}

#[test]
fn broken_map_fails_on_closedness() {
    let m = catalog::broken(&ex("b1"), &ex("b2"), &ex("b3"), &ex("b4")).unwrap();
    let r = verify_reciprocal(&m);
    assert!(!r.pass);
    assert!(r.failing().contains(&"d(dy')"));
    assert!(r.closedness[0].reduced.is_zero());
    assert!(r.witness.is_some());
}

#[test]
fn parameter_constraints() {
    let e = catalog::bateman(&ex("0"), &ex("1"), &ex("1"), &ex("1"), &s()).unwrap_err();
    assert!(matches!(e, Error::ParamConstraintViolated(_)));
    let e = lookup("theorem", &params(&[("a35", "0")])).unwrap_err();
    assert!(matches!(e, Error::ParamConstraintViolated(_)));
    let e = lookup("theorem", &params(&[("alpha", "0"), ("beta", "0")])).unwrap_err();
    assert!(matches!(e, Error::ParamConstraintViolated(_)));
    assert!(matches!(lookup("nope", &BTreeMap::new()), Err(Error::UnknownCatalogEntry(_))));
    assert!(matches!(
        lookup("rotation_family", &params(&[("q13", "0")])),
        Err(Error::ParamConstraintViolated(_))
    ));
}

#[test]
fn remark_is_bateman_special_case() {
    let b = catalog::bateman(&ex("1"), &ex("0"), &ex("b3"), &ex("b4"), &s()).unwrap();
    let r = catalog::remark(&ex("b3"), &ex("b4"), &s()).unwrap();
    assert_eq!(b.fields, r.fields);
    assert_eq!(b.form, r.form);
}

#[test]
fn theorem_reparametrization_gives_bateman() {
    let b = [ex("b1"), ex("b2"), ex("b3"), ex("b4")];
    let tp = TheoremParams::from_bateman([&b[0], &b[1], &b[2], &b[3]]).unwrap();
    let t = catalog::theorem(&tp).unwrap();
    let bat = bateman_sym();
    assert_eq!(t.fields, bat.fields);
    assert_eq!(t.form, bat.form);
}

#[test]
fn point_maps_pass() {
    for name in ["munk_prim", "e1", "e2", "rotation", "point_identity"] {
        let CatalogEntry::Point(m) = lookup(name, &BTreeMap::new()).unwrap() else { panic!() };
        let r = verify_point_symmetry(&m);
        assert!(r.pass, "{name}: {:?}", r.residuals);
    }
    // scaling the density alone is not a symmetry
    let mut bad = transforms::PointMap::identity();
    bad.fields[0] = ex("2*rho");
    assert!(!verify_point_symmetry(&bad).pass);
}

#[test]
fn involution_squares_to_identity() {
    let e1 = catalog::e1();
    assert!(transforms::compose_point(&e1, &e1).is_identity());
    let e2 = catalog::reflection_map();
    assert!(compose(&e2, &e2).is_identity());
}

#[test]
fn inverse_and_composition() {
    let t = bateman_num();
    let ti = invert(&t).unwrap();
    assert!(compose(&t, &ti).is_identity());
    assert!(compose(&ti, &t).is_identity());

    // the computed inverse agrees with the stored one
    let mut bare = bateman_sym();
    let stored = bare.inverse.take().unwrap();
    assert_eq!(transforms::solve_inverse(&bare).unwrap(), stored);

    let th = theorem_num(-1);
    let thi = invert(&th).unwrap();
    assert!(compose(&th, &thi).is_identity());

    let CatalogEntry::Reciprocal(minus) = lookup("mu_minus", &BTreeMap::new()).unwrap() else { panic!() };
    assert!(matches!(invert(&minus), Err(Error::NotInvertible(_))));
}

#[test]
fn composition_is_associative() {
    let a = bateman_num();
    let b = catalog::remark(&ex("2"), &ex("-1"), &s()).unwrap();
    let c = catalog::rotation_map(&ex("3/5"), &ex("4/5")).unwrap();
    let l = compose(&compose(&a, &b), &c);
    let r = compose(&a, &compose(&b, &c));
    assert_eq!(l.fields, r.fields);
    assert_eq!(l.form, r.form);
}

#[test]
fn rational_family_is_a_group() {
    let fam = catalog::rational_family();
    let (a, b) = (ex("eps1"), ex("eps2"));
    let c = compose(&fam.at(&a), &fam.at(&b));
    let d = fam.at(&a.add(&b));
    assert_eq!(c.fields, d.fields);
    assert_eq!(c.form, d.form);
    let rep = composition_check(&fam, &SampleConfig::default()).unwrap();
    assert_eq!(rep.accepted, 100);
    assert!(rep.max_difference < 1e-9);
}

#[test]
fn families_are_identity_at_zero() {
    let fams = [
        catalog::rational_family(),
        catalog::rotation_family(&ex("q12"), &ex("q13")).unwrap(),
        catalog::exp_family(&ex("q12"), &ex("k1"), &ex("k2")).unwrap(),
        catalog::linear_family(&ex("q12"), &ex("k2"), false),
        catalog::linear_family(&ex("q12"), &ex("k2"), true),
    ];
    for f in &fams {
        assert!(f.at(&Expr::zero()).is_identity(), "{}", f.name);
    }
}

#[test]
fn family_members_are_reciprocal() {
    for fam in [
        catalog::rational_family(),
        catalog::rotation_family(&ex("q12"), &ex("q13")).unwrap(),
        catalog::exp_family(&ex("q12"), &ex("k1"), &ex("k2")).unwrap(),
        catalog::linear_family(&ex("q12"), &ex("k2"), false),
    ] {
        let r = verify_reciprocal(&fam.map);
        assert!(r.pass, "{}: {:?}", fam.name, r.failing());
    }
}

#[test]
fn lie_equations_hold() {
    let cfg = SampleConfig::default();
    for fam in [
        catalog::rational_family(),
        catalog::rotation_family(&ex("q12"), &ex("q13")).unwrap(),
        catalog::exp_family(&ex("q12"), &ex("k1"), &ex("k2")).unwrap(),
        catalog::linear_family(&ex("q12"), &ex("k2"), false),
    ] {
        let r = lie_equation_check(&fam, &cfg).unwrap();
        assert_eq!(r.accepted, 100);
        assert!(r.identity_at_zero);
        assert!(r.max_residual < 1e-9, "{}: {:?}", fam.name, r.per_slot);
    }
}

#[test]
fn printed_pressure_sign_is_not_a_flow() {
    let fam = catalog::linear_family(&ex("q12"), &ex("k2"), true);
    let r = lie_equation_check(&fam, &SampleConfig { samples: 20, ..Default::default() }).unwrap();
    assert!(r.per_slot[3] > 1e-3);
    assert!(!verify_reciprocal(&fam.map).pass);
}

#[test]
fn rational_family_flows_against_printed_generator() {
    let mut fam = catalog::rational_family();
    fam.generator = y();
    let r = lie_equation_check(&fam, &SampleConfig { samples: 10, ..Default::default() }).unwrap();
    assert!(r.max_residual > 1e-3);
}

#[test]
fn pushforward_identity() {
    let id = ReciprocalMap::identity();
    assert_eq!(pushforward(&id, &x3()).unwrap(), x3());
    assert_eq!(decompose(&x3(), &[x3(), x4(), x5()]).unwrap(), vec![Expr::one(), Expr::zero(), Expr::zero()]);
}

#[test]
fn pushforward_of_x5_under_bateman() {
    let t = bateman_sym();
    let img = pushforward(&t, &x5()).unwrap();
    let c = decompose(&img, &[y(), x4(), x5()]).unwrap();
    let k = ex("1/(b1^2*b3)");
    assert_eq!(c, vec![k.clone(), k.mul(&ex("-2*b4")), k.mul(&ex("b4^2"))]);

    // independent route: substitute p + b2 = b1^2 b3 / (b4 - p') by hand in the raw image
    let raw = pushforward_raw(&t, &x5()).unwrap();
    let by_hand = raw.subs(&[
        ("p", ex("b1^2*b3/(b4-p)-b2")),
        ("u", ex("u*b1*b3/(b4-p)")),
        ("v", ex("v*b1*b3/(b4-p)")),
        ("rho", t.inverse.as_ref().unwrap()[0].clone()),
    ]);
    assert_eq!(by_hand, img);
}

#[test]
fn bateman_matrix_is_an_automorphism() {
    let c = lrt::lrt_second_derived().constant_table().unwrap();
    let cons = automorphism_constraints(&c, &["3", "4", "5"]);
    for t in [bateman_sym(), bateman_num(), theorem_num(1), ReciprocalMap::identity()] {
        let a = automorphism_matrix(&t, &["3", "4", "5"], &[x3(), x4(), x5()]).unwrap();
        let r = verify_automorphism_solution(&a, &cons).unwrap();
        assert!(r.satisfied, "{}: {:?}", t.name, r.residuals);
        assert!(!a.det().is_zero());
    }
}

#[test]
fn bateman_matrix_entries() {
    let a = automorphism_matrix(&bateman_sym(), &["3", "4", "5"], &[x3(), x4(), x5()]).unwrap();
    let want = AutomorphismMatrix::case_a35_nonzero(
        &ex("-2*b2/(b1^2*b3)"),
        &ex("2/(b1^2*b3)"),
        &ex("-2*b4/(b1^2*b3)"),
    )
    .unwrap();
    assert_eq!(a, want);
}

#[test]
fn x_f_leaves_the_span() {
    let img = pushforward(&bateman_sym(), &x_f()).unwrap();
    assert!(matches!(decompose(&img, &[x3(), x4(), x5()]), Err(Error::NotInSpan(_))));
}

#[test]
fn center_is_preserved() {
    let a = pushforward(&bateman_sym(), &x1()).unwrap();
    assert_eq!(decompose(&a, &[x1()]).unwrap(), vec![Expr::one()]);
    for a11 in [1, -1] {
        let img = pushforward(&theorem_num(a11), &x1()).unwrap();
        assert_eq!(decompose(&img, &[x1()]).unwrap(), vec![Expr::int(a11)]);
    }
}

#[test]
fn appendix_relations() {
    let lab = ["3", "4", "5"];
    let id = appendix_pde_residuals(&ReciprocalMap::identity(), &AutomorphismMatrix::identity(&lab), &Expr::one());
    assert!(id.pass, "{:?}", id.failing());
    assert!(id.algebraic.iter().all(|r| r.holds()));

    let t = bateman_sym();
    let a = automorphism_matrix(&t, &lab, &[x3(), x4(), x5()]).unwrap();
    let r = appendix_pde_residuals(&t, &a, &Expr::one());
    assert!(r.pass, "{:?}", r.failing());

    let th = theorem_num(-1);
    let a = automorphism_matrix(&th, &lab, &[x3(), x4(), x5()]).unwrap();
    let r = appendix_pde_residuals(&th, &a, &Expr::int(-1));
    assert!(r.pass, "{:?}", r.failing());

    let mut wrong = automorphism_matrix(&t, &lab, &[x3(), x4(), x5()]).unwrap();
    wrong.a[1][2] = wrong.a[1][2].add(&Expr::one());
    let r = appendix_pde_residuals(&t, &wrong, &Expr::one());
    assert!(!r.pass);
    assert!(!r.failing().is_empty());
}

#[test]
fn appendix_case_a35_zero() {
    let lab = ["3", "4", "5"];
    let m = catalog::mu_plus(&catalog::MuParams {
        a33: ex("2"),
        a54: ex("3"),
        alpha: ex("1"),
        beta: ex("2"),
        a11: Expr::one(),
        psi: ex("psi(S)"),
        f: s(),
    })
    .unwrap();
    let a = AutomorphismMatrix::case_a35_zero(&ex("2"), &ex("3")).unwrap();
    assert_eq!(automorphism_matrix(&m, &lab, &[x3(), x4(), x5()]).unwrap(), a);
    let r = appendix_pde_residuals(&m, &a, &Expr::one());
    assert!(r.pass, "{:?}", r.failing());
    assert_eq!(r.mu, Some(1));
    let get = |n: &str| r.algebraic.iter().find(|x| x.name == n).unwrap().holds();
    assert!(get("linear system 1") && get("linear system 4"));
    assert!(get("pressure from linear system (shift outside)"));
    assert!(!get("pressure from linear system (as displayed)"));
}

#[test]
fn normal_form_reaches_bateman_shape() {
    let nf = normal_form(&theorem_num(-1)).unwrap();
    assert_eq!(nf.steps.len(), 2);
    let want = catalog::theorem(&TheoremParams {
        a34: ex("1/2"),
        a35: ex("3"),
        a45: ex("-2"),
        alpha: Expr::zero(),
        beta: ex("5"),
        k: ex("2/3"),
        a11: Expr::one(),
        psi: ex("psi(S)"),
        f: s(),
    })
    .unwrap();
    assert_eq!(nf.map.fields, want.fields);
    assert_eq!(nf.map.form, want.form);
    assert!(verify_reciprocal(&nf.map).pass);
    assert_eq!(nf.params["beta"], ex("5"));
}

#[test]
fn map_file_round_trip() {
    let t = bateman_num();
    let json = serde_json::to_string(&t.to_file()).unwrap();
    let back: MapFile = serde_json::from_str(&json).unwrap();
    let m = back.to_map().unwrap();
    assert_eq!(m.fields, t.fields);
    assert_eq!(m.form, t.form);

    let text = r#"{"R": "rho", "U": "u", "V": "v", "P": "p", "H": "S", "form": [["1", "0"], ["0", "u_x"]]}"#;
    let f: MapFile = serde_json::from_str(text).unwrap();
    assert!(matches!(f.to_map(), Err(Error::VariableMismatch(_))));
}
