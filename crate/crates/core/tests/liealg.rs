use reciprocal_core::liealg::lrt::{self, x1, x2, x3, x4, x5, x_f, x_h, y};
use reciprocal_core::liealg::{
    automorphism_constraints, check_table, commutator, verify_automorphism_solution,
    AutomorphismMatrix, BasisElement, Generator, GeneratorFile, LieAlgebra,
};
use reciprocal_core::symkernel::{ex, Expr};
use reciprocal_core::Error;

fn bracket(a: &Generator, b: &Generator) -> Generator {
    commutator(a, b).unwrap()
}

#[test]
fn commutator_examples() {
    assert_eq!(bracket(&x3(), &x4()), x3().scale(&Expr::int(-1)));
    assert_eq!(bracket(&x4(), &x5()), x5().scale(&Expr::int(-1)));
    assert_eq!(bracket(&x3(), &x5()), x4().scale(&Expr::int(-1)));
    assert!(bracket(&x1(), &x1()).is_zero());
    // the printed generator doubles the last bracket
    assert_eq!(bracket(&y(), &x5()), x4().scale(&Expr::int(-2)));
    let hf = bracket(&x_h(), &x_f());
    assert_eq!(hf, lrt::x_h_with(&ex("h'(S)*F(S)")).scale(&Expr::int(-1)));
}

#[test]
fn commutator_rejects_jets() {
    let bad = Generator::parse(["u_x", "0", "0", "0", "0"], [["0", "0"], ["0", "0"]]).unwrap();
    assert!(matches!(commutator(&bad, &x1()), Err(Error::VariableMismatch(_))));
}

#[test]
fn lrt_table_matches() {
    let l = lrt::lrt();
    let t = l.table_report();
    let expected = [
        ["0", "0", "0", "0", "0", "0", "0"],
        ["0", "0", "0", "0", "0", "0", "0"],
        ["0", "0", "0", "-X3", "-X4", "0", "0"],
        ["0", "0", "X3", "0", "-X5", "0", "0"],
        ["0", "0", "X4", "X5", "0", "0", "0"],
        ["0", "0", "0", "0", "0", "0", "-X_h[F(S)*h'(S)]"],
        ["0", "0", "0", "0", "0", "X_h[F(S)*h'(S)]", "0"],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            assert_eq!(&t.rows[i][j], e, "entry ({i},{j})");
        }
    }
}

#[test]
fn second_derived_constants() {
    let l = lrt::lrt_second_derived();
    let c = l.constant_table().unwrap();
    let mut nonzero = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if !c[i][j][k].is_zero() && i < j {
                    nonzero.push((i + 3, j + 3, k + 3, c[i][j][k].clone()));
                }
            }
        }
    }
    assert_eq!(
        nonzero,
        vec![
            (3, 4, 3, Expr::int(-1)),
            (3, 5, 4, Expr::int(-1)),
            (4, 5, 5, Expr::int(-1))
        ]
    );
    check_table(&c).unwrap();
}

#[test]
fn center_pair_is_abelian() {
    let l = LieAlgebra::new(vec![
        BasisElement::constant("X1", x1()),
        BasisElement::constant("X2", x2()),
    ])
    .unwrap();
    assert!(l.table.iter().flatten().all(|c| c.is_empty()));
    assert_eq!(l.derived().dim(), 0);
    assert_eq!(l.center().dim(), 2);
}

#[test]
fn not_closed_is_reported() {
    let rho = Generator::parse(["rho", "0", "0", "0", "0"], [["0", "0"], ["0", "0"]]).unwrap();
    let r = LieAlgebra::new(vec![
        BasisElement::constant("X3", x3()),
        BasisElement::constant("R", rho),
    ]);
    assert!(matches!(r, Err(Error::NotClosed { .. })));
}

#[test]
fn derived_series_and_center() {
    let l = lrt::lrt();
    let d1 = l.derived();
    assert_eq!(d1.labels(), vec!["X3", "X4", "X5", "X_h"]);
    let d2 = d1.derived();
    assert_eq!(d2.labels(), vec!["X3", "X4", "X5"]);
    let z = l.center();
    let labels = z.labels();
    assert!(labels.contains(&"X1".to_string()));
    assert!(labels.contains(&"X2".to_string()));
    // every central element commutes with each member, checked directly
    for c in &z.basis {
        for b in &l.basis {
            assert!(bracket(&c.template, &b.generic()).is_zero());
        }
    }
    assert_eq!(lrt::lrt_second_derived().center().dim(), 0);
}

#[test]
fn nine_constraints() {
    let c = lrt::lrt_second_derived().constant_table().unwrap();
    let got = automorphism_constraints(&c, &["3", "4", "5"]);
    let listed = [
        "a44*a33-a43*a34-a33",
        "a54*a33-a53*a34-a43",
        "a54*a43-a53*a44-a53",
        "a45*a33-a43*a35-a34",
        "a55*a33-a53*a35-a44",
        "a55*a43-a54-a53*a45",
        "a45*a34-a44*a35-a35",
        "a55*a34-a54*a35-a45",
        "a55*a44-a55-a54*a45",
    ];
    let mut want: Vec<Expr> = listed.iter().map(|s| ex(s).equation_normal_form()).collect();
    let mut got_sorted = got.clone();
    want.sort();
    got_sorted.sort();
    assert_eq!(got_sorted, want);

    let id = AutomorphismMatrix::identity(&["3", "4", "5"]);
    assert!(verify_automorphism_solution(&id, &got).unwrap().satisfied);

    let a = AutomorphismMatrix::case_a35_zero(&ex("a33"), &ex("a54")).unwrap();
    let r = verify_automorphism_solution(&a, &got).unwrap();
    assert!(r.satisfied);
    assert_eq!(r.det, "1");
    let b = AutomorphismMatrix::case_a35_nonzero(&ex("a34"), &ex("a35"), &ex("a45")).unwrap();
    let r = verify_automorphism_solution(&b, &got).unwrap();
    assert!(r.satisfied, "{:?}", r.residuals);
    assert!(!ex(&r.det).is_zero());

    let random = AutomorphismMatrix::new(
        &["3", "4", "5"],
        vec![
            vec![ex("2"), ex("1/3"), ex("0")],
            vec![ex("5"), ex("-1"), ex("7/2")],
            vec![ex("1"), ex("1"), ex("3")],
        ],
    );
    assert!(!verify_automorphism_solution(&random, &got).unwrap().satisfied);
    let singular = AutomorphismMatrix::new(&["3", "4", "5"], vec![vec![Expr::zero(); 3]; 3]);
    assert_eq!(verify_automorphism_solution(&singular, &got).unwrap_err(), Error::SingularMatrix);
}

#[test]
fn abelian_has_no_constraints() {
    let c = vec![vec![vec![Expr::zero(); 2]; 2]; 2];
    assert!(automorphism_constraints(&c, &["1", "2"]).is_empty());
}

#[test]
fn generator_file_round_trip() {
    let f = x3().to_file();
    let json = serde_json::to_string(&f).unwrap();
    let back: GeneratorFile = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_generator().unwrap(), x3());
}

#[test]
fn independent_functions_in_one_family() {
    let l = lrt::lrt();
    let sb = l.functional_self_brackets().unwrap();
    let render: Vec<(String, String)> = sb
        .iter()
        .map(|(i, c)| (l.basis[*i].label.clone(), l.render_combination(c)))
        .collect();
    assert_eq!(render[0], ("X_h".to_string(), "0".to_string()));
    assert_eq!(render[1].0, "X_F");
    assert_ne!(render[1].1, "0");
}
