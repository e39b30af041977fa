use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reciprocal_core::numerics::*;
use reciprocal_core::symkernel::{ex, Expr};
use reciprocal_core::transforms::catalog::{bateman, broken, remark, rotation_map};
use reciprocal_core::transforms::{invert, ReciprocalMap};
use reciprocal_core::Error;

fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, Expr> {
    pairs.iter().map(|(k, v)| (k.to_string(), ex(v))).collect()
}

fn unit(n: usize) -> Grid {
    Grid::rect(0.0, 1.0, 0.0, 1.0, n, n).unwrap()
}

fn shear(g: Grid) -> GridSolution {
    make_solution(Family::Shear, &BTreeMap::new(), g).unwrap()
}

fn vortex(kappa: &str, g: Grid) -> GridSolution {
    make_solution(Family::Vortex, &params(&[("kappa", kappa)]), g).unwrap()
}

fn bat(b: [i64; 4]) -> ReciprocalMap {
    let e = b.map(Expr::int);
    bateman(&e[0], &e[1], &e[2], &e[3], &ex("S")).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn constant_flow_has_zero_residuals() {
    let sol = make_solution(Family::Constant, &BTreeMap::new(), unit(9)).unwrap();
    let r = fd_residuals(&sol).unwrap();
    assert!(r.iter().all(|x| *x < 1e-12), "{r:?}");
}

#[test]
fn shear_residuals_vanish_at_every_resolution() {
    // the stencil is exact on this profile, so no convergence rate can be read off
    let g = unit(17);
    let coarse = fd_residuals(&shear(g)).unwrap();
    let fine = fd_residuals(&shear(g.refined())).unwrap();
    assert!(coarse.iter().chain(&fine).all(|x| *x < 1e-12), "{coarse:?} {fine:?}");
    assert!(convergence_ratio(&coarse, &fine).iter().all(|r| r.is_nan()));
}

#[test]
fn vortex_residuals_converge_at_second_order() {
    let g = Grid::rect(1.0, 2.0, 0.0, 1.0, 17, 17).unwrap();
    let coarse = fd_residuals(&vortex("1", g)).unwrap();
    let fine = fd_residuals(&vortex("1", g.refined())).unwrap();
    // continuity and entropy are linear in the exact stencil here; the momentum equations carry the truncation
    for k in [1, 2] {
        let r = coarse[k] / fine[k];
        assert!((3.5..=4.5).contains(&r), "equation {}: ratio {r}", k + 1);
    }
    // rigid rotation is quadratic in x, y and the stencil is exact
    let rigid = fd_residuals(&vortex("0", g)).unwrap();
    assert!(rigid.iter().all(|x| *x < 1e-12), "{rigid:?}");
}

#[test]
fn perturbed_solution_is_rejected() {
    let mut sol = shear(unit(17));
    let mut rng = ChaCha8Rng::seed_from_u64(20240801);
    for u in sol.u.iter_mut() {
        *u += rng.gen_range(-0.05..0.05);
    }
    let r = fd_residuals(&sol).unwrap();
    assert!(r[0] > 1e-2 && r[1] > 1e-2, "{r:?}");
}

#[test]
fn small_grids_and_bad_parameters_are_rejected() {
    let g = Grid::rect(0.0, 1.0, 0.0, 1.0, 2, 5).unwrap();
    let sol = make_solution(Family::Constant, &BTreeMap::new(), g).unwrap();
    assert_eq!(fd_residuals(&sol), Err(Error::GridTooSmall));

    let bad = |f, p: &[(&str, &str)], g| matches!(make_solution(f, &params(p), g), Err(Error::InvalidParams(_)));
    assert!(bad(Family::Shear, &[("u", "1+x")], unit(5)));
    assert!(bad(Family::Shear, &[("rho", "y-1/2")], unit(5)));
    assert!(bad(Family::Constant, &[("rho", "-1")], unit(5)));
    assert!(bad(Family::Constant, &[("w", "1")], unit(5)));
    assert!(bad(Family::Vortex, &[], Grid::rect(-1.0, 1.0, -1.0, 1.0, 5, 5).unwrap()));
}

#[test]
fn exact_residuals_of_families_vanish() {
    // symbolic oracle: residuals of a hand-written non-solution are nonzero
    let fields = ["1", "y", "x", "1", "0"].map(ex);
    assert!(!analytic::exact_residuals(&fields).iter().all(|r| r.is_zero()));
    let a = AnalyticSolution::new(Family::Vortex, &params(&[("kappa", "2"), ("omega", "1/3")])).unwrap();
    assert!(analytic::exact_residuals(&a.fields).iter().all(|r| r.is_zero()));
}

#[test]
fn cumulative_simpson_is_exact_on_cubics() {
    let h = 0.1;
    let f: Vec<f64> = (0..11).map(|k| (k as f64 * h).powi(3)).collect();
    let c = cumulative_simpson(&f, h);
    for (k, v) in c.iter().enumerate() {
        assert!((v - (k as f64 * h).powi(4) / 4.0).abs() < 1e-14, "{k}: {v}");
    }
}

#[test]
fn constant_flow_under_simplified_map() {
    let sol = make_solution(Family::Constant, &BTreeMap::new(), unit(11)).unwrap();
    let t = remark(&Expr::one(), &Expr::zero(), &ex("S")).unwrap();
    let out = transform_solution(&sol, &t).unwrap();
    for k in 0..out.grid.len() {
        let f = out.state(k);
        let want = [0.5, 1.0, 0.0, -1.0, 0.0];
        assert!(f.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12), "{f:?}");
    }
    let (xs, ys) = primed_coordinates(&sol, &t, &TransformConfig::default()).unwrap();
    let g = sol.grid;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            assert!((xs[k] - g.x(i)).abs() < 1e-12 && (ys[k] - 2.0 * g.y(j)).abs() < 1e-12);
        }
    }
    assert!((out.grid.hy - 2.0 * g.hy).abs() < 1e-15 && out.grid.hx == g.hx);
}

#[test]
fn shear_coordinates_match_closed_form() {
    // y' = int (p + rho u^2) dy with rho u^2 = 1 + 5/2 y^2 + 2 y^4 + 1/2 y^6
    let yp = |y: f64| 2.0 * y + 5.0 / 6.0 * y.powi(3) + 0.4 * y.powi(5) + y.powi(7) / 14.0;
    let sol = shear(unit(65));
    let (xs, ys) = primed_coordinates(&sol, &bat([1, 0, 1, 0]), &TransformConfig::default()).unwrap();
    let g = sol.grid;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            assert!((xs[k] - g.x(i)).abs() < 1e-12);
            assert!((ys[k] - yp(g.y(j))).abs() < 1e-7, "{} vs {}", ys[k], yp(g.y(j)));
        }
    }
}

#[test]
fn identity_map_reproduces_arrays_exactly() {
    for sol in [shear(unit(9)), vortex("1", Grid::rect(1.0, 2.0, 0.0, 1.0, 9, 7).unwrap())] {
        let out = transform_solution(&sol, &ReciprocalMap::identity()).unwrap();
        for (a, b) in sol.fields().iter().zip(out.fields()) {
            assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        assert_eq!(out.grid, sol.grid);
    }
}

#[test]
fn transformed_shear_stays_exact() {
    let sol = shear(unit(17));
    let out = transform_solution(&sol, &bat([1, 0, 1, 0])).unwrap();
    let r = fd_residuals(&out).unwrap();
    assert!(r.iter().all(|x| *x < 1e-10), "{r:?}");
    // u' = u / p at the preimage of a node, with p = 1
    let k = out.grid.idx(3, 5);
    let (x, y) = (out.grid.x(3), out.grid.y(5));
    let f = out.eval(x, y).unwrap();
    assert_eq!(f, out.state(k));
    let (_, y0) = out.preimage(x, y).unwrap().unwrap();
    assert!((f[1] - (1.0 + y0 * y0)).abs() < 1e-12 && f[2] == 0.0 && (f[3] + 1.0).abs() < 1e-12);
}

#[test]
fn transformed_vortex_converges_at_second_order() {
    let g = Grid::rect(1.0, 2.0, 0.0, 1.0, 33, 33).unwrap();
    let t = bat([1, 0, 1, 0]);
    let first = transform_solution(&vortex("1", g), &t).unwrap();
    // a window slightly inside the first primed grid, shared by both resolutions
    let pg = first.grid;
    let (wx, wy) = (0.02 * (pg.x1() - pg.x0), 0.02 * (pg.y1() - pg.y0));
    let window = [pg.x0 + wx, pg.x1() - wx, pg.y0 + wy, pg.y1() - wy];
    let cfg = TransformConfig { window: Some(window), ..Default::default() };
    let first = transform_solution_with(&vortex("1", g), &t, &cfg).unwrap();
    let coarse = fd_residuals(&first).unwrap();
    let fine = fd_residuals(&transform_solution_with(&vortex("1", g.refined()), &t, &cfg).unwrap()).unwrap();
    let ratio = convergence_ratio(&coarse, &fine);
    for k in 0..3 {
        assert!((3.5..=4.5).contains(&ratio[k]), "equation {}: {ratio:?}", k + 1);
    }
    assert!(coarse[3] < 1e-12);
}

#[test]
fn loop_integrals_close() {
    let sol = shear(unit(33));
    let c = loop_closedness(&sol, &bat([1, 0, 1, 0]), &unit_square(0.0, 0.0)).unwrap();
    assert!(c < 1e-8, "{c}");

    let constant = make_solution(Family::Constant, &params(&[("v", "1/2")]), unit(5)).unwrap();
    let maps = [
        bat([2, 1, 3, -1]),
        remark(&ex("2"), &ex("1"), &ex("S")).unwrap(),
        rotation_map(&ex("3/5"), &ex("4/5")).unwrap(),
        ReciprocalMap::identity(),
    ];
    for t in &maps {
        let c = loop_closedness(&constant, t, &unit_square(0.0, 0.0)).unwrap();
        assert!(c < 1e-12, "{}: {c}", t.name);
    }

    let v = vortex("1", Grid::rect(1.0, 2.0, 0.0, 1.0, 17, 17).unwrap());
    let ok = loop_closedness(&v, &bat([1, 0, 1, 0]), &unit_square(1.0, 0.0)).unwrap();
    let b = broken(&Expr::one(), &Expr::zero(), &Expr::one(), &Expr::zero()).unwrap();
    let bad = loop_closedness(&v, &b, &unit_square(1.0, 0.0)).unwrap();
    assert!(ok < 1e-8 && bad > 1e-3, "{ok} {bad}");

    assert!(matches!(
        loop_closedness(&sol, &bat([1, 0, 1, 0]), &unit_square(0.5, 0.0)),
        Err(Error::DomainViolation(_))
    ));
}

#[test]
fn coordinates_are_path_independent() {
    let sources: Vec<GridSolution> = vec![shear(unit(5)), vortex("1", Grid::rect(1.0, 2.0, 0.0, 1.0, 5, 5).unwrap())];
    let maps = [bat([1, 0, 1, 0]), bat([2, 1, 3, -1]), remark(&ex("1/2"), &ex("0"), &ex("S")).unwrap()];
    for sol in &sources {
        let src = sol.source.as_deref().unwrap();
        let (a, b) = (sol.grid.x0, sol.grid.y0);
        for t in &maps {
            let to = (a + 0.8, b + 0.9);
            let p = path_coordinates(src, t, (a, b), to, PathOrder::XFirst, 200).unwrap();
            let q = path_coordinates(src, t, (a, b), to, PathOrder::YFirst, 200).unwrap();
            assert!((p.0 - q.0).abs() < 1e-8 && (p.1 - q.1).abs() < 1e-8, "{}: {p:?} {q:?}", t.name);
        }
        // nodewise on the grid as well
        let cfg = |order| TransformConfig { order, sub: 8, ..Default::default() };
        let (x1, y1) = primed_coordinates(sol, &maps[1], &cfg(PathOrder::XFirst)).unwrap();
        let (x2, y2) = primed_coordinates(sol, &maps[1], &cfg(PathOrder::YFirst)).unwrap();
        let d: Vec<f64> = x1.iter().zip(&x2).chain(y1.iter().zip(&y2)).map(|(a, b)| a - b).collect();
        assert!(max_abs(&d) < 1e-8, "{}", max_abs(&d));
    }
}

#[test]
fn map_then_inverse_recovers_fields() {
    let cfg = TransformConfig { sub: 16, ..Default::default() };
    for (sol, t) in [
        (shear(unit(17)), bat([2, 1, 3, -1])),
        (vortex("1", Grid::rect(1.0, 2.0, 0.0, 1.0, 17, 17).unwrap()), bat([1, 0, 1, 0])),
    ] {
        let once = transform_solution_with(&sol, &t, &cfg).unwrap();
        // anchor the second map so that coordinates return to the original ones
        let og = once.grid;
        let anchor = once.preimage(og.x0, og.y0).unwrap().unwrap();
        let cfg2 = TransformConfig { anchor: Some(anchor), ..cfg.clone() };
        let back = transform_solution_with(&once, &invert(&t).unwrap(), &cfg2).unwrap();
        // recovered arrays against the input solution at the recovered nodes
        let bg = back.grid;
        let mut worst = 0f64;
        for j in 0..bg.ny {
            for i in 0..bg.nx {
                let want = sol.eval(bg.x(i), bg.y(j)).unwrap();
                let got = back.state(bg.idx(i, j));
                worst = got.iter().zip(want).fold(worst, |m, (a, b)| m.max((a - b).abs()));
            }
        }
        let area = (bg.x1() - bg.x0) * (bg.y1() - bg.y0);
        assert!(worst < 1e-8 && area > 0.01, "{}: {worst} over area {area}", once.provenance);
    }
}

#[test]
fn domain_violations_and_divergence_are_reported() {
    let sol = make_solution(Family::Constant, &BTreeMap::new(), unit(5)).unwrap();
    // p + b2 vanishes on the whole grid
    assert!(matches!(transform_solution(&sol, &bat([1, -1, 1, 0])), Err(Error::DomainViolation(_))));
    let cfg = TransformConfig { max_iter: 0, ..Default::default() };
    assert!(matches!(
        transform_solution_with(&shear(unit(9)), &bat([1, 0, 1, 0]), &cfg),
        Err(Error::NewtonDivergence(_))
    ));
    let symbolic = bateman(&ex("b1"), &ex("0"), &ex("1"), &ex("0"), &ex("S")).unwrap();
    assert!(matches!(transform_solution(&sol, &symbolic), Err(Error::InvalidParams(_))));
}
