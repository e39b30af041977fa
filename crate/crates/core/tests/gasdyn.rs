use reciprocal_core::gasdyn::{
    closedness_residual, conservation_forms, exterior_derivative, total_derivative,
    ConservationFormParams, GasSystem, MainChoice, OneForm,
};
use reciprocal_core::symkernel::{ex, Expr};
use reciprocal_core::Error;

fn both() -> [GasSystem; 2] {
    [GasSystem::new(MainChoice::XDerivatives), GasSystem::new(MainChoice::YDerivatives)]
}

#[test]
fn main_derivatives_solve_the_system() {
    for sys in both() {
        for f in &sys.equations {
            assert!(sys.reduce(f).is_zero(), "{f}");
        }
        assert_eq!(sys.parametric_jets().len(), 6);
    }
    let sys = GasSystem::default();
    let names: Vec<String> = sys.parametric_jets().iter().map(|s| s.name().to_string()).collect();
    assert_eq!(names.len(), 6);
    for j in ["u_x", "u_y", "v_x", "v_y", "rho_y", "S_y"] {
        assert!(names.contains(&j.to_string()), "{j}");
    }
}

#[test]
fn momentum_conservation_laws() {
    for sys in both() {
        let first = total_derivative(&ex("rho*u*v"), "x").add(&total_derivative(&ex("p+rho*v^2"), "y"));
        let second = total_derivative(&ex("p+rho*u^2"), "x").add(&total_derivative(&ex("rho*u*v"), "y"));
        assert!(sys.reduce(&first).is_zero());
        assert!(sys.reduce(&second).is_zero());
        // mass flux is conserved too, energy-like fluxes are not
        let mass = total_derivative(&ex("rho*u"), "x").add(&total_derivative(&ex("rho*v"), "y"));
        assert!(sys.reduce(&mass).is_zero());
        let other = total_derivative(&ex("u"), "x").add(&total_derivative(&ex("v"), "y"));
        assert!(!sys.reduce(&other).is_zero());
    }
}

#[test]
fn reduction_is_a_projection() {
    let sys = GasSystem::default();
    for src in ["rho_x*p_y + S_x^2", "u*rho_x/(1+p_x^2)", "S_x*S_y - v_y"] {
        let once = sys.reduce(&ex(src));
        assert_eq!(sys.reduce(&once), once);
    }
}

#[test]
fn forms_with_unit_scaling() {
    let (s1, s2) = conservation_forms(&ConservationFormParams::rational([1, 0, 0, 1, 0, 0])).unwrap();
    assert_eq!(s1, OneForm::new(ex("p+rho*v^2"), ex("-rho*u*v")));
    assert_eq!(s2, OneForm::new(ex("-rho*u*v"), ex("p+rho*u^2")));
}

#[test]
fn forms_are_closed_for_any_constants() {
    let (s1, s2) = conservation_forms(&ConservationFormParams::symbolic()).unwrap();
    for sys in both() {
        assert!(closedness_residual(&sys, &s1).is_zero());
        assert!(closedness_residual(&sys, &s2).is_zero());
    }
    let not_closed = OneForm::new(ex("p"), ex("rho"));
    let r = closedness_residual(&GasSystem::default(), &not_closed);
    assert!(!r.is_zero());
    assert_eq!(exterior_derivative(&not_closed), ex("rho_x - p_y"));
}

#[test]
fn delta_matches_expansion() {
    let q = ConservationFormParams::symbolic();
    let want = ex("p^2+(q12+q22)*p+p*rho*(u^2+v^2)+q12*q22-q13*q23+rho*(q12*u^2+q22*v^2)-(q13+q23)*rho*u*v");
    assert_eq!(q.delta(), want);
}

#[test]
fn degenerate_scaling_is_rejected() {
    let mut q = ConservationFormParams::symbolic();
    q.q11 = Expr::zero();
    assert!(matches!(conservation_forms(&q), Err(Error::InvalidParams(_))));
    let q = ConservationFormParams::rational([2, 0, 0, 0, 0, 0]);
    assert!(matches!(conservation_forms(&q), Err(Error::InvalidParams(_))));
}
