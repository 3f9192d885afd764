mod support;

use paracontact::geometry::TensorField;
use paracontact::soliton::{soliton_residual, Potential, SolitonData};
use paracontact::structures::{example_5_1, UParam};
use paracontact::symbolic::{
    cross_check_zero, evaluate_ast, evaluate_numeric, is_zero, parse_ast, parse_expr, Rational,
};
use paracontact::Expr;
use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn normal_form_is_idempotent(text in expr_text()) {
        if let Err(e) = check_idempotent(&text) {
            panic!("{e}");
        }
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn normal_form_agrees_with_the_parse_tree(text in expr_text(), at in point()) {
        let spec = chart();
        let Ok(e) = parse_expr(&text, &spec) else { return Ok(()) };
        let tree = parse_ast(&text, Some(&spec)).unwrap();
        let (Ok(a), Ok(b)) = (evaluate_ast(&tree, &at, DIGITS), evaluate_numeric(&e, &at, DIGITS)) else {
            return Ok(());
        };
        prop_assert!(rel_err(&a, &b) < 1e-30, "{text} at {at:?}: {a} vs {b}");
    }

    #[test]
    fn is_zero_is_sound(a in expr_sized(2, 6), b in expr_sized(2, 6)) {
        let spec = chart();
        let (Ok(a), Ok(b)) = (parse_expr(&a, &spec), parse_expr(&b, &spec)) else { return Ok(()) };
        // (a + b)² − a² − 2ab − b² vanishes; adding one never does.
        let id = &(&(&(&a + &b) * &(&a + &b)) - &(&a * &a)) - &(&(&a * &b).times(2, 1) + &(&b * &b));
        prop_assert!(is_zero(&id).zero);
        prop_assert!(cross_check_zero(&id, 4, 7));
        let off = &id + &Expr::one();
        let t = is_zero(&off);
        prop_assert!(!t.zero);
        prop_assert!(!cross_check_zero(&off, 4, 7));
        prop_assert_eq!(t.witness, Some(Expr::one()));
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let worst = derivative_agreement(100).unwrap();
    assert!(worst < 1e-20);
}

#[test]
fn curvature_symmetries_on_builtins() {
    support::curvature_symmetries_on_builtins().unwrap();
}

#[test]
fn exterior_derivative_squares_to_zero() {
    support::exterior_derivative_squares_to_zero().unwrap();
}

#[test]
fn trace_identity_on_passing_solitons() {
    support::trace_identity_on_passing_solitons().unwrap();
}

#[test]
fn delta_scaling_covariance() {
    let (m, c, _) = passing_solitons().remove(0);
    let s = example_5_1(UParam::Value(Rational::default())).unwrap();
    let r = c.scalar.clone();
    let e1 = TensorField::basis_vector(3, 0);
    for z in [s.xi().clone(), e1] {
        for lambda in [Expr::int(-2), Expr::int(3)] {
            let delta = Expr::int(5);
            let base = SolitonData::new(Potential::Field(z.clone()), lambda.clone(), delta.clone()).unwrap();
            let verdict = soliton_residual(&m, &c, &base).unwrap().passed();
            for k in [Expr::int(2), Expr::ratio(-1, 3)] {
                let lambda2 = &r - &(&k * &(&r - &lambda));
                let scaled = SolitonData::new(Potential::Field(z.scale(&k)), lambda2, delta.clone()).unwrap();
                assert_eq!(soliton_residual(&m, &c, &scaled).unwrap().passed(), verdict);
            }
        }
    }
}
