//! Generators and property checks shared by the property and acceptance
//! test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::str::FromStr;

use paracontact::geometry::{
    bianchi_residual, divergence, exterior_derivative, symmetry_residuals, Curvature, ManifoldModel, TensorField,
};
use paracontact::soliton::{soliton_residual, Potential, SolitonData};
use paracontact::structures::{builtin, example_5_1, flat_para_cosymplectic, UParam, BUILTIN_NAMES};
use paracontact::symbolic::{
    evaluate_numeric, parse_expr, to_f64, Assignment, DBig, DerivationSpec, Rational, SymbolKind, SymbolicError,
};
use paracontact::Expr;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngSeed, TestRng, TestRunner};

pub const DIGITS: usize = 50;
pub const SEED: u64 = 0x5eed;

pub fn chart() -> DerivationSpec {
    DerivationSpec::chart(&["x", "y", "z"])
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        ..ProptestConfig::default()
    }
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        (-5i64..6).prop_map(|n| format!("({n})")),
        (1i64..5, 2i64..4).prop_map(|(n, d)| format!("({n}/{d})")),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(str::to_string),
    ]
}

pub fn poly_text() -> impl Strategy<Value = String> {
    leaf().prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}*{b})")),
            (inner, 0u32..3).prop_map(|(a, k)| format!("({a})^{k}")),
        ]
    })
}

/// Random expressions in the full class: rational functions with
/// exponentials of polynomials. Denominators are kept away from zero on the
/// sample points by adding a square plus one.
pub fn expr_text() -> impl Strategy<Value = String> {
    expr_sized(3, 8)
}

pub fn expr_sized(depth: u32, size: u32) -> impl Strategy<Value = String> {
    let base = prop_oneof![
        3 => poly_text(),
        1 => poly_text().prop_map(|p| format!("exp({p})")),
    ];
    base.prop_recursive(depth, size, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}*{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), poly_text()).prop_map(|(a, p)| format!("({a})/(({p})^2 + 1)")),
            (inner, -2i32..3).prop_map(|(a, k)| format!("({a})^({k})")),
        ]
    })
}

pub fn point() -> impl Strategy<Value = Assignment> {
    (-7i64..8, 1i64..5, -7i64..8, 1i64..5, -7i64..8, 1i64..5).prop_map(|(a, b, c, d, e, f)| {
        [("x", a, b), ("y", c, d), ("z", e, f)]
            .into_iter()
            .map(|(k, n, m)| (k.to_string(), Rational::new(n.into(), m.into())))
            .collect()
    })
}

pub fn rel_err(a: &DBig, b: &DBig) -> f64 {
    let scale = to_f64(b).abs().max(1.0);
    to_f64(&(a - b)).abs() / scale
}

/// Printing the normal form and parsing it back is the identity.
pub fn check_idempotent(text: &str) -> Result<(), String> {
    let spec = chart();
    let e = match parse_expr(text, &spec) {
        Ok(e) => e,
        Err(SymbolicError::DivisionByZero) => return Ok(()),
        Err(err) => return Err(format!("{text}: {err}")),
    };
    let printed = e.to_string();
    let again = parse_expr(&printed, &spec).map_err(|err| format!("{printed}: {err}"))?;
    if again != e || again.to_string() != printed {
        return Err(format!("{text} normalizes to {printed}, which reprints as {again}"));
    }
    Ok(())
}

fn to_dbig(q: &Rational) -> DBig {
    let n: DBig = q.numer().to_string().parse().unwrap();
    let d: DBig = q.denom().to_string().parse().unwrap();
    n.with_precision(DIGITS + 40).value() / d.with_precision(DIGITS + 40).value()
}

/// `cases` deterministic cases: symbolic partial derivatives against a
/// central difference with step 1e-25 at 80 significant digits. Returns
/// the worst relative error.
pub fn derivative_agreement(cases: usize) -> Result<f64, String> {
    let spec = chart();
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(Default::default()));
    let h = Rational::from_str(&format!("1/1{}", "0".repeat(25))).unwrap();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < cases {
        let text = expr_text().new_tree(&mut runner).unwrap().current();
        let at = point().new_tree(&mut runner).unwrap().current();
        let Ok(e) = parse_expr(&text, &spec) else { continue };
        for dir in 0..3 {
            let key = ["x", "y", "z"][dir];
            let d = spec.differentiate(&e, dir).map_err(|err| err.to_string())?;
            let shifted = |sign: i64| -> Assignment {
                let mut a = at.clone();
                let v = a[key].clone() + h.clone() * Rational::from_integer(sign.into());
                a.insert(key.to_string(), v);
                a
            };
            let (Ok(exact), Ok(plus), Ok(minus)) = (
                evaluate_numeric(&d, &at, DIGITS + 30),
                evaluate_numeric(&e, &shifted(1), DIGITS + 30),
                evaluate_numeric(&e, &shifted(-1), DIGITS + 30),
            ) else {
                continue;
            };
            let fd = (plus - minus) / (DBig::from(2) * to_dbig(&h));
            let err = rel_err(&fd, &exact);
            if !(err < 1e-20) {
                return Err(format!(
                    "d/d{key} of {e} at {at:?}: symbolic {exact} vs difference {fd}"
                ));
            }
            worst = worst.max(err);
        }
        checked += 1;
    }
    Ok(worst)
}

pub fn all_builtins() -> Vec<ManifoldModel> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n, &BTreeMap::new()).unwrap().model().clone())
        .collect()
}

/// First Bianchi identity, pair antisymmetries and Ricci symmetry.
pub fn curvature_symmetries_on_builtins() -> Result<(), String> {
    for m in all_builtins() {
        let c = Curvature::compute(&m).map_err(|e| e.to_string())?;
        if !bianchi_residual(&c.riemann).is_zero() {
            return Err(format!("{}: Bianchi", m.name()));
        }
        let (pair, block) = symmetry_residuals(&m, &c.riemann);
        if !(pair.is_zero() && block.is_zero()) {
            return Err(format!("{}: Riemann symmetries", m.name()));
        }
        if c.ricci != c.ricci.transpose(0, 1) {
            return Err(format!("{}: Ricci symmetry", m.name()));
        }
    }
    Ok(())
}

pub fn exterior_derivative_squares_to_zero() -> Result<(), String> {
    let mut models = all_builtins();
    let mut s = example_5_1(UParam::Symbolic).unwrap();
    s.declare("w", SymbolKind::Constant).unwrap();
    models.push(s.model().clone());
    let chart_forms = ["x*y*exp(z)", "y^2 - z/(x^2 + 1)", "exp(-2*z^3)*x"];
    for m in &models {
        let comps: Vec<Expr> = if m.is_frame() {
            ["u", "u^2 + 1", "3"]
                .iter()
                .map(|t| parse_expr(t, m.spec()).unwrap())
                .collect()
        } else {
            chart_forms.iter().map(|t| parse_expr(t, m.spec()).unwrap()).collect()
        };
        let w = TensorField::covector(comps);
        let dw = exterior_derivative(m, &w).map_err(|e| e.to_string())?;
        if !exterior_derivative(m, &dw).map_err(|e| e.to_string())?.is_zero() {
            return Err(format!("{}: d(dw) != 0", m.name()));
        }
    }
    let flat = flat_para_cosymplectic().unwrap();
    let f = parse_expr("x^2*exp(y*z)", flat.model().spec()).unwrap();
    let df = exterior_derivative(flat.model(), &TensorField::scalar(f)).map_err(|e| e.to_string())?;
    if !exterior_derivative(flat.model(), &df)
        .map_err(|e| e.to_string())?
        .is_zero()
    {
        return Err("d(df) != 0".into());
    }
    Ok(())
}

pub fn passing_solitons() -> Vec<(ManifoldModel, Curvature, SolitonData)> {
    let mut out = Vec::new();
    let s = example_5_1(UParam::Value(Rational::default())).unwrap();
    let c = Curvature::compute(s.model()).unwrap();
    out.push((
        s.model().clone(),
        c,
        SolitonData::new(Potential::Field(s.xi().clone()), Expr::int(-2), Expr::int(-2)).unwrap(),
    ));
    let mut flat = flat_para_cosymplectic().unwrap();
    flat.declare("delta", SymbolKind::Constant).unwrap();
    let m = flat.model().clone();
    let c = Curvature::compute(&m).unwrap();
    let delta = Expr::symbol("delta");
    let euler = TensorField::vector(
        ["x", "y", "z"]
            .iter()
            .map(|t| parse_expr(t, m.spec()).unwrap())
            .collect(),
    );
    out.push((
        m.clone(),
        c.clone(),
        SolitonData::new(Potential::Field(euler), -&delta, delta.clone()).unwrap(),
    ));
    let u = parse_expr("(x^2 - y^2 + z^2)/2", m.spec()).unwrap();
    out.push((m, c, SolitonData::new(Potential::Gradient(u), -&delta, delta).unwrap()));
    out
}

/// `div Z = n(r − λ)/δ` on every passing soliton.
pub fn trace_identity_on_passing_solitons() -> Result<(), String> {
    for (m, c, data) in passing_solitons() {
        if !soliton_residual(&m, &c, &data).map_err(|e| e.to_string())?.passed() {
            return Err(format!("{}: soliton fails", m.name()));
        }
        let z = data.field(&m).unwrap();
        let div = divergence(&m, &c.connection, &z).map_err(|e| e.to_string())?;
        let n = Expr::int(m.dim() as i64);
        let q = (&c.scalar - &data.lambda).checked_div(&data.delta).unwrap();
        if !(&div - &(&n * &q)).is_zero() {
            return Err(format!("{}: div Z = {div}, n q = {}", m.name(), &n * &q));
        }
    }
    Ok(())
}
