//! Acceptance battery: one line per criterion, then a single assertion so
//! every criterion reports even when an earlier one fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::io::Write as _;
use std::process::Command;

use paracontact::geometry::{exterior_derivative, levi_civita, Curvature, ManifoldModel, TensorField};
use paracontact::report::{CheckReport, ResidualValue, Status};
use paracontact::soliton::{
    classify_soliton, conformal_coefficient, gradient_soliton_residual, identity_check, soliton_residual, solve_lambda,
    IdentityOptions, Potential, SolitonData, SolitonKind,
};
use paracontact::structures::{
    classify, example_5_1, example_5_2, fit_k_mu, flat_para_cosymplectic, fundamental_two_form, h_operator,
    verify_axioms, KMuFit, UParam,
};
use paracontact::symbolic::{evaluate_exact, parse_expr, Assignment, Rational, SymbolKind};
use paracontact::Expr;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use serde_json::Value;

type Outcome = Result<String, String>;

fn p(text: &str, m: &ManifoldModel) -> Expr {
    parse_expr(text, m.spec()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn zero(what: &str, e: &Expr) -> Result<(), String> {
    if e.is_zero() {
        Ok(())
    } else {
        Err(format!("{what} = {e}"))
    }
}

fn passed(r: &CheckReport) -> Result<(), String> {
    if r.passed() {
        Ok(())
    } else {
        Err(format!("{} is {} ({:?})", r.id, r.status, r.first_witness()))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn christoffel_5_2() -> Outcome {
    let s = example_5_2().map_err(err)?;
    let m = s.model();
    let conn = levi_civita(m).map_err(err)?;
    let (x, y, z) = (0, 1, 2);
    let families = [
        ((z, x, x), "-3*z^2*exp(2*z^3)"),
        ((x, x, z), "3*z^2"),
        ((x, z, x), "3*z^2"),
        ((y, y, z), "-3*z^2"),
        ((y, z, y), "-3*z^2"),
        ((z, y, y), "3*z^2*exp(-2*z^3)"),
    ];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let expected = families
                    .iter()
                    .find(|(idx, _)| *idx == (k, i, j))
                    .map_or(Expr::zero(), |(_, t)| p(t, m));
                // gamma(i, j, k) is the coefficient of e_k in nabla_{e_i} e_j.
                if conn.gamma(i, j, k) != &expected {
                    return Err(format!(
                        "Gamma^{k}_{i}{j} = {} expected {expected}",
                        conn.gamma(i, j, k)
                    ));
                }
            }
        }
    }
    Ok("four nonzero families equal, all other components zero".into())
}

fn scalar_5_2() -> Outcome {
    let s = example_5_2().map_err(err)?;
    let r = Curvature::compute(s.model()).map_err(err)?.scalar;
    zero("r + 18 z^4", &(&r + &p("18*z^4", s.model())))?;
    Ok(format!("r = {r}"))
}

fn scalar_5_1() -> Outcome {
    let s = example_5_1(UParam::Symbolic).map_err(err)?;
    let r = Curvature::compute(s.model()).map_err(err)?.scalar;
    zero("r + 2(2u + 1)", &(&r + &p("2*(2*u + 1)", s.model())))?;
    let at: Assignment = [("u".to_string(), Rational::default())].into_iter().collect();
    let r0 = evaluate_exact(&r, &at).map_err(err)?;
    if r0 != Some(Rational::from_integer((-2).into())) {
        return Err(format!("r(u = 0) = {r0:?}"));
    }
    let s0 = example_5_1(UParam::Value(Rational::default())).map_err(err)?;
    let r0 = Curvature::compute(s0.model()).map_err(err)?.scalar;
    zero("r(u = 0) + 2", &(&r0 + &Expr::int(2)))?;
    Ok(format!("r = {r}, r(0) = {r0}"))
}

fn structure_5_1() -> Outcome {
    let s = example_5_1(UParam::Symbolic).map_err(err)?;
    let m = s.model();
    passed(&verify_axioms(&s))?;
    let h = h_operator(&s).map_err(err)?;
    if !h.is_zero() {
        return Err(format!("h = {:?}", h.nonzero()));
    }
    let phi = fundamental_two_form(&s).map_err(err)?;
    let d_eta = exterior_derivative(m, s.eta()).map_err(err)?;
    if phi != d_eta {
        return Err("Phi != d eta".into());
    }
    let class = classify(&s).map_err(err)?;
    let mut checked = 0;
    for id in [
        "nabla_xi",
        "ricci_xi_xi",
        "killing_nabla_xi",
        "curvature_x_xi_xi",
        "ricci_operator_xi",
        "nabla_phi",
        "curvature_x_y_xi",
        "curvature_x_xi_y",
    ] {
        passed(class.check(id).ok_or(format!("missing {id}"))?)?;
        checked += 1;
    }
    let curv = Curvature::compute(m).map_err(err)?;
    match fit_k_mu(&s, &curv.riemann, &h).map_err(err)? {
        KMuFit::Fit { k, mu: None } if k == Expr::int(-1) => {}
        other => return Err(format!("(k, mu) fit {other:?}")),
    }
    if !class.para_sasakian {
        return Err("not para-Sasakian".into());
    }
    Ok(format!(
        "axioms, h = 0, Phi = d eta, {checked} structure identities, k = -1, mu indeterminate"
    ))
}

fn soliton_5_1() -> Outcome {
    let mut s = example_5_1(UParam::Symbolic).map_err(err)?;
    s.declare("delta", SymbolKind::Constant).map_err(err)?;
    let m = s.model();
    let curv = Curvature::compute(m).map_err(err)?;
    let xi = Potential::Field(s.xi().clone());
    let lambda = solve_lambda(m, &curv, &xi, &Expr::symbol("delta")).map_err(err)?;
    zero("lambda - r", &(&lambda - &curv.scalar))?;
    let s0 = example_5_1(UParam::Value(Rational::default())).map_err(err)?;
    let curv0 = Curvature::compute(s0.model()).map_err(err)?;
    let xi0 = Potential::Field(s0.xi().clone());
    let lambda0 = solve_lambda(s0.model(), &curv0, &xi0, &Expr::int(-2)).map_err(err)?;
    if lambda0 != Expr::int(-2) {
        return Err(format!("lambda(u = 0) = {lambda0}"));
    }
    let data = SolitonData::new(xi0, lambda0.clone(), lambda0.clone()).map_err(err)?;
    passed(&soliton_residual(s0.model(), &curv0, &data).map_err(err)?)?;
    let kind = classify_soliton(&lambda0);
    if kind != SolitonKind::Shrinking {
        return Err(format!("classified {kind}"));
    }
    Ok(format!("lambda = r = {lambda}; at u = 0 lambda = -2, {kind}"))
}

fn relations_5_2() -> Outcome {
    let mut s = example_5_2().map_err(err)?;
    for f in ["f1", "f2", "f3"] {
        s.declare(
            f,
            SymbolKind::Function {
                depends_on: vec![0, 1, 2],
            },
        )
        .map_err(err)?;
    }
    s.declare("lambda", SymbolKind::Constant).map_err(err)?;
    s.declare("delta", SymbolKind::Constant).map_err(err)?;
    let m = s.model();
    let curv = Curvature::compute(m).map_err(err)?;
    let z = TensorField::vector(vec![p("f1 + f2", m), p("f2 + f3", m), p("f3 + f1", m)]);
    let data = SolitonData::new(Potential::Field(z), Expr::symbol("lambda"), Expr::symbol("delta")).map_err(err)?;
    let report = soliton_residual(m, &curv, &data).map_err(err)?;
    let ResidualValue::Tensor(t) = &report.residuals[0].value else {
        return Err("scalar residual".into());
    };
    // Diagonal entries carry a factor g_ii, off-diagonal ones delta/2.
    let relations = [
        (
            (0, 0),
            "delta*(diff(f1,x) + diff(f2,x) + 3*z^2*(f1 + f3)) + 18*z^4 + lambda",
        ),
        (
            (1, 1),
            "delta*(diff(f2,y) + diff(f3,y) - 3*z^2*(f1 + f3)) + 18*z^4 + lambda",
        ),
        ((2, 2), "delta*(diff(f1,z) + diff(f3,z)) + 18*z^4 + lambda"),
        (
            (0, 1),
            "(diff(f2,x) + diff(f3,x))*exp(-2*z^3) + (diff(f1,y) + diff(f2,y))*exp(2*z^3)",
        ),
        (
            (1, 2),
            "diff(f1,y) + diff(f3,y) + (diff(f2,z) + diff(f3,z))*exp(-2*z^3)",
        ),
        ((0, 2), "(diff(f1,z) + diff(f2,z))*exp(2*z^3) + diff(f1,x) + diff(f3,x)"),
    ];
    for ((i, j), text) in relations {
        let scale = if i == j {
            m.g(i, i).recip().map_err(err)?
        } else {
            p("2/delta", m)
        };
        let lhs = t.get(&[i, j]) * &scale;
        zero(&format!("relation ({i},{j})"), &(&lhs - &p(text, m)))?;
        if t.get(&[i, j]) != t.get(&[j, i]) {
            return Err(format!("residual not symmetric at ({i},{j})"));
        }
    }
    Ok("six relations match in normal form".into())
}

fn flat_delta() -> (paracontact::structures::ParacontactStructure, Curvature, Expr) {
    let mut s = flat_para_cosymplectic().unwrap();
    s.declare("delta", SymbolKind::Constant).unwrap();
    let c = Curvature::compute(s.model()).unwrap();
    (s, c, Expr::symbol("delta"))
}

fn flat_euler() -> Outcome {
    let (s, curv, delta) = flat_delta();
    let m = s.model();
    let z = TensorField::vector(vec![p("x", m), p("y", m), p("z", m)]);
    let rho = conformal_coefficient(m, &z).map_err(err)?;
    if rho != Expr::one() {
        return Err(format!("rho = {rho}"));
    }
    let lambda = -&delta;
    zero(
        "r - lambda - rho delta",
        &(&(&curv.scalar - &lambda) - &(&rho * &delta)),
    )?;
    let data = SolitonData::new(Potential::Field(z), lambda, delta).map_err(err)?;
    passed(&soliton_residual(m, &curv, &data).map_err(err)?)?;
    for id in ["T9", "L1a", "L1b"] {
        passed(&identity_check(m, Some(&s), &curv, &data, id, &IdentityOptions::default()).map_err(err)?)?;
    }
    Ok("rho = 1, r - lambda - rho delta = 0, T9 L1a L1b pass".into())
}

fn flat_gradient() -> Outcome {
    let (s, curv, delta) = flat_delta();
    let m = s.model();
    let u = p("(x^2 - y^2 + z^2)/2", m);
    let lambda = -&delta;
    passed(&gradient_soliton_residual(m, &curv, &u, &lambda, &delta).map_err(err)?)?;
    let data = SolitonData::new(Potential::Gradient(u), lambda, delta).map_err(err)?;
    let mut line = Vec::new();
    for id in ["GL1", "GL2", "T6"] {
        let r = identity_check(m, Some(&s), &curv, &data, id, &IdentityOptions::default()).map_err(err)?;
        match r.status {
            Status::Pass => line.push(format!("{id} pass")),
            Status::HypothesisNotSatisfied => line.push(format!("{id} vacuous ({})", r.notes.join("; "))),
            Status::Fail => return Err(format!("{id} fails: {:?}", r.first_witness())),
        }
    }
    Ok(format!("gradient soliton pass, {}", line.join(", ")))
}

fn property_suites() -> Outcome {
    support::curvature_symmetries_on_builtins()?;
    support::trace_identity_on_passing_solitons()?;
    support::exterior_derivative_squares_to_zero()?;
    let mut runner = TestRunner::new(support::config(1000));
    let mut cases = 0;
    for _ in 0..1000 {
        let text = support::expr_text().new_tree(&mut runner).map_err(err)?.current();
        support::check_idempotent(&text)?;
        cases += 1;
    }
    let worst = support::derivative_agreement(100)?;
    Ok(format!(
        "symmetries, trace, d^2 = 0, {cases} idempotence cases, 100 derivative cases (worst {worst:.1e})"
    ))
}

fn discrepancy_warnings() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_paracontact"))
        .args(["--format", "json", "reproduce-paper"])
        .output()
        .map_err(err)?;
    if out.status.code() != Some(0) {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    let doc: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    let warnings: Vec<&str> = doc["warnings"]
        .as_array()
        .ok_or("no warnings")?
        .iter()
        .filter_map(Value::as_str)
        .collect();
    let table: Vec<&&str> = warnings
        .iter()
        .filter(|w| w.contains("published connection table"))
        .collect();
    let axioms: Vec<&&str> = warnings
        .iter()
        .filter(|w| w.contains("example_5_2 violates the axiom"))
        .collect();
    if table.is_empty() || axioms.is_empty() {
        return Err(format!("missing warnings in {warnings:?}"));
    }
    for w in table {
        let diff = w.rsplit("difference ").next().unwrap_or("");
        if diff
            .trim_matches(|c| c == '(' || c == ')')
            .split(", ")
            .all(|c| c == "0")
        {
            return Err(format!("zero witness in {w}"));
        }
    }
    for w in &axioms {
        let witness = w.rsplit(" is ").next().unwrap_or("0");
        if witness == "0" {
            return Err(format!("zero witness in {w}"));
        }
    }
    let failures = doc["checks"]
        .as_array()
        .ok_or("no checks")?
        .iter()
        .filter(|c| c["status"] == "fail")
        .count();
    if failures > 0 {
        return Err(format!("{failures} failing checks"));
    }
    Ok(format!(
        "{} warnings with nonzero witnesses, no failures",
        warnings.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("example_5_2 Christoffel symbols", christoffel_5_2),
        ("example_5_2 scalar curvature", scalar_5_2),
        ("example_5_1 scalar curvature", scalar_5_1),
        ("example_5_1 structure battery", structure_5_1),
        ("example_5_1 soliton with Z = xi", soliton_5_1),
        ("example_5_2 soliton relations", relations_5_2),
        ("flat Euler field, conformal soliton", flat_euler),
        ("flat gradient soliton suite", flat_gradient),
        ("property suites", property_suites),
        ("discrepancy warnings from reproduce-paper", discrepancy_warnings),
    ];
    // Written to the handle directly so the lines survive output capture.
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let line = match run() {
            Ok(detail) => format!("criterion {:>2} PASS {name}: {detail}", n + 1),
            Err(why) => {
                failed.push(n + 1);
                format!("criterion {:>2} FAIL {name}: {why}", n + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
