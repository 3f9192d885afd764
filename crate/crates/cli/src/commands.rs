//! Command implementations. Each builds a [`ReportDocument`]; load and
//! usage problems are returned as [`CliError`].

use paracontact::geometry::{bianchi_residual, symmetry_residuals, Curvature, TensorField};
use paracontact::report::{CheckReport, Residual};
use paracontact::soliton::{
    classify_soliton, conformal_coefficient, contact_transformation_sigma, gradient_soliton_residual, identity_check,
    identity_suite, soliton_ratio, soliton_residual, solve_lambda, IdentityOptions, JacobiHypothesis, Potential,
    SolitonData, SolitonError, IDENTITY_IDS,
};
use paracontact::structures::{classify_with, KMuFit};
use paracontact::Expr;
use thiserror::Error;

use crate::document::{index_label, ReportDocument};
use crate::manifest::{load, print_manifold, LoadError, Manifold};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Soliton overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct SolitonArgs {
    pub z: Option<String>,
    pub u: Option<String>,
    pub lambda: Option<String>,
    pub delta: Option<String>,
}

pub fn curvature(input: &str, echo: &str) -> Result<ReportDocument, CliError> {
    let m = load(input)?;
    let model = &m.model;
    let labels = model.labels();
    let curv = Curvature::compute(model).map_err(compute)?;
    let mut doc = ReportDocument::new(echo);
    let r = |e: &Expr| e.render(Some(labels));

    let mut gamma = Vec::new();
    for (idx, e) in curv.connection.as_tensor().nonzero() {
        gamma.push((
            format!("Gamma^{}_({},{})", labels[idx[0]], labels[idx[1]], labels[idx[2]]),
            r(&e),
        ));
    }
    doc.table("connection", gamma);
    // R(e_i, e_j) is antisymmetric in (i, j); list i < j only.
    let riemann = curv
        .riemann
        .nonzero()
        .into_iter()
        .filter(|(idx, _)| idx[1] < idx[2])
        .map(|(idx, e)| {
            (
                format!(
                    "R^{}_({},{},{})",
                    labels[idx[0]], labels[idx[1]], labels[idx[2]], labels[idx[3]]
                ),
                r(&e),
            )
        })
        .collect();
    doc.table("riemann, R(e_i,e_j)e_k = R^l_(i,j,k) e_l, i < j", riemann);
    let ricci = curv
        .ricci
        .nonzero()
        .into_iter()
        .filter(|(idx, _)| idx[0] <= idx[1])
        .map(|(idx, e)| (format!("Ric_({},{})", labels[idx[0]], labels[idx[1]]), r(&e)))
        .collect();
    doc.table("ricci, i <= j", ricci);
    doc.derive("r", &curv.scalar, labels);

    let torsion = curv.connection.torsion_residual(model);
    let metricity = curv.connection.metricity_residual(model).map_err(compute)?;
    doc.check(
        &CheckReport::from_residuals(
            "levi_civita",
            vec![
                Residual::tensor("torsion", torsion),
                Residual::tensor("nabla g", metricity),
            ],
        ),
        labels,
    );
    let (pair, block) = symmetry_residuals(model, &curv.riemann);
    doc.check(
        &CheckReport::from_residuals(
            "curvature_symmetries",
            vec![
                Residual::tensor("first Bianchi", bianchi_residual(&curv.riemann)),
                Residual::tensor("R_ijkm + R_jikm", pair),
                Residual::tensor("R_ijkm + R_ijmk", block),
                Residual::tensor(
                    "Ric - Ric^T",
                    curv.ricci.sub(&curv.ricci.transpose(0, 1)).map_err(compute)?,
                ),
            ],
        ),
        labels,
    );
    Ok(doc)
}

pub fn structure(input: &str, echo: &str) -> Result<ReportDocument, CliError> {
    let m = load(input)?;
    let s = m
        .structure
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{input}` defines no [structure]")))?;
    let labels = m.model.labels();
    let curv = Curvature::compute(&m.model).map_err(compute)?;
    let class = classify_with(s, &curv).map_err(compute)?;
    let mut doc = ReportDocument::new(echo);
    let yes = |b: bool| if b { "yes" } else { "no" }.to_string();
    doc.table(
        "class",
        vec![
            ("almost_paracontact_metric".into(), yes(class.almost_paracontact_metric)),
            ("paracontact_metric".into(), yes(class.paracontact_metric)),
            ("k_paracontact".into(), yes(class.k_paracontact)),
            ("normal".into(), yes(class.normal)),
            ("para_sasakian".into(), yes(class.para_sasakian)),
            ("para_cosymplectic".into(), yes(class.para_cosymplectic)),
            ("diagnostic".into(), yes(class.diagnostic)),
        ],
    );
    // Defining conditions other than the axioms decide class membership,
    // so they are listed rather than counted as pass/fail checks.
    let mut conditions = Vec::new();
    for c in class.checks.iter().skip(1) {
        let value = match c.first_witness() {
            None => "holds".to_string(),
            Some((label, idx, e)) => {
                let at = if idx.is_empty() {
                    String::new()
                } else {
                    format!(" at {}", index_label(&idx, labels))
                };
                format!("fails: {label}{at} = {}", e.render(Some(labels)))
            }
        };
        conditions.push((c.id.clone(), value));
    }
    doc.table("conditions", conditions);
    match &class.k_mu {
        Some(KMuFit::Fit { k, mu }) => {
            doc.derive("k", k, labels);
            match mu {
                Some(mu) => doc.derive("mu", mu, labels),
                None => doc.derive_text("mu", "indeterminate (h = 0)"),
            }
        }
        Some(KMuFit::NotKMu { reason }) => doc.derive_text("k_mu", format!("not (k, mu): {reason}")),
        None => {}
    }
    doc.check(&class.checks[0], labels);
    for v in s.violations() {
        let witness = class.checks[0]
            .residual(v)
            .and_then(|r| r.value.witnesses().into_iter().next())
            .map(|(idx, e)| format!("{} = {}", index_label(&idx, labels), e.render(Some(labels))))
            .unwrap_or_default();
        doc.warn(format!("axiom violated: {v}; witness {witness}"));
    }
    for id in &class.identities {
        doc.check(id, labels);
    }
    for inc in &class.inconsistencies {
        doc.fail("consistency", inc.clone());
    }
    Ok(doc)
}

/// The model plus soliton data assembled from the file and overrides.
fn soliton_input(
    input: &str,
    args: &SolitonArgs,
    need_lambda: bool,
    doc: &mut ReportDocument,
) -> Result<(Manifold, SolitonData), CliError> {
    let mut m = load(input)?;
    let mut declared = Vec::new();
    let mut parse = |m: &mut Manifold, what: &str, text: &str| -> Result<Expr, CliError> {
        let (e, added) = m
            .parse_declaring(text)
            .map_err(|e| CliError::Usage(format!("--{what}: {e}")))?;
        declared.extend(added);
        Ok(e)
    };
    let from_file = m.soliton.clone();
    let lambda = match (&args.lambda, &from_file) {
        (Some(t), _) => parse(&mut m, "lambda", t)?,
        (None, Some(s)) => s.lambda.clone(),
        (None, None) if need_lambda => {
            return Err(CliError::Usage(
                "no lambda: pass --lambda or add a [soliton] section".into(),
            ))
        }
        (None, None) => Expr::zero(),
    };
    let delta = match (&args.delta, &from_file) {
        (Some(t), _) => parse(&mut m, "delta", t)?,
        (None, Some(s)) => s.delta.clone(),
        (None, None) => Expr::one(),
    };
    let potential = match (&args.z, &args.u) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--Z and --u are mutually exclusive".into())),
        (None, Some(u)) => Potential::Gradient(parse(&mut m, "u", u)?),
        (Some(z), None) => m
            .resolve_potential(z)
            .map_err(|e| CliError::Usage(format!("--Z: {e}")))?,
        (None, None) => match &from_file {
            Some(s) => m.resolve_potential(&s.potential).map_err(CliError::Usage)?,
            None => {
                return Err(CliError::Usage(
                    "no potential: pass --Z or --u or add a [soliton] section".into(),
                ))
            }
        },
    };
    for name in declared {
        doc.warn(format!("`{name}` was not declared; treating it as a constant"));
    }
    let data = SolitonData::new(potential, lambda, delta).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((m, data))
}

fn soliton_extras(doc: &mut ReportDocument, m: &Manifold, curv: &Curvature, data: &SolitonData) {
    let labels = m.model.labels();
    let Ok(z) = data.field(&m.model) else { return };
    if let Ok(q) = soliton_ratio(&curv.scalar, &data.lambda, &data.delta) {
        doc.derive("(r - lambda)/delta", &q, labels);
    }
    if let Ok(rho) = conformal_coefficient(&m.model, &z) {
        doc.derive("rho", &rho, labels);
    }
    if let Some(s) = &m.structure {
        if let Ok((sigma, _)) = contact_transformation_sigma(s, curv, &z) {
            doc.derive("sigma", &sigma, labels);
        }
    }
}

pub fn soliton_verify(input: &str, args: &SolitonArgs, echo: &str) -> Result<ReportDocument, CliError> {
    let mut doc = ReportDocument::new(echo);
    let (m, data) = soliton_input(input, args, true, &mut doc)?;
    let labels = m.model.labels();
    let curv = Curvature::compute(&m.model).map_err(compute)?;
    let report = soliton_residual(&m.model, &curv, &data).map_err(compute)?;
    doc.derive("r", &curv.scalar, labels);
    doc.derive_text("classification", classify_soliton(&data.lambda).to_string());
    soliton_extras(&mut doc, &m, &curv, &data);
    doc.check(&report, labels);
    if let Potential::Gradient(u) = &data.potential {
        let g = gradient_soliton_residual(&m.model, &curv, u, &data.lambda, &data.delta).map_err(compute)?;
        doc.check(&g, labels);
    }
    Ok(doc)
}

pub fn soliton_solve_lambda(input: &str, args: &SolitonArgs, echo: &str) -> Result<ReportDocument, CliError> {
    let mut doc = ReportDocument::new(echo);
    if args.lambda.is_some() {
        return Err(CliError::Usage("solve-lambda computes lambda; drop --lambda".into()));
    }
    let (m, data) = soliton_input(input, args, false, &mut doc)?;
    let labels = m.model.labels();
    let curv = Curvature::compute(&m.model).map_err(compute)?;
    doc.derive("r", &curv.scalar, labels);
    match solve_lambda(&m.model, &curv, &data.potential, &data.delta) {
        Ok(lambda) => {
            doc.derive("lambda", &lambda, labels);
            doc.derive_text("classification", classify_soliton(&lambda).to_string());
            let solved = SolitonData { lambda, ..data };
            let report = soliton_residual(&m.model, &curv, &solved).map_err(compute)?;
            doc.check(&report, labels);
        }
        Err(SolitonError::NotProportional { index, expected, found }) => {
            doc.fail(
                "solve_lambda",
                format!(
                    "(delta/2) L_Z g is not a multiple of g: component {} is {found}, expected {expected}",
                    index_label(&index, labels)
                ),
            );
        }
        Err(e) => return Err(compute(e)),
    }
    Ok(doc)
}

pub fn identity(
    id: &str,
    input: &str,
    args: &SolitonArgs,
    jacobi: JacobiHypothesis,
    echo: &str,
) -> Result<ReportDocument, CliError> {
    if id != "all" && !IDENTITY_IDS.contains(&id) {
        return Err(CliError::Usage(format!(
            "unknown identity `{id}`; expected all or one of {}",
            IDENTITY_IDS.join(", ")
        )));
    }
    let mut doc = ReportDocument::new(echo);
    let (m, data) = soliton_input(input, args, true, &mut doc)?;
    let labels = m.model.labels();
    let curv = Curvature::compute(&m.model).map_err(compute)?;
    let opts = IdentityOptions { jacobi };
    let prerequisite = soliton_residual(&m.model, &curv, &data).map_err(compute)?;
    doc.derive("r", &curv.scalar, labels);
    soliton_extras(&mut doc, &m, &curv, &data);
    doc.check(&prerequisite, labels);
    if !prerequisite.passed() {
        doc.warn("soliton equation fails; identities were not evaluated");
        return Ok(doc);
    }
    let s = m.structure.as_ref();
    let reports = if id == "all" {
        identity_suite(&m.model, s, &curv, &data, &opts)
    } else {
        identity_check(&m.model, s, &curv, &data, id, &opts).map(|r| vec![r])
    }
    .map_err(compute)?;
    for r in &reports {
        doc.check(r, labels);
    }
    Ok(doc)
}

pub fn print(input: &str) -> Result<String, CliError> {
    Ok(print_manifold(&load(input)?))
}

/// Components of a vector for messages.
pub fn render_vector(v: &TensorField, labels: &[String]) -> String {
    let parts: Vec<String> = v.components().iter().map(|e| e.render(Some(labels))).collect();
    format!("({})", parts.join(", "))
}
