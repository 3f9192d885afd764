//! δ-almost (gradient) Yamabe solitons: residuals, parameter extraction,
//! classification and the identity suite.

mod identities;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::geometry::{
    divergence, gradient, hessian, lie_derivative, Curvature, GeometryError, ManifoldModel, TensorField,
};
use crate::report::{CheckReport, Residual};
use crate::structures::{ParacontactStructure, StructureError};
use crate::symbolic::{constant_sign, Expr};

pub use identities::{identity_check, identity_suite, IdentityOptions, JacobiHypothesis, IDENTITY_IDS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolitonError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("scaling function delta is identically zero")]
    ZeroDelta,
    #[error("not proportional to g: component {index:?} gives {found} instead of {expected}")]
    NotProportional {
        index: Vec<usize>,
        expected: String,
        found: String,
    },
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("prerequisite soliton check failed; residual witness {witness}")]
    PrerequisiteFailed { witness: String },
}

impl From<crate::symbolic::SymbolicError> for SolitonError {
    fn from(e: crate::symbolic::SymbolicError) -> Self {
        SolitonError::Geometry(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Field(TensorField),
    /// Gradient soliton with `Z = ∇u`.
    Gradient(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolitonData {
    pub potential: Potential,
    pub lambda: Expr,
    pub delta: Expr,
}

impl SolitonData {
    pub fn new(potential: Potential, lambda: Expr, delta: Expr) -> Result<Self, SolitonError> {
        if delta.is_zero() {
            return Err(SolitonError::ZeroDelta);
        }
        Ok(SolitonData {
            potential,
            lambda,
            delta,
        })
    }

    /// The potential vector field `Z`.
    pub fn field(&self, model: &ManifoldModel) -> Result<TensorField, SolitonError> {
        match &self.potential {
            Potential::Field(z) => {
                model.check_tensor(z)?;
                Ok(z.clone())
            }
            Potential::Gradient(u) => Ok(gradient(model, u)?),
        }
    }
}

/// `(r − λ)/δ`, the quantity most identities are phrased in.
pub fn soliton_ratio(r: &Expr, lambda: &Expr, delta: &Expr) -> Result<Expr, SolitonError> {
    Ok((r - lambda).checked_div(delta)?)
}

/// Residual of `(δ/2)𝔏_Z g − (r − λ)g`.
pub fn soliton_residual(
    model: &ManifoldModel,
    curv: &Curvature,
    data: &SolitonData,
) -> Result<CheckReport, SolitonError> {
    if data.delta.is_zero() {
        return Err(SolitonError::ZeroDelta);
    }
    let z = data.field(model)?;
    for e in [&data.lambda, &data.delta] {
        model.spec().check(e)?;
    }
    let r = &curv.scalar;
    let lzg = lie_derivative(model, &z, model.metric())?;
    let lhs = lzg.scale(&data.delta.times(1, 2));
    let rhs = model.metric().scale(&(r - &data.lambda));
    let mut report = CheckReport::from_residuals(
        "soliton",
        vec![Residual::tensor("(delta/2) L_Z g - (r - lambda) g", lhs.sub(&rhs)?)],
    )
    .with_derived("r", r.clone())
    .with_derived("lambda", data.lambda.clone())
    .with_derived("delta", data.delta.clone());
    if report.passed() && data.delta.is_one() && model.spec().is_constant(&data.lambda)? {
        report
            .notes
            .push("classical Yamabe soliton (delta = 1, constant lambda)".into());
    }
    if report.passed() && model.spec().is_constant(&data.lambda)? {
        report
            .notes
            .push(format!("delta-Yamabe soliton, {}", classify_soliton(&data.lambda)));
    }
    Ok(report)
}

/// Express `t = c·g` with `c` taken at the first nonzero metric component;
/// every other component must agree exactly.
pub fn proportionality(model: &ManifoldModel, t: &TensorField) -> Result<Expr, SolitonError> {
    let n = model.dim();
    let g = model.metric();
    let (pi, pj) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !g.get(&[i, j]).is_zero())
        .expect("nonsingular metric has a nonzero component");
    let c = t.get(&[pi, pj]).checked_div(g.get(&[pi, pj]))?;
    for idx in t.indices() {
        let expected = g.get(&idx) * &c;
        if &expected != t.get(&idx) {
            return Err(SolitonError::NotProportional {
                found: t.get(&idx).to_string(),
                expected: expected.to_string(),
                index: idx,
            });
        }
    }
    Ok(c)
}

/// `λ = r − c` where `(δ/2)𝔏_Z g = c·g`.
pub fn solve_lambda(
    model: &ManifoldModel,
    curv: &Curvature,
    potential: &Potential,
    delta: &Expr,
) -> Result<Expr, SolitonError> {
    if delta.is_zero() {
        return Err(SolitonError::ZeroDelta);
    }
    let data = SolitonData::new(potential.clone(), Expr::zero(), delta.clone())?;
    let z = data.field(model)?;
    let lzg = lie_derivative(model, &z, model.metric())?.scale(&delta.times(1, 2));
    let c = proportionality(model, &lzg)?;
    Ok(&curv.scalar - &c)
}

/// Residual of `δ·Hess u − (r − λ)g`; on success the curvature identities
/// for gradient solitons are checked as well.
pub fn gradient_soliton_residual(
    model: &ManifoldModel,
    curv: &Curvature,
    u: &Expr,
    lambda: &Expr,
    delta: &Expr,
) -> Result<CheckReport, SolitonError> {
    if delta.is_zero() {
        return Err(SolitonError::ZeroDelta);
    }
    for e in [u, lambda, delta] {
        model.spec().check(e)?;
    }
    let hess = hessian(model, &curv.connection, u)?;
    let res = hess.scale(delta).sub(&model.metric().scale(&(&curv.scalar - lambda)))?;
    let mut report = CheckReport::from_residuals(
        "gradient_soliton",
        vec![Residual::tensor("delta Hess u - (r - lambda) g", res)],
    )
    .with_derived("r", curv.scalar.clone());
    if report.passed() {
        let data = SolitonData::new(Potential::Gradient(u.clone()), lambda.clone(), delta.clone())?;
        let opts = IdentityOptions::default();
        for id in ["GL1", "GL2"] {
            let sub = identity_check(model, None, curv, &data, id, &opts)?;
            if !sub.passed() {
                report.status = sub.status;
                report.notes.push(format!("{id} failed on a passing gradient soliton"));
            }
            report.residuals.extend(sub.residuals.into_iter().map(|mut r| {
                r.label = format!("{id}: {}", r.label);
                r
            }));
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonKind {
    Expanding,
    Steady,
    Shrinking,
    Indefinite,
}

impl fmt::Display for SolitonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolitonKind::Expanding => "expanding",
            SolitonKind::Steady => "steady",
            SolitonKind::Shrinking => "shrinking",
            SolitonKind::Indefinite => "indefinite",
        })
    }
}

/// Positive λ expands, zero is steady, negative shrinks; anything whose
/// sign is not a constant is indefinite.
pub fn classify_soliton(lambda: &Expr) -> SolitonKind {
    match constant_sign(lambda) {
        Some(Ordering::Greater) => SolitonKind::Expanding,
        Some(Ordering::Equal) => SolitonKind::Steady,
        Some(Ordering::Less) => SolitonKind::Shrinking,
        None => SolitonKind::Indefinite,
    }
}

/// `ρ` with `𝔏_Z g = 2ρg`.
pub fn conformal_coefficient(model: &ManifoldModel, z: &TensorField) -> Result<Expr, SolitonError> {
    model.check_tensor(z)?;
    let lzg = lie_derivative(model, z, model.metric())?;
    Ok(proportionality(model, &lzg)?.times(1, 2))
}

/// `σ` with `𝔏_Z η = ση`, plus the residual `div Z − (m+1)σ` for
/// `dim = 2m+1` recorded in the report (not assumed).
pub fn contact_transformation_sigma(
    s: &ParacontactStructure,
    curv: &Curvature,
    z: &TensorField,
) -> Result<(Expr, CheckReport), SolitonError> {
    let model = s.model();
    model.check_tensor(z)?;
    if !s.axioms_hold() {
        return Err(StructureError::AxiomsFailed(s.violations()[0].clone()).into());
    }
    let lze = lie_derivative(model, z, s.eta())?;
    let eta = s.eta();
    let p = (0..model.dim()).find(|&i| !eta.at(i).is_zero()).expect("eta(xi) = 1");
    let sigma = lze.at(p).checked_div(eta.at(p))?;
    for i in 0..model.dim() {
        let expected = eta.at(i) * &sigma;
        if &expected != lze.at(i) {
            return Err(SolitonError::NotProportional {
                index: vec![i],
                expected: expected.to_string(),
                found: lze.at(i).to_string(),
            });
        }
    }
    let m = &Expr::ratio(model.dim() as i64 - 1, 2) + &Expr::one();
    let div = divergence(model, &curv.connection, z)?;
    let report = CheckReport::from_residuals(
        "contact_divergence",
        vec![Residual::scalar("div Z - (m+1) sigma", &div - &(&m * &sigma))],
    )
    .with_derived("sigma", sigma.clone())
    .with_derived("div Z", div);
    Ok((sigma, report))
}
