//! Almost paracontact metric structures `(φ, ξ, η, g)`: axioms, derived
//! tensors, structure classes and the built-in example manifolds.

mod builtin;
mod classify;

use thiserror::Error;

use crate::geometry::{
    covariant_derivative, exterior_derivative, lie_bracket, lie_derivative, GeometryError, ManifoldModel, TensorField,
};
use crate::report::{CheckReport, Residual};
use crate::symbolic::{Expr, SymbolKind};

pub use builtin::{
    builtin, connection_discrepancies, example_5_1, example_5_2, flat_para_cosymplectic,
    published_example_5_1_connection, ConnectionDiscrepancy, UParam, BUILTIN_NAMES,
};
pub use classify::{
    classify, classify_with, fit_k_mu, structure_identity, KMuFit, StructureClassReport, STRUCTURE_IDENTITIES,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("structure violates its axioms: {0}")]
    AxiomViolation(String),
    #[error("operation needs a structure satisfying the axioms; failed: {0}")]
    AxiomsFailed(String),
    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),
    #[error("bad built-in parameter: {0}")]
    BadParameter(String),
}

impl From<crate::symbolic::SymbolicError> for StructureError {
    fn from(e: crate::symbolic::SymbolicError) -> Self {
        StructureError::Geometry(e.into())
    }
}

const STRICT_AXIOMS: [&str; 3] = ["eta(xi) - 1", "phi xi", "eta o phi"];

/// The tensors `(φ, ξ, η)` on a model whose metric plays the role of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParacontactStructure {
    model: ManifoldModel,
    phi: TensorField,
    xi: TensorField,
    eta: TensorField,
    diagnostic: bool,
    violations: Vec<String>,
}

impl ParacontactStructure {
    /// Strict construction: `η(ξ) = 1`, `φξ = 0` and `η∘φ = 0` must hold.
    /// The remaining axioms are reported by [`verify_axioms`].
    pub fn new(
        model: ManifoldModel,
        phi: TensorField,
        xi: TensorField,
        eta: TensorField,
    ) -> Result<Self, StructureError> {
        let s = Self::build(model, phi, xi, eta, false)?;
        if let Some(v) = s.violations.iter().find(|v| STRICT_AXIOMS.contains(&v.as_str())) {
            return Err(StructureError::AxiomViolation(v.clone()));
        }
        Ok(s)
    }

    /// Diagnostic construction records violated axioms instead of failing.
    pub fn diagnostic(
        model: ManifoldModel,
        phi: TensorField,
        xi: TensorField,
        eta: TensorField,
    ) -> Result<Self, StructureError> {
        Self::build(model, phi, xi, eta, true)
    }

    fn build(
        model: ManifoldModel,
        phi: TensorField,
        xi: TensorField,
        eta: TensorField,
        diagnostic: bool,
    ) -> Result<Self, StructureError> {
        model.check_tensor(&phi)?;
        model.check_tensor(&xi)?;
        model.check_tensor(&eta)?;
        for (t, v, name) in [(&phi, (1, 1), "phi"), (&xi, (1, 0), "xi"), (&eta, (0, 1), "eta")] {
            if t.valence() != v {
                return Err(GeometryError::Shape(format!("{name} must have valence {v:?}")).into());
            }
        }
        let mut s = ParacontactStructure {
            model,
            phi,
            xi,
            eta,
            diagnostic,
            violations: Vec::new(),
        };
        s.violations = verify_axioms(&s)
            .residuals
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| r.label.clone())
            .collect();
        Ok(s)
    }

    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    pub fn phi(&self) -> &TensorField {
        &self.phi
    }

    pub fn xi(&self) -> &TensorField {
        &self.xi
    }

    pub fn eta(&self) -> &TensorField {
        &self.eta
    }

    pub fn is_diagnostic(&self) -> bool {
        self.diagnostic
    }

    /// Labels of the axiom residuals that did not vanish.
    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    pub fn axioms_hold(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<(), StructureError> {
        self.model.declare(name, kind)?;
        Ok(())
    }

    fn require_axioms(&self) -> Result<(), StructureError> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(StructureError::AxiomsFailed(v.clone())),
        }
    }
}

/// Residuals of the almost paracontact metric axioms:
/// `φ² − (I − η⊗ξ)`, `η(ξ) − 1`, `φξ`, `η∘φ` and
/// `g(φX,φY) + g(X,Y) − η(X)η(Y)`.
pub fn verify_axioms(s: &ParacontactStructure) -> CheckReport {
    let n = s.model.dim();
    let phi = &s.phi;
    let phi2 = phi.compose(phi).expect("(1,1)");
    let eta_xi = s.xi.tensor(&s.eta).expect("same dim");
    let square = phi2
        .sub(&TensorField::identity(n).sub(&eta_xi).expect("same shape"))
        .expect("same shape");
    let normalization = &s.eta.pair(&s.xi).expect("pair") - &Expr::one();
    let phi_xi = phi.apply(&s.xi).expect("apply");
    let eta_phi = TensorField::covector(
        (0..n)
            .map(|j| Expr::sum(&(0..n).map(|i| s.eta.at(i) * phi.get(&[i, j])).collect::<Vec<_>>()))
            .collect(),
    );
    let g = s.model.metric();
    let compat = TensorField::from_fn(n, 0, 2, |ix| {
        let (a, b) = (ix[0], ix[1]);
        let mut terms = vec![g.get(&[a, b]).clone(), -(s.eta.at(a) * s.eta.at(b))];
        for i in 0..n {
            for j in 0..n {
                let p = phi.get(&[i, a]) * phi.get(&[j, b]);
                if !p.is_zero() {
                    terms.push(&p * g.get(&[i, j]));
                }
            }
        }
        Ok::<_, GeometryError>(Expr::sum(&terms))
    })
    .expect("infallible");
    CheckReport::from_residuals(
        "axioms",
        vec![
            Residual::tensor("phi^2 - (I - eta(x)xi)", square),
            Residual::scalar("eta(xi) - 1", normalization),
            Residual::tensor("phi xi", phi_xi),
            Residual::tensor("eta o phi", eta_phi),
            Residual::tensor("g(phi X, phi Y) + g(X, Y) - eta(X) eta(Y)", compat),
        ],
    )
}

/// `Φ(X,Y) = g(X, φY)`.
pub fn fundamental_two_form(s: &ParacontactStructure) -> Result<TensorField, StructureError> {
    s.require_axioms()?;
    Ok(fundamental_two_form_unchecked(s))
}

pub(crate) fn fundamental_two_form_unchecked(s: &ParacontactStructure) -> TensorField {
    let n = s.model.dim();
    TensorField::from_fn(n, 0, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        Ok::<_, GeometryError>(Expr::sum(
            &(0..n).map(|k| s.model.g(i, k) * s.phi.get(&[k, j])).collect::<Vec<_>>(),
        ))
    })
    .expect("infallible")
}

/// `h = ½ 𝔏_ξ φ`.
pub fn h_operator(s: &ParacontactStructure) -> Result<TensorField, StructureError> {
    s.require_axioms()?;
    h_operator_unchecked(s)
}

pub(crate) fn h_operator_unchecked(s: &ParacontactStructure) -> Result<TensorField, StructureError> {
    Ok(lie_derivative(&s.model, &s.xi, &s.phi)?.scale(&Expr::ratio(1, 2)))
}

/// Nijenhuis torsion `[φ,φ](X,Y) = [φX,φY] + φ²[X,Y] − φ[X,φY] − φ[φX,Y]`,
/// indexed `[k, i, j]` for `X = e_i`, `Y = e_j`.
pub fn nijenhuis(s: &ParacontactStructure) -> Result<TensorField, StructureError> {
    let m = &s.model;
    let n = m.dim();
    let phi = &s.phi;
    let phi2 = phi.compose(phi)?;
    let basis: Vec<TensorField> = (0..n).map(|i| TensorField::basis_vector(n, i)).collect();
    let phi_e: Vec<TensorField> = basis.iter().map(|e| phi.apply(e)).collect::<Result<_, _>>()?;
    let mut out = TensorField::zeros(n, 1, 2);
    for i in 0..n {
        for j in 0..n {
            let a = lie_bracket(m, &phi_e[i], &phi_e[j])?;
            let b = phi2.apply(&lie_bracket(m, &basis[i], &basis[j])?)?;
            let c = phi.apply(&lie_bracket(m, &basis[i], &phi_e[j])?)?;
            let d = phi.apply(&lie_bracket(m, &phi_e[i], &basis[j])?)?;
            let v = a.add(&b)?.sub(&c)?.sub(&d)?;
            for k in 0..n {
                out.set(&[k, i, j], v.at(k).clone());
            }
        }
    }
    Ok(out)
}

/// Normality residual `[φ,φ] − 2 dη⊗ξ`, indexed `[k, i, j]`.
pub fn normality_residual(s: &ParacontactStructure) -> Result<TensorField, StructureError> {
    let n_phi = nijenhuis(s)?;
    let d_eta = exterior_derivative(&s.model, &s.eta)?;
    let n = s.model.dim();
    Ok(TensorField::from_fn(n, 1, 2, |ix| {
        let (k, i, j) = (ix[0], ix[1], ix[2]);
        Ok::<_, GeometryError>(n_phi.get(ix) - &(d_eta.get(&[i, j]) * s.xi.at(k)).times(2, 1))
    })?)
}

/// Residual `∇_X ξ + φX − φhX`, indexed `[k, i]` for `X = e_i`.
pub fn nabla_xi_residual(
    s: &ParacontactStructure,
    conn: &crate::geometry::ConnectionData,
) -> Result<TensorField, StructureError> {
    let nabla_xi = covariant_derivative(&s.model, conn, &s.xi)?;
    let h = h_operator_unchecked(s)?;
    let phi_h = s.phi.compose(&h)?;
    Ok(nabla_xi.add(&s.phi)?.sub(&phi_h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::DerivationSpec;

    fn flat_model() -> ManifoldModel {
        let spec = DerivationSpec::chart(&["x", "y", "z"]);
        let g = vec![
            vec![Expr::one(), Expr::zero(), Expr::zero()],
            vec![Expr::zero(), Expr::int(-1), Expr::zero()],
            vec![Expr::zero(), Expr::zero(), Expr::one()],
        ];
        ManifoldModel::chart("flat", spec, g).unwrap()
    }

    #[test]
    fn zero_phi_fails_first_axiom() {
        let m = flat_model();
        let xi = TensorField::basis_vector(3, 2);
        let eta = m.flat(&xi).unwrap();
        let s = ParacontactStructure::new(m, TensorField::zeros(3, 1, 1), xi, eta).unwrap();
        let rep = verify_axioms(&s);
        assert!(!rep.passed());
        assert!(!rep.residual("phi^2 - (I - eta(x)xi)").unwrap().is_zero());
        assert!(rep.residual("eta(xi) - 1").unwrap().is_zero());
        assert!(fundamental_two_form(&s).is_err());
    }

    #[test]
    fn strict_construction_rejects_bad_normalization() {
        let m = flat_model();
        let xi = TensorField::basis_vector(3, 2).scale(&Expr::int(2));
        let eta = TensorField::basis_covector(3, 2);
        assert!(matches!(
            ParacontactStructure::new(m.clone(), TensorField::zeros(3, 1, 1), xi.clone(), eta.clone()),
            Err(StructureError::AxiomViolation(_))
        ));
        let d = ParacontactStructure::diagnostic(m, TensorField::zeros(3, 1, 1), xi, eta).unwrap();
        assert!(d.violations().iter().any(|v| v == "eta(xi) - 1"));
    }
}
