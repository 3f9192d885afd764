use crate::geometry::{
    covariant_derivative, curvature_apply, exterior_derivative, Curvature, GeometryError, TensorField,
};
use crate::report::{CheckReport, Residual, Status};
use crate::symbolic::Expr;

use super::{
    fundamental_two_form_unchecked, h_operator_unchecked, nabla_xi_residual, normality_residual, verify_axioms,
    ParacontactStructure, StructureError,
};

/// Result of matching `R(X,Y)ξ = k(η(Y)X − η(X)Y) + μ(η(Y)hX − η(X)hY)`.
#[derive(Clone, Debug, PartialEq)]
pub enum KMuFit {
    /// Constant `k` and `μ`; `μ` is `None` when `h = 0` leaves it free.
    Fit {
        k: Expr,
        mu: Option<Expr>,
    },
    NotKMu {
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub struct StructureClassReport {
    pub almost_paracontact_metric: bool,
    pub paracontact_metric: bool,
    pub k_paracontact: bool,
    pub normal: bool,
    pub para_sasakian: bool,
    pub para_cosymplectic: bool,
    /// True when the structure was loaded without satisfying its axioms.
    pub diagnostic: bool,
    /// Defining conditions: axioms, `Φ = dη`, `h = 0`, normality, `dη = 0`,
    /// `dΦ = 0`.
    pub checks: Vec<CheckReport>,
    /// Class-specific identities; vacuous where the class does not apply.
    pub identities: Vec<CheckReport>,
    pub k_mu: Option<KMuFit>,
    /// Implications between flags that failed to hold.
    pub inconsistencies: Vec<String>,
}

impl StructureClassReport {
    pub fn check(&self, id: &str) -> Option<&CheckReport> {
        self.checks.iter().chain(&self.identities).find(|c| c.id == id)
    }
}

/// Identities checked by [`structure_identity`], in report order.
pub const STRUCTURE_IDENTITIES: [&str; 15] = [
    "nabla_xi",
    "ricci_xi_xi",
    "killing_nabla_xi",
    "curvature_x_xi_xi",
    "ricci_operator_xi",
    "nabla_phi",
    "curvature_x_y_xi",
    "curvature_x_xi_y",
    "cosymplectic_curvature_xi",
    "cosymplectic_nabla_phi",
    "cosymplectic_nabla_xi",
    "cosymplectic_ricci_xi",
    "cosymplectic_ricci_operator_xi",
    "parallel_eta",
    "parallel_fundamental_form",
];

struct Flags {
    paracontact_metric: bool,
    k_paracontact: bool,
    para_sasakian: bool,
    para_cosymplectic: bool,
}

pub fn classify(s: &ParacontactStructure) -> Result<StructureClassReport, StructureError> {
    let curv = Curvature::compute(s.model())?;
    classify_with(s, &curv)
}

pub fn classify_with(s: &ParacontactStructure, curv: &Curvature) -> Result<StructureClassReport, StructureError> {
    let model = s.model();
    let axioms = verify_axioms(s);
    let almost = axioms.passed();

    let phi_form = fundamental_two_form_unchecked(s);
    let d_eta = exterior_derivative(model, s.eta())?;
    let d_phi = exterior_derivative(model, &phi_form)?;
    let contact = CheckReport::from_residuals(
        "contact_form",
        vec![Residual::tensor("Phi - d eta", phi_form.sub(&d_eta)?)],
    );
    let h = h_operator_unchecked(s)?;
    let killing = CheckReport::from_residuals("h_zero", vec![Residual::tensor("h", h.clone())]);
    let normality = CheckReport::from_residuals(
        "normality",
        vec![Residual::tensor("[phi,phi] - 2 d eta (x) xi", normality_residual(s)?)],
    );
    let closed_eta = CheckReport::from_residuals("closed_eta", vec![Residual::tensor("d eta", d_eta.clone())]);
    let closed_phi = CheckReport::from_residuals("closed_fundamental_form", vec![Residual::tensor("d Phi", d_phi)]);

    let paracontact_metric = almost && contact.passed();
    let normal = almost && normality.passed();
    let flags = Flags {
        paracontact_metric,
        k_paracontact: paracontact_metric && killing.passed(),
        para_sasakian: paracontact_metric && normal,
        para_cosymplectic: almost && closed_eta.passed() && closed_phi.passed() && normal,
    };

    let mut identities = Vec::new();
    for id in STRUCTURE_IDENTITIES {
        identities.push(identity_with_flags(s, curv, &h, &flags, id)?);
    }

    let mut inconsistencies = Vec::new();
    if flags.para_sasakian && !flags.k_paracontact {
        inconsistencies.push("para-Sasakian structure is not K-paracontact".to_string());
    }
    for id in ["nabla_phi", "parallel_eta", "parallel_fundamental_form"] {
        let rep = identities.iter().find(|r| r.id == id).expect("listed");
        if rep.status == Status::Fail {
            inconsistencies.push(format!("class flag set but `{id}` residual is nonzero"));
        }
    }

    let k_mu = if paracontact_metric {
        Some(fit_k_mu(s, &curv.riemann, &h)?)
    } else {
        None
    };

    let mut checks = vec![axioms, contact, killing, normality, closed_eta, closed_phi];
    if !almost {
        for c in checks.iter_mut().skip(1) {
            c.notes
                .push("computed on a structure violating its axioms; informational only".into());
        }
    }

    Ok(StructureClassReport {
        almost_paracontact_metric: almost,
        paracontact_metric,
        k_paracontact: flags.k_paracontact,
        normal,
        para_sasakian: flags.para_sasakian,
        para_cosymplectic: flags.para_cosymplectic,
        diagnostic: !almost,
        checks,
        identities,
        k_mu,
        inconsistencies,
    })
}

/// One class-specific identity; vacuous when the structure is outside the
/// class the identity belongs to.
pub fn structure_identity(s: &ParacontactStructure, curv: &Curvature, id: &str) -> Result<CheckReport, StructureError> {
    let report = classify_with(s, curv)?;
    report
        .identities
        .into_iter()
        .find(|r| r.id == id)
        .ok_or_else(|| StructureError::BadParameter(format!("unknown structure identity `{id}`")))
}

fn identity_with_flags(
    s: &ParacontactStructure,
    curv: &Curvature,
    h: &TensorField,
    flags: &Flags,
    id: &str,
) -> Result<CheckReport, StructureError> {
    let model = s.model();
    let n = model.dim();
    let xi = s.xi();
    let eta = s.eta();
    let conn = &curv.connection;
    let dim_minus_one = Expr::int(n as i64 - 1);
    let (hypothesis, class) = match id {
        "nabla_xi" | "ricci_xi_xi" => (flags.paracontact_metric, "paracontact metric"),
        "killing_nabla_xi" | "curvature_x_xi_xi" | "ricci_operator_xi" => (flags.k_paracontact, "K-paracontact"),
        "nabla_phi" | "curvature_x_y_xi" | "curvature_x_xi_y" => (flags.para_sasakian, "para-Sasakian"),
        _ => (flags.para_cosymplectic, "para-cosymplectic"),
    };
    if !hypothesis {
        return Ok(CheckReport::vacuous(id, format!("structure is not {class}")));
    }
    let basis = |i: usize| TensorField::basis_vector(n, i);
    let kron = |a: usize, b: usize| if a == b { Expr::one() } else { Expr::zero() };
    let residual = match id {
        "nabla_xi" => Residual::tensor("nabla_X xi + phi X - phi h X", nabla_xi_residual(s, conn)?),
        "ricci_xi_xi" => {
            let h2 = h.compose(h)?;
            let tr = Expr::sum(&(0..n).map(|i| h2.get(&[i, i]).clone()).collect::<Vec<_>>());
            let sxx = curv.ricci.bilinear(xi, xi)?;
            Residual::scalar("S(xi,xi) - tr(h^2) + (dim-1)", &(&sxx - &tr) + &dim_minus_one)
        }
        "killing_nabla_xi" => {
            let r = covariant_derivative(model, conn, xi)?.add(s.phi())?;
            Residual::tensor("nabla_X xi + phi X", r)
        }
        "curvature_x_xi_xi" => {
            let r = TensorField::from_fn(n, 1, 1, |ix| {
                let (k, i) = (ix[0], ix[1]);
                let v = curvature_apply(&curv.riemann, &basis(i), xi, xi)?;
                Ok::<_, GeometryError>(&(v.at(k) + &kron(k, i)) - &(eta.at(i) * xi.at(k)))
            })?;
            Residual::tensor("R(X,xi)xi + X - eta(X)xi", r)
        }
        "ricci_operator_xi" => {
            let q = curv.ricci_operator.apply(xi)?;
            Residual::tensor("Q xi + (dim-1) xi", q.add(&xi.scale(&dim_minus_one))?)
        }
        "nabla_phi" => {
            let np = covariant_derivative(model, conn, s.phi())?;
            let r = TensorField::from_fn(n, 1, 2, |ix| {
                let (k, i, j) = (ix[0], ix[1], ix[2]);
                Ok::<_, GeometryError>(Expr::sum(&[
                    np.get(ix).clone(),
                    model.g(i, j) * xi.at(k),
                    -(eta.at(j) * &kron(k, i)),
                ]))
            })?;
            Residual::tensor("(nabla_X phi)Y + g(X,Y)xi - eta(Y)X", r)
        }
        "curvature_x_y_xi" => {
            let r = TensorField::from_fn(n, 1, 2, |ix| {
                let (k, i, j) = (ix[0], ix[1], ix[2]);
                let v = curvature_apply(&curv.riemann, &basis(i), &basis(j), xi)?;
                Ok::<_, GeometryError>(Expr::sum(&[
                    v.at(k).clone(),
                    -(eta.at(i) * &kron(k, j)),
                    eta.at(j) * &kron(k, i),
                ]))
            })?;
            Residual::tensor("R(X,Y)xi - eta(X)Y + eta(Y)X", r)
        }
        "curvature_x_xi_y" => {
            let r = TensorField::from_fn(n, 1, 2, |ix| {
                let (k, i, j) = (ix[0], ix[1], ix[2]);
                let v = curvature_apply(&curv.riemann, &basis(i), xi, &basis(j))?;
                Ok::<_, GeometryError>(Expr::sum(&[
                    v.at(k).clone(),
                    -(model.g(i, j) * xi.at(k)),
                    eta.at(j) * &kron(k, i),
                ]))
            })?;
            Residual::tensor("R(X,xi)Y - g(X,Y)xi + eta(Y)X", r)
        }
        "cosymplectic_curvature_xi" => {
            let r = TensorField::from_fn(n, 1, 2, |ix| {
                let v = curvature_apply(&curv.riemann, &basis(ix[1]), &basis(ix[2]), xi)?;
                Ok::<_, GeometryError>(v.at(ix[0]).clone())
            })?;
            Residual::tensor("R(X,Y)xi", r)
        }
        "cosymplectic_nabla_phi" => Residual::tensor("nabla phi", covariant_derivative(model, conn, s.phi())?),
        "cosymplectic_nabla_xi" => Residual::tensor("nabla xi", covariant_derivative(model, conn, xi)?),
        "cosymplectic_ricci_xi" => {
            let r = TensorField::covector(
                (0..n)
                    .map(|i| curv.ricci.bilinear(&basis(i), xi))
                    .collect::<Result<_, _>>()?,
            );
            Residual::tensor("S(X,xi)", r)
        }
        "cosymplectic_ricci_operator_xi" => Residual::tensor("Q xi", curv.ricci_operator.apply(xi)?),
        "parallel_eta" => Residual::tensor("nabla eta", covariant_derivative(model, conn, eta)?),
        "parallel_fundamental_form" => {
            let phi_form = fundamental_two_form_unchecked(s);
            Residual::tensor("nabla Phi", covariant_derivative(model, conn, &phi_form)?)
        }
        other => {
            return Err(StructureError::BadParameter(format!(
                "unknown structure identity `{other}`"
            )))
        }
    };
    Ok(CheckReport::from_residuals(id, vec![residual]))
}

/// Fit constant `k`, `μ` in `R(X,Y)ξ = k(η(Y)X − η(X)Y) + μ(η(Y)hX − η(X)hY)`
/// by matching components.
pub fn fit_k_mu(s: &ParacontactStructure, riem: &TensorField, h: &TensorField) -> Result<KMuFit, StructureError> {
    let model = s.model();
    let n = model.dim();
    let eta = s.eta();
    let mut v = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let rxi = curvature_apply(
                riem,
                &TensorField::basis_vector(n, i),
                &TensorField::basis_vector(n, j),
                s.xi(),
            )?;
            for k in 0..n {
                let ki = if k == i { Expr::one() } else { Expr::zero() };
                let kj = if k == j { Expr::one() } else { Expr::zero() };
                v.push(rxi.at(k).clone());
                a.push(&(eta.at(j) * &ki) - &(eta.at(i) * &kj));
                b.push(&(eta.at(j) * h.get(&[k, i])) - &(eta.at(i) * h.get(&[k, j])));
            }
        }
    }
    let constant = |e: &Expr| model.spec().is_constant(e);
    let h_zero = h.is_zero();
    let (k, mu) = if h_zero {
        let Some(p) = a.iter().position(|x| !x.is_zero()) else {
            return Ok(KMuFit::NotKMu {
                reason: "no component determines k".into(),
            });
        };
        (v[p].checked_div(&a[p])?, None)
    } else {
        let mut solved = None;
        'outer: for p in 0..a.len() {
            for q in p + 1..a.len() {
                let det = &(&a[p] * &b[q]) - &(&a[q] * &b[p]);
                if !det.is_zero() {
                    let k = (&(&v[p] * &b[q]) - &(&v[q] * &b[p])).checked_div(&det)?;
                    let mu = (&(&a[p] * &v[q]) - &(&a[q] * &v[p])).checked_div(&det)?;
                    solved = Some((k, Some(mu)));
                    break 'outer;
                }
            }
        }
        match solved {
            Some(s) => s,
            None => {
                return Ok(KMuFit::NotKMu {
                    reason: "components do not separate k from mu".into(),
                })
            }
        }
    };
    let zero = Expr::zero();
    let mu_val = mu.as_ref().unwrap_or(&zero);
    for idx in 0..v.len() {
        let r = &(&v[idx] - &(&k * &a[idx])) - &(mu_val * &b[idx]);
        if !r.is_zero() {
            return Ok(KMuFit::NotKMu {
                reason: format!("component {idx} leaves residual {r}"),
            });
        }
    }
    if !constant(&k)? {
        return Ok(KMuFit::NotKMu {
            reason: format!("k = {k} is not constant"),
        });
    }
    if let Some(m) = &mu {
        if !constant(m)? {
            return Ok(KMuFit::NotKMu {
                reason: format!("mu = {m} is not constant"),
            });
        }
    }
    Ok(KMuFit::Fit { k, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lie_derivative;
    use crate::structures::{example_5_1, example_5_2, flat_para_cosymplectic, UParam};

    #[test]
    fn frame_example_is_para_sasakian_with_k_minus_one() {
        let s = example_5_1(UParam::Symbolic).unwrap();
        let rep = classify(&s).unwrap();
        assert!(rep.almost_paracontact_metric && rep.paracontact_metric && rep.k_paracontact);
        assert!(rep.normal && rep.para_sasakian && !rep.para_cosymplectic);
        assert_eq!(
            rep.k_mu,
            Some(KMuFit::Fit {
                k: Expr::int(-1),
                mu: None
            })
        );
        assert!(rep.inconsistencies.is_empty());
        assert_eq!(rep.check("closed_eta").unwrap().status, Status::Fail);
        for id in [
            "nabla_xi",
            "nabla_phi",
            "curvature_x_y_xi",
            "ricci_operator_xi",
            "ricci_xi_xi",
        ] {
            assert_eq!(rep.check(id).unwrap().status, Status::Pass, "{id}");
        }
        // K-paracontact cross-check through ξ being Killing
        assert!(lie_derivative(s.model(), s.xi(), s.model().metric()).unwrap().is_zero());
    }

    #[test]
    fn flat_model_is_para_cosymplectic() {
        let rep = classify(&flat_para_cosymplectic().unwrap()).unwrap();
        assert!(rep.para_cosymplectic && !rep.paracontact_metric);
        for id in STRUCTURE_IDENTITIES
            .iter()
            .filter(|id| id.starts_with("cosymplectic") || id.starts_with("parallel"))
        {
            assert_eq!(rep.check(id).unwrap().status, Status::Pass, "{id}");
        }
    }

    #[test]
    fn chart_example_is_diagnostic() {
        let rep = classify(&example_5_2().unwrap()).unwrap();
        assert!(rep.diagnostic && !rep.almost_paracontact_metric);
        assert_eq!(rep.check("axioms").unwrap().status, Status::Fail);
    }
}
