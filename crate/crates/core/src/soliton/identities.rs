use crate::geometry::{
    covariant_derivative_vector, curvature_apply, divergence, exterior_derivative, gradient, lie_derivative,
    lie_derivative_connection, Curvature, GeometryError, ManifoldModel, TensorField,
};
use crate::report::{CheckReport, Residual};
use crate::structures::{classify_with, KMuFit, ParacontactStructure, StructureClassReport};
use crate::symbolic::Expr;

use super::{
    conformal_coefficient, contact_transformation_sigma, soliton_ratio, soliton_residual, Potential, SolitonData,
    SolitonError,
};

pub const IDENTITY_IDS: [&str; 13] = [
    "L1a", "L1b", "L1c", "T2", "T3", "T4", "T5", "GL1", "GL2", "T6", "T7", "T8", "T9",
];

/// How the Jacobi-field premise of `T4` is treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JacobiHypothesis {
    /// Compute `∇_ξ∇_ξ Z − R(Z,ξ)ξ` and treat a nonzero value as an unmet premise.
    #[default]
    Check,
    /// Take the premise for granted.
    Assume,
}

#[derive(Clone, Debug, Default)]
pub struct IdentityOptions {
    pub jacobi: JacobiHypothesis,
}

struct Ctx<'a> {
    model: &'a ManifoldModel,
    s: Option<&'a ParacontactStructure>,
    curv: &'a Curvature,
    data: &'a SolitonData,
    z: TensorField,
    q: Expr,
    class: Option<StructureClassReport>,
    opts: &'a IdentityOptions,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.model.dim()
    }

    fn basis(&self, i: usize) -> TensorField {
        TensorField::basis_vector(self.n(), i)
    }

    fn d(&self, f: &Expr, i: usize) -> Result<Expr, SolitonError> {
        Ok(self.model.d(f, i)?)
    }

    fn along(&self, x: &TensorField, f: &Expr) -> Result<Expr, SolitonError> {
        Ok(self.model.apply_vector(x, f)?)
    }

    fn structure(&self) -> Option<(&ParacontactStructure, &StructureClassReport)> {
        Some((self.s?, self.class.as_ref()?))
    }

    fn u(&self) -> Option<&Expr> {
        match &self.data.potential {
            Potential::Gradient(u) => Some(u),
            Potential::Field(_) => None,
        }
    }

    /// `f` with `Z = fξ`, if `Z` is collinear with `ξ`.
    fn collinear_factor(&self, xi: &TensorField) -> Result<Option<Expr>, SolitonError> {
        let Some(p) = (0..self.n()).find(|&i| !xi.at(i).is_zero()) else {
            return Ok(None);
        };
        let f = self.z.at(p).checked_div(xi.at(p))?;
        Ok(if self.z.sub(&xi.scale(&f))?.is_zero() {
            Some(f)
        } else {
            None
        })
    }
}

/// Run one identity of the suite. Every identity is premised on the soliton
/// equation, which must hold first; theorems whose other premises fail for the
/// input report [`Status::HypothesisNotSatisfied`].
pub fn identity_check(
    model: &ManifoldModel,
    structure: Option<&ParacontactStructure>,
    curv: &Curvature,
    data: &SolitonData,
    id: &str,
    opts: &IdentityOptions,
) -> Result<CheckReport, SolitonError> {
    if !IDENTITY_IDS.contains(&id) {
        return Err(SolitonError::UnknownIdentity(id.to_string()));
    }
    let class = match structure {
        Some(s) => Some(classify_with(s, curv)?),
        None => None,
    };
    let ctx = build_ctx(model, structure, curv, data, class, opts)?;
    run(&ctx, id)
}

/// Every identity in [`IDENTITY_IDS`] order, sharing one classification.
pub fn identity_suite(
    model: &ManifoldModel,
    structure: Option<&ParacontactStructure>,
    curv: &Curvature,
    data: &SolitonData,
    opts: &IdentityOptions,
) -> Result<Vec<CheckReport>, SolitonError> {
    let class = match structure {
        Some(s) => Some(classify_with(s, curv)?),
        None => None,
    };
    let ctx = build_ctx(model, structure, curv, data, class, opts)?;
    IDENTITY_IDS.iter().map(|id| run(&ctx, id)).collect()
}

fn build_ctx<'a>(
    model: &'a ManifoldModel,
    s: Option<&'a ParacontactStructure>,
    curv: &'a Curvature,
    data: &'a SolitonData,
    class: Option<StructureClassReport>,
    opts: &'a IdentityOptions,
) -> Result<Ctx<'a>, SolitonError> {
    let z = data.field(model)?;
    let q = soliton_ratio(&curv.scalar, &data.lambda, &data.delta)?;
    let soliton = soliton_residual(model, curv, data)?;
    if !soliton.passed() {
        let witness = soliton
            .first_witness()
            .map(|(_, _, e)| e.to_string())
            .unwrap_or_default();
        return Err(SolitonError::PrerequisiteFailed { witness });
    }
    Ok(Ctx {
        model,
        s,
        curv,
        data,
        z,
        q,
        class,
        opts,
    })
}

fn run(ctx: &Ctx<'_>, id: &str) -> Result<CheckReport, SolitonError> {
    let report = match id {
        "L1a" | "L1b" | "L1c" => lemma(ctx, id)?,
        "T2" => contact_transformation(ctx)?,
        "T3" => collinear_paracontact(ctx)?,
        "T4" => jacobi(ctx)?,
        "T5" => collinear_k_paracontact(ctx)?,
        "GL1" | "GL2" => gradient_lemma(ctx, id)?,
        "T6" => k_paracontact_gradient(ctx)?,
        "T7" => k_mu_gradient(ctx)?,
        "T8" => para_sasakian_gradient(ctx)?,
        "T9" => para_cosymplectic_conformal(ctx)?,
        other => return Err(SolitonError::UnknownIdentity(other.to_string())),
    };
    Ok(report.with_derived("(r - lambda)/delta", ctx.q.clone()))
}

fn lemma(ctx: &Ctx<'_>, id: &str) -> Result<CheckReport, SolitonError> {
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous(id, "no paracontact structure given"));
    };
    if !class.almost_paracontact_metric {
        return Ok(CheckReport::vacuous(id, "structure violates its axioms"));
    }
    let lz_xi = lie_derivative(ctx.model, &ctx.z, s.xi())?;
    let lz_eta = lie_derivative(ctx.model, &ctx.z, s.eta())?;
    let residual = match id {
        "L1a" => Residual::scalar("eta(L_Z xi) - (lambda - r)/delta", &s.eta().pair(&lz_xi)? + &ctx.q),
        "L1b" => Residual::scalar("(L_Z eta)(xi) - (r - lambda)/delta", &lz_eta.pair(s.xi())? - &ctx.q),
        _ => {
            let flat = ctx.model.flat(&lz_xi)?;
            let r = lz_eta.sub(&flat)?.sub(&s.eta().scale(&ctx.q.times(2, 1)))?;
            Residual::tensor("(L_Z eta)(X) - g(X, L_Z xi) - 2 (r - lambda)/delta eta(X)", r)
        }
    };
    Ok(CheckReport::from_residuals(id, vec![residual]))
}

fn contact_transformation(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T2", "no paracontact structure given"));
    };
    if !class.paracontact_metric {
        return Ok(CheckReport::vacuous("T2", "structure is not paracontact metric"));
    }
    let (sigma, div_report) = match contact_transformation_sigma(s, ctx.curv, &ctx.z) {
        Ok(v) => v,
        Err(SolitonError::NotProportional { .. }) => {
            return Ok(CheckReport::vacuous(
                "T2",
                "Z is not an infinitesimal contact transformation",
            ))
        }
        Err(e) => return Err(e),
    };
    let n = Expr::int(ctx.n() as i64);
    let div = divergence(ctx.model, &ctx.curv.connection, &ctx.z)?;
    let mut residuals = vec![
        Residual::scalar("sigma - (r - lambda)/delta", &sigma - &ctx.q),
        Residual::scalar("div Z - n (r - lambda)/delta", &div - &(&n * &ctx.q)),
    ];
    residuals.extend(div_report.residuals);
    let killing = (&ctx.curv.scalar - &ctx.data.lambda).is_zero();
    Ok(CheckReport::from_residuals("T2", residuals)
        .with_derived("sigma", sigma)
        .with_note(format!("conclusion: Z is Killing = {killing}")))
}

fn collinear_paracontact(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T3", "no paracontact structure given"));
    };
    if !class.paracontact_metric {
        return Ok(CheckReport::vacuous("T3", "structure is not paracontact metric"));
    }
    let Some(f) = ctx.collinear_factor(s.xi())? else {
        return Ok(CheckReport::vacuous("T3", "Z is not collinear with xi"));
    };
    if f.is_zero() {
        return Ok(CheckReport::vacuous("T3", "Z is zero"));
    }
    let n = ctx.n();
    let model = ctx.model;
    let h = crate::structures::h_operator(s)?;
    let phi_h = s.phi().compose(&h)?;
    let delta = &ctx.data.delta;
    let r_minus_lambda = &ctx.curv.scalar - &ctx.data.lambda;
    let df: Vec<Expr> = (0..n).map(|i| ctx.d(&f, i)).collect::<Result<_, _>>()?;
    let eta = s.eta();
    let eq = TensorField::from_fn(n, 0, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let g_phih = Expr::sum(&(0..n).map(|k| phi_h.get(&[k, i]) * model.g(k, j)).collect::<Vec<_>>());
        let bracket = Expr::sum(&[&df[i] * eta.at(j), &df[j] * eta.at(i), (&f * &g_phih).times(2, 1)]);
        Ok::<_, GeometryError>(&(delta * &bracket) - &(&r_minus_lambda * model.g(i, j)).times(2, 1))
    })?;
    let grad_f = gradient(model, &f)?;
    let xi_f = ctx.along(s.xi(), &f)?;
    let residuals = vec![
        Residual::tensor(
            "delta[(Xf)eta(Y) + (Yf)eta(X) + 2f g(phi h X, Y)] - 2(r - lambda)g(X,Y)",
            eq,
        ),
        Residual::tensor("phi grad f", s.phi().apply(&grad_f)?),
        Residual::tensor("grad f - (xi f) xi", grad_f.sub(&s.xi().scale(&xi_f))?),
    ];
    Ok(CheckReport::from_residuals("T3", residuals)
        .with_derived("f", f)
        .with_note(format!("conclusion: structure is K-paracontact = {}", h.is_zero())))
}

fn jacobi(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T4", "no paracontact structure given"));
    };
    if !class.k_paracontact {
        return Ok(CheckReport::vacuous("T4", "structure is not K-paracontact"));
    }
    if ctx.collinear_factor(s.xi())?.is_none() {
        return Ok(CheckReport::vacuous("T4", "Z is not parallel to xi"));
    }
    let r = &ctx.curv.scalar;
    if !ctx.model.spec().is_constant(r)? {
        return Ok(CheckReport::vacuous("T4", "scalar curvature is not constant"));
    }
    let model = ctx.model;
    let xi = s.xi();
    let lzn = lie_derivative_connection(model, &ctx.curv.connection, &ctx.curv.riemann, &ctx.z)?;
    let n = ctx.n();
    // (L_Z ∇)(ξ, ξ) = ∇_ξ∇_ξ Z − ∇_{∇_ξ ξ} Z − R(Z,ξ)ξ
    let mut lzn_xixi = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            let w = xi.at(i) * xi.at(j);
            if w.is_zero() {
                continue;
            }
            for (l, acc) in lzn_xixi.iter_mut().enumerate() {
                acc.push(&w * lzn.get(&[l, i, j]));
            }
        }
    }
    let lzn_xixi = TensorField::vector(lzn_xixi.iter().map(Expr::sum).collect());
    let nabla_xi_xi = covariant_derivative_vector(model, &ctx.curv.connection, xi, xi)?;
    let mut notes = Vec::new();
    match ctx.opts.jacobi {
        JacobiHypothesis::Check => {
            // With ∇_ξ ξ = 0 the Jacobi operator is exactly (L_Z ∇)(ξ, ξ).
            if !nabla_xi_xi.is_zero() || !lzn_xixi.is_zero() {
                return Ok(CheckReport::vacuous("T4", "Z is not a Jacobi field along xi"));
            }
        }
        JacobiHypothesis::Assume => notes.push("Jacobi-field premise assumed, not checked".to_string()),
    }
    let delta = &ctx.data.delta;
    let lambda = &ctx.data.lambda;
    let xi_lambda = ctx.along(xi, lambda)?;
    let xi_delta = ctx.along(xi, delta)?;
    let jacobi_rhs = &xi_lambda + &(&ctx.q * &xi_delta);
    let mut residuals = vec![
        Residual::scalar(
            "delta g((L_Z nabla)(xi,xi), xi) + (xi lambda) + (r - lambda)/delta (xi delta)",
            &(delta * &model.inner(&lzn_xixi, xi)?) + &jacobi_rhs,
        ),
        Residual::scalar("(xi lambda) + (r - lambda)/delta (xi delta)", jacobi_rhs),
    ];
    if lambda == delta {
        residuals.push(Residual::scalar("r (xi lambda)", r * &xi_lambda));
    }
    let mut report = CheckReport::from_residuals("T4", residuals);
    report.notes.extend(notes);
    let conclusion = r.is_zero() || ctx.model.spec().is_constant(lambda)?;
    Ok(report.with_note(format!("conclusion: r = 0 or lambda constant = {conclusion}")))
}

fn collinear_k_paracontact(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T5", "no paracontact structure given"));
    };
    if !class.k_paracontact {
        return Ok(CheckReport::vacuous("T5", "structure is not K-paracontact"));
    }
    let Some(sigma) = ctx.collinear_factor(s.xi())? else {
        return Ok(CheckReport::vacuous("T5", "Z is not collinear with xi"));
    };
    if sigma.is_zero() {
        return Ok(CheckReport::vacuous("T5", "Z is zero"));
    }
    let model = ctx.model;
    let n = ctx.n();
    let grad = gradient(model, &sigma)?;
    let xi_sigma = ctx.along(s.xi(), &sigma)?;
    let eta = s.eta();
    let d_eta = exterior_derivative(model, eta)?;
    let volume = TensorField::from_fn(n, 0, 3, |ix| {
        let (a, b, c) = (ix[0], ix[1], ix[2]);
        Ok::<_, GeometryError>(Expr::sum(&[
            eta.at(a) * d_eta.get(&[b, c]),
            eta.at(b) * d_eta.get(&[c, a]),
            eta.at(c) * d_eta.get(&[a, b]),
        ]))
    })?;
    let residuals = vec![
        Residual::tensor("grad sigma - (xi sigma) xi", grad.sub(&s.xi().scale(&xi_sigma))?),
        Residual::scalar(
            "delta (xi sigma) - (r - lambda)",
            &(&ctx.data.delta * &xi_sigma) - &(&ctx.curv.scalar - &ctx.data.lambda),
        ),
        Residual::tensor("(xi sigma) eta ^ d eta", volume.scale(&xi_sigma)),
    ];
    let constant = model.spec().is_constant(&sigma)?;
    let mut report = CheckReport::from_residuals("T5", residuals)
        .with_derived("sigma", sigma)
        .with_note(format!("conclusion: sigma constant = {constant}"));
    if volume.is_zero() {
        report
            .notes
            .push("eta ^ d eta vanishes; the constancy argument does not apply".into());
    }
    Ok(report)
}

fn gradient_lemma(ctx: &Ctx<'_>, id: &str) -> Result<CheckReport, SolitonError> {
    if ctx.u().is_none() {
        return Ok(CheckReport::vacuous(id, "potential is not a gradient"));
    }
    let n = ctx.n();
    let dq: Vec<Expr> = (0..n).map(|i| ctx.d(&ctx.q, i)).collect::<Result<_, _>>()?;
    let residual = if id == "GL1" {
        let r = TensorField::from_fn(n, 1, 2, |ix| {
            let (k, i, j) = (ix[0], ix[1], ix[2]);
            let v = curvature_apply(&ctx.curv.riemann, &ctx.basis(i), &ctx.basis(j), &ctx.z)?;
            let mut terms = vec![v.at(k).clone()];
            if k == j {
                terms.push(-dq[i].clone());
            }
            if k == i {
                terms.push(dq[j].clone());
            }
            Ok::<_, GeometryError>(Expr::sum(&terms))
        })?;
        Residual::tensor("R(X,Y) grad u - X(q) Y + Y(q) X", r)
    } else {
        let m = Expr::int(n as i64 - 1);
        let r = TensorField::covector(
            (0..n)
                .map(|j| Ok::<_, SolitonError>(&ctx.curv.ricci.bilinear(&ctx.basis(j), &ctx.z)? + &(&m * &dq[j])))
                .collect::<Result<_, _>>()?,
        );
        Residual::tensor("S(Y, grad u) + (dim-1) Y(q)", r)
    };
    Ok(CheckReport::from_residuals(id, vec![residual]))
}

fn k_paracontact_gradient(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some(u) = ctx.u() else {
        return Ok(CheckReport::vacuous("T6", "potential is not a gradient"));
    };
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T6", "no paracontact structure given"));
    };
    if !class.k_paracontact {
        return Ok(CheckReport::vacuous("T6", "structure is not K-paracontact"));
    }
    let w = &ctx.q - u;
    let dw = exterior_derivative(ctx.model, &TensorField::scalar(w.clone()))?;
    let xi_w = ctx.along(s.xi(), &w)?;
    let residual = Residual::tensor("d(q - u) - xi(q - u) eta", dw.sub(&s.eta().scale(&xi_w))?);
    let constant = ctx.model.spec().is_constant(&w)?;
    Ok(CheckReport::from_residuals("T6", vec![residual])
        .with_derived("q - u", w)
        .with_note(format!("conclusion: (r - lambda)/delta - u constant = {constant}")))
}

fn k_mu_gradient(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some(u) = ctx.u() else {
        return Ok(CheckReport::vacuous("T7", "potential is not a gradient"));
    };
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T7", "no paracontact structure given"));
    };
    let Some(KMuFit::Fit { k, mu }) = &class.k_mu else {
        return Ok(CheckReport::vacuous("T7", "structure is not (k,mu)-paracontact"));
    };
    let model = ctx.model;
    let n = ctx.n();
    let h = crate::structures::h_operator(s)?;
    let delta = &ctx.data.delta;
    let rl = &ctx.curv.scalar - &ctx.data.lambda;
    let eta = s.eta();
    let zero = Expr::zero();
    let mu_val = mu.as_ref().unwrap_or(&zero);
    let du: Vec<Expr> = (0..n).map(|i| ctx.d(u, i)).collect::<Result<_, _>>()?;
    let d_rl: Vec<Expr> = (0..n).map(|i| ctx.d(&rl, i)).collect::<Result<_, _>>()?;
    let d_delta: Vec<Expr> = (0..n).map(|i| ctx.d(delta, i)).collect::<Result<_, _>>()?;
    let hu: Vec<Expr> = (0..n)
        .map(|i| Expr::sum(&(0..n).map(|k| h.get(&[k, i]) * &du[k]).collect::<Vec<_>>()))
        .collect();
    let delta2 = delta * delta;
    let res = TensorField::from_fn(n, 0, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let lhs = Expr::sum(&[
            delta * &(&d_rl[i] * eta.at(j)),
            -(delta * &(&d_rl[j] * eta.at(i))),
            -(&(&d_delta[i] * &rl) * eta.at(j)),
            &(&d_delta[j] * &rl) * eta.at(i),
        ]);
        let k_term = &(&du[i] * eta.at(j)) - &(&du[j] * eta.at(i));
        let mu_term = &(&hu[i] * eta.at(j)) - &(&hu[j] * eta.at(i));
        let rhs = -(&delta2 * &(&(k * &k_term) + &(mu_val * &mu_term)));
        Ok::<_, GeometryError>(&lhs - &rhs)
    })?;
    let grad = gradient(model, u)?;
    let xi_u = ctx.along(s.xi(), u)?;
    let parallel = grad.sub(&s.xi().scale(&xi_u))?.is_zero();
    let mut report = CheckReport::from_residuals(
        "T7",
        vec![Residual::tensor(
            "eta-component identity of the gradient soliton on a (k,mu) manifold",
            res,
        )],
    )
    .with_derived("k", k.clone())
    .with_note(format!("conclusion: Z parallel to xi = {parallel}"));
    match mu {
        Some(m) => report.derived.push(("mu".into(), m.clone())),
        None => report.notes.push("mu indeterminate (h = 0)".into()),
    }
    Ok(report)
}

fn para_sasakian_gradient(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some(u) = ctx.u() else {
        return Ok(CheckReport::vacuous("T8", "potential is not a gradient"));
    };
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T8", "no paracontact structure given"));
    };
    if !class.para_sasakian {
        return Ok(CheckReport::vacuous("T8", "structure is not para-Sasakian"));
    }
    let n = ctx.n();
    let xi_u = ctx.along(s.xi(), u)?;
    let grad = gradient(ctx.model, u)?;
    let delta2 = &ctx.data.delta * &ctx.data.delta;
    let du = TensorField::covector((0..n).map(|i| ctx.d(u, i)).collect::<Result<_, _>>()?);
    let residuals = vec![
        Residual::tensor(
            "delta^2 [(X u) - (xi u) eta(X)]",
            du.sub(&s.eta().scale(&xi_u))?.scale(&delta2),
        ),
        Residual::tensor("grad u - (xi u) xi", grad.sub(&s.xi().scale(&xi_u))?),
    ];
    let constant = ctx.model.spec().is_constant(u)?;
    Ok(CheckReport::from_residuals("T8", residuals).with_note(format!("conclusion: u constant = {constant}")))
}

fn para_cosymplectic_conformal(ctx: &Ctx<'_>) -> Result<CheckReport, SolitonError> {
    let Some((s, class)) = ctx.structure() else {
        return Ok(CheckReport::vacuous("T9", "no paracontact structure given"));
    };
    if !class.para_cosymplectic {
        return Ok(CheckReport::vacuous("T9", "structure is not para-cosymplectic"));
    }
    let rho = match conformal_coefficient(ctx.model, &ctx.z) {
        Ok(rho) => rho,
        Err(SolitonError::NotProportional { .. }) => {
            return Ok(CheckReport::vacuous("T9", "Z is not a conformal vector field"))
        }
        Err(e) => return Err(e),
    };
    let lz_eta = lie_derivative(ctx.model, &ctx.z, s.eta())?;
    let lz_xi = lie_derivative(ctx.model, &ctx.z, s.xi())?;
    let residuals = vec![
        Residual::scalar(
            "r - lambda - rho delta",
            &(&ctx.curv.scalar - &ctx.data.lambda) - &(&rho * &ctx.data.delta),
        ),
        Residual::scalar("rho - (L_Z eta)(xi)", &rho - &lz_eta.pair(s.xi())?),
        Residual::scalar("rho + eta(L_Z xi)", &rho + &s.eta().pair(&lz_xi)?),
    ];
    Ok(CheckReport::from_residuals("T9", residuals).with_derived("rho", rho))
}
