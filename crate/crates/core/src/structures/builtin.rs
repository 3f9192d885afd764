use std::collections::BTreeMap;
use std::str::FromStr;

use crate::geometry::{ConnectionData, ManifoldModel, TensorField};
use crate::symbolic::{parse_expr, DerivationSpec, Expr, Rational};

use super::{ParacontactStructure, StructureError};

pub const BUILTIN_NAMES: [&str; 3] = ["example_5_1", "example_5_2", "flat_para_cosymplectic"];

/// The parameter `u` of the three-dimensional frame example.
#[derive(Clone, Debug, PartialEq)]
pub enum UParam {
    Value(Rational),
    /// A declared constant symbol `u`.
    Symbolic,
}

impl UParam {
    fn expr(&self) -> Expr {
        match self {
            UParam::Value(q) => Expr::rational(q.clone()),
            UParam::Symbolic => Expr::symbol("u"),
        }
    }
}

fn diag(entries: [Expr; 3]) -> Vec<Vec<Expr>> {
    let [a, b, c] = entries;
    vec![
        vec![a, Expr::zero(), Expr::zero()],
        vec![Expr::zero(), b, Expr::zero()],
        vec![Expr::zero(), Expr::zero(), c],
    ]
}

/// Frame `e1, e2, e3 = ξ` with `[e1,e2] = −2e3`, `[e3,e2] = (u+1)e1`,
/// `[e3,e1] = (u+1)e2`, `g = diag(1,−1,1)`, `φe1 = e2`, `φe2 = e1`.
pub fn example_5_1(u: UParam) -> Result<ParacontactStructure, StructureError> {
    let mut spec = DerivationSpec::frame(&["e1", "e2", "e3"]);
    if u == UParam::Symbolic {
        spec.declare_constant("u")?;
    }
    let a = &u.expr() + &Expr::one();
    let model = ManifoldModel::frame(
        "example_5_1",
        spec,
        diag([Expr::one(), Expr::int(-1), Expr::one()]),
        &[(0, 1, 2, Expr::int(-2)), (2, 1, 0, a.clone()), (2, 0, 1, a)],
    )?;
    let mut phi = TensorField::zeros(3, 1, 1);
    phi.set(&[1, 0], Expr::one());
    phi.set(&[0, 1], Expr::one());
    let xi = TensorField::basis_vector(3, 2);
    let eta = TensorField::basis_covector(3, 2);
    ParacontactStructure::new(model, phi, xi, eta)
}

/// Chart `(x, y, z)` with `g = diag(exp(2z³), exp(−2z³), 1)`, `ξ = ∂z`,
/// `η = dz`, `φ∂x = −3z²∂x`, `φ∂y = 3z²∂y`. This `φ` does not satisfy the
/// axioms, so the structure is loaded in diagnostic mode.
pub fn example_5_2() -> Result<ParacontactStructure, StructureError> {
    let spec = DerivationSpec::chart(&["x", "y", "z"]);
    let e = |s: &str| parse_expr(s, &spec);
    let metric = diag([e("exp(2*z^3)")?, e("exp(-2*z^3)")?, Expr::one()]);
    let mut phi = TensorField::zeros(3, 1, 1);
    phi.set(&[0, 0], e("-3*z^2")?);
    phi.set(&[1, 1], e("3*z^2")?);
    let model = ManifoldModel::chart("example_5_2", spec, metric)?;
    ParacontactStructure::diagnostic(
        model,
        phi,
        TensorField::basis_vector(3, 2),
        TensorField::basis_covector(3, 2),
    )
}

/// Chart `(x, y, z)` with `g = diag(1,−1,1)`, `ξ = ∂z`, `η = dz`,
/// `φ∂x = ∂y`, `φ∂y = ∂x`.
pub fn flat_para_cosymplectic() -> Result<ParacontactStructure, StructureError> {
    let spec = DerivationSpec::chart(&["x", "y", "z"]);
    let model = ManifoldModel::chart(
        "flat_para_cosymplectic",
        spec,
        diag([Expr::one(), Expr::int(-1), Expr::one()]),
    )?;
    let mut phi = TensorField::zeros(3, 1, 1);
    phi.set(&[1, 0], Expr::one());
    phi.set(&[0, 1], Expr::one());
    ParacontactStructure::new(
        model,
        phi,
        TensorField::basis_vector(3, 2),
        TensorField::basis_covector(3, 2),
    )
}

/// Look up a built-in by name. `example_5_1` takes an optional rational
/// `u`; without it `u` is a constant symbol.
pub fn builtin(name: &str, params: &BTreeMap<String, String>) -> Result<ParacontactStructure, StructureError> {
    let allowed: &[&str] = if name == "example_5_1" { &["u"] } else { &[] };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(StructureError::BadParameter(format!("`{name}` has no parameter `{k}`")));
    }
    match name {
        "example_5_1" => {
            let u = match params.get("u").map(String::as_str) {
                None | Some("u") => UParam::Symbolic,
                Some(text) => UParam::Value(
                    Rational::from_str(text.trim())
                        .map_err(|_| StructureError::BadParameter(format!("u must be rational, got `{text}`")))?,
                ),
            };
            example_5_1(u)
        }
        "example_5_2" => example_5_2(),
        "flat_para_cosymplectic" => flat_para_cosymplectic(),
        other => Err(StructureError::UnknownBuiltin(other.to_string())),
    }
}

/// The connection table published alongside the frame example, as
/// `((i, j), ∇_{e_i} e_j)`.
pub fn published_example_5_1_connection(u: &Expr) -> Vec<((usize, usize), TensorField)> {
    let a = u + &Expr::one();
    let v = |c: [Expr; 3]| TensorField::vector(c.to_vec());
    let z = Expr::zero;
    vec![
        ((0, 0), v([z(), z(), z()])),
        ((0, 1), v([z(), z(), Expr::int(-2)])),
        ((0, 2), v([z(), -&a, z()])),
        ((1, 0), v([z(), z(), Expr::int(2)])),
        ((1, 1), v([z(), z(), z()])),
        ((1, 2), v([-&a, z(), z()])),
        ((2, 0), v([z(), a.clone(), z()])),
        ((2, 1), v([a.clone(), z(), z()])),
        ((2, 2), v([z(), z(), z()])),
    ]
}

/// A mismatch between a computed `∇_{e_i} e_j` and a tabulated value.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionDiscrepancy {
    pub i: usize,
    pub j: usize,
    pub computed: TensorField,
    pub tabulated: TensorField,
    /// `computed − tabulated`; never zero.
    pub difference: TensorField,
}

pub fn connection_discrepancies(
    conn: &ConnectionData,
    table: &[((usize, usize), TensorField)],
) -> Vec<ConnectionDiscrepancy> {
    table
        .iter()
        .filter_map(|((i, j), tabulated)| {
            let computed = conn.nabla_basis(*i, *j);
            let difference = computed.sub(tabulated).ok()?;
            (!difference.is_zero()).then(|| ConnectionDiscrepancy {
                i: *i,
                j: *j,
                computed,
                tabulated: tabulated.clone(),
                difference,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{levi_civita, lie_bracket};
    use crate::structures::h_operator;

    #[test]
    fn frame_example_brackets_at_zero() {
        let s = example_5_1(UParam::Value(Rational::default())).unwrap();
        let m = s.model();
        let e = |i| TensorField::basis_vector(3, i);
        assert_eq!(lie_bracket(m, &e(0), &e(1)).unwrap(), e(2).scale(&Expr::int(-2)));
        assert_eq!(lie_bracket(m, &e(2), &e(1)).unwrap(), e(0));
        assert_eq!(lie_bracket(m, &e(2), &e(0)).unwrap(), e(1));
        assert!(h_operator(&s).unwrap().is_zero());
    }

    #[test]
    fn published_table_disagrees_with_koszul() {
        let s = example_5_1(UParam::Symbolic).unwrap();
        let conn = levi_civita(s.model()).unwrap();
        let bad = connection_discrepancies(&conn, &published_example_5_1_connection(&Expr::symbol("u")));
        assert!(bad.iter().any(|d| (d.i, d.j) == (0, 1)));
        assert!(bad.iter().all(|d| !d.difference.is_zero()));
    }

    #[test]
    fn lookup_by_name() {
        let mut p = BTreeMap::new();
        assert!(builtin("example_5_2", &p).unwrap().is_diagnostic());
        p.insert("u".to_string(), "1/2".to_string());
        assert!(builtin("example_5_1", &p).unwrap().axioms_hold());
        assert!(matches!(
            builtin("flat_para_cosymplectic", &p),
            Err(StructureError::BadParameter(_))
        ));
        p.insert("u".to_string(), "abc".to_string());
        assert!(matches!(
            builtin("example_5_1", &p),
            Err(StructureError::BadParameter(_))
        ));
        assert!(matches!(
            builtin("nope", &BTreeMap::new()),
            Err(StructureError::UnknownBuiltin(_))
        ));
    }
}
