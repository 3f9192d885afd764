use crate::symbolic::Expr;

use super::model::ManifoldModel;
use super::tensor::TensorField;
use super::GeometryError;

/// Levi-Civita coefficients with `∇_{e_i} e_j = Σ_k Γ^k_ij e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    /// Stored as a `(1,2)` array indexed `[k, i, j]`.
    gamma: TensorField,
}

impl ConnectionData {
    /// `Γ^k_ij`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Expr {
        self.gamma.get(&[k, i, j])
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn as_tensor(&self) -> &TensorField {
        &self.gamma
    }

    /// `∇_{e_i} e_j` as a vector.
    pub fn nabla_basis(&self, i: usize, j: usize) -> TensorField {
        TensorField::vector((0..self.dim()).map(|k| self.gamma(i, j, k).clone()).collect())
    }

    /// Torsion residual `Γ^k_ij − Γ^k_ji − c^k_ij`, indexed `[k, i, j]`.
    pub fn torsion_residual(&self, model: &ManifoldModel) -> TensorField {
        let n = model.dim();
        TensorField::from_fn(n, 1, 2, |ix| {
            let (k, i, j) = (ix[0], ix[1], ix[2]);
            Ok::<_, GeometryError>(&(self.gamma(i, j, k) - self.gamma(j, i, k)) - model.c(i, j, k))
        })
        .expect("infallible")
    }

    /// Metric compatibility residual `e_i g_jk − Γ^m_ij g_mk − Γ^m_ik g_jm`,
    /// indexed `[i, j, k]`.
    pub fn metricity_residual(&self, model: &ManifoldModel) -> Result<TensorField, GeometryError> {
        let n = model.dim();
        TensorField::from_fn(n, 0, 3, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let mut terms = vec![model.d(model.g(j, k), i)?];
            for m in 0..n {
                terms.push(-(self.gamma(i, j, m) * model.g(m, k)));
                terms.push(-(self.gamma(i, k, m) * model.g(j, m)));
            }
            Ok(Expr::sum(&terms))
        })
    }
}

/// The Levi-Civita connection from the frame Koszul formula
///
/// ```text
/// 2 g(∇_i e_j, e_l) = e_i g_jl + e_j g_li − e_l g_ij
///                    + c^m_ij g_ml − c^m_jl g_mi + c^m_li g_mj
/// ```
///
/// which reduces to the Christoffel symbols in chart mode. Both defining
/// properties are checked before returning.
pub fn levi_civita(model: &ManifoldModel) -> Result<ConnectionData, GeometryError> {
    let n = model.dim();
    let lowered = TensorField::from_fn(n, 0, 3, |ix| {
        let (i, j, l) = (ix[0], ix[1], ix[2]);
        let mut terms = vec![
            model.d(model.g(j, l), i)?,
            model.d(model.g(l, i), j)?,
            -model.d(model.g(i, j), l)?,
        ];
        for m in 0..n {
            terms.push(model.c(i, j, m) * model.g(m, l));
            terms.push(-(model.c(j, l, m) * model.g(m, i)));
            terms.push(model.c(l, i, m) * model.g(m, j));
        }
        Ok::<_, GeometryError>(Expr::sum(&terms).times(1, 2))
    })?;
    let gamma = TensorField::from_fn(n, 1, 2, |ix| {
        let (k, i, j) = (ix[0], ix[1], ix[2]);
        Ok::<_, GeometryError>(Expr::sum(
            &(0..n)
                .map(|l| model.g_inv(k, l) * lowered.get(&[i, j, l]))
                .collect::<Vec<_>>(),
        ))
    })?;
    let conn = ConnectionData { gamma };
    if let Some((idx, w)) = conn.torsion_residual(model).nonzero().into_iter().next() {
        return Err(GeometryError::ConnectionCheck(format!(
            "torsion residual at {idx:?}: {w}"
        )));
    }
    if let Some((idx, w)) = conn.metricity_residual(model)?.nonzero().into_iter().next() {
        return Err(GeometryError::ConnectionCheck(format!(
            "metricity residual at {idx:?}: {w}"
        )));
    }
    Ok(conn)
}

/// `∇_X Y`.
pub fn covariant_derivative_vector(
    model: &ManifoldModel,
    conn: &ConnectionData,
    x: &TensorField,
    y: &TensorField,
) -> Result<TensorField, GeometryError> {
    model.expect_valence(x, (1, 0))?;
    model.expect_valence(y, (1, 0))?;
    let n = model.dim();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut terms = Vec::new();
        for i in 0..n {
            if x.at(i).is_zero() {
                continue;
            }
            let mut inner = vec![model.d(y.at(k), i)?];
            for j in 0..n {
                inner.push(y.at(j) * conn.gamma(i, j, k));
            }
            terms.push(x.at(i) * &Expr::sum(&inner));
        }
        out.push(Expr::sum(&terms));
    }
    Ok(TensorField::vector(out))
}

/// Full covariant derivative `∇T` of a `(p,q)` field as a `(p,q+1)` field
/// whose first lower slot is the differentiation direction:
/// `(∇T)^a_{i b} = (∇_{e_i} T)^a_b`.
pub fn covariant_derivative(
    model: &ManifoldModel,
    conn: &ConnectionData,
    t: &TensorField,
) -> Result<TensorField, GeometryError> {
    let (p, q) = t.valence();
    let n = model.dim();
    if t.dim() != n {
        return Err(GeometryError::Shape("field dimension differs from model".into()));
    }
    TensorField::from_fn(n, p, q + 1, |ix| {
        let up = &ix[..p];
        let i = ix[p];
        let low = &ix[p + 1..];
        let mut base: Vec<usize> = up.to_vec();
        base.extend_from_slice(low);
        let mut terms = vec![model.d(t.get(&base), i)?];
        for s in 0..p {
            for m in 0..n {
                let mut idx = base.clone();
                idx[s] = m;
                terms.push(conn.gamma(i, m, up[s]) * t.get(&idx));
            }
        }
        for s in 0..q {
            for m in 0..n {
                let mut idx = base.clone();
                idx[p + s] = m;
                terms.push(-(conn.gamma(i, low[s], m) * t.get(&idx)));
            }
        }
        Ok(Expr::sum(&terms))
    })
}

/// Riemann tensor `R^l_{ijk}` = component `l` of
/// `R(e_i,e_j)e_k = ∇_i∇_j e_k − ∇_j∇_i e_k − ∇_{[e_i,e_j]} e_k`,
/// stored as a `(1,3)` field indexed `[l, i, j, k]`.
pub fn riemann(model: &ManifoldModel, conn: &ConnectionData) -> Result<TensorField, GeometryError> {
    let n = model.dim();
    TensorField::from_fn(n, 1, 3, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        if i == j {
            return Ok(Expr::zero());
        }
        let mut terms = vec![model.d(conn.gamma(j, k, l), i)?, -model.d(conn.gamma(i, k, l), j)?];
        for m in 0..n {
            terms.push(conn.gamma(j, k, m) * conn.gamma(i, m, l));
            terms.push(-(conn.gamma(i, k, m) * conn.gamma(j, m, l)));
            terms.push(-(model.c(i, j, m) * conn.gamma(m, k, l)));
        }
        Ok(Expr::sum(&terms))
    })
}

/// `R(X,Y)Z` for vector fields.
pub fn curvature_apply(
    riem: &TensorField,
    x: &TensorField,
    y: &TensorField,
    z: &TensorField,
) -> Result<TensorField, GeometryError> {
    let n = riem.dim();
    if riem.valence() != (1, 3) || [x, y, z].iter().any(|v| v.valence() != (1, 0) || v.dim() != n) {
        return Err(GeometryError::Shape("curvature_apply needs R and three vectors".into()));
    }
    let mut out = vec![Vec::new(); n];
    for i in 0..n {
        if x.at(i).is_zero() {
            continue;
        }
        for j in 0..n {
            if y.at(j).is_zero() {
                continue;
            }
            let xy = x.at(i) * y.at(j);
            for k in 0..n {
                if z.at(k).is_zero() {
                    continue;
                }
                let w = &xy * z.at(k);
                for (l, acc) in out.iter_mut().enumerate() {
                    let r = riem.get(&[l, i, j, k]);
                    if !r.is_zero() {
                        acc.push(r * &w);
                    }
                }
            }
        }
    }
    Ok(TensorField::vector(out.iter().map(Expr::sum).collect()))
}

/// Ricci tensor `S_jk = Σ_i R^i_{ijk}`.
pub fn ricci(riem: &TensorField) -> Result<TensorField, GeometryError> {
    if riem.valence() != (1, 3) {
        return Err(GeometryError::Shape("ricci needs a (1,3) field".into()));
    }
    riem.contract(0, 0)
}

/// Ricci operator `Q` with `S(X,Y) = g(QX,Y)`.
pub fn ricci_operator(model: &ManifoldModel, ric: &TensorField) -> Result<TensorField, GeometryError> {
    model.expect_valence(ric, (0, 2))?;
    let n = model.dim();
    TensorField::from_fn(n, 1, 1, |ix| {
        let (i, j) = (ix[0], ix[1]);
        Ok(Expr::sum(
            &(0..n).map(|k| model.g_inv(i, k) * ric.get(&[k, j])).collect::<Vec<_>>(),
        ))
    })
}

/// Scalar curvature `r = tr Q`.
pub fn scalar_curvature(model: &ManifoldModel, ric: &TensorField) -> Result<Expr, GeometryError> {
    let q = ricci_operator(model, ric)?;
    Ok(Expr::sum(
        &(0..model.dim()).map(|i| q.get(&[i, i]).clone()).collect::<Vec<_>>(),
    ))
}

/// Everything curvature-related about a model, computed once.
#[derive(Clone, Debug)]
pub struct Curvature {
    pub connection: ConnectionData,
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub ricci_operator: TensorField,
    pub scalar: Expr,
}

impl Curvature {
    pub fn compute(model: &ManifoldModel) -> Result<Self, GeometryError> {
        let connection = levi_civita(model)?;
        let riemann = riemann(model, &connection)?;
        let ricci = ricci(&riemann)?;
        let ricci_operator = ricci_operator(model, &ricci)?;
        let scalar = scalar_curvature(model, &ricci)?;
        Ok(Curvature {
            connection,
            riemann,
            ricci,
            ricci_operator,
            scalar,
        })
    }
}

/// First Bianchi residual `R(e_i,e_j)e_k + R(e_j,e_k)e_i + R(e_k,e_i)e_j`,
/// indexed `[l, i, j, k]`.
pub fn bianchi_residual(riem: &TensorField) -> TensorField {
    let n = riem.dim();
    TensorField::from_fn(n, 1, 3, |ix| {
        let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        Ok::<_, GeometryError>(Expr::sum(&[
            riem.get(&[l, i, j, k]).clone(),
            riem.get(&[l, j, k, i]).clone(),
            riem.get(&[l, k, i, j]).clone(),
        ]))
    })
    .expect("infallible")
}

/// Fully lowered curvature `R_{ijkm} = g(R(e_i,e_j)e_k, e_m)`.
pub fn lowered_riemann(model: &ManifoldModel, riem: &TensorField) -> TensorField {
    let n = model.dim();
    TensorField::from_fn(n, 0, 4, |ix| {
        let (i, j, k, m) = (ix[0], ix[1], ix[2], ix[3]);
        Ok::<_, GeometryError>(Expr::sum(
            &(0..n)
                .map(|l| riem.get(&[l, i, j, k]) * model.g(l, m))
                .collect::<Vec<_>>(),
        ))
    })
    .expect("infallible")
}

/// Residuals of `R_{ijkm} + R_{jikm}` and `R_{ijkm} + R_{ijmk}`.
pub fn symmetry_residuals(model: &ManifoldModel, riem: &TensorField) -> (TensorField, TensorField) {
    let low = lowered_riemann(model, riem);
    let a = low.add(&low.transpose(0, 1)).expect("same shape");
    let b = low.add(&low.transpose(2, 3)).expect("same shape");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse_expr, DerivationSpec};

    fn diag(d: [i64; 3]) -> Vec<Vec<Expr>> {
        (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { Expr::int(d[i]) } else { Expr::zero() })
                    .collect()
            })
            .collect()
    }

    fn frame_example(u: i64) -> ManifoldModel {
        let a = Expr::int(u + 1);
        ManifoldModel::frame(
            "frame",
            DerivationSpec::frame(&["e1", "e2", "e3"]),
            diag([1, -1, 1]),
            &[(0, 1, 2, Expr::int(-2)), (2, 1, 0, a.clone()), (2, 0, 1, a)],
        )
        .unwrap()
    }

    // Koszul with constant brackets and diagonal constant metric, in i64:
    // 2 g(∇_i e_j, e_k) = c_ijk − c_jki + c_kij with c_ijk = g([e_i,e_j], e_k).
    fn koszul_oracle(g: [i64; 3], bracket: impl Fn(usize, usize, usize) -> i64) -> [[[i64; 3]; 3]; 3] {
        let c = |i: usize, j: usize, k: usize| bracket(i, j, k) * g[k];
        let mut out = [[[0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let twice = c(i, j, k) - c(j, k, i) + c(k, i, j);
                    assert_eq!(twice % 2, 0);
                    out[i][j][k] = twice / 2 * g[k];
                }
            }
        }
        out
    }

    #[test]
    fn frame_connection_matches_koszul_oracle() {
        for u in [-3, 0, 2] {
            let model = frame_example(u);
            let conn = levi_civita(&model).unwrap();
            let a = u + 1;
            let table = koszul_oracle([1, -1, 1], |i, j, k| match (i, j, k) {
                (0, 1, 2) => -2,
                (1, 0, 2) => 2,
                (2, 1, 0) | (2, 0, 1) => a,
                (1, 2, 0) | (0, 2, 1) => -a,
                _ => 0,
            });
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert_eq!(
                            conn.gamma(i, j, k),
                            &Expr::int(table[i][j][k]),
                            "Gamma^{k}_{i}{j} at u={u}"
                        );
                    }
                }
            }
            assert!(conn.torsion_residual(&model).is_zero());
            assert!(conn.metricity_residual(&model).unwrap().is_zero());
        }
    }

    #[test]
    fn frame_connection_at_zero() {
        let conn = levi_civita(&frame_example(0)).unwrap();
        let e = |i| TensorField::basis_vector(3, i);
        assert_eq!(conn.nabla_basis(0, 1), e(2).neg());
        assert_eq!(conn.nabla_basis(1, 0), e(2));
        assert_eq!(conn.nabla_basis(0, 2), e(1).neg());
        assert_eq!(conn.nabla_basis(1, 2), e(0).neg());
        assert_eq!(conn.nabla_basis(2, 0), TensorField::zeros(3, 1, 0));
        for i in 0..3 {
            assert!(conn.nabla_basis(i, i).is_zero());
        }
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let model = ManifoldModel::chart("flat", DerivationSpec::chart(&["x", "y", "z"]), diag([1, -1, 1])).unwrap();
        let c = Curvature::compute(&model).unwrap();
        assert!(c.connection.as_tensor().is_zero());
        assert!(c.riemann.is_zero());
        assert!(c.scalar.is_zero());
    }

    #[test]
    fn round_sphere_has_constant_curvature() {
        let spec = DerivationSpec::chart(&["t", "p"]);
        // Stereographic sphere: g = 4/(1+t²+p²)² (dt² + dp²), r = 2.
        let w = parse_expr("4/(1 + t^2 + p^2)^2", &spec).unwrap();
        let model = ManifoldModel::chart(
            "sphere",
            spec,
            vec![vec![w.clone(), Expr::zero()], vec![Expr::zero(), w]],
        )
        .unwrap();
        let c = Curvature::compute(&model).unwrap();
        assert_eq!(c.scalar, Expr::int(2));
        assert!(bianchi_residual(&c.riemann).is_zero());
        let (a, b) = symmetry_residuals(&model, &c.riemann);
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn curvature_apply_matches_components() {
        let model = frame_example(0);
        let c = Curvature::compute(&model).unwrap();
        let e = |i| TensorField::basis_vector(3, i);
        let v = curvature_apply(&c.riemann, &e(0), &e(2), &e(2)).unwrap();
        assert_eq!(v, e(0).neg());
        assert_eq!(c.scalar, Expr::int(-2));
    }
}
