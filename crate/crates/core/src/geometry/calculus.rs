use crate::symbolic::{Expr, Rational};

use super::connection::{covariant_derivative, ConnectionData};
use super::model::ManifoldModel;
use super::tensor::TensorField;
use super::GeometryError;

/// `[X, Y]` including the structure-function terms of a frame.
pub fn lie_bracket(model: &ManifoldModel, x: &TensorField, y: &TensorField) -> Result<TensorField, GeometryError> {
    model.expect_valence(x, (1, 0))?;
    model.expect_valence(y, (1, 0))?;
    let n = model.dim();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut terms = vec![model.apply_vector(x, y.at(k))?, -model.apply_vector(y, x.at(k))?];
        for i in 0..n {
            for j in 0..n {
                let c = model.c(i, j, k);
                if !c.is_zero() {
                    terms.push(&(x.at(i) * y.at(j)) * c);
                }
            }
        }
        out.push(Expr::sum(&terms));
    }
    Ok(TensorField::vector(out))
}

/// `B[k][i]` = component `k` of `[Z, e_i]`.
fn bracket_with_basis(model: &ManifoldModel, z: &TensorField) -> Result<Vec<Vec<Expr>>, GeometryError> {
    let n = model.dim();
    let mut b = vec![vec![Expr::zero(); n]; n];
    for (k, row) in b.iter_mut().enumerate() {
        for (i, slot) in row.iter_mut().enumerate() {
            let mut terms = vec![-model.d(z.at(k), i)?];
            for j in 0..n {
                let c = model.c(j, i, k);
                if !c.is_zero() {
                    terms.push(z.at(j) * c);
                }
            }
            *slot = Expr::sum(&terms);
        }
    }
    Ok(b)
}

/// Lie derivative `𝔏_Z T` for a field of any valence:
/// `(𝔏_Z T)^a_b = Z(T^a_b) + Σ T^{..m..} [Z,e_m]^a − Σ T_{..m..} [Z,e_b]^m`.
pub fn lie_derivative(model: &ManifoldModel, z: &TensorField, t: &TensorField) -> Result<TensorField, GeometryError> {
    model.expect_valence(z, (1, 0))?;
    let (p, q) = t.valence();
    let n = model.dim();
    if t.dim() != n && t.rank() > 0 {
        return Err(GeometryError::Shape("field dimension differs from model".into()));
    }
    if t.rank() == 0 {
        return Ok(TensorField::scalar(model.apply_vector(z, &t.components()[0])?));
    }
    let b = bracket_with_basis(model, z)?;
    TensorField::from_fn(n, p, q, |ix| {
        let mut terms = vec![model.apply_vector(z, t.get(ix))?];
        for s in 0..p + q {
            for m in 0..n {
                let coeff = if s < p { &b[ix[s]][m] } else { &b[m][ix[s]] };
                if coeff.is_zero() {
                    continue;
                }
                let mut idx = ix.to_vec();
                idx[s] = m;
                let v = t.get(&idx);
                if v.is_zero() {
                    continue;
                }
                terms.push(if s < p { coeff * v } else { -(coeff * v) });
            }
        }
        Ok(Expr::sum(&terms))
    })
}

/// Exterior derivative of a `p`-form (an antisymmetric `(0,p)` field) with
/// the normalization
///
/// ```text
/// dω(X_0..X_p) = 1/(p+1) [ Σ (−1)^i X_i ω(..X̂_i..)
///                         + Σ_{i<j} (−1)^{i+j} ω([X_i,X_j], ..X̂_i..X̂_j..) ]
/// ```
///
/// so that `dω(X,Y) = ½(Xω(Y) − Yω(X) − ω([X,Y]))` for 1-forms and
/// `df = Σ e_i(f) e^i` for functions.
pub fn exterior_derivative(model: &ManifoldModel, w: &TensorField) -> Result<TensorField, GeometryError> {
    let (up, p) = w.valence();
    let n = model.dim();
    if up != 0 {
        return Err(GeometryError::Shape(
            "exterior derivative needs a covariant field".into(),
        ));
    }
    if p == 0 {
        let f = &w.components()[0];
        return Ok(TensorField::covector(
            (0..n).map(|i| model.d(f, i)).collect::<Result<_, _>>()?,
        ));
    }
    if w.dim() != n {
        return Err(GeometryError::Shape("field dimension differs from model".into()));
    }
    let norm = Rational::new(1.into(), ((p + 1) as i64).into());
    TensorField::from_fn(n, 0, p + 1, |ix| {
        let mut terms = Vec::new();
        for i in 0..=p {
            let rest: Vec<usize> = ix
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, v)| *v)
                .collect();
            let d = model.d(w.get(&rest), ix[i])?;
            terms.push(if i % 2 == 0 { d } else { -d });
        }
        for i in 0..=p {
            for j in i + 1..=p {
                let rest: Vec<usize> = ix
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, v)| *v)
                    .collect();
                for m in 0..n {
                    let c = model.c(ix[i], ix[j], m);
                    if c.is_zero() {
                        continue;
                    }
                    let mut idx = vec![m];
                    idx.extend_from_slice(&rest);
                    let v = c * w.get(&idx);
                    terms.push(if (i + j) % 2 == 0 { v } else { -v });
                }
            }
        }
        Ok(Expr::sum(&terms).scale(&norm))
    })
}

/// Metric gradient `∇u = g^{ij} e_j(u) e_i`.
pub fn gradient(model: &ManifoldModel, u: &Expr) -> Result<TensorField, GeometryError> {
    let du = exterior_derivative(model, &TensorField::scalar(u.clone()))?;
    model.sharp(&du)
}

/// Hessian `H_ij = e_i(e_j u) − Γ^k_ij e_k(u)`.
pub fn hessian(model: &ManifoldModel, conn: &ConnectionData, u: &Expr) -> Result<TensorField, GeometryError> {
    let n = model.dim();
    let du: Vec<Expr> = (0..n).map(|k| model.d(u, k)).collect::<Result<_, _>>()?;
    TensorField::from_fn(n, 0, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let mut terms = vec![model.d(&du[j], i)?];
        for (k, dk) in du.iter().enumerate() {
            terms.push(-(conn.gamma(i, j, k) * dk));
        }
        Ok(Expr::sum(&terms))
    })
}

/// `div Z = tr(X ↦ ∇_X Z)`.
pub fn divergence(model: &ManifoldModel, conn: &ConnectionData, z: &TensorField) -> Result<Expr, GeometryError> {
    model.expect_valence(z, (1, 0))?;
    let n = model.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(model.d(z.at(i), i)?);
        for j in 0..n {
            terms.push(z.at(j) * conn.gamma(i, j, i));
        }
    }
    Ok(Expr::sum(&terms))
}

/// `(𝔏_Z∇)(X,Y) = ∇_X∇_Y Z − ∇_{∇_X Y} Z − R(Z,X)Y`, indexed `[l, i, j]`
/// for `X = e_i`, `Y = e_j`.
pub fn lie_derivative_connection(
    model: &ManifoldModel,
    conn: &ConnectionData,
    riem: &TensorField,
    z: &TensorField,
) -> Result<TensorField, GeometryError> {
    model.expect_valence(z, (1, 0))?;
    let n = model.dim();
    let nabla_z = covariant_derivative(model, conn, z)?;
    let second = covariant_derivative(model, conn, &nabla_z)?;
    TensorField::from_fn(n, 1, 2, |ix| {
        let (l, i, j) = (ix[0], ix[1], ix[2]);
        let mut terms = vec![second.get(&[l, i, j]).clone()];
        for m in 0..n {
            terms.push(-(z.at(m) * riem.get(&[l, m, i, j])));
        }
        Ok(Expr::sum(&terms))
    })
}

/// Antisymmetrization check: residual `T + T∘swap(a,b)`.
pub fn antisymmetry_residual(t: &TensorField, a: usize, b: usize) -> TensorField {
    t.add(&t.transpose(a, b)).expect("same shape")
}

/// Symmetrization check: residual `T − T∘swap(a,b)`.
pub fn symmetry_residual(t: &TensorField, a: usize, b: usize) -> TensorField {
    t.sub(&t.transpose(a, b)).expect("same shape")
}
