use crate::symbolic::{DerivationSpec, Expr, SymbolKind};

use super::tensor::TensorField;
use super::GeometryError;

/// A pseudo-Riemannian manifold described over a global basis: either
/// coordinate fields of a chart or a frame with declared structure functions.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldModel {
    name: String,
    spec: DerivationSpec,
    metric: TensorField,
    inverse: TensorField,
    determinant: Expr,
    /// `c[i][j][k]`: coefficient of `e_k` in `[e_i, e_j]`.
    brackets: TensorField,
}

impl ManifoldModel {
    /// Chart model; the basis is the coordinate fields of `spec`.
    pub fn chart(name: &str, spec: DerivationSpec, metric: Vec<Vec<Expr>>) -> Result<Self, GeometryError> {
        if spec.is_frame() {
            return Err(GeometryError::Invalid("chart model needs a chart symbol table".into()));
        }
        let n = spec.dim();
        let brackets = TensorField::zeros(n, 0, 3);
        Self::build(name, spec, metric, brackets)
    }

    /// Frame model. `brackets` holds `(i, j, k, c)` meaning `[e_i,e_j]`
    /// contains `c·e_k`; the reversed brackets are implied.
    pub fn frame(
        name: &str,
        spec: DerivationSpec,
        metric: Vec<Vec<Expr>>,
        brackets: &[(usize, usize, usize, Expr)],
    ) -> Result<Self, GeometryError> {
        if !spec.is_frame() {
            return Err(GeometryError::Invalid("frame model needs a frame symbol table".into()));
        }
        let n = spec.dim();
        let mut c = TensorField::zeros(n, 0, 3);
        let mut given = vec![false; n * n * n];
        for (i, j, k, coeff) in brackets {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(GeometryError::Invalid(format!(
                    "bracket index out of range: [{i},{j}] -> {k}"
                )));
            }
            if i == j && !coeff.is_zero() {
                return Err(GeometryError::BracketAntisymmetry { i, j, k });
            }
            let slot = (i * n + j) * n + k;
            if given[slot] {
                if c.get(&[i, j, k]) != coeff {
                    return Err(GeometryError::BracketAntisymmetry { i, j, k });
                }
                continue;
            }
            given[slot] = true;
            given[(j * n + i) * n + k] = true;
            c.set(&[i, j, k], coeff.clone());
            c.set(&[j, i, k], -coeff);
        }
        Self::build(name, spec, metric, c)
    }

    /// Frame model from a full structure-function array `c[i][j][k]`.
    pub fn frame_from_structure(
        name: &str,
        spec: DerivationSpec,
        metric: Vec<Vec<Expr>>,
        structure: TensorField,
    ) -> Result<Self, GeometryError> {
        if !spec.is_frame() {
            return Err(GeometryError::Invalid("frame model needs a frame symbol table".into()));
        }
        Self::build(name, spec, metric, structure)
    }

    fn build(name: &str, spec: DerivationSpec, metric: Vec<Vec<Expr>>, c: TensorField) -> Result<Self, GeometryError> {
        let n = spec.dim();
        if n == 0 {
            return Err(GeometryError::Invalid("dimension must be positive".into()));
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(GeometryError::Shape(format!("metric must be {n}x{n}")));
        }
        if c.valence() != (0, 3) || c.dim() != n {
            return Err(GeometryError::Shape("structure functions must be an n^3 array".into()));
        }
        for row in &metric {
            for e in row {
                spec.check(e)?;
            }
        }
        for e in c.components() {
            spec.check(e)?;
        }
        for i in 0..n {
            for j in 0..i {
                if metric[i][j] != metric[j][i] {
                    return Err(GeometryError::MetricNotSymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !(c.get(&[i, j, k]) + c.get(&[j, i, k])).is_zero() {
                        return Err(GeometryError::BracketAntisymmetry { i, j, k });
                    }
                }
            }
        }
        let determinant = determinant(&metric);
        if determinant.is_zero() {
            return Err(GeometryError::SingularMetric);
        }
        let adj = adjugate(&metric);
        let inv_det = determinant.recip()?;
        let inverse = TensorField::from_fn(n, 2, 0, |ix| Ok::<_, GeometryError>(&adj[ix[0]][ix[1]] * &inv_det))?;
        let metric = TensorField::from_fn(n, 0, 2, |ix| Ok::<_, GeometryError>(metric[ix[0]][ix[1]].clone()))?;
        let model = ManifoldModel {
            name: name.to_string(),
            spec,
            metric,
            inverse,
            determinant,
            brackets: c,
        };
        if let Some((l, witness)) = model.jacobi_residual()?.nonzero().into_iter().next() {
            return Err(GeometryError::Jacobi {
                indices: l,
                witness: witness.to_string(),
            });
        }
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn is_frame(&self) -> bool {
        self.spec.is_frame()
    }

    pub fn labels(&self) -> &[String] {
        self.spec.labels()
    }

    pub fn spec(&self) -> &DerivationSpec {
        &self.spec
    }

    /// Add a symbol to the model's table. Existing data is unaffected since
    /// it cannot mention the new name.
    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<(), GeometryError> {
        self.spec.declare(name, kind)?;
        Ok(())
    }

    pub fn metric(&self) -> &TensorField {
        &self.metric
    }

    pub fn g(&self, i: usize, j: usize) -> &Expr {
        self.metric.get(&[i, j])
    }

    pub fn metric_inverse(&self) -> &TensorField {
        &self.inverse
    }

    pub fn g_inv(&self, i: usize, j: usize) -> &Expr {
        self.inverse.get(&[i, j])
    }

    pub fn determinant(&self) -> &Expr {
        &self.determinant
    }

    /// Structure functions `c[i][j][k]`; zero in chart mode.
    pub fn structure_functions(&self) -> &TensorField {
        &self.brackets
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Expr {
        self.brackets.get(&[i, j, k])
    }

    /// Derivative of a scalar along basis direction `i`.
    pub fn d(&self, f: &Expr, i: usize) -> Result<Expr, GeometryError> {
        Ok(self.spec.differentiate(f, i)?)
    }

    /// `X(f)` for a vector field `X`.
    pub fn apply_vector(&self, x: &TensorField, f: &Expr) -> Result<Expr, GeometryError> {
        self.expect_valence(x, (1, 0))?;
        let mut terms = Vec::new();
        for i in 0..self.dim() {
            if !x.at(i).is_zero() {
                terms.push(x.at(i) * &self.d(f, i)?);
            }
        }
        Ok(Expr::sum(&terms))
    }

    /// Check a tensor's dimension and that every component is expressible.
    pub fn check_tensor(&self, t: &TensorField) -> Result<(), GeometryError> {
        if t.dim() != self.dim() && t.rank() > 0 {
            return Err(GeometryError::Shape(format!(
                "field of dimension {} on a model of dimension {}",
                t.dim(),
                self.dim()
            )));
        }
        for e in t.components() {
            self.spec.check(e)?;
        }
        Ok(())
    }

    pub(crate) fn expect_valence(&self, t: &TensorField, v: (usize, usize)) -> Result<(), GeometryError> {
        if t.valence() != v || t.dim() != self.dim() {
            return Err(GeometryError::Shape(format!(
                "expected valence {v:?} in dimension {}, got {:?} in dimension {}",
                self.dim(),
                t.valence(),
                t.dim()
            )));
        }
        Ok(())
    }

    /// Metric inner product `g(X, Y)`.
    pub fn inner(&self, x: &TensorField, y: &TensorField) -> Result<Expr, GeometryError> {
        self.metric.bilinear(x, y)
    }

    /// Index lowering `X ↦ g(X, ·)`.
    pub fn flat(&self, x: &TensorField) -> Result<TensorField, GeometryError> {
        self.expect_valence(x, (1, 0))?;
        let n = self.dim();
        Ok(TensorField::covector(
            (0..n)
                .map(|j| Expr::sum(&(0..n).map(|i| x.at(i) * self.g(i, j)).collect::<Vec<_>>()))
                .collect(),
        ))
    }

    /// Index raising of a 1-form.
    pub fn sharp(&self, w: &TensorField) -> Result<TensorField, GeometryError> {
        self.expect_valence(w, (0, 1))?;
        let n = self.dim();
        Ok(TensorField::vector(
            (0..n)
                .map(|i| Expr::sum(&(0..n).map(|j| self.g_inv(i, j) * w.at(j)).collect::<Vec<_>>()))
                .collect(),
        ))
    }

    /// Residual of the Jacobi identity, `J[i][j][k][l]` = component `l`
    /// of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobi_residual(&self) -> Result<TensorField, GeometryError> {
        let n = self.dim();
        let cyc = |i: usize, j: usize, k: usize, l: usize| -> Result<Expr, GeometryError> {
            // [[e_i,e_j],e_k] = c^m_ij [e_m,e_k] - e_k(c^m_ij) e_m
            let mut terms = Vec::new();
            for m in 0..n {
                terms.push(self.c(i, j, m) * self.c(m, k, l));
            }
            terms.push(-self.d(self.c(i, j, l), k)?);
            Ok(Expr::sum(&terms))
        };
        TensorField::from_fn(n, 1, 3, |ix| {
            let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
            Ok(&(&cyc(i, j, k, l)? + &cyc(j, k, i, l)?) + &cyc(k, i, j, l)?)
        })
    }
}

/// Determinant by cofactor expansion; the matrices here are at most 5x5.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut terms = Vec::new();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let c = &m[0][j] * &determinant(&minor(m, 0, j));
                terms.push(if j % 2 == 0 { c } else { -c });
            }
            Expr::sum(&terms)
        }
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Classical adjugate: `adj[i][j]` is the `(j,i)` cofactor.
pub fn adjugate(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Expr::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = determinant(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_expr;

    fn e(s: &str, spec: &DerivationSpec) -> Expr {
        parse_expr(s, spec).unwrap()
    }

    #[test]
    fn inverse_times_metric_is_identity() {
        let spec = DerivationSpec::chart(&["x", "y", "z"]);
        let g = vec![
            vec![e("exp(2*z^3)", &spec), e("x", &spec), Expr::zero()],
            vec![e("x", &spec), e("exp(-2*z^3)", &spec), Expr::zero()],
            vec![Expr::zero(), Expr::zero(), e("1 + y^2", &spec)],
        ];
        let m = ManifoldModel::chart("t", spec, g).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let s = Expr::sum(&(0..3).map(|j| m.g(i, j) * m.g_inv(j, k)).collect::<Vec<_>>());
                assert_eq!(s, if i == k { Expr::one() } else { Expr::zero() }, "({i},{k})");
            }
        }
    }

    #[test]
    fn rejects_bad_metrics() {
        let spec = DerivationSpec::chart(&["x", "y"]);
        let asym = vec![vec![Expr::one(), Expr::int(2)], vec![Expr::zero(), Expr::one()]];
        assert!(matches!(
            ManifoldModel::chart("a", spec.clone(), asym),
            Err(GeometryError::MetricNotSymmetric { .. })
        ));
        let singular = vec![vec![Expr::one(), Expr::one()], vec![Expr::one(), Expr::one()]];
        assert!(matches!(
            ManifoldModel::chart("s", spec, singular),
            Err(GeometryError::SingularMetric)
        ));
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e1 is not a Lie algebra.
        let spec = DerivationSpec::frame(&["e1", "e2", "e3"]);
        let g = (0..3)
            .map(|i| (0..3).map(|j| Expr::int((i == j) as i64)).collect())
            .collect();
        let br = [(0, 1, 2, Expr::one()), (1, 2, 0, Expr::one()), (2, 0, 0, Expr::one())];
        assert!(matches!(
            ManifoldModel::frame("bad", spec, g, &br),
            Err(GeometryError::Jacobi { .. })
        ));
    }

    #[test]
    fn frame_brackets_are_antisymmetrized() {
        let spec = DerivationSpec::frame(&["e1", "e2", "e3"]);
        let g = (0..3)
            .map(|i| (0..3).map(|j| Expr::int((i == j) as i64)).collect())
            .collect();
        let m = ManifoldModel::frame(
            "so3",
            spec,
            g,
            &[(0, 1, 2, Expr::one()), (1, 2, 0, Expr::one()), (2, 0, 1, Expr::one())],
        )
        .unwrap();
        assert_eq!(m.c(1, 0, 2), &Expr::int(-1));
        let spec2 = DerivationSpec::frame(&["e1", "e2", "e3"]);
        let g2 = (0..3)
            .map(|i| (0..3).map(|j| Expr::int((i == j) as i64)).collect())
            .collect();
        let consistent = [(0, 1, 2, Expr::one()), (1, 0, 2, Expr::int(-1))];
        assert!(ManifoldModel::frame("ok", spec2, g2, &consistent).is_ok());
        let conflicting = [(0, 1, 2, Expr::one()), (1, 0, 2, Expr::one())];
        let spec = DerivationSpec::frame(&["e1", "e2", "e3"]);
        let g = (0..3)
            .map(|i| (0..3).map(|j| Expr::int((i == j) as i64)).collect())
            .collect();
        assert!(ManifoldModel::frame("c", spec, g, &conflicting).is_err());
    }
}
