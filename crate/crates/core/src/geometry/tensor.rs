use std::fmt;

use crate::symbolic::Expr;

use super::GeometryError;

/// Components of a tensor of valence `(p, q)` over a model's basis.
///
/// Components are stored row-major with the `p` contravariant indices first,
/// so a `(1,1)` field `A` has `A[i][j]` = component `i` of `A(e_j)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TensorField {
    dim: usize,
    upper: usize,
    lower: usize,
    components: Vec<Expr>,
}

impl TensorField {
    pub fn zeros(dim: usize, upper: usize, lower: usize) -> Self {
        let len = dim.pow((upper + lower) as u32);
        TensorField {
            dim,
            upper,
            lower,
            components: vec![Expr::zero(); len],
        }
    }

    pub fn from_components(
        dim: usize,
        upper: usize,
        lower: usize,
        components: Vec<Expr>,
    ) -> Result<Self, GeometryError> {
        let want = dim.pow((upper + lower) as u32);
        if components.len() != want {
            return Err(GeometryError::Shape(format!(
                "valence ({upper},{lower}) in dimension {dim} needs {want} components, got {}",
                components.len()
            )));
        }
        Ok(TensorField {
            dim,
            upper,
            lower,
            components,
        })
    }

    /// Build by evaluating `f` at every multi-index.
    pub fn from_fn<E>(
        dim: usize,
        upper: usize,
        lower: usize,
        mut f: impl FnMut(&[usize]) -> Result<Expr, E>,
    ) -> Result<Self, E> {
        let rank = upper + lower;
        let mut components = Vec::with_capacity(dim.pow(rank as u32));
        for idx in MultiIndex::new(dim, rank) {
            components.push(f(&idx)?);
        }
        Ok(TensorField {
            dim,
            upper,
            lower,
            components,
        })
    }

    pub fn vector(components: Vec<Expr>) -> Self {
        TensorField {
            dim: components.len(),
            upper: 1,
            lower: 0,
            components,
        }
    }

    pub fn covector(components: Vec<Expr>) -> Self {
        TensorField {
            dim: components.len(),
            upper: 0,
            lower: 1,
            components,
        }
    }

    pub fn scalar(value: Expr) -> Self {
        TensorField {
            dim: 0,
            upper: 0,
            lower: 0,
            components: vec![value],
        }
    }

    /// Basis vector `e_i`.
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        let mut v = TensorField::zeros(dim, 1, 0);
        v.components[i] = Expr::one();
        v
    }

    /// Dual basis covector `e^i`.
    pub fn basis_covector(dim: usize, i: usize) -> Self {
        let mut v = TensorField::zeros(dim, 0, 1);
        v.components[i] = Expr::one();
        v
    }

    /// Identity endomorphism as a `(1,1)` field.
    pub fn identity(dim: usize) -> Self {
        let mut t = TensorField::zeros(dim, 1, 1);
        for i in 0..dim {
            t.components[i * dim + i] = Expr::one();
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Expr> {
        self.components
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "index rank");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "index {i} out of range");
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.components[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Expr) {
        let o = self.offset(idx);
        self.components[o] = value;
    }

    /// Component of a vector or covector.
    pub fn at(&self, i: usize) -> &Expr {
        self.get(&[i])
    }

    pub fn indices(&self) -> MultiIndex {
        MultiIndex::new(self.dim, self.rank())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    /// Nonzero components with their multi-indices, in index order.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, Expr)> {
        self.indices()
            .zip(&self.components)
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| (i, e.clone()))
            .collect()
    }

    pub fn map(&self, f: impl FnMut(&Expr) -> Expr) -> Self {
        TensorField {
            components: self.components.iter().map(f).collect(),
            ..self.clone()
        }
    }

    fn same_shape(&self, other: &Self) -> Result<(), GeometryError> {
        if self.dim != other.dim || self.valence() != other.valence() {
            return Err(GeometryError::Shape(format!(
                "cannot combine valence {:?} (dim {}) with {:?} (dim {})",
                self.valence(),
                self.dim,
                other.valence(),
                other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeometryError> {
        self.same_shape(other)?;
        Ok(TensorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GeometryError> {
        self.same_shape(other)?;
        Ok(TensorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, f: &Expr) -> Self {
        self.map(|e| e * f)
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    /// Tensor product; indices are reordered so all upper ones come first.
    pub fn tensor(&self, other: &Self) -> Result<Self, GeometryError> {
        if self.dim != other.dim && self.rank() > 0 && other.rank() > 0 {
            return Err(GeometryError::Shape("tensor product across dimensions".into()));
        }
        let dim = self.dim.max(other.dim);
        let (p1, q1) = self.valence();
        let (p2, q2) = other.valence();
        TensorField::from_fn(dim, p1 + p2, q1 + q2, |idx| {
            let mut a = idx[..p1].to_vec();
            a.extend_from_slice(&idx[p1 + p2..p1 + p2 + q1]);
            let mut b = idx[p1..p1 + p2].to_vec();
            b.extend_from_slice(&idx[p1 + p2 + q1..]);
            Ok(self.get(&a) * other.get(&b))
        })
    }

    /// Apply a `(1,1)` field to a vector.
    pub fn apply(&self, v: &TensorField) -> Result<TensorField, GeometryError> {
        if self.valence() != (1, 1) || v.valence() != (1, 0) || self.dim != v.dim {
            return Err(GeometryError::Shape("apply needs a (1,1) field and a vector".into()));
        }
        let n = self.dim;
        Ok(TensorField::vector(
            (0..n)
                .map(|i| Expr::sum(&(0..n).map(|j| self.get(&[i, j]) * v.at(j)).collect::<Vec<_>>()))
                .collect(),
        ))
    }

    /// Composition `self ∘ other` of `(1,1)` fields.
    pub fn compose(&self, other: &TensorField) -> Result<TensorField, GeometryError> {
        if self.valence() != (1, 1) || other.valence() != (1, 1) || self.dim != other.dim {
            return Err(GeometryError::Shape("compose needs two (1,1) fields".into()));
        }
        let n = self.dim;
        TensorField::from_fn(n, 1, 1, |ix| {
            Ok(Expr::sum(
                &(0..n)
                    .map(|m| self.get(&[ix[0], m]) * other.get(&[m, ix[1]]))
                    .collect::<Vec<_>>(),
            ))
        })
    }

    /// Pairing of a covector with a vector.
    pub fn pair(&self, v: &TensorField) -> Result<Expr, GeometryError> {
        if self.valence() != (0, 1) || v.valence() != (1, 0) || self.dim != v.dim {
            return Err(GeometryError::Shape("pair needs a covector and a vector".into()));
        }
        Ok(Expr::sum(
            &(0..self.dim).map(|i| self.at(i) * v.at(i)).collect::<Vec<_>>(),
        ))
    }

    /// Evaluate a `(0,2)` field on two vectors.
    pub fn bilinear(&self, x: &TensorField, y: &TensorField) -> Result<Expr, GeometryError> {
        if self.valence() != (0, 2) || x.valence() != (1, 0) || y.valence() != (1, 0) {
            return Err(GeometryError::Shape(
                "bilinear needs a (0,2) field and two vectors".into(),
            ));
        }
        let n = self.dim;
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                terms.push(self.get(&[i, j]) * &(x.at(i) * y.at(j)));
            }
        }
        Ok(Expr::sum(&terms))
    }

    /// Swap two index slots of the same kind.
    pub fn transpose(&self, a: usize, b: usize) -> TensorField {
        let mut out = self.clone();
        for idx in self.indices() {
            let mut j = idx.clone();
            j.swap(a, b);
            out.set(&j, self.get(&idx).clone());
        }
        out
    }

    /// Contract upper slot `a` with lower slot `b` (slot numbers count
    /// from the start of their own group).
    pub fn contract(&self, a: usize, b: usize) -> Result<TensorField, GeometryError> {
        let (p, q) = self.valence();
        if a >= p || b >= q {
            return Err(GeometryError::Shape("contraction slot out of range".into()));
        }
        let n = self.dim;
        TensorField::from_fn(n, p - 1, q - 1, |idx| {
            let mut terms = Vec::with_capacity(n);
            for m in 0..n {
                let mut full: Vec<usize> = idx[..p - 1].to_vec();
                full.insert(a, m);
                let mut low = idx[p - 1..].to_vec();
                low.insert(b, m);
                full.extend(low);
                terms.push(self.get(&full).clone());
            }
            Ok(Expr::sum(&terms))
        })
    }
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorField({},{}; dim {}) [", self.upper, self.lower, self.dim)?;
        for (k, (idx, e)) in self.nonzero().iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{idx:?}: {e}")?;
        }
        write!(f, "]")
    }
}

/// Row-major iterator over `{0..dim}^rank`.
#[derive(Clone, Debug)]
pub struct MultiIndex {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(dim: usize, rank: usize) -> Self {
        let current = if dim == 0 && rank > 0 {
            None
        } else {
            Some(vec![0; rank])
        };
        MultiIndex { dim, current }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let mut nxt = cur.clone();
        let mut k = nxt.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            nxt[k] += 1;
            if nxt[k] < self.dim {
                self.current = Some(nxt);
                break;
            }
            nxt[k] = 0;
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_order() {
        let all: Vec<_> = MultiIndex::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(MultiIndex::new(3, 0).count(), 1);
    }

    #[test]
    fn contraction_of_identity_is_dimension() {
        let t = TensorField::identity(4).contract(0, 0).unwrap();
        assert_eq!(t.components(), &[Expr::int(4)]);
    }

    #[test]
    fn tensor_product_orders_upper_first() {
        let v = TensorField::basis_vector(3, 2);
        let w = TensorField::basis_covector(3, 1);
        let t = w.tensor(&v).unwrap();
        assert_eq!(t.valence(), (1, 1));
        assert!(t.get(&[2, 1]).is_one());
        assert_eq!(t.nonzero().len(), 1);
    }

    #[test]
    fn shape_errors() {
        let a = TensorField::zeros(3, 1, 0);
        let b = TensorField::zeros(3, 0, 1);
        assert!(a.add(&b).is_err());
        assert!(TensorField::from_components(3, 1, 1, vec![Expr::zero(); 8]).is_err());
    }
}
