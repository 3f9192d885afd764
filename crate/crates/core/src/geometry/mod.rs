//! Tensor fields over chart or frame models, the Levi-Civita connection,
//! curvature, and Lie and exterior calculus.

mod calculus;
mod connection;
mod model;
mod tensor;

use thiserror::Error;

use crate::symbolic::SymbolicError;

pub use calculus::{
    antisymmetry_residual, divergence, exterior_derivative, gradient, hessian, lie_bracket, lie_derivative,
    lie_derivative_connection, symmetry_residual,
};
pub use connection::{
    bianchi_residual, covariant_derivative, covariant_derivative_vector, curvature_apply, levi_civita, lowered_riemann,
    ricci, ricci_operator, riemann, scalar_curvature, symmetry_residuals, ConnectionData, Curvature,
};
pub use model::{adjugate, determinant, ManifoldModel};
pub use tensor::{MultiIndex, TensorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("metric is not symmetric at ({i},{j})")]
    MetricNotSymmetric { i: usize, j: usize },
    #[error("metric determinant is zero")]
    SingularMetric,
    #[error("structure functions are not antisymmetric at [{i},{j}] -> {k}")]
    BracketAntisymmetry { i: usize, j: usize, k: usize },
    #[error("brackets violate the Jacobi identity at {indices:?}: {witness}")]
    Jacobi { indices: Vec<usize>, witness: String },
    #[error("connection check failed: {0}")]
    ConnectionCheck(String),
}
