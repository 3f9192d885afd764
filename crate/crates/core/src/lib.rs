//! Exact tensor calculus on pseudo-Riemannian manifolds carrying almost
//! paracontact structures, with verification of δ-almost (gradient) Yamabe
//! soliton equations and the identities that accompany them.
//!
//! The crate is layered bottom-up:
//!
//! - [`symbolic`]: normalized rational expressions with exponential
//!   generators, the only place where arithmetic happens.
//! - [`geometry`]: manifold models in chart or frame mode, the Levi-Civita
//!   connection, curvature, Lie and exterior calculus.
//! - [`structures`]: the tensors `(φ, ξ, η, g)`, axiom checks, structure
//!   classification and the built-in example manifolds.
//! - [`soliton`]: soliton residuals, parameter extraction and the identity
//!   suite.
//!
//! Every verdict is decided by exact normalization; nothing is compared
//! against a tolerance.

pub mod geometry;
pub mod report;
pub mod soliton;
pub mod structures;
pub mod symbolic;

pub use symbolic::{parse_expr, DerivationSpec, Expr};
