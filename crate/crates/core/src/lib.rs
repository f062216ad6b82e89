//! Random graph models, matrix-free spectral operators, regularization and
//! spectral community detection, with a seeded Monte-Carlo harness for
//! measuring how far a sampled adjacency matrix strays from its expectation.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`] holds the sparse symmetric [`Graph`] and [`LabelVector`] types
//!   and their text formats.
//! - [`models`] samples graphs from block, latent-space and inhomogeneous
//!   models and builds structured expectation matrices.
//! - [`operator`] composes sparse, structured, rank-one and diagonally scaled
//!   terms into a [`SymmetricOperator`].
//! - [`eigen`] provides the Lanczos eigensolver, spectral norms and a dense
//!   Jacobi oracle.
//! - [`regularize`], [`detect`], [`bounds`] and [`experiments`] build on those.

pub mod bounds;
pub mod detect;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod models;
pub mod operator;
pub mod regularize;
pub mod rng;

pub use eigen::{dense_eig_oracle, spectral_norm, top_eigs, EigenPair, Which};
pub use error::{Error, Result};
pub use graph::{Graph, LabelVector};
pub use models::{ExpectedMatrix, ModelSpec};
pub use operator::{LinearOperator, SparseMatrix, SymmetricOperator};
