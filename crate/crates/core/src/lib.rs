//! Exact sampling from high-dimensional Gaussians of the form
//! `N(μ, Σ)`, `Σ = (ΦᵀΦ + D⁻¹)⁻¹`, `μ = ΣΦᵀα`, in O(n²p) time for diagonal
//! `D`, and a horseshoe-prior Gibbs sampler for sparse linear regression
//! built on it.
//!
//! ```
//! use scalemix::{DenseMatrix, RngStream, ScaleStructure, StructuredGaussian};
//!
//! let phi = DenseMatrix::from_rows(&[[1.0, 0.5, -0.2]]).unwrap();
//! let g = StructuredGaussian::new(phi, ScaleStructure::diagonal(vec![1.0; 3]).unwrap(), vec![0.4]).unwrap();
//! let mut rng = RngStream::new(42, 0);
//! let draw = g.fast_sample(&mut rng).unwrap();
//! assert_eq!(draw.theta.len(), 3);
//! ```

// `!(x > t)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod horseshoe;
pub mod linalg;
pub mod rng;
pub mod summary;

pub use error::{Error, Result};
pub use gaussian::{AugmentationBlocks, AugmentedDraw, FastSampler, ScaleStructure, StructuredGaussian};
pub use horseshoe::{run_chain, run_chain_with, ChainConfig, ChainResult, HorseshoeState, RegressionData, ScaleDraw};
pub use linalg::{cholesky, gemm, gemv, solve_spd, DenseMatrix, DenseVector, SpdFactor};
pub use rng::RngStream;
pub use summary::CoefSummary;
