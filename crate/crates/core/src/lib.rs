//! Bound entangled Gaussian states: construction, certification,
//! symplectic decomposition and linear-optical synthesis.
//!
//! Conventions: hbar = 1, vacuum covariance = identity, quadratures
//! interleaved as (q1, p1, ..., qn, pn) unless a value says otherwise.
//! Mode indices are 0-based in the library API and 1-based in files and on
//! the command line.

// `!(x <= tol)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound_family;
pub mod circuit;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod sdp;
pub mod separability;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use gaussian::{Bipartition, CovarianceMatrix, Ordering, SymplecticForm, SymplecticTransform};
