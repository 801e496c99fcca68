//! Mixed multidimensional integral operators with piecewise constant kernels.
//!
//! Operators of the form
//!
//! ```text
//! (A u)(k) = Σ_{α ⊆ {1..N}} ∫_{[0,1)^|α|} A_α(k, x_α) u(k_ᾱ ⋄ x_α) dx_α
//! ```
//!
//! whose kernels `A_α` are constant on the cells of a uniform `p`-grid form a
//! finite-dimensional algebra. [`representation::sigma`] maps it explicitly
//! onto a product of full matrix algebras, one block `B_α(i)` of size
//! `p^|α|` for every subset `α` and every multi-index `i` over the remaining
//! dimensions. Inverses, spectra, traces, determinants and exponentials are
//! then computed block by block; [`oracle`] cross-checks all of it against the
//! dense matrix of the operator restricted to finer step functions.

pub mod approx;
pub mod error;
pub mod indexing;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod oracle;
pub mod random;
pub mod representation;
pub mod spectral;

pub use error::{Error, Result};
pub use indexing::{enumerate_indices, enumerate_subsets, DimSubset, MultiIndex};
pub use linalg::{CMatrix, C64};
pub use operator::{StepFunction, StepOperator};
pub use representation::{sigma, sigma_inverse, Representation};
