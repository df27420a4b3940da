//! Minimum `ℓᵖ` path-norm interpolation with shallow ReLU networks.
//!
//! For `0 < p < 1` the `ℓᵖ` path norm of an interpolating network is a
//! surrogate for its number of active neurons that stays continuous in the
//! weights. This crate computes exact minimizers for univariate data, the
//! threshold `p*` below which they are also sparsest, and desk-scale
//! solutions of the multivariate problem through its activation-pattern
//! reformulation.
//!
//! ```
//! use lpsi::{solve, Dataset1D};
//!
//! let d = Dataset1D::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)])?;
//! let s = solve(&d, 0.5)?;
//! assert_eq!(s.f.num_knots(), 2);
//! assert!((s.report.lp_cost - 2.0 * 2f64.sqrt()).abs() < 1e-12);
//! # Ok::<(), lpsi::Error>(())
//! ```

pub mod cpwl;
pub mod dataset;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod multivariate;
pub mod network;
pub mod oracle1d;
pub mod scalar;
pub mod trainer;
pub mod univariate;

pub use cpwl::{Cpwl, Knot, PathNormReport};
pub use dataset::{Dataset1D, DatasetND};
pub use error::{Error, Result};
pub use network::{from_network, to_network, Neuron, ReluNet1D};
pub use scalar::{Rational, Scalar};
pub use univariate::{compute_pstar, min_l0, solve, PstarConfig};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/path_norms.md")]
    mod path_norms {}
    #[doc = include_str!("../../../book/src/univariate.md")]
    mod univariate {}
    #[doc = include_str!("../../../book/src/pstar.md")]
    mod pstar {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/multivariate.md")]
    mod multivariate {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
