//! Multivariate interpolation at desk scale.
//!
//! Fixing which data points each neuron is active on turns the network
//! into a linear map of its parameters. Enumerating those activation
//! patterns lifts the problem to
//!
//! ```text
//! minimize Σ|z_i|^p   subject to   A z = y,  G z ≥ 0,  ‖z‖∞ ≤ R
//! ```
//!
//! with one `ν` and one `ω` block of `d + 1` coordinates per pattern. The
//! solvers here work on that lifted problem and map the result back to a
//! network with [`reconstruct_network`].
//!
//! ```
//! use lpsi::multivariate::*;
//! use lpsi::DatasetND;
//!
//! let ds = DatasetND::new(vec![vec![-1.0], vec![0.0], vec![1.0]], vec![0.0, 1.0, 0.0])?;
//! let pats = enumerate_patterns(&ds, PatternMode::All)?;
//! let problem = build_reformulation(&ds, pats, default_radius(&ds), true)?;
//! let best = solve_l0(&problem, MAX_SUPPORT_CAP)?.found()?;
//! assert_eq!(best.l0, 3);
//! let net = reconstruct_network(&best, &problem)?;
//! assert!(net.neurons.len() <= 3);
//! # Ok::<(), lpsi::Error>(())
//! ```

mod bound;
mod exact;
mod irl1;
mod patterns;
mod reconstruct;
mod reformulation;
mod solution;
mod support;

pub use bound::{pstar_bound, PstarBound};
pub use exact::{solve_l0, solve_lp_exact, ExactLp, L0Outcome, MAX_SUPPORT_CAP};
pub use irl1::{solve_lp_irl1, Irl1Config};
pub use patterns::{
    enumerate_patterns, is_realizable, ActivationPattern, PatternMode, DEFAULT_ALL_POINTS, MAX_ALL_POINTS,
};
pub use reconstruct::{reconstruct_network, NeuronND, ReconstructedNet};
pub use reformulation::{build_reformulation, default_radius, Coord, ReformulatedProblem, Side};
pub use solution::{lp_cost, Method, SparseSolution, TRACKED_P};
