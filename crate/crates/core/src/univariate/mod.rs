//! Exact minimal `V_p` interpolation of univariate data.
//!
//! Every minimizer is affine outside runs of equal discrete curvature, and
//! inside a run of `m + 1` points it is determined by `m - 1` inner slopes
//! chosen at the vertices of `[0,1]^{m-1}`. The solver builds the forced
//! skeleton and enumerates those vertices per run.

mod profile;
mod pstar;
mod skeleton;
mod solve;
mod verify;
mod vertex;

pub use profile::{decompose_runs, slope_profile, CurvatureRun, Decomposition, Region, SlopeProfile};
pub use pstar::{compute_pstar, first_crossing, run_threshold, PstarConfig, PstarReport, RunThreshold, P_NEAR_ZERO};
pub use skeleton::{assemble, skeleton, Piece, Skeleton};
pub use solve::{assemble_choices, min_l0, solve, L0Result, SolveResult};
pub use verify::{
    verify, Check, VerifyReport, CHECK_FORCED_LINEAR, CHECK_INTERPOLATION, CHECK_KNOT_COUNT, CHECK_KNOT_RANGE,
    CHECK_LIPSCHITZ, CHECK_OPTIMALITY, CHECK_RUN_BRACKETS, CHECK_TOTAL_VARIATION,
};
pub use vertex::{
    inner_slopes, inner_slopes_at, run_cost_curve, run_cost_curve_at, solve_run, sparsest_vertex, CostCurve,
    RunSolution, VertexChoice, COST_TIE_TOL, MAX_FREE_SLOPES,
};
