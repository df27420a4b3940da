//! Threshold below which minimal `V_p` interpolants are sparsest.
//!
//! Per run, the vertex preferred as `p → 0⁺` is compared with every other
//! vertex. The difference of two cost curves is a finite exponential sum
//! `Σ a_i b_i^p`, which has finitely many zeros, so a grid scan followed by
//! bisection locates the first crossing reliably.

use rayon::prelude::*;

use super::profile::{decompose_runs, slope_profile, CurvatureRun, SlopeProfile};
use super::vertex::{run_cost_curve, sparsest_vertex, CostCurve, VertexChoice, COST_TIE_TOL};
use crate::dataset::Dataset1D;
use crate::error::Result;
use crate::scalar::Scalar;

/// Stand-in for `p → 0⁺` when ranking vertices by cost.
pub const P_NEAR_ZERO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct PstarConfig {
    /// Interior grid points `k / (grid + 1)`, `k = 1..=grid`.
    pub grid: usize,
    /// Width of the final bisection bracket.
    pub tol: f64,
}

impl Default for PstarConfig {
    fn default() -> Self {
        Self { grid: 512, tol: 1e-10 }
    }
}

/// Crossing diagnostics for one run with free slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct RunThreshold {
    pub run: CurvatureRun,
    pub run_index: usize,
    /// Vertex preferred as `p → 0⁺`.
    pub sparsest: VertexChoice,
    pub sparsest_knots: usize,
    /// First `p` at which another vertex becomes at least as cheap, or 1.
    pub pstar: f64,
    /// The vertex responsible for `pstar`, if any crossing was found.
    pub crossed_by: Option<VertexChoice>,
    /// Vertices whose cost curve equals the sparsest one for every `p`.
    pub permanent_ties: Vec<VertexChoice>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PstarReport {
    /// Minimum over runs, 1 when no run has free slopes or nothing crosses.
    pub value: f64,
    pub runs: Vec<RunThreshold>,
}

/// Smallest `p ∈ (0, 1)` with `other(p) ≤ winner(p)`, or `None`.
pub fn first_crossing(winner: &CostCurve, other: &CostCurve, cfg: &PstarConfig) -> Option<f64> {
    let diff = |p: f64| other.eval(p) - winner.eval(p);
    let mut lo = P_NEAR_ZERO;
    if diff(lo) <= 0.0 {
        return Some(lo);
    }
    let grid = (1..=cfg.grid).map(|k| k as f64 / (cfg.grid + 1) as f64);
    for hi in grid {
        if hi <= lo {
            continue;
        }
        if diff(hi) <= 0.0 {
            let mut hi = hi;
            while hi - lo > cfg.tol {
                let mid = 0.5 * (lo + hi);
                if diff(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        lo = hi;
    }
    None
}

fn same_curve(a: &CostCurve, b: &CostCurve) -> bool {
    let (a, b) = (a.sorted(), b.sorted());
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= COST_TIE_TOL * x.abs().max(y.abs()))
}

pub fn run_threshold<T: Scalar>(
    run_index: usize,
    run: &CurvatureRun,
    sp: &SlopeProfile<T>,
    cfg: &PstarConfig,
) -> Result<RunThreshold> {
    let (winner, wcurve) = sparsest_vertex(run_index, run, sp)?;
    let free = run.free_slopes();
    let outcomes: Vec<(u64, bool, Option<f64>)> = (0..1u64 << free)
        .into_par_iter()
        .filter(|&mask| mask != winner.mask())
        .map(|mask| {
            let v = VertexChoice::from_mask(run_index, free, mask);
            let c = run_cost_curve(run, &v.alpha, sp);
            if same_curve(&wcurve, &c) {
                (mask, true, None)
            } else {
                (mask, false, first_crossing(&wcurve, &c, cfg))
            }
        })
        .collect();
    let mut pstar = 1.0;
    let mut crossed_by = None;
    let mut permanent_ties = Vec::new();
    for (mask, tie, crossing) in outcomes {
        if tie {
            permanent_ties.push(VertexChoice::from_mask(run_index, free, mask));
        } else if let Some(p) = crossing {
            if p < pstar {
                pstar = p;
                crossed_by = Some(VertexChoice::from_mask(run_index, free, mask));
            }
        }
    }
    Ok(RunThreshold {
        run: *run,
        run_index,
        sparsest_knots: wcurve.knots(),
        sparsest: winner,
        pstar,
        crossed_by,
        permanent_ties,
    })
}

pub fn compute_pstar<T: Scalar>(d: &Dataset1D<T>, cfg: &PstarConfig) -> Result<PstarReport> {
    let sp = slope_profile(d);
    if d.len() < 3 {
        return Ok(PstarReport { value: 1.0, runs: Vec::new() });
    }
    let dec = decompose_runs(&sp);
    let mut runs = Vec::new();
    for (r, run) in dec.runs.iter().enumerate() {
        if run.m >= 2 {
            runs.push(run_threshold(r, run, &sp, cfg)?);
        }
    }
    let value = runs.iter().map(|r| r.pstar).fold(1.0, f64::min);
    Ok(PstarReport { value, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_bracketed_crossing() {
        let winner = CostCurve { magnitudes: vec![5.0, 5.0] };
        let other = CostCurve { magnitudes: vec![0.05, 9.85, 0.1] };
        let p = first_crossing(&winner, &other, &PstarConfig::default()).unwrap();
        assert!(p > 0.20 && p < 0.21, "{p}");
        let d = |p: f64| other.eval(p) - winner.eval(p);
        assert!(d(p - 1e-9) > 0.0 && d(p + 1e-9) < 0.0);
    }

    #[test]
    fn no_crossing() {
        let winner = CostCurve { magnitudes: vec![1.0] };
        let other = CostCurve { magnitudes: vec![1.0, 1.0] };
        assert_eq!(first_crossing(&winner, &other, &PstarConfig::default()), None);
    }
}
