use serde::{Deserialize, Serialize};

use super::reformulation::ReformulatedProblem;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Exponents whose costs every solution records.
pub const TRACKED_P: [f64; 3] = [0.1, 0.5, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SupportEnum,
    Irl1,
    L0Oracle,
}

/// A feasible point of the lifted problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSolution {
    pub z: Vec<f64>,
    /// Exact coordinates when an exact solver certified the point.
    pub z_exact: Option<Vec<Rational>>,
    /// Indices of all nonzero coordinates.
    pub support: Vec<usize>,
    /// Number of nonzero penalized coordinates.
    pub l0: usize,
    /// `(p, Σ|z_i|^p)` over penalized coordinates, sorted by `p`.
    pub lp_costs: Vec<(f64, f64)>,
    pub method: Method,
    /// Set when the optimum might use more coordinates than were searched.
    pub caveat: bool,
}

/// `Σ |z_i|^p` over penalized coordinates; `p = 0` counts them.
pub fn lp_cost(problem: &ReformulatedProblem, z: &[f64], p: f64) -> f64 {
    z.iter()
        .enumerate()
        .filter(|(k, v)| problem.is_penalized(*k) && **v != 0.0)
        .map(|(_, v)| if p == 0.0 { 1.0 } else { v.abs().powf(p) })
        .sum()
}

impl SparseSolution {
    pub(crate) fn new(
        problem: &ReformulatedProblem,
        z: Vec<f64>,
        z_exact: Option<Vec<Rational>>,
        extra_p: &[f64],
        method: Method,
        caveat: bool,
    ) -> Self {
        let support: Vec<usize> = (0..z.len()).filter(|&k| z[k] != 0.0).collect();
        let l0 = support.iter().filter(|&&k| problem.is_penalized(k)).count();
        let mut ps: Vec<f64> = TRACKED_P.iter().chain(extra_p).copied().collect();
        ps.sort_by(|a, b| a.partial_cmp(b).expect("finite p"));
        ps.dedup();
        let lp_costs = ps.into_iter().map(|p| (p, lp_cost(problem, &z, p))).collect();
        Self { z, z_exact, support, l0, lp_costs, method, caveat }
    }

    pub(crate) fn from_exact(
        problem: &ReformulatedProblem,
        z: Vec<Rational>,
        extra_p: &[f64],
        method: Method,
        caveat: bool,
    ) -> Self {
        let zf = z.iter().map(|v| v.to_f64()).collect();
        Self::new(problem, zf, Some(z), extra_p, method, caveat)
    }

    pub fn cost(&self, p: f64) -> Option<f64> {
        self.lp_costs.iter().find(|(q, _)| *q == p).map(|(_, c)| *c)
    }

    /// Checks `A z = y` (1e-8), `G z ≥ -1e-10` and the box (1e-10).
    pub fn check_feasible(&self, problem: &ReformulatedProblem) -> Result<()> {
        if self.z.len() != problem.num_vars() {
            return Err(Error::Internal(format!(
                "solution has {} coordinates, problem has {}",
                self.z.len(),
                problem.num_vars()
            )));
        }
        let res = problem.residual(&self.z);
        if res > 1e-8 {
            return Err(Error::Infeasible(format!("A z differs from y by {res:e}")));
        }
        let cone = problem.cone_violation(&self.z);
        if cone > 1e-10 {
            return Err(Error::Infeasible(format!("pattern constraints violated by {cone:e}")));
        }
        let top = self.z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top > problem.radius + 1e-10 {
            return Err(Error::Infeasible(format!("max |z_i| = {top} exceeds R = {}", problem.radius)));
        }
        Ok(())
    }
}
