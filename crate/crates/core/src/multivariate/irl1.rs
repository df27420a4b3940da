//! Iteratively reweighted `ℓ¹` heuristic. Gives feasible upper bounds, never
//! a certificate of optimality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::exact::beyond_cap;
use super::reformulation::ReformulatedProblem;
use super::solution::{lp_cost, Method, SparseSolution};
use super::support::{candidates, free_coords, Restricted};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};

#[derive(Clone, Debug, PartialEq)]
pub struct Irl1Config {
    pub restarts: usize,
    pub seed: u64,
    /// Smoothing schedule, from large to small.
    pub eps_start: f64,
    pub eps_end: f64,
    /// Weighted solves per smoothing level.
    pub iters_per_eps: usize,
}

impl Default for Irl1Config {
    fn default() -> Self {
        Self { restarts: 5, seed: 0, eps_start: 1e-1, eps_end: 1e-6, iters_per_eps: 3 }
    }
}

/// `min Σ w_k |z_k|` over the problem restricted to `vars`, via `z = z⁺ - z⁻`.
fn weighted_l1(problem: &ReformulatedProblem, sys: &Restricted<f64>, weights: &[f64]) -> Result<Option<Vec<f64>>> {
    let n = sys.vars.len();
    let split = |row: &[f64]| -> Vec<f64> { row.iter().copied().chain(row.iter().map(|v| -v)).collect() };
    let build = |boxed: bool| {
        let mut lp = LinearProgram::<f64>::new(2 * n);
        lp.set_objective(weights.iter().chain(weights).copied().collect());
        if boxed {
            for j in 0..2 * n {
                lp.set_bounds(j, Some(0.0), Some(problem.radius));
            }
        }
        for (row, b) in &sys.eq {
            lp.add_row(split(row), Cmp::Eq, *b);
        }
        for (row, b) in &sys.ineq[..sys.num_cone_rows()] {
            lp.add_row(split(row), Cmp::Ge, *b);
        }
        lp
    };
    // The box rarely binds; add it only when needed.
    for boxed in [false, true] {
        match build(boxed).solve()? {
            LpOutcome::Optimal { x, .. } => {
                let z: Vec<f64> = (0..n).map(|k| x[k] - x[n + k]).collect();
                if z.iter().all(|v| v.abs() <= problem.radius) {
                    return Ok(Some(z));
                }
            }
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => {
                return Err(Error::Internal("weighted l1 program unbounded".into()));
            }
        }
    }
    Ok(None)
}

fn run(problem: &ReformulatedProblem, vars: &[usize], p: f64, cfg: &Irl1Config, restart: usize) -> Result<Vec<f64>> {
    let sys = Restricted::<f64>::new(problem, vars)?;
    let pen: Vec<bool> = vars.iter().map(|&k| problem.is_penalized(k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut w: Vec<f64> = pen
        .iter()
        .map(|&b| match (b, restart) {
            (false, _) => 0.0,
            (true, 0) => 1.0,
            (true, _) => rng.random_range(0.5..1.5),
        })
        .collect();
    let mut z = Vec::new();
    let mut eps = cfg.eps_start;
    loop {
        for _ in 0..cfg.iters_per_eps {
            z = weighted_l1(problem, &sys, &w)?
                .ok_or_else(|| Error::Infeasible("no interpolant within the box".into()))?;
            for ((wk, zk), &b) in w.iter_mut().zip(&z).zip(&pen) {
                if b {
                    *wk = (zk.abs() + eps).powf(p - 1.0);
                }
            }
        }
        if eps <= cfg.eps_end {
            break;
        }
        eps = (eps / 10.0).max(cfg.eps_end);
    }
    // Drop negligible entries and re-solve on what is left.
    let top = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let keep: Vec<usize> = (0..vars.len()).filter(|&k| !pen[k] || z[k].abs() > 1e-9 * top).collect();
    let kept_vars: Vec<usize> = keep.iter().map(|&k| vars[k]).collect();
    let kept_sys = Restricted::<f64>::new(problem, &kept_vars)?;
    let kept_w: Vec<f64> = keep.iter().map(|&k| w[k]).collect();
    let mut full = vec![0.0; problem.num_vars()];
    match weighted_l1(problem, &kept_sys, &kept_w)? {
        Some(zk) => {
            for (k, v) in kept_vars.iter().zip(zk) {
                full[*k] = v;
            }
        }
        None => {
            for (k, v) in vars.iter().zip(&z) {
                full[*k] = *v;
            }
        }
    }
    // Exact zeros for float dust.
    for v in full.iter_mut() {
        if v.abs() <= 1e-12 * top {
            *v = 0.0;
        }
    }
    Ok(full)
}

/// Best of `cfg.restarts` reweighted runs; restart 0 starts from plain `ℓ¹`,
/// the others from random weights drawn from stream `r` of `cfg.seed`.
pub fn solve_lp_irl1(problem: &ReformulatedProblem, p: f64, cfg: &Irl1Config) -> Result<SparseSolution> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} is outside (0, 1)")));
    }
    if cfg.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let cands = candidates(problem)?;
    let mut blocks: Vec<usize> = cands.iter().map(|c| c.block).collect();
    blocks.dedup();
    let w = problem.width();
    let mut vars: Vec<usize> = blocks.iter().flat_map(|b| b * w..(b + 1) * w).collect();
    vars.extend(free_coords(problem, &blocks));
    vars.sort_unstable();
    vars.dedup();
    let runs: Vec<Vec<f64>> =
        (0..cfg.restarts).into_par_iter().map(|r| run(problem, &vars, p, cfg, r)).collect::<Result<_>>()?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for z in runs {
        let c = lp_cost(problem, &z, p);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, z));
        }
    }
    let (_, z) = best.expect("at least one restart");
    let caveat = beyond_cap(problem, &cands, 0);
    let sol = SparseSolution::new(problem, z, None, &[p], Method::Irl1, caveat);
    sol.check_feasible(problem)?;
    Ok(sol)
}
