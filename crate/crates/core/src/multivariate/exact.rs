//! Exhaustive solvers over supports of bounded size.

use rayon::prelude::*;

use super::reformulation::ReformulatedProblem;
use super::solution::{Method, SparseSolution};
use super::support::{
    candidates, combo_vars, combos, exact_vertex, feasible_point, vertices, Candidate, Restricted, Vertex,
};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Default and largest accepted support cap.
pub const MAX_SUPPORT_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum L0Outcome {
    Found(SparseSolution),
    /// No feasible point with at most `cap` nonzeros.
    CapExceeded {
        cap: usize,
        lower_bound: usize,
    },
}

impl L0Outcome {
    pub fn found(self) -> Result<SparseSolution> {
        match self {
            L0Outcome::Found(s) => Ok(s),
            L0Outcome::CapExceeded { cap, lower_bound } => Err(Error::ResourceCap(format!(
                "no interpolant with at most {cap} nonzero parameters; lower bound = {lower_bound}"
            ))),
        }
    }
}

fn check_cap(cap: usize) -> Result<()> {
    if cap > MAX_SUPPORT_CAP {
        return Err(Error::Domain(format!("support cap {cap} exceeds {MAX_SUPPORT_CAP}")));
    }
    Ok(())
}

fn zero_solution(problem: &ReformulatedProblem, extra_p: &[f64], method: Method) -> SparseSolution {
    let n = problem.num_vars();
    SparseSolution::from_exact(problem, vec![Rational::from_i64(0); n], extra_p, method, false)
}

fn scatter<T: Clone>(n: usize, zero: T, vars: &[usize], local: &[T]) -> Vec<T> {
    let mut z = vec![zero; n];
    for (k, v) in vars.iter().zip(local) {
        z[*k] = v.clone();
    }
    z
}

/// Fewest nonzero parameters, by increasing support size. Exact whenever it
/// returns [`L0Outcome::Found`].
pub fn solve_l0(problem: &ReformulatedProblem, cap: usize) -> Result<L0Outcome> {
    check_cap(cap)?;
    if problem.y().iter().all(|v| *v == 0.0) {
        return Ok(L0Outcome::Found(zero_solution(problem, &[], Method::L0Oracle)));
    }
    let cands = candidates(problem)?;
    for k in 1..=cap {
        let sets = combos(&cands, k);
        let hit = sets.par_iter().find_map_first(|combo| {
            let vars = combo_vars(problem, &cands, combo);
            feasible_point(problem, &vars).map(|o| o.map(|z| (vars, z))).transpose()
        });
        if let Some(hit) = hit {
            let (vars, local) = hit?;
            let z = scatter(problem.num_vars(), Rational::from_i64(0), &vars, &local);
            let sol = SparseSolution::from_exact(problem, z, &[], Method::L0Oracle, false);
            sol.check_feasible(problem)?;
            return Ok(L0Outcome::Found(sol));
        }
    }
    Ok(L0Outcome::CapExceeded { cap, lower_bound: cap + 1 })
}

/// Result of the exact `ℓᵖ` search.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactLp {
    pub solution: SparseSolution,
    /// Smallest nonzero coordinate magnitude over every extreme point seen.
    pub r_hat: Option<f64>,
    /// Extreme points enumerated.
    pub vertices: usize,
}

struct ComboBest {
    cost: f64,
    l0: usize,
    order: (usize, usize),
    vars: Vec<usize>,
    vertex: Vertex,
}

/// Coordinates this small relative to `R` count as zero.
fn zero_tol(problem: &ReformulatedProblem) -> f64 {
    1e-12 * problem.radius.max(1.0)
}

fn scan_combo(
    problem: &ReformulatedProblem,
    cands: &[Candidate],
    combo: &[usize],
    p: f64,
    order: (usize, usize),
) -> Result<(Option<ComboBest>, Option<f64>, usize)> {
    let vars = combo_vars(problem, cands, combo);
    let sys = Restricted::<f64>::new(problem, &vars)?;
    let vs = vertices(problem, &sys);
    let tol = zero_tol(problem);
    let mut best: Option<ComboBest> = None;
    let mut rmin: Option<f64> = None;
    let count = vs.len();
    for v in vs {
        let mut cost = 0.0;
        let mut l0 = 0;
        for (k, z) in vars.iter().zip(&v.z) {
            let a = z.abs();
            if a <= tol {
                continue;
            }
            rmin = Some(rmin.map_or(a, |r: f64| r.min(a)));
            if problem.is_penalized(*k) {
                cost += a.powf(p);
                l0 += 1;
            }
        }
        if best.as_ref().is_none_or(|b| better(cost, l0, b.cost, b.l0)) {
            best = Some(ComboBest { cost, l0, order, vars: vars.clone(), vertex: v });
        }
    }
    Ok((best, rmin, count))
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Lower cost wins; near-ties go to the smaller support.
fn better(cost: f64, l0: usize, best_cost: f64, best_l0: usize) -> bool {
    if tied(cost, best_cost) {
        l0 < best_l0
    } else {
        cost < best_cost
    }
}

/// Whether supports beyond `cap` could hold the optimum: optimal points
/// merge into at most `N` neurons of `d + 1` parameters each.
pub(crate) fn beyond_cap(problem: &ReformulatedProblem, cands: &[Candidate], cap: usize) -> bool {
    let mut blocks: Vec<usize> = cands.iter().map(|c| c.block).collect();
    blocks.dedup();
    let width = (0..problem.width()).filter(|&c| problem.is_penalized(c)).count();
    let useful = blocks.len() * width;
    cap < useful.min(problem.n() * width)
}

/// Global minimum of `Σ|z_i|^p` over points with at most `cap` nonzero
/// penalized coordinates, by enumerating extreme points of every
/// restricted polytope. The winner is re-derived in exact arithmetic.
pub fn solve_lp_exact(problem: &ReformulatedProblem, p: f64, cap: usize) -> Result<ExactLp> {
    check_cap(cap)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} is outside (0, 1)")));
    }
    if problem.y().iter().all(|v| *v == 0.0) {
        let solution = zero_solution(problem, &[p], Method::SupportEnum);
        return Ok(ExactLp { solution, r_hat: None, vertices: 1 });
    }
    let cands = candidates(problem)?;
    let mut all: Vec<ComboBest> = Vec::new();
    let mut r_hat: Option<f64> = None;
    let mut seen = 0;
    for k in 1..=cap {
        let sets = combos(&cands, k);
        let scanned: Vec<_> = sets
            .par_iter()
            .enumerate()
            .map(|(i, combo)| scan_combo(problem, &cands, combo, p, (k, i)))
            .collect::<Result<_>>()?;
        for (best, rmin, count) in scanned {
            seen += count;
            if let Some(r) = rmin {
                r_hat = Some(r_hat.map_or(r, |h: f64| h.min(r)));
            }
            all.extend(best);
        }
    }
    if all.is_empty() {
        return Err(Error::ResourceCap(format!(
            "no interpolant with at most {cap} nonzero parameters; lower bound = {}",
            cap + 1
        )));
    }
    all.sort_by(|a, b| a.cost.partial_cmp(&b.cost).expect("finite cost").then(a.order.cmp(&b.order)));
    let caveat = beyond_cap(problem, &cands, cap);
    while !all.is_empty() {
        // Among near-ties with the cheapest, prefer fewer nonzeros.
        let lead = all[0].cost;
        let pick = (0..all.len())
            .take_while(|&i| tied(all[i].cost, lead))
            .min_by_key(|&i| (all[i].l0, all[i].order))
            .expect("nonempty");
        let cand = all.remove(pick);
        if let Some(local) = exact_vertex(problem, &cand.vars, &cand.vertex)? {
            let z = scatter(problem.num_vars(), Rational::from_i64(0), &cand.vars, &local);
            let solution = SparseSolution::from_exact(problem, z, &[p], Method::SupportEnum, caveat);
            solution.check_feasible(problem)?;
            return Ok(ExactLp { solution, r_hat, vertices: seen });
        }
    }
    Err(Error::Internal("no float extreme point survived exact recomputation".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DatasetND;
    use crate::multivariate::patterns::{enumerate_patterns, PatternMode};
    use crate::multivariate::reformulation::{build_reformulation, default_radius, Side};

    fn problem(x: Vec<Vec<f64>>, y: Vec<f64>, r: Option<f64>) -> ReformulatedProblem {
        let ds = DatasetND::new(x, y).unwrap();
        let pats = enumerate_patterns(&ds, PatternMode::All).unwrap();
        let r = r.unwrap_or_else(|| default_radius(&ds));
        build_reformulation(&ds, pats, r, true).unwrap()
    }

    fn peak() -> ReformulatedProblem {
        problem(vec![vec![-1.0], vec![0.0], vec![1.0]], vec![0.0, 1.0, 0.0], None)
    }

    #[test]
    fn single_point_bias() {
        let p = problem(vec![vec![0.0]], vec![1.0], Some(2.0));
        let s = solve_l0(&p, 8).unwrap().found().unwrap();
        assert_eq!(s.l0, 1);
        let k = s.support[0];
        let c = p.block_map(k);
        assert_eq!((p.patterns[c.pattern].bits().as_str(), c.side, c.coord), ("1", Side::Nu, 1));
        assert_eq!(s.z[k], 1.0);

        let e = solve_lp_exact(&p, 0.5, 8).unwrap();
        assert_eq!(e.solution.l0, 1);
        assert_eq!(e.solution.cost(0.5), Some(1.0));
    }

    #[test]
    fn peak_needs_three() {
        let p = peak();
        let s = solve_l0(&p, 8).unwrap().found().unwrap();
        assert_eq!(s.l0, 3);
        s.check_feasible(&p).unwrap();
        let e = solve_lp_exact(&p, 0.05, 4).unwrap();
        assert_eq!(e.solution.l0, 3);
        assert!(e.r_hat.unwrap() > 0.0);
    }

    #[test]
    fn zero_targets() {
        let p = problem(vec![vec![0.0], vec![1.0]], vec![0.0, 0.0], None);
        assert_eq!(solve_l0(&p, 8).unwrap().found().unwrap().l0, 0);
        assert_eq!(solve_lp_exact(&p, 0.5, 8).unwrap().solution.cost(0.5), Some(0.0));
    }

    #[test]
    fn cap_exceeded_reports_bound() {
        let p = peak();
        assert_eq!(solve_l0(&p, 2).unwrap(), L0Outcome::CapExceeded { cap: 2, lower_bound: 3 });
        assert!(solve_l0(&p, 9).is_err());
    }

    #[test]
    fn exact_beats_every_small_support_witness() {
        // The ℓᵖ optimum can be no worse than the ℓ⁰ witness.
        let p = problem(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]], vec![1.0, -1.0, 2.0], None);
        let l0 = solve_l0(&p, 8).unwrap().found().unwrap();
        let e = solve_lp_exact(&p, 0.3, l0.l0 + 1).unwrap();
        let witness = super::super::solution::lp_cost(&p, &l0.z, 0.3);
        assert!(e.solution.cost(0.3).unwrap() <= witness + 1e-12);
    }
}
