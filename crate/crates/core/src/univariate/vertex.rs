//! Inner-slope parameterization of a run and enumeration of its vertices.

use rayon::prelude::*;

use super::profile::{CurvatureRun, SlopeProfile};
use crate::cpwl::lp_sum;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest number of free slopes per run that [`solve_run`] will enumerate.
pub const MAX_FREE_SLOPES: usize = 30;

/// Relative tolerance under which two costs are considered tied.
pub const COST_TIE_TOL: f64 = 1e-12;

/// A vertex `α ∈ {0,1}^{m-1}` of one run. `alpha[j]` selects the inner slope
/// `u_{j+1}`: `false` takes the left secant slope, `true` the right one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexChoice {
    pub run: usize,
    pub alpha: Vec<bool>,
}

impl VertexChoice {
    /// Vertex with lexicographic rank `mask` (first coordinate most significant).
    pub fn from_mask(run: usize, free: usize, mask: u64) -> Self {
        let alpha = (0..free).map(|j| (mask >> (free - 1 - j)) & 1 == 1).collect();
        Self { run, alpha }
    }

    pub fn mask(&self) -> u64 {
        self.alpha.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    /// `α` as a 0/1 string, e.g. `"10"`.
    pub fn bits(&self) -> String {
        self.alpha.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// `C(p) = Σ b_i^p` over the positive slope-change magnitudes of a choice.
#[derive(Clone, Debug, PartialEq)]
pub struct CostCurve {
    pub magnitudes: Vec<f64>,
}

impl CostCurve {
    pub fn eval(&self, p: f64) -> f64 {
        lp_sum(self.magnitudes.iter().copied(), p)
    }

    pub fn knots(&self) -> usize {
        self.magnitudes.len()
    }

    /// Magnitudes in ascending order; equal for curves that agree for all p.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.magnitudes.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Inner slopes `u_j = (1 - α_j) s_{i+j-1} + α_j s_{i+j}` for a general `α`.
pub fn inner_slopes_at<T: Scalar>(run: &CurvatureRun, alpha: &[T], sp: &SlopeProfile<T>) -> Vec<T> {
    assert_eq!(alpha.len(), run.free_slopes());
    alpha
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let left = sp.slope(run.start + j).clone();
            let right = sp.slope(run.start + j + 1).clone();
            (T::one() - a.clone()) * left + a.clone() * right
        })
        .collect()
}

pub fn inner_slopes<T: Scalar>(run: &CurvatureRun, alpha: &[bool], sp: &SlopeProfile<T>) -> Vec<T> {
    assert_eq!(alpha.len(), run.free_slopes());
    alpha.iter().enumerate().map(|(j, &a)| sp.slope(run.start + j + usize::from(a)).clone()).collect()
}

/// Slope changes across the run: incoming slope, inner slopes, outgoing slope.
fn curve_from_slopes<T: Scalar>(run: &CurvatureRun, u: &[T], sp: &SlopeProfile<T>) -> CostCurve {
    let mut chain = Vec::with_capacity(u.len() + 2);
    chain.push(sp.slope(run.start - 1).clone());
    chain.extend(u.iter().cloned());
    chain.push(sp.slope(run.end()).clone());
    let magnitudes = chain
        .windows(2)
        .map(|w| w[1].clone() - w[0].clone())
        .filter(|c| !c.is_zero())
        .map(|c| c.to_f64().abs())
        .collect();
    CostCurve { magnitudes }
}

/// Cost curve of a vertex.
pub fn run_cost_curve<T: Scalar>(run: &CurvatureRun, alpha: &[bool], sp: &SlopeProfile<T>) -> CostCurve {
    curve_from_slopes(run, &inner_slopes(run, alpha, sp), sp)
}

/// Cost curve of an arbitrary point of `[0,1]^{m-1}`.
pub fn run_cost_curve_at<T: Scalar>(run: &CurvatureRun, alpha: &[T], sp: &SlopeProfile<T>) -> CostCurve {
    curve_from_slopes(run, &inner_slopes_at(run, alpha, sp), sp)
}

/// Best vertex of one run at a fixed `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSolution {
    pub choice: VertexChoice,
    pub cost: f64,
    /// Other vertices whose cost ties the winner's.
    pub ties: Vec<VertexChoice>,
}

pub(crate) fn check_free(run: &CurvatureRun) -> Result<()> {
    if run.free_slopes() > MAX_FREE_SLOPES {
        return Err(Error::ResourceCap(format!(
            "run at point {} has {} free slopes; at most {MAX_FREE_SLOPES} are enumerated",
            run.start + 1,
            run.free_slopes()
        )));
    }
    Ok(())
}

/// Evaluates `score` on every vertex of the run, in lexicographic order.
pub(crate) fn map_vertices<T, R, F>(
    run_index: usize,
    run: &CurvatureRun,
    sp: &SlopeProfile<T>,
    score: F,
) -> Result<Vec<R>>
where
    T: Scalar,
    R: Send,
    F: Fn(&CostCurve) -> R + Sync,
{
    check_free(run)?;
    let free = run.free_slopes();
    Ok((0..1u64 << free)
        .into_par_iter()
        .map(|mask| {
            let v = VertexChoice::from_mask(run_index, free, mask);
            score(&run_cost_curve(run, &v.alpha, sp))
        })
        .collect())
}

/// Index of the first minimum and all indices within the tie tolerance.
pub(crate) fn argmin_with_ties(costs: &[f64]) -> (usize, Vec<usize>) {
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = COST_TIE_TOL * best.abs().max(f64::MIN_POSITIVE);
    let tied: Vec<usize> = (0..costs.len()).filter(|&i| costs[i] - best <= tol).collect();
    (tied[0], tied[1..].to_vec())
}

/// Minimizes `Σ b^p` over the vertices of a run with `m ≥ 2`. Ties go to the
/// lexicographically smallest `α`.
pub fn solve_run<T: Scalar>(run_index: usize, run: &CurvatureRun, p: f64, sp: &SlopeProfile<T>) -> Result<RunSolution> {
    if run.m < 2 {
        return Err(Error::Domain(format!("run has m = {}; no free slopes", run.m)));
    }
    let costs = map_vertices(run_index, run, sp, |c| c.eval(p))?;
    let (win, ties) = argmin_with_ties(&costs);
    let free = run.free_slopes();
    Ok(RunSolution {
        choice: VertexChoice::from_mask(run_index, free, win as u64),
        cost: costs[win],
        ties: ties.into_iter().map(|i| VertexChoice::from_mask(run_index, free, i as u64)).collect(),
    })
}

/// The vertex preferred as `p → 0⁺`: fewest knots, then smallest cost at
/// `p = 1e-6`, then lexicographic order.
pub fn sparsest_vertex<T: Scalar>(
    run_index: usize,
    run: &CurvatureRun,
    sp: &SlopeProfile<T>,
) -> Result<(VertexChoice, CostCurve)> {
    let keys = map_vertices(run_index, run, sp, |c| (c.knots(), c.eval(super::pstar::P_NEAR_ZERO)))?;
    let fewest = keys.iter().map(|k| k.0).min().expect("at least one vertex");
    let mut best: Option<usize> = None;
    for (i, k) in keys.iter().enumerate() {
        if k.0 != fewest {
            continue;
        }
        match best {
            Some(b) if keys[b].1 <= k.1 => {}
            _ => best = Some(i),
        }
    }
    let v = VertexChoice::from_mask(run_index, run.free_slopes(), best.unwrap() as u64);
    let curve = run_cost_curve(run, &v.alpha, sp);
    Ok((v, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset1D;
    use crate::scalar::Rational;
    use crate::univariate::profile::{decompose_runs, slope_profile};

    /// Points with unit spacing realizing the given slopes.
    fn from_slopes(slopes: &[&str]) -> Dataset1D<Rational> {
        let mut y = Rational::from_i64(0);
        let mut pts = vec![(Rational::from_i64(0), y.clone())];
        for (k, s) in slopes.iter().enumerate() {
            y += Rational::parse_decimal(s).unwrap();
            pts.push((Rational::from_i64(k as i64 + 1), y.clone()));
        }
        Dataset1D::new(pts).unwrap()
    }

    fn only_run(slopes: &[&str]) -> (CurvatureRun, SlopeProfile<Rational>) {
        let sp = slope_profile(&from_slopes(slopes));
        let dec = decompose_runs(&sp);
        assert_eq!(dec.runs.len(), 1);
        (dec.runs[0], sp)
    }

    #[test]
    fn mask_roundtrip_and_order() {
        let v = VertexChoice::from_mask(0, 3, 0b100);
        assert_eq!(v.alpha, vec![true, false, false]);
        assert_eq!(v.mask(), 4);
        assert_eq!(v.bits(), "100");
    }

    #[test]
    fn curves_of_two_slope_run() {
        let (run, sp) = only_run(&["0", "1", "2", "4"]);
        assert_eq!(run.m, 2);
        assert_eq!(run_cost_curve(&run, &[false], &sp).magnitudes, vec![1.0, 3.0]);
        assert_eq!(run_cost_curve(&run, &[true], &sp).magnitudes, vec![2.0, 2.0]);
    }

    #[test]
    fn middle_change_elided() {
        let (run, sp) = only_run(&["0", "0.05", "5", "9.9", "10"]);
        assert_eq!(run.m, 3);
        assert_eq!(run_cost_curve(&run, &[true, false], &sp).magnitudes, vec![5.0, 5.0]);
    }

    #[test]
    fn solve_run_examples() {
        let (run, sp) = only_run(&["0", "1", "2", "4"]);
        let s = solve_run(0, &run, 0.5, &sp).unwrap();
        assert_eq!(s.choice.alpha, vec![false]);
        assert!((s.cost - (1.0 + 3f64.sqrt())).abs() < 1e-12);
        assert!(s.ties.is_empty());

        let (run, sp) = only_run(&["0", "1", "2", "3"]);
        for p in [0.1, 0.5, 0.9] {
            let s = solve_run(0, &run, p, &sp).unwrap();
            assert_eq!(s.choice.alpha, vec![false]);
            assert_eq!(s.ties, vec![VertexChoice { run: 0, alpha: vec![true] }]);
            assert!((s.cost - (1.0 + 2f64.powf(p))).abs() < 1e-12);
        }

        let (run, sp) = only_run(&["0", "0.05", "5", "9.9", "10"]);
        let s = solve_run(0, &run, 0.1, &sp).unwrap();
        assert_eq!(s.choice.alpha, vec![true, false]);
        assert!((s.cost - 2.0 * 5f64.powf(0.1)).abs() < 1e-12);
    }

    #[test]
    fn sparsest_vertex_has_ceiling_count() {
        for slopes in [
            vec!["0", "1", "2", "4"],
            vec!["0", "1", "3", "6", "10"],
            vec!["0", "1", "3", "6", "10", "15"],
            vec!["5", "4", "2", "-1", "-5", "-10", "-16"],
        ] {
            let (run, sp) = only_run(&slopes);
            let (v, c) = sparsest_vertex(0, &run, &sp).unwrap();
            assert_eq!(c.knots(), run.sparsest_knots(), "{slopes:?} -> {}", v.bits());
        }
    }

    #[test]
    fn rejects_huge_runs() {
        let run = CurvatureRun { start: 1, m: 40, sign: 1 };
        assert!(check_free(&run).is_err());
    }
}
