//! Brute-force references for the univariate solver.
//!
//! None of these reuse the solver's code paths: slopes, runs and knot
//! placement are recomputed here in plain `f64` (or, for the sparsest count,
//! decided by exact linear feasibility over one-sided slopes).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cpwl::{lp_sum, Cpwl, Knot};
use crate::dataset::Dataset1D;
use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::network::{Neuron, ReluNet1D};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    /// Grid points per `α` coordinate are `0, 1/g, …, 1`.
    pub grid_resolution: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Largest knot count the partition oracle will try.
    pub l0_piece_cap: usize,
    /// Largest number of free slopes per run the grid oracle accepts.
    pub max_grid_free: usize,
    /// Objective evaluations per restart of the random search.
    pub evals_per_restart: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_resolution: 20, restarts: 100, seed: 0, l0_piece_cap: 10, max_grid_free: 6, evals_per_restart: 200 }
    }
}

/// Largest dataset the partition oracle accepts.
pub const PARTITION_MAX_POINTS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub cost: f64,
    pub f: Cpwl<f64>,
    /// Grid point chosen in each run with free slopes.
    pub alphas: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartResult {
    pub cost: f64,
    pub net: ReluNet1D<f64>,
    /// Objective evaluations that produced a valid interpolant.
    pub evaluations: usize,
}

/// Per-gap and per-point structure of a sparsest interpolant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapClass {
    Straight,
    /// One knot inside the gap, slope increasing.
    Convex,
    /// One knot inside the gap, slope decreasing.
    Concave,
    /// Two knots inside the gap, any boundary slopes.
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionResult {
    pub count: usize,
    pub gaps: Vec<GapClass>,
    /// Whether interior point `i` (index `i - 1`) carries a knot.
    pub kinks: Vec<bool>,
}

// ---------------------------------------------------------------------------
// α-grid oracle

#[derive(Clone, Copy, Debug)]
struct Line {
    slope: f64,
    x0: f64,
    y0: f64,
}

impl Line {
    fn at(&self, x: f64) -> f64 {
        self.y0 + self.slope * (x - self.x0)
    }
}

fn secants(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (0..xs.len() - 1).map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])).collect()
}

/// Blocks of ≥ 2 interior points with equal nonzero curvature, as
/// `(first point, number of gaps)`.
fn curvature_blocks(s: &[f64]) -> Vec<(usize, usize)> {
    let sign = |i: usize| {
        let d = s[i] - s[i - 1];
        let tol = 1e-12 * s[i].abs().max(s[i - 1].abs()).max(f64::MIN_POSITIVE);
        if d > tol {
            1
        } else if d < -tol {
            -1
        } else {
            0
        }
    };
    let n = s.len() + 1;
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let e = sign(i);
        let mut j = i;
        while e != 0 && j + 2 < n && sign(j + 1) == e {
            j += 1;
        }
        if j > i {
            out.push((i, j - i));
        }
        i = j + 1;
    }
    out
}

/// Knots between consecutive lines; near-coincident knots merged and
/// vanishing changes dropped.
fn knots_of(lines: &[Line], scale: f64) -> Vec<(f64, f64)> {
    let mut knots: Vec<(f64, f64)> = Vec::new();
    let mut cur = lines[0];
    for next in &lines[1..] {
        let ds = next.slope - cur.slope;
        if ds.abs() <= 1e-13 * cur.slope.abs().max(next.slope.abs()).max(1.0) {
            continue;
        }
        let x = (next.y0 - cur.y0 + cur.slope * cur.x0 - next.slope * next.x0) / (cur.slope - next.slope);
        match knots.last_mut() {
            Some(last) if (last.0 - x).abs() <= 1e-12 * scale => last.1 += ds,
            _ => knots.push((x, ds)),
        }
        cur = *next;
    }
    knots.retain(|k| k.1.abs() > 1e-13);
    knots
}

struct GridProblem {
    xs: Vec<f64>,
    ys: Vec<f64>,
    s: Vec<f64>,
    scale: f64,
}

impl GridProblem {
    fn secant(&self, k: usize) -> Line {
        Line { slope: self.s[k], x0: self.xs[k], y0: self.ys[k] }
    }

    /// Lines across block `(i, m)` for inner-slope weights `alpha`.
    fn block_lines(&self, i: usize, m: usize, alpha: &[f64]) -> Vec<Line> {
        let mut lines = vec![self.secant(i - 1)];
        for (j, a) in alpha.iter().enumerate() {
            let pt = i + j + 1;
            let u = (1.0 - a) * self.s[pt - 1] + a * self.s[pt];
            lines.push(Line { slope: u, x0: self.xs[pt], y0: self.ys[pt] });
        }
        lines.push(self.secant(i + m));
        lines
    }

    fn all_lines(&self, blocks: &[(usize, usize)], alphas: &[Vec<f64>]) -> Vec<Line> {
        let mut lines = Vec::new();
        let mut k = 0;
        let mut b = 0;
        while k < self.s.len() {
            if b < blocks.len() && blocks[b].0 == k {
                let (i, m) = blocks[b];
                let inner = self.block_lines(i, m, &alphas[b]);
                lines.extend_from_slice(&inner[1..inner.len() - 1]);
                k = i + m;
                b += 1;
            } else {
                lines.push(self.secant(k));
                k += 1;
            }
        }
        lines
    }
}

/// Exhaustive search over `α ∈ {0, 1/g, …, 1}^{m-1}` in every run, costing
/// the interpolant actually assembled from the chosen lines.
pub fn alpha_grid_oracle<T: Scalar>(d: &Dataset1D<T>, p: f64, cfg: &OracleConfig) -> Result<GridResult> {
    if cfg.grid_resolution < 2 {
        return Err(Error::Domain("grid resolution must be at least 2".into()));
    }
    let xs: Vec<f64> = d.xs().iter().map(|v| v.to_f64()).collect();
    let ys: Vec<f64> = d.ys().iter().map(|v| v.to_f64()).collect();
    let s = secants(&xs, &ys);
    let scale = xs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let prob = GridProblem { xs, ys, s, scale };
    let blocks = curvature_blocks(&prob.s);
    for &(i, m) in &blocks {
        if m - 1 > cfg.max_grid_free {
            return Err(Error::ResourceCap(format!(
                "run at point {} has {} free slopes; the grid oracle accepts {}",
                i + 1,
                m - 1,
                cfg.max_grid_free
            )));
        }
    }
    let g = cfg.grid_resolution;
    let mut alphas = Vec::with_capacity(blocks.len());
    for &(i, m) in &blocks {
        let free = m - 1;
        let total = (g + 1).pow(free as u32);
        let decode = |mut idx: usize| {
            let mut a = vec![0.0; free];
            for slot in a.iter_mut().rev() {
                *slot = (idx % (g + 1)) as f64 / g as f64;
                idx /= g + 1;
            }
            a
        };
        let best = (0..total)
            .into_par_iter()
            .map(|idx| {
                let knots = knots_of(&prob.block_lines(i, m, &decode(idx)), prob.scale);
                (lp_sum(knots.iter().map(|k| k.1), p), idx)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .expect("nonempty grid");
        alphas.push(decode(best.1));
    }
    let lines = prob.all_lines(&blocks, &alphas);
    let knots = knots_of(&lines, prob.scale);
    let anchor_x = prob.xs[0] - 1.0;
    let f = Cpwl::new(
        anchor_x,
        lines[0].at(anchor_x),
        lines[0].slope,
        knots.iter().map(|&(at, change)| Knot { at, change }).collect(),
    )?;
    let ytol = 1e-8 * (1.0 + prob.ys.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    for (x, y) in prob.xs.iter().zip(&prob.ys) {
        if (f.eval(x) - y).abs() > ytol {
            return Err(Error::Internal(format!("grid interpolant misses ({x}, {y})")));
        }
    }
    Ok(GridResult { cost: f.vp_cost(p)?, f, alphas })
}

// ---------------------------------------------------------------------------
// Random-restart search

/// Interpolating network with knots `u`: solves for skip slope, offset and
/// output weights. `None` if singular or inaccurate.
fn fit_knots(xs: &[f64], ys: &[f64], u: &[f64]) -> Option<(f64, f64, Vec<f64>)> {
    let n = xs.len();
    let k = u.len();
    debug_assert_eq!(k + 2, n);
    let a: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            let mut row = vec![x, 1.0];
            row.extend(u.iter().map(|&uk| (x - uk).max(0.0)));
            row
        })
        .collect();
    let sol = solve_square(&a, ys)?;
    let ytol = 1e-9 * (1.0 + ys.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    for (row, y) in a.iter().zip(ys) {
        let v: f64 = row.iter().zip(&sol).map(|(r, s)| r * s).sum();
        if !v.is_finite() || (v - y).abs() > ytol {
            return None;
        }
    }
    Some((sol[0], sol[1], sol[2..].to_vec()))
}

fn restart_cost(xs: &[f64], ys: &[f64], u: &[f64], p: f64) -> f64 {
    match fit_knots(xs, ys, u) {
        Some((_, _, v)) => lp_sum(v, p),
        None => f64::INFINITY,
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Random knot placements polished by cyclic coordinate descent with a
/// golden-section line search per coordinate. An upper-bound probe only.
pub fn random_restart_oracle<T: Scalar>(d: &Dataset1D<T>, p: f64, cfg: &OracleConfig) -> Result<RestartResult> {
    let xs: Vec<f64> = d.xs().iter().map(|v| v.to_f64()).collect();
    let ys: Vec<f64> = d.ys().iter().map(|v| v.to_f64()).collect();
    let n = xs.len();
    if n == 2 {
        let s = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        let net = ReluNet1D { neurons: vec![], skip_a: s, skip_c: ys[0] - s * xs[0] };
        return Ok(RestartResult { cost: 0.0, net, evaluations: 0 });
    }
    let (lo, hi) = (xs[0], xs[n - 1]);
    let budget = cfg.evals_per_restart.max(n);
    let runs: Vec<(f64, Vec<f64>, usize)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            // Knot k drawn from (x_k, x_{k+2}) keeps the interpolation system
            // nonsingular; uniform draws over [x_1, x_N] mostly are not.
            let mut u: Vec<f64> = (0..n - 2).map(|k| rng.random_range(xs[k]..xs[k + 2])).collect();
            let mut best = restart_cost(&xs, &ys, &u, p);
            let mut evals = 1;
            let mut valid = usize::from(best.is_finite());
            // Each line search spends a fixed slice of the budget.
            let per_search = 12;
            'outer: while evals + per_search <= budget {
                for c in 0..u.len() {
                    if evals + per_search > budget {
                        break 'outer;
                    }
                    let (mut a, mut b) = (lo, hi);
                    let probe = |t: f64, u: &mut Vec<f64>| {
                        let old = u[c];
                        u[c] = t;
                        let v = restart_cost(&xs, &ys, u, p);
                        u[c] = old;
                        v
                    };
                    let mut x1 = b - GOLDEN * (b - a);
                    let mut x2 = a + GOLDEN * (b - a);
                    let mut f1 = probe(x1, &mut u);
                    let mut f2 = probe(x2, &mut u);
                    for _ in 0..per_search - 2 {
                        if f1 <= f2 {
                            b = x2;
                            x2 = x1;
                            f2 = f1;
                            x1 = b - GOLDEN * (b - a);
                            f1 = probe(x1, &mut u);
                        } else {
                            a = x1;
                            x1 = x2;
                            f1 = f2;
                            x2 = a + GOLDEN * (b - a);
                            f2 = probe(x2, &mut u);
                        }
                    }
                    evals += per_search;
                    valid += usize::from(f1.is_finite()) + usize::from(f2.is_finite());
                    let (t, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
                    if v < best {
                        best = v;
                        u[c] = t;
                    }
                }
            }
            (best, u, valid)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.2).sum();
    let (cost, u, _) = runs.into_iter().reduce(|a, b| if b.0 < a.0 { b } else { a }).expect("at least one restart");
    if !cost.is_finite() {
        return Err(Error::Infeasible("no restart produced an interpolant".into()));
    }
    let (a, c, v) = fit_knots(&xs, &ys, &u).expect("best restart is valid");
    let neurons = u.iter().zip(&v).map(|(&uk, &vk)| Neuron { w: 1.0, b: -uk, v: vk }).collect();
    Ok(RestartResult { cost, net: ReluNet1D { neurons, skip_a: a, skip_c: c }, evaluations })
}

// ---------------------------------------------------------------------------
// Partition oracle for the sparsest count

/// Interval of admissible values for one one-sided slope.
#[derive(Clone, Debug)]
struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
}

impl Interval {
    fn all() -> Self {
        Self { lo: None, hi: None }
    }

    fn contains(&self, v: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| l <= v) && self.hi.as_ref().is_none_or(|h| v <= h)
    }

    fn meets_below(&self, v: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| l <= v)
    }

    fn meets_above(&self, v: &Rational) -> bool {
        self.hi.as_ref().is_none_or(|h| v <= h)
    }
}

struct PartitionSearch<'a> {
    s: &'a [Rational],
    gaps: Vec<GapClass>,
    kinks: Vec<bool>,
}

impl PartitionSearch<'_> {
    /// Assigns gap `k` given the admissible slope leaving point `k`.
    fn gap(&mut self, k: usize, leaving: Interval, budget: usize) -> bool {
        let sk = &self.s[k];
        let options = [(GapClass::Straight, 0), (GapClass::Convex, 1), (GapClass::Concave, 1), (GapClass::Free, 2)];
        for (class, cost) in options {
            if cost > budget {
                continue;
            }
            let arriving = match class {
                GapClass::Straight if leaving.contains(sk) => Interval { lo: Some(sk.clone()), hi: Some(sk.clone()) },
                GapClass::Convex if leaving.meets_below(sk) => Interval { lo: Some(sk.clone()), hi: None },
                GapClass::Concave if leaving.meets_above(sk) => Interval { lo: None, hi: Some(sk.clone()) },
                GapClass::Free => Interval::all(),
                _ => continue,
            };
            self.gaps.push(class);
            if self.point(k + 1, arriving, budget - cost) {
                return true;
            }
            self.gaps.pop();
        }
        false
    }

    fn point(&mut self, i: usize, arriving: Interval, budget: usize) -> bool {
        if i == self.s.len() {
            return true;
        }
        self.kinks.push(false);
        if self.gap(i, arriving, budget) {
            return true;
        }
        self.kinks.pop();
        if budget >= 1 {
            self.kinks.push(true);
            if self.gap(i, Interval::all(), budget - 1) {
                return true;
            }
            self.kinks.pop();
        }
        false
    }
}

/// Exact LP check of a class assignment over the one-sided slopes
/// `R_0, L_1, R_1, …, L_{N-1}`.
fn assignment_feasible(s: &[Rational], gaps: &[GapClass], kinks: &[bool]) -> Result<bool> {
    let n = s.len() + 1;
    // Variable 2k is the slope leaving point k, 2k+1 the slope arriving at k+1.
    let nv = 2 * (n - 1);
    let mut lp = LinearProgram::<Rational>::new(nv);
    for j in 0..nv {
        lp.set_bounds(j, None, None);
    }
    let one = Rational::from_i64(1);
    for (k, class) in gaps.iter().enumerate() {
        let (r, l) = (2 * k, 2 * k + 1);
        match class {
            GapClass::Straight => {
                lp.add_sparse_row(&[(r, one.clone())], Cmp::Eq, s[k].clone());
                lp.add_sparse_row(&[(l, one.clone())], Cmp::Eq, s[k].clone());
            }
            GapClass::Convex => {
                lp.add_sparse_row(&[(r, one.clone())], Cmp::Le, s[k].clone());
                lp.add_sparse_row(&[(l, one.clone())], Cmp::Ge, s[k].clone());
            }
            GapClass::Concave => {
                lp.add_sparse_row(&[(r, one.clone())], Cmp::Ge, s[k].clone());
                lp.add_sparse_row(&[(l, one.clone())], Cmp::Le, s[k].clone());
            }
            GapClass::Free => {}
        }
    }
    for (idx, &kink) in kinks.iter().enumerate() {
        if !kink {
            // point idx + 1: arriving (2 idx + 1) equals leaving (2 idx + 2)
            lp.add_sparse_row(
                &[(2 * idx + 1, one.clone()), (2 * idx + 2, -one.clone())],
                Cmp::Eq,
                Rational::from_i64(0),
            );
        }
    }
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

/// Fewest knots of any interpolant, by increasing knot budget.
///
/// Each gap between consecutive points carries zero, one (convex or concave)
/// or two knots, and each interior point may carry a knot. Relaxing the
/// strict inequalities only lets an assignment over-count, so the first
/// budget with a feasible assignment is the exact minimum.
pub fn partition_lp_l0_oracle<T: Scalar>(d: &Dataset1D<T>, cfg: &OracleConfig) -> Result<PartitionResult> {
    let n = d.len();
    if n > PARTITION_MAX_POINTS {
        return Err(Error::ResourceCap(format!(
            "partition oracle accepts at most {PARTITION_MAX_POINTS} points, got {n}"
        )));
    }
    let dr: Dataset1D<Rational> = d.convert();
    let s: Vec<Rational> =
        (0..n - 1).map(|k| (dr.y(k + 1).clone() - dr.y(k).clone()) / (dr.x(k + 1).clone() - dr.x(k).clone())).collect();
    for budget in 0..=cfg.l0_piece_cap {
        let mut search = PartitionSearch { s: &s, gaps: Vec::new(), kinks: Vec::new() };
        if search.gap(0, Interval::all(), budget) {
            let (gaps, kinks) = (search.gaps, search.kinks);
            if !assignment_feasible(&s, &gaps, &kinks)? {
                return Err(Error::Internal("interval search and LP disagree".into()));
            }
            let count = gaps
                .iter()
                .map(|g| match g {
                    GapClass::Straight => 0,
                    GapClass::Convex | GapClass::Concave => 1,
                    GapClass::Free => 2,
                })
                .sum::<usize>()
                + kinks.iter().filter(|k| **k).count();
            return Ok(PartitionResult { count, gaps, kinks });
        }
    }
    Err(Error::ResourceCap(format!(
        "no interpolant with at most {} knots; lower bound {}",
        cfg.l0_piece_cap,
        cfg.l0_piece_cap + 1
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(ys: &[f64]) -> Dataset1D<f64> {
        Dataset1D::new(ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect()).unwrap()
    }

    fn exact(ys: &[&str]) -> Dataset1D<Rational> {
        Dataset1D::new(
            ys.iter()
                .enumerate()
                .map(|(i, y)| (Rational::from_i64(i as i64), Rational::parse_decimal(y).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn grid_zigzag() {
        let cfg = OracleConfig { grid_resolution: 50, ..Default::default() };
        let r = alpha_grid_oracle(&pts(&[0.0, 1.0, 0.0, 1.0]), 0.5, &cfg).unwrap();
        assert!((r.cost - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_convex_run() {
        let cfg = OracleConfig { grid_resolution: 100, ..Default::default() };
        // slopes 0, 1, 2, 4
        let r = alpha_grid_oracle(&pts(&[0.0, 0.0, 1.0, 3.0, 7.0]), 0.5, &cfg).unwrap();
        assert!((r.cost - (1.0 + 3f64.sqrt())).abs() < 1e-12, "{}", r.cost);
    }

    #[test]
    fn grid_collinear() {
        let r = alpha_grid_oracle(&pts(&[0.0, 1.0, 2.0, 3.0]), 0.5, &OracleConfig::default()).unwrap();
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn restart_collinear_and_zigzag() {
        let cfg = OracleConfig { restarts: 20, ..Default::default() };
        let r = random_restart_oracle(&pts(&[0.0, 1.0, 2.0, 3.0]), 0.5, &cfg).unwrap();
        assert!(r.cost < 1e-6, "{}", r.cost);
        let r = random_restart_oracle(&pts(&[0.0, 1.0, 0.0, 1.0]), 0.5, &cfg).unwrap();
        assert!(r.cost >= 2.0 * 2f64.sqrt() - 1e-8);
        assert!(r.cost < 2.0 * 2f64.sqrt() + 0.1, "{}", r.cost);
    }

    #[test]
    fn restart_is_deterministic() {
        let cfg = OracleConfig { restarts: 8, seed: 7, ..Default::default() };
        let d = pts(&[0.0, 0.3, -1.0, 2.0, 0.5]);
        let a = random_restart_oracle(&d, 0.4, &cfg).unwrap();
        let b = random_restart_oracle(&d, 0.4, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn partition_counts() {
        let cfg = OracleConfig::default();
        assert_eq!(partition_lp_l0_oracle(&exact(&["0", "1", "0", "1"]), &cfg).unwrap().count, 2);
        assert_eq!(partition_lp_l0_oracle(&exact(&["0", "1", "2", "3", "4"]), &cfg).unwrap().count, 0);
        let r = partition_lp_l0_oracle(&exact(&["0", "0", "0.05", "5.05", "14.95", "24.95"]), &cfg).unwrap();
        assert_eq!(r.count, 2);
        // convex pair: one knot
        assert_eq!(partition_lp_l0_oracle(&exact(&["0", "0", "1", "4"]), &cfg).unwrap().count, 1);
    }

    #[test]
    fn partition_cap() {
        let cfg = OracleConfig { l0_piece_cap: 1, ..Default::default() };
        assert!(matches!(partition_lp_l0_oracle(&exact(&["0", "1", "0", "1"]), &cfg), Err(Error::ResourceCap(_))));
    }
}
