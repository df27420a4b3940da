//! Restricted subproblems shared by the exact solvers.
//!
//! A support is assembled from per-block pieces ("candidates"): a block
//! together with the subset of its penalized coordinates that may be
//! nonzero. A candidate is kept only if some vector on those coordinates
//! satisfies the block's cone rows and makes a nonzero contribution to
//! `A z`. Minimal and cost-optimal solutions never contain a block whose
//! contribution vanishes, so pruning the rest loses nothing.

use rayon::prelude::*;

use super::reformulation::ReformulatedProblem;
use crate::error::Result;
use crate::linalg::{rank, solve_square};
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub block: usize,
    /// Penalized coordinates allowed to be nonzero (global indices).
    pub coords: Vec<usize>,
}

/// Coordinates of `block` that are penalized, in order.
fn penalized_coords(p: &ReformulatedProblem, block: usize) -> Vec<usize> {
    let w = p.width();
    (block * w..(block + 1) * w).filter(|&k| p.is_penalized(k)).collect()
}

/// Unpenalized coordinates that may join `blocks`: their biases, plus the
/// biases of the all-active pattern (the only bias-only neurons that can
/// contribute).
pub(crate) fn free_coords(p: &ReformulatedProblem, blocks: &[usize]) -> Vec<usize> {
    if p.penalize_bias {
        return Vec::new();
    }
    let w = p.width();
    let mut out: Vec<usize> = blocks.iter().map(|b| b * w + w - 1).collect();
    for (j, pat) in p.patterns.iter().enumerate() {
        if pat.s.iter().all(|&b| b) {
            out.push(2 * j * w + w - 1);
            out.push((2 * j + 1) * w + w - 1);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Exact check that `coords` (plus the block's free bias) can carry a
/// nonzero contribution while satisfying the block's cone rows.
fn contributes(p: &ReformulatedProblem, block: usize, coords: &[usize]) -> Result<bool> {
    let pattern = &p.patterns[block / 2];
    if pattern.is_empty() {
        return Ok(false);
    }
    let w = p.width();
    let mut local: Vec<usize> = coords.iter().map(|k| k % w).collect();
    if !p.penalize_bias {
        local.push(w - 1);
    }
    let mut lp = LinearProgram::<Rational>::new(local.len());
    for j in 0..local.len() {
        lp.set_bounds(j, None, None);
    }
    let mut total = vec![Rational::from_i64(0); local.len()];
    for (i, sign) in pattern.signs().enumerate() {
        let xbar = &p.xbar()[i];
        let row: Vec<Rational> = local.iter().map(|&c| Rational::from_f64(sign * xbar[c])).collect::<Result<_>>()?;
        if pattern.s[i] {
            for (t, r) in total.iter_mut().zip(&row) {
                *t = t.clone() + r.clone();
            }
        }
        lp.add_row(row, Cmp::Ge, Rational::from_i64(0));
    }
    lp.add_row(total, Cmp::Ge, Rational::from_i64(1));
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

/// All candidates, ordered by block then by coordinate subset.
pub(crate) fn candidates(p: &ReformulatedProblem) -> Result<Vec<Candidate>> {
    let mut raw = Vec::new();
    for block in 0..p.num_blocks() {
        // ν and ω blocks of one pattern share their cone; only test once.
        if block % 2 == 1 {
            continue;
        }
        let pc = penalized_coords(p, block);
        for mask in 1u32..(1 << pc.len()) {
            let coords: Vec<usize> =
                pc.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect();
            raw.push((block, coords));
        }
    }
    let ok: Vec<bool> = raw.par_iter().map(|(b, c)| contributes(p, *b, c)).collect::<Result<_>>()?;
    let w = p.width();
    let mut out = Vec::new();
    for ((block, coords), keep) in raw.into_iter().zip(ok) {
        if !keep {
            continue;
        }
        let shifted = coords.iter().map(|k| k + w).collect();
        out.push(Candidate { block, coords });
        out.push(Candidate { block: block + 1, coords: shifted });
    }
    out.sort_by(|a, b| a.block.cmp(&b.block).then(a.coords.cmp(&b.coords)));
    Ok(out)
}

/// Sets of candidates with distinct blocks and total size `k`, as index
/// lists in increasing order.
pub(crate) fn combos(cands: &[Candidate], k: usize) -> Vec<Vec<usize>> {
    fn rec(cands: &[Candidate], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..cands.len() {
            let c = &cands[i];
            if c.coords.len() > left || cur.iter().any(|&j| cands[j].block == c.block) {
                continue;
            }
            cur.push(i);
            rec(cands, i + 1, left - c.coords.len(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(cands, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Variables of the restricted problem for a combo: its coordinates plus
/// free biases, sorted.
pub(crate) fn combo_vars(p: &ReformulatedProblem, cands: &[Candidate], combo: &[usize]) -> Vec<usize> {
    let blocks: Vec<usize> = combo.iter().map(|&i| cands[i].block).collect();
    let mut vars: Vec<usize> = combo.iter().flat_map(|&i| cands[i].coords.iter().copied()).collect();
    vars.extend(free_coords(p, &blocks));
    vars.sort_unstable();
    vars.dedup();
    vars
}

/// Constraints of the problem with every coordinate outside `vars` fixed at
/// zero: `eq` rows `a·z = b`, `ineq` rows `a·z ≥ b` (cone rows, then the
/// box as `±z_k ≥ -R`).
#[derive(Clone, Debug)]
pub(crate) struct Restricted<T> {
    pub vars: Vec<usize>,
    pub eq: Vec<(Vec<T>, T)>,
    pub ineq: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> Restricted<T> {
    pub fn new(p: &ReformulatedProblem, vars: &[usize]) -> Result<Self> {
        let n = vars.len();
        let conv = |v: f64| T::from_f64(v);
        let mut eq = Vec::with_capacity(p.n());
        for i in 0..p.n() {
            let row = vars.iter().map(|&k| conv(p.a_entry(i, k))).collect::<Result<Vec<T>>>()?;
            eq.push((row, conv(p.y()[i])?));
        }
        let mut ineq: Vec<(Vec<T>, T)> = Vec::new();
        let mut k = 0;
        while k < n {
            let block = p.block_of(vars[k]);
            let mut end = k;
            while end < n && p.block_of(vars[end]) == block {
                end += 1;
            }
            let mut seen: Vec<Vec<f64>> = Vec::new();
            for row in p.block_rows(block / 2) {
                let mut dense = vec![0.0; n];
                for t in k..end {
                    dense[t] = row[vars[t] % p.width()];
                }
                if dense.iter().all(|v| *v == 0.0) || seen.contains(&dense) {
                    continue;
                }
                let conv_row = dense.iter().map(|&v| conv(v)).collect::<Result<Vec<T>>>()?;
                seen.push(dense);
                ineq.push((conv_row, T::zero()));
            }
            k = end;
        }
        let r = conv(p.radius)?;
        for t in 0..n {
            for s in [1i64, -1] {
                let mut row = vec![T::zero(); n];
                row[t] = T::from_i64(s);
                ineq.push((row, -r.clone()));
            }
        }
        Ok(Self { vars: vars.to_vec(), eq, ineq })
    }

    pub fn num_cone_rows(&self) -> usize {
        self.ineq.len() - 2 * self.vars.len()
    }

    /// Feasibility LP, optionally minimizing `objective`.
    pub fn lp(&self, radius: &T) -> LinearProgram<T> {
        let n = self.vars.len();
        let mut lp = LinearProgram::new(n);
        for j in 0..n {
            lp.set_bounds(j, Some(-radius.clone()), Some(radius.clone()));
        }
        for (row, b) in &self.eq {
            lp.add_row(row.clone(), Cmp::Eq, b.clone());
        }
        for (row, b) in &self.ineq[..self.num_cone_rows()] {
            lp.add_row(row.clone(), Cmp::Ge, b.clone());
        }
        lp
    }

    /// Checks `z` (local coordinates) against all rows.
    pub fn feasible(&self, z: &[T], tol: f64) -> bool {
        let dot = |row: &[T]| row.iter().zip(z).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let eq_ok = self.eq.iter().all(|(row, b)| {
            let v = dot(row);
            if T::EXACT {
                &v == b
            } else {
                (v - b.clone()).to_f64().abs() <= tol
            }
        });
        eq_ok
            && self.ineq.iter().all(|(row, b)| {
                let v = dot(row);
                if T::EXACT {
                    &v >= b
                } else {
                    (v - b.clone()).to_f64() >= -tol
                }
            })
    }

    /// Solves the equalities in `basis` together with the inequalities in
    /// `tight` held at equality.
    pub fn point(&self, basis: &[usize], tight: &[usize]) -> Option<Vec<T>> {
        let mut a = Vec::with_capacity(self.vars.len());
        let mut b = Vec::with_capacity(self.vars.len());
        for &i in basis {
            a.push(self.eq[i].0.clone());
            b.push(self.eq[i].1.clone());
        }
        for &i in tight {
            a.push(self.ineq[i].0.clone());
            b.push(self.ineq[i].1.clone());
        }
        if a.len() != self.vars.len() {
            return None;
        }
        if a.is_empty() {
            return Some(Vec::new());
        }
        solve_square(&a, &b)
    }
}

/// Indices of a maximal linearly independent subset of `rows`, greedy in
/// order.
pub(crate) fn independent_rows<T: Scalar>(rows: &[Vec<T>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut mat: Vec<Vec<T>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        mat.push(r.clone());
        if rank(&mat) == mat.len() {
            chosen.push(i);
        } else {
            mat.pop();
        }
    }
    chosen
}

/// Calls `f` on every `t`-subset of `0..n` in lexicographic order; stops
/// early when `f` returns false.
pub(crate) fn for_each_subset(n: usize, t: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if t > n {
        return;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = t;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - t + i {
                idx[i] += 1;
                for j in i + 1..t {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// An extreme point of a restricted polytope, with how it was found.
#[derive(Clone, Debug)]
pub(crate) struct Vertex {
    pub z: Vec<f64>,
    pub basis: Vec<usize>,
    pub tight: Vec<usize>,
}

/// Float tolerance for row checks, relative to the data scale.
pub(crate) fn float_tol(p: &ReformulatedProblem) -> f64 {
    let ymax = p.y().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    1e-9 * ymax.max(p.radius)
}

/// All extreme points of the restricted polytope (float enumeration over
/// active sets). Empty when the polytope is empty.
pub(crate) fn vertices(p: &ReformulatedProblem, sys: &Restricted<f64>) -> Vec<Vertex> {
    let n = sys.vars.len();
    let eq_rows: Vec<Vec<f64>> = sys.eq.iter().map(|(r, _)| r.clone()).collect();
    let basis = independent_rows(&eq_rows);
    if basis.len() > n {
        return Vec::new();
    }
    let t = n - basis.len();
    let tol = float_tol(p);
    let mut out = Vec::new();
    for_each_subset(sys.ineq.len(), t, |tight| {
        if let Some(z) = sys.point(&basis, tight) {
            if sys.feasible(&z, tol) {
                out.push(Vertex { z, basis: basis.clone(), tight: tight.to_vec() });
            }
        }
        true
    });
    out
}

/// Recomputes a float vertex exactly; `None` if it is not an exact vertex
/// of the restricted polytope.
pub(crate) fn exact_vertex(p: &ReformulatedProblem, vars: &[usize], v: &Vertex) -> Result<Option<Vec<Rational>>> {
    let sys = Restricted::<Rational>::new(p, vars)?;
    let Some(z) = sys.point(&v.basis, &v.tight) else { return Ok(None) };
    Ok(sys.feasible(&z, 0.0).then_some(z))
}

/// Solves the restricted feasibility problem: float screen, then an exact
/// confirmation. Returns the exact point.
pub(crate) fn feasible_point(p: &ReformulatedProblem, vars: &[usize]) -> Result<Option<Vec<Rational>>> {
    // Float screen; only its feasible verdicts are re-checked exactly.
    let fsys = Restricted::<f64>::new(p, vars)?;
    if let LpOutcome::Infeasible = fsys.lp(&p.radius).solve()? {
        return Ok(None);
    }
    let sys = Restricted::<Rational>::new(p, vars)?;
    let r = Rational::from_f64(p.radius)?;
    match sys.lp(&r).solve()? {
        LpOutcome::Optimal { x, .. } => Ok(Some(x)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DatasetND;
    use crate::multivariate::patterns::{enumerate_patterns, PatternMode};
    use crate::multivariate::reformulation::build_reformulation;

    #[test]
    fn subsets_in_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut empty = 0;
        for_each_subset(3, 0, |_| {
            empty += 1;
            true
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn single_point_candidates() {
        let ds = DatasetND::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let pats = enumerate_patterns(&ds, PatternMode::All).unwrap();
        let p = build_reformulation(&ds, pats, 2.0, true).unwrap();
        let c = candidates(&p).unwrap();
        // Only pattern [1] can contribute, and only through its bias (x = 0).
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| p.block_map(c.coords[0]).pattern == 1));
        assert!(c.iter().all(|c| c.coords.iter().any(|&k| p.is_bias(k))));
    }

    #[test]
    fn box_square_has_four_vertices() {
        // Two free coordinates with no equality binding them: y = 0 at x = 0
        // with pattern [1] gives the box [-R, R]^2 intersected with ν_b, ω_b
        // cone rows z ≥ 0, equality ν_b - ω_b = 0.
        let ds = DatasetND::new(vec![vec![0.0]], vec![0.0]).unwrap();
        let pats = vec![crate::multivariate::patterns::ActivationPattern { s: vec![true] }];
        let p = build_reformulation(&ds, pats, 2.0, true).unwrap();
        let sys = Restricted::<f64>::new(&p, &[1, 3]).unwrap();
        let mut pts: Vec<Vec<f64>> = vertices(&p, &sys).into_iter().map(|v| v.z).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![2.0, 2.0]]);
    }
}
