//! Dense two-phase simplex with Bland's rule.
//!
//! Generic over [`Scalar`]: with [`Rational`](crate::scalar::Rational) every
//! pivot is exact and feasibility verdicts are certificates; with `f64` the
//! same code runs under fixed tolerances and is used for screening and for
//! the reweighted heuristics.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// `minimize c·x` subject to linear rows and per-variable bounds.
/// Variables default to `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    rows: Vec<(Vec<T>, Cmp, T)>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
}

const MAX_PIVOTS: usize = 200_000;

fn pivot_tol<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_f64(1e-9).unwrap()
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![T::zero(); num_vars],
            rows: Vec::new(),
            lower: vec![Some(T::zero()); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_objective(&mut self, c: Vec<T>) {
        assert_eq!(c.len(), self.num_vars);
        self.objective = c;
    }

    pub fn add_row(&mut self, coeffs: Vec<T>, cmp: Cmp, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn add_sparse_row(&mut self, coeffs: &[(usize, T)], cmp: Cmp, rhs: T) {
        let mut dense = vec![T::zero(); self.num_vars];
        for (j, v) in coeffs {
            dense[*j] = dense[*j].clone() + v.clone();
        }
        self.add_row(dense, cmp, rhs);
    }

    /// `None` means unbounded on that side.
    pub fn set_bounds(&mut self, j: usize, lower: Option<T>, upper: Option<T>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        // Substitute each original variable by nonnegative columns:
        // x = offset + sign * x'  (one bound), or x = x+ - x- (free).
        let mut cols: Vec<Vec<(usize, T)>> = Vec::new(); // per original var: (column, multiplier)
        let mut offsets = Vec::with_capacity(self.num_vars);
        let mut extra_rows: Vec<(usize, T)> = Vec::new(); // column <= bound
        let mut ncols = 0;
        for j in 0..self.num_vars {
            match (&self.lower[j], &self.upper[j]) {
                (Some(l), u) => {
                    cols.push(vec![(ncols, T::one())]);
                    offsets.push(l.clone());
                    if let Some(u) = u {
                        if u < l {
                            return Ok(LpOutcome::Infeasible);
                        }
                        extra_rows.push((ncols, u.clone() - l.clone()));
                    }
                    ncols += 1;
                }
                (None, Some(u)) => {
                    cols.push(vec![(ncols, -T::one())]);
                    offsets.push(u.clone());
                    ncols += 1;
                }
                (None, None) => {
                    cols.push(vec![(ncols, T::one()), (ncols + 1, -T::one())]);
                    offsets.push(T::zero());
                    ncols += 2;
                }
            }
        }

        // Rows in terms of the new columns, before slacks.
        let mut std_rows: Vec<(Vec<T>, Cmp, T)> = Vec::new();
        for (coeffs, cmp, rhs) in &self.rows {
            let mut row = vec![T::zero(); ncols];
            let mut b = rhs.clone();
            for (j, a) in coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                b = b - a.clone() * offsets[j].clone();
                for (c, m) in &cols[j] {
                    row[*c] = row[*c].clone() + a.clone() * m.clone();
                }
            }
            std_rows.push((row, *cmp, b));
        }
        for (c, ub) in &extra_rows {
            let mut row = vec![T::zero(); ncols];
            row[*c] = T::one();
            std_rows.push((row, Cmp::Le, ub.clone()));
        }

        let mut cost = vec![T::zero(); ncols];
        let mut cost_offset = T::zero();
        for (j, cj) in self.objective.iter().enumerate() {
            cost_offset = cost_offset + cj.clone() * offsets[j].clone();
            for (c, m) in &cols[j] {
                cost[*c] = cost[*c].clone() + cj.clone() * m.clone();
            }
        }

        let outcome = solve_standard(ncols, &std_rows, &cost)?;
        Ok(match outcome {
            LpOutcome::Optimal { x: xs, value } => {
                let x = (0..self.num_vars)
                    .map(|j| cols[j].iter().fold(offsets[j].clone(), |acc, (c, m)| acc + m.clone() * xs[*c].clone()))
                    .collect();
                LpOutcome::Optimal { x, value: value + cost_offset }
            }
            LpOutcome::Infeasible => LpOutcome::Infeasible,
            LpOutcome::Unbounded => LpOutcome::Unbounded,
        })
    }
}

struct Tableau<T> {
    /// `m` constraint rows followed by the objective row; last column is rhs.
    a: Vec<Vec<T>>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, r: usize) -> &T {
        &self.a[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / piv.clone();
            }
        }
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            if !T::EXACT {
                row[c] = T::zero();
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the objective row (the last row) over columns
    /// `< allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        let tol = pivot_tol::<T>();
        let obj = self.a.len() - 1;
        let neg_tol = -tol.clone();
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| self.a[obj][j] < neg_tol);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..obj {
                let arc = &self.a[r][c];
                if *arc > tol {
                    let ratio = self.rhs(r).clone() / arc.clone();
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::Internal("simplex pivot limit reached".into()))
    }
}

/// `minimize cost·x` s.t. rows, `x ≥ 0`.
fn solve_standard<T: Scalar>(n: usize, rows: &[(Vec<T>, Cmp, T)], cost: &[T]) -> Result<LpOutcome<T>> {
    let tol = pivot_tol::<T>();
    let m = rows.len();
    let num_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    // Columns: structural | slacks | artificials.
    let mut a = Vec::with_capacity(m + 1);
    let mut basis = vec![usize::MAX; m];
    let mut needs_art = Vec::new();
    let mut slack = n;
    for (i, (coeffs, cmp, rhs)) in rows.iter().enumerate() {
        let mut row = coeffs.clone();
        row.resize(n + num_slack, T::zero());
        let mut slack_col = None;
        match cmp {
            Cmp::Le => {
                row[slack] = T::one();
                slack_col = Some(slack);
                slack += 1;
            }
            Cmp::Ge => {
                row[slack] = -T::one();
                slack_col = Some(slack);
                slack += 1;
            }
            Cmp::Eq => {}
        }
        let mut b = rhs.clone();
        if b < T::zero() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        match slack_col {
            Some(s) if row[s] == T::one() => basis[i] = s,
            _ => needs_art.push(i),
        }
        row.push(b);
        a.push(row);
    }
    let num_art = needs_art.len();
    let width = n + num_slack + num_art;
    for row in a.iter_mut() {
        let b = row.pop().unwrap();
        row.resize(width, T::zero());
        row.push(b);
    }
    for (k, &i) in needs_art.iter().enumerate() {
        a[i][n + num_slack + k] = T::one();
        basis[i] = n + num_slack + k;
    }
    let structural = n + num_slack;

    // Phase 1 objective: Σ artificials, expressed in nonbasic terms.
    let mut obj = vec![T::zero(); width + 1];
    for k in 0..num_art {
        obj[structural + k] = T::one();
    }
    for &i in &needs_art {
        for (o, v) in obj.iter_mut().zip(&a[i]) {
            *o = o.clone() - v.clone();
        }
    }
    a.push(obj);
    let mut t = Tableau { a, basis, width };
    if num_art > 0 {
        t.optimize(width)?;
        let infeas = -t.rhs(m).clone();
        let scale = rows.iter().map(|r| r.2.abs()).fold(T::one(), |acc, v| T::max_of(&acc, &v));
        let feas_tol = if T::EXACT { T::zero() } else { T::from_f64(1e-7).unwrap() * scale };
        if infeas > feas_tol {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.a.len() - 1 {
            if t.basis[r] >= structural {
                let col = (0..structural).find(|&j| t.a[r][j].abs() > tol);
                match col {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.a.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2 objective row.
    let rows_now = t.a.len() - 1;
    let mut obj = vec![T::zero(); width + 1];
    for (j, c) in cost.iter().enumerate() {
        obj[j] = c.clone();
    }
    for r in 0..rows_now {
        let cb = if t.basis[r] < n { cost[t.basis[r]].clone() } else { T::zero() };
        if cb.is_zero() {
            continue;
        }
        for (o, v) in obj.iter_mut().zip(&t.a[r]) {
            *o = o.clone() - cb.clone() * v.clone();
        }
    }
    *t.a.last_mut().unwrap() = obj;
    if !t.optimize(structural)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    for r in 0..rows_now {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).clone();
        }
    }
    let value = cost.iter().zip(&x).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    Ok(LpOutcome::Optimal { x, value })
}
