use rayon::prelude::*;

use crate::dataset::DatasetND;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::scalar::{Rational, Scalar};

/// Which points a neuron's pre-activation is nonnegative on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivationPattern {
    pub s: Vec<bool>,
}

impl ActivationPattern {
    /// Pattern with rank `mask` among `2^n`, first point most significant.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self { s: (0..n).map(|i| (mask >> (n - 1 - i)) & 1 == 1).collect() }
    }

    pub fn bits(&self) -> String {
        self.s.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.s.iter().any(|&b| b)
    }

    /// `±1` row signs of `2D - I`.
    pub fn signs(&self) -> impl Iterator<Item = f64> + '_ {
        self.s.iter().map(|&b| if b { 1.0 } else { -1.0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternMode {
    /// Every binary vector; the cone constraints decide what is usable.
    All,
    /// Only patterns some nonzero affine map realizes.
    Realizable,
}

/// Largest `N` accepted in [`PatternMode::All`].
pub const MAX_ALL_POINTS: usize = 12;

/// Largest `N` for which [`PatternMode::All`] is the default.
pub const DEFAULT_ALL_POINTS: usize = 8;

impl PatternMode {
    pub fn default_for(n: usize) -> Self {
        if n <= DEFAULT_ALL_POINTS {
            PatternMode::All
        } else {
            PatternMode::Realizable
        }
    }
}

/// Exact check that some `w` has `(2D - I) X̄ w ≥ 0` and is not identically
/// zero there, normalized by requiring the row sum to reach 1.
pub fn is_realizable(ds: &DatasetND, pattern: &ActivationPattern) -> Result<bool> {
    let d1 = ds.dim() + 1;
    let mut lp = LinearProgram::<Rational>::new(d1);
    for c in 0..d1 {
        lp.set_bounds(c, None, None);
    }
    let mut total = vec![Rational::from_i64(0); d1];
    for (i, sign) in pattern.signs().enumerate() {
        let row: Vec<Rational> =
            ds.augmented_row(i).iter().map(|v| Rational::from_f64(sign * v)).collect::<Result<_>>()?;
        for (t, r) in total.iter_mut().zip(&row) {
            *t = t.clone() + r.clone();
        }
        lp.add_row(row, Cmp::Ge, Rational::from_i64(0));
    }
    lp.add_row(total, Cmp::Ge, Rational::from_i64(1));
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

pub fn enumerate_patterns(ds: &DatasetND, mode: PatternMode) -> Result<Vec<ActivationPattern>> {
    let n = ds.len();
    if n > MAX_ALL_POINTS {
        return Err(Error::ResourceCap(format!(
            "{n} points give 2^{n} patterns; at most {MAX_ALL_POINTS} points are enumerated"
        )));
    }
    let all = (0..1u64 << n).map(|m| ActivationPattern::from_mask(n, m));
    match mode {
        PatternMode::All => Ok(all.collect()),
        PatternMode::Realizable => {
            let all: Vec<_> = all.collect();
            let keep: Vec<bool> = all.par_iter().map(|p| is_realizable(ds, p)).collect::<Result<_>>()?;
            Ok(all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect())
        }
    }
}
