use serde::{Deserialize, Serialize};

use super::patterns::ActivationPattern;
use crate::dataset::DatasetND;
use crate::error::{Error, Result};

/// Which half of a pattern block a coordinate belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    /// Positive output weight.
    Nu,
    /// Negative output weight.
    Omega,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Nu => 0,
            Side::Omega => 1,
        }
    }

    /// Output weight attached to neurons of this side.
    pub fn sign(self) -> f64 {
        match self {
            Side::Nu => 1.0,
            Side::Omega => -1.0,
        }
    }
}

/// Location of one coordinate of `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub pattern: usize,
    pub side: Side,
    /// `0..d` input weights, `d` the bias.
    pub coord: usize,
}

/// Linear constraints of the lifted problem:
/// `A z = y`, `G z ≥ 0`, `‖z‖∞ ≤ R`, with `z = [ν_1, ω_1, ν_2, ω_2, …]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReformulatedProblem {
    pub dataset: DatasetND,
    pub patterns: Vec<ActivationPattern>,
    pub radius: f64,
    /// When false, bias coordinates are neither counted nor penalized.
    pub penalize_bias: bool,
    xbar: Vec<Vec<f64>>,
}

/// `10 · max(1, max|y|) · max(1, max‖x̄‖∞)`.
pub fn default_radius(ds: &DatasetND) -> f64 {
    let ymax = ds.y().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let xmax = ds.x().iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    10.0 * ymax * xmax
}

pub fn build_reformulation(
    ds: &DatasetND,
    patterns: Vec<ActivationPattern>,
    radius: f64,
    penalize_bias: bool,
) -> Result<ReformulatedProblem> {
    if patterns.is_empty() {
        return Err(Error::Domain("at least one activation pattern is required".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("box radius must be positive, got {radius}")));
    }
    if let Some(p) = patterns.iter().find(|p| p.s.len() != ds.len()) {
        return Err(Error::Domain(format!(
            "pattern {} has length {}, dataset has {} points",
            p.bits(),
            p.s.len(),
            ds.len()
        )));
    }
    let xbar = (0..ds.len()).map(|i| ds.augmented_row(i)).collect();
    Ok(ReformulatedProblem { dataset: ds.clone(), patterns, radius, penalize_bias, xbar })
}

impl ReformulatedProblem {
    pub fn n(&self) -> usize {
        self.dataset.len()
    }

    /// `d + 1`, the width of one block.
    pub fn width(&self) -> usize {
        self.dataset.dim() + 1
    }

    pub fn num_blocks(&self) -> usize {
        2 * self.patterns.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_blocks() * self.width()
    }

    pub fn xbar(&self) -> &[Vec<f64>] {
        &self.xbar
    }

    pub fn y(&self) -> &[f64] {
        self.dataset.y()
    }

    pub fn index(&self, pattern: usize, side: Side, coord: usize) -> usize {
        (2 * pattern + side.index()) * self.width() + coord
    }

    pub fn block_map(&self, idx: usize) -> Coord {
        let w = self.width();
        let block = idx / w;
        Coord { pattern: block / 2, side: if block.is_multiple_of(2) { Side::Nu } else { Side::Omega }, coord: idx % w }
    }

    /// Block index `2j + side` of a coordinate.
    pub fn block_of(&self, idx: usize) -> usize {
        idx / self.width()
    }

    pub fn is_bias(&self, idx: usize) -> bool {
        idx % self.width() == self.width() - 1
    }

    pub fn is_penalized(&self, idx: usize) -> bool {
        self.penalize_bias || !self.is_bias(idx)
    }

    /// Entry `(i, idx)` of `A`.
    pub fn a_entry(&self, i: usize, idx: usize) -> f64 {
        let c = self.block_map(idx);
        if !self.patterns[c.pattern].s[i] {
            return 0.0;
        }
        c.side.sign() * self.xbar[i][c.coord]
    }

    pub fn a_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| (0..self.num_vars()).map(|k| self.a_entry(i, k)).collect()).collect()
    }

    /// Rows of `(2D_j - I) X̄`, duplicates removed. Shared by both sides.
    pub fn block_rows(&self, pattern: usize) -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, sign) in self.patterns[pattern].signs().enumerate() {
            let row: Vec<f64> = self.xbar[i].iter().map(|v| sign * v).collect();
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
        rows
    }

    /// Full `G`, `2JN` rows, block diagonal.
    pub fn g_matrix(&self) -> Vec<Vec<f64>> {
        let nv = self.num_vars();
        let w = self.width();
        let mut g = Vec::with_capacity(self.num_blocks() * self.n());
        for block in 0..self.num_blocks() {
            let pat = &self.patterns[block / 2];
            for (i, sign) in pat.signs().enumerate() {
                let mut row = vec![0.0; nv];
                for c in 0..w {
                    row[block * w + c] = sign * self.xbar[i][c];
                }
                g.push(row);
            }
        }
        g
    }

    /// `max_i |(A z - y)_i|`.
    pub fn residual(&self, z: &[f64]) -> f64 {
        (0..self.n())
            .map(|i| {
                let v: f64 =
                    z.iter().enumerate().filter(|(_, zk)| **zk != 0.0).map(|(k, zk)| self.a_entry(i, k) * zk).sum();
                (v - self.y()[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Most negative entry of `G z` (0 when satisfied).
    pub fn cone_violation(&self, z: &[f64]) -> f64 {
        let w = self.width();
        let mut worst = 0.0f64;
        for block in 0..self.num_blocks() {
            let zb = &z[block * w..(block + 1) * w];
            if zb.iter().all(|v| *v == 0.0) {
                continue;
            }
            for row in self.block_rows(block / 2) {
                let v: f64 = row.iter().zip(zb).map(|(a, b)| a * b).sum();
                worst = worst.max(-v);
            }
        }
        worst
    }
}
