//! Continuous piecewise-linear functions of one variable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{convert, Scalar, FLOAT_ELISION_TOL};

/// A breakpoint: the slope increases by `change` when crossing `at`.
#[derive(Clone, Debug, PartialEq)]
pub struct Knot<T> {
    pub at: T,
    pub change: T,
}

/// `f(x) = anchor_y + base_slope (x - anchor_x) + Σ change_k (x - at_k)_+`
/// with `anchor_x` not to the right of any knot, so `f(anchor_x) = anchor_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpwl<T> {
    anchor_x: T,
    anchor_y: T,
    base_slope: T,
    knots: Vec<Knot<T>>,
}

/// Costs and shape statistics of an interpolant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathNormReport {
    pub p: f64,
    /// `Σ |c_k|^p`
    pub lp_cost: f64,
    pub l1_cost: f64,
    pub l0_count: usize,
    /// Largest absolute piece slope.
    pub lipschitz: f64,
}

/// Checks `p ∈ [0, 1]`.
pub fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} is outside [0, 1]")))
    }
}

/// `Σ |b|^p` over nonzero magnitudes, with `0^0 = 0` so that `p = 0` counts.
pub fn lp_sum(magnitudes: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    magnitudes.into_iter().filter(|b| *b != 0.0).map(|b| if p == 0.0 { 1.0 } else { b.abs().powf(p) }).sum()
}

impl<T: Scalar> Cpwl<T> {
    /// Builds a canonical function: knots sorted, coincident knots merged,
    /// zero changes dropped. Fails if `anchor_x` lies right of a knot.
    pub fn new(anchor_x: T, anchor_y: T, base_slope: T, knots: Vec<Knot<T>>) -> Result<Self> {
        let knots = canonical_knots(knots);
        if let Some(first) = knots.first() {
            if first.at < anchor_x {
                return Err(Error::Internal(format!("anchor {anchor_x} lies right of knot {}", first.at)));
            }
        }
        Ok(Self { anchor_x, anchor_y, base_slope, knots })
    }

    /// Affine function through `(x0, y0)`.
    pub fn line(x0: T, y0: T, slope: T) -> Self {
        Self { anchor_x: x0, anchor_y: y0, base_slope: slope, knots: Vec::new() }
    }

    pub fn anchor_x(&self) -> &T {
        &self.anchor_x
    }

    pub fn anchor_y(&self) -> &T {
        &self.anchor_y
    }

    pub fn base_slope(&self) -> &T {
        &self.base_slope
    }

    pub fn knots(&self) -> &[Knot<T>] {
        &self.knots
    }

    pub fn num_knots(&self) -> usize {
        self.knots.len()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = self.anchor_y.clone() + self.base_slope.clone() * (x.clone() - self.anchor_x.clone());
        for k in &self.knots {
            if *x > k.at {
                acc = acc + k.change.clone() * (x.clone() - k.at.clone());
            }
        }
        acc
    }

    /// Slopes of the `K + 1` affine pieces, left to right.
    pub fn piece_slopes(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.knots.len() + 1);
        let mut s = self.base_slope.clone();
        out.push(s.clone());
        for k in &self.knots {
            s = s + k.change.clone();
            out.push(s.clone());
        }
        out
    }

    /// Slope of the piece containing `x` (right derivative).
    pub fn slope_at(&self, x: &T) -> T {
        let mut s = self.base_slope.clone();
        for k in &self.knots {
            if *x >= k.at {
                s = s + k.change.clone();
            }
        }
        s
    }

    /// Moves the anchor. `x` must not lie right of any knot.
    pub fn with_anchor(&self, x: T) -> Result<Self> {
        let y = self.eval(&x);
        Self::new(x, y, self.base_slope.clone(), self.knots.clone())
    }

    /// Equality of the underlying functions, ignoring the anchor.
    pub fn same_function(&self, other: &Self) -> bool {
        if self.knots != other.knots || self.base_slope != other.base_slope {
            return false;
        }
        self.eval(&other.anchor_x) == other.anchor_y
    }

    /// `V_p`: knot count for `p = 0`, `Σ |c_k|^p` otherwise.
    pub fn vp_cost(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        Ok(lp_sum(self.change_magnitudes(), p))
    }

    /// `|c_k|` as floats.
    pub fn change_magnitudes(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.change.to_f64().abs()).collect()
    }

    pub fn lipschitz(&self) -> f64 {
        self.piece_slopes().iter().map(|s| s.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn report(&self, p: f64) -> Result<PathNormReport> {
        Ok(PathNormReport {
            p,
            lp_cost: self.vp_cost(p)?,
            l1_cost: lp_sum(self.change_magnitudes(), 1.0),
            l0_count: self.knots.len(),
            lipschitz: self.lipschitz(),
        })
    }

    pub fn convert<U: Scalar>(&self) -> Cpwl<U> {
        let knots = self.knots.iter().map(|k| Knot { at: convert(&k.at), change: convert(&k.change) }).collect();
        Cpwl::new(convert(&self.anchor_x), convert(&self.anchor_y), convert(&self.base_slope), knots)
            .expect("conversion preserves knot order")
    }
}

fn canonical_knots<T: Scalar>(mut knots: Vec<Knot<T>>) -> Vec<Knot<T>> {
    knots.sort_by(|a, b| a.at.partial_cmp(&b.at).expect("finite knot locations"));
    let mut merged: Vec<Knot<T>> = Vec::with_capacity(knots.len());
    for k in knots {
        match merged.last_mut() {
            Some(last) if last.at == k.at => last.change = last.change.clone() + k.change,
            _ => merged.push(k),
        }
    }
    if T::EXACT {
        merged.retain(|k| !k.change.is_zero());
    } else {
        let scale = merged.iter().map(|k| k.change.to_f64().abs()).fold(0.0, f64::max);
        merged.retain(|k| {
            let c = k.change.to_f64().abs();
            c != 0.0 && c > FLOAT_ELISION_TOL * scale
        });
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hat() -> Cpwl<f64> {
        Cpwl::new(0.0, 0.0, 0.0, vec![Knot { at: 0.0, change: 1.0 }, Knot { at: 1.0, change: -2.0 }]).unwrap()
    }

    #[test]
    fn line_eval() {
        let f = Cpwl::line(0.0, 0.0, 1.0);
        assert_eq!(f.eval(&5.0), 5.0);
    }

    #[test]
    fn hat_eval_and_report() {
        let f = hat();
        assert_eq!(f.eval(&2.0), 0.0);
        assert_eq!(f.eval(&1.0), 1.0);
        assert_eq!(f.eval(&-3.0), 0.0);
        let r = f.report(0.5).unwrap();
        assert_eq!(r.l0_count, 2);
        assert_eq!(r.l1_cost, 3.0);
        assert!((r.lp_cost - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(r.lipschitz, 1.0);
    }

    #[test]
    fn vp_cost_formula() {
        let f = Cpwl::new(-1.0, 0.0, 0.0, vec![Knot { at: 0.0, change: 3.0 }, Knot { at: 1.0, change: -4.0 }]).unwrap();
        assert!((f.vp_cost(0.5).unwrap() - (3f64.sqrt() + 2.0)).abs() < 1e-12);
        assert_eq!(f.vp_cost(0.0).unwrap(), 2.0);
        assert!(f.vp_cost(1.5).is_err());
        assert!(f.vp_cost(-0.1).is_err());
        assert_eq!(Cpwl::line(0.0, 1.0, 2.0).vp_cost(0.3).unwrap(), 0.0);
    }

    #[test]
    fn merges_and_elides() {
        let f = Cpwl::new(
            -1.0,
            0.0,
            1.0,
            vec![Knot { at: 1.0, change: 2.0 }, Knot { at: 0.0, change: 1.0 }, Knot { at: 1.0, change: -2.0 }],
        )
        .unwrap();
        assert_eq!(f.knots(), &[Knot { at: 0.0, change: 1.0 }]);
    }

    #[test]
    fn anchor_must_be_left() {
        assert!(Cpwl::new(2.0, 0.0, 0.0, vec![Knot { at: 1.0, change: 1.0 }]).is_err());
        let f = hat().with_anchor(-5.0).unwrap();
        assert!(f.same_function(&hat()));
    }
}
