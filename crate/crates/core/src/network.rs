//! Shallow ReLU networks `x ↦ Σ v_k (w_k x + b_k)_+ + a x + c` and their
//! conversion to and from [`Cpwl`] functions.

use crate::cpwl::{check_p, lp_sum, Cpwl, Knot};
use crate::error::Result;
use crate::scalar::{convert, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Neuron<T> {
    pub w: T,
    pub b: T,
    pub v: T,
}

/// Univariate network with a skip connection `skip_a x + skip_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReluNet1D<T> {
    pub neurons: Vec<Neuron<T>>,
    pub skip_a: T,
    pub skip_c: T,
}

impl<T: Scalar> ReluNet1D<T> {
    pub fn eval(&self, x: &T) -> T {
        let mut acc = self.skip_a.clone() * x.clone() + self.skip_c.clone();
        for n in &self.neurons {
            let pre = n.w.clone() * x.clone() + n.b.clone();
            acc = acc + n.v.clone() * pre.relu();
        }
        acc
    }

    /// `Σ |w_k v_k|^p`; for `p = 0` the number of neurons with `w_k v_k ≠ 0`.
    pub fn path_norm(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        Ok(lp_sum(self.neurons.iter().map(|n| (n.w.clone() * n.v.clone()).to_f64().abs()), p))
    }

    pub fn convert<U: Scalar>(&self) -> ReluNet1D<U> {
        ReluNet1D {
            neurons: self
                .neurons
                .iter()
                .map(|n| Neuron { w: convert(&n.w), b: convert(&n.b), v: convert(&n.v) })
                .collect(),
            skip_a: convert(&self.skip_a),
            skip_c: convert(&self.skip_c),
        }
    }
}

/// One unit-weight neuron per knot; the skip connection carries the affine
/// part left of the first knot.
pub fn to_network<T: Scalar>(f: &Cpwl<T>) -> ReluNet1D<T> {
    let neurons = f.knots().iter().map(|k| Neuron { w: T::one(), b: -k.at.clone(), v: k.change.clone() }).collect();
    let skip_a = f.base_slope().clone();
    let skip_c = f.anchor_y().clone() - skip_a.clone() * f.anchor_x().clone();
    ReluNet1D { neurons, skip_a, skip_c }
}

/// Canonical function computed by `net`. Each neuron is rescaled to `|w| = 1`;
/// a neuron facing left is rewritten as a right-facing one plus an affine
/// term, and neurons sharing an activation site are merged.
pub fn from_network<T: Scalar>(net: &ReluNet1D<T>) -> Cpwl<T> {
    let mut slope = net.skip_a.clone();
    let mut constant = net.skip_c.clone();
    let mut knots = Vec::new();
    for n in &net.neurons {
        if n.w.is_zero() {
            constant = constant + n.v.clone() * n.b.relu();
            continue;
        }
        let scale = n.w.abs();
        let at = -n.b.clone() / n.w.clone();
        let change = n.v.clone() * scale;
        if n.w < T::zero() {
            // c (at - x)_+ = c (x - at)_+ - c (x - at)
            slope = slope - change.clone();
            constant = constant + change.clone() * at.clone();
        }
        knots.push(Knot { at, change });
    }
    let anchor_x = knots
        .iter()
        .map(|k| k.at.clone())
        .reduce(|a, b| T::min_of(&a, &b))
        .map(|m| m - T::one())
        .unwrap_or_else(T::zero);
    let anchor_y = constant + slope.clone() * anchor_x.clone();
    Cpwl::new(anchor_x, anchor_y, slope, knots).expect("anchor left of all knots")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(s: &str) -> Rational {
        Rational::parse_decimal(s).unwrap()
    }

    #[test]
    fn line_has_no_neurons() {
        let f = Cpwl::line(0.0, 1.0, 2.0);
        let net = to_network(&f);
        assert!(net.neurons.is_empty());
        assert_eq!(net.skip_a, 2.0);
        assert_eq!(net.skip_c, 1.0);
    }

    #[test]
    fn hat_maps_per_knot() {
        let f = Cpwl::new(-1.0, 0.0, 0.0, vec![Knot { at: 0.0, change: 1.0 }, Knot { at: 1.0, change: -2.0 }]).unwrap();
        let net = to_network(&f);
        let vs: Vec<f64> = net.neurons.iter().map(|n| n.v).collect();
        assert_eq!(vs, vec![1.0, -2.0]);
        for x in [-2.0, 0.0, 0.5, 1.0, 3.0] {
            assert_eq!(net.eval(&x), f.eval(&x));
        }
        assert!(from_network(&net).same_function(&f));
    }

    #[test]
    fn absolute_value_merges() {
        // (x)_+ + (-x)_+ = |x|
        let net = ReluNet1D {
            neurons: vec![Neuron { w: r("1"), b: r("0"), v: r("1") }, Neuron { w: r("-1"), b: r("0"), v: r("1") }],
            skip_a: r("0"),
            skip_c: r("0"),
        };
        let f = from_network(&net);
        assert_eq!(f.knots(), &[Knot { at: r("0"), change: r("2") }]);
        assert_eq!(f.base_slope(), &r("-1"));
        for x in ["-3", "-0.5", "0", "2"] {
            assert_eq!(f.eval(&r(x)), net.eval(&r(x)));
        }
    }

    #[test]
    fn rescales_and_absorbs_dead_neurons() {
        let net = ReluNet1D {
            neurons: vec![
                Neuron { w: r("2"), b: r("-1"), v: r("3") },
                Neuron { w: r("0"), b: r("4"), v: r("0.5") },
                Neuron { w: r("0"), b: r("-4"), v: r("7") },
            ],
            skip_a: r("1"),
            skip_c: r("0"),
        };
        let f = from_network(&net);
        assert_eq!(f.knots(), &[Knot { at: r("0.5"), change: r("6") }]);
        for x in ["-1", "0.5", "3"] {
            assert_eq!(f.eval(&r(x)), net.eval(&r(x)));
        }
    }
}
