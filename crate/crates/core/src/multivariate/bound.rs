use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Estimated threshold below which `ℓᵖ` minimizers are sparsest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PstarBound {
    pub value: f64,
    pub m0: usize,
    pub radius: f64,
    /// Smallest nonzero coordinate seen over enumerated extreme points. Only
    /// an upper estimate of the true minimum, so `value` may overestimate.
    pub r_hat: f64,
    pub estimate: bool,
}

/// `(ln(m₀+1) − ln m₀) / (ln R − ln r̂)`, capped at 1. Returns 1 when
/// `r̂ ≥ R` or `m₀ = 0`.
pub fn pstar_bound(m0: usize, radius: f64, r_hat: Option<f64>) -> Result<PstarBound> {
    let r_hat =
        r_hat.ok_or_else(|| Error::Domain("no nonzero coordinate was observed; the bound is undefined".into()))?;
    if !(r_hat > 0.0 && radius > 0.0) {
        return Err(Error::Domain(format!("need R > 0 and r > 0, got R = {radius}, r = {r_hat}")));
    }
    let value = if r_hat >= radius || m0 == 0 {
        1.0
    } else {
        let m = m0 as f64;
        (((m + 1.0).ln() - m.ln()) / (radius.ln() - r_hat.ln())).min(1.0)
    };
    Ok(PstarBound { value, m0, radius, r_hat, estimate: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_and_arithmetic_cases() {
        assert_eq!(pstar_bound(3, 2.0, Some(2.0)).unwrap().value, 1.0);
        assert_eq!(pstar_bound(1, 2.0, Some(1.0)).unwrap().value, 1.0);
        let v = pstar_bound(3, 10.0, Some(0.5)).unwrap().value;
        let expect = (4f64.ln() - 3f64.ln()) / (10f64.ln() - 0.5f64.ln());
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.0960).abs() < 5e-5);
        assert!(pstar_bound(2, 1.0, None).is_err());
    }
}
