//! Checks an interpolant against properties every minimal solution has.
//!
//! Deliberately recomputes slopes and curvature from the raw data instead of
//! reusing the solver's profile, so a bug there cannot hide itself here.

use serde::{Deserialize, Serialize};

use crate::cpwl::Cpwl;
use crate::dataset::Dataset1D;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

pub const CHECK_INTERPOLATION: &str = "interpolation";
pub const CHECK_KNOT_COUNT: &str = "knot_count";
pub const CHECK_KNOT_RANGE: &str = "knot_range";
pub const CHECK_TOTAL_VARIATION: &str = "total_variation";
pub const CHECK_LIPSCHITZ: &str = "lipschitz";
pub const CHECK_FORCED_LINEAR: &str = "forced_linear";
pub const CHECK_RUN_BRACKETS: &str = "run_brackets";
pub const CHECK_OPTIMALITY: &str = "optimality";

/// Verifies `f` against `d`. When `optimum` is given, also checks that
/// `V_p(f)` does not exceed it (relative tolerance 1e-9).
pub fn verify<T: Scalar>(d: &Dataset1D<T>, f: &Cpwl<T>, p: f64, optimum: Option<f64>) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let n = d.len();
    let fx: Vec<f64> = (0..n).map(|i| d.x(i).to_f64()).collect();
    let fy: Vec<f64> = (0..n).map(|i| d.y(i).to_f64()).collect();

    // Residuals: exact backends must match exactly.
    let mut worst = 0.0f64;
    let mut exact_ok = true;
    for (i, yi) in fy.iter().enumerate() {
        let v = f.eval(d.x(i));
        if T::EXACT && &v != d.y(i) {
            exact_ok = false;
        }
        worst = worst.max((v.to_f64() - yi).abs());
    }
    let ytol = 1e-10 * (1.0 + fy.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    rep.push(CHECK_INTERPOLATION, exact_ok && worst <= ytol, format!("max residual {worst:e}"));

    let k = f.num_knots();
    rep.push(CHECK_KNOT_COUNT, k <= n.saturating_sub(2), format!("{k} knots for {n} points"));

    if n >= 3 {
        let (lo, hi) = (d.x(1), d.x(n - 2));
        let outside: Vec<String> =
            f.knots().iter().filter(|kn| kn.at < *lo || kn.at > *hi).map(|kn| kn.at.to_string()).collect();
        rep.push(
            CHECK_KNOT_RANGE,
            outside.is_empty(),
            if outside.is_empty() {
                format!("all knots in [{lo}, {hi}]")
            } else {
                format!("knots outside [{lo}, {hi}]: {}", outside.join(", "))
            },
        );
    } else {
        rep.push(CHECK_KNOT_RANGE, k == 0, "two points admit no knots".into());
    }

    let slopes: Vec<T> =
        (0..n - 1).map(|k| (d.y(k + 1).clone() - d.y(k).clone()) / (d.x(k + 1).clone() - d.x(k).clone())).collect();
    let tv: f64 = slopes.windows(2).map(|w| (w[1].clone() - w[0].clone()).to_f64().abs()).sum();
    let l1: f64 = f.change_magnitudes().iter().sum();
    rep.push(
        CHECK_TOTAL_VARIATION,
        (l1 - tv).abs() <= 1e-9 * tv.max(1.0),
        format!("V_1 = {l1}, data total variation = {tv}"),
    );

    let smax = slopes.iter().map(|s| s.to_f64().abs()).fold(0.0, f64::max);
    let lip = f.lipschitz();
    rep.push(CHECK_LIPSCHITZ, lip <= smax + 1e-12 * smax.max(1.0), format!("Lipschitz {lip}, max secant slope {smax}"));

    // Curvature signs recomputed here.
    let curv: Vec<i8> = slopes
        .windows(2)
        .map(|w| {
            let scale = T::max_of(&w[0].abs(), &w[1].abs());
            (w[1].clone() - w[0].clone()).sign_rel(&scale)
        })
        .collect();
    let sign_at = |i: usize| if i >= 1 && i + 1 < n { curv[i - 1] } else { 0 };
    let mut forced_bad = Vec::new();
    let mut bracket_bad = Vec::new();
    for gap in 0..n - 1 {
        let (a, b) = (sign_at(gap), sign_at(gap + 1));
        let in_run = a != 0 && a == b;
        let inside: Vec<&T> =
            f.knots().iter().map(|kn| &kn.at).filter(|u| **u > *d.x(gap) && **u < *d.x(gap + 1)).collect();
        if !in_run {
            if !inside.is_empty() {
                forced_bad.push(format!("gap [{}, {}]", fx[gap], fx[gap + 1]));
            }
            continue;
        }
        // Inside a run, slopes stay between the secants entering and leaving it.
        let mut first = gap;
        while first >= 1 && sign_at(first) == a && sign_at(first - 1) == a {
            first -= 1;
        }
        let mut last = gap + 1;
        while last + 1 < n && sign_at(last + 1) == a {
            last += 1;
        }
        let s_in = slopes[first - 1].to_f64();
        let s_out = slopes[last].to_f64();
        let (lo, hi) = (s_in.min(s_out), s_in.max(s_out));
        let mid = (d.x(gap).clone() + d.x(gap + 1).clone()) / T::from_i64(2);
        let mut probes = vec![d.x(gap).clone(), mid, d.x(gap + 1).clone()];
        probes.extend(inside.into_iter().cloned());
        let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        for x in probes {
            let s = f.slope_at(&x).to_f64();
            if s < lo - slack || s > hi + slack {
                bracket_bad.push(format!("slope {s} at {} outside [{lo}, {hi}]", x.to_f64()));
            }
        }
    }
    rep.push(
        CHECK_FORCED_LINEAR,
        forced_bad.is_empty(),
        if forced_bad.is_empty() {
            "no knots inside forced gaps".into()
        } else {
            format!("knots inside {}", forced_bad.join(", "))
        },
    );
    bracket_bad.dedup();
    rep.push(
        CHECK_RUN_BRACKETS,
        bracket_bad.is_empty(),
        if bracket_bad.is_empty() { "run slopes bracketed".into() } else { bracket_bad.join("; ") },
    );

    if let Some(opt) = optimum {
        let cost = f.vp_cost(p).unwrap_or(f64::INFINITY);
        rep.push(CHECK_OPTIMALITY, cost <= opt + 1e-9 * opt.max(1.0), format!("V_{p} = {cost}, optimum {opt}"));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpwl::Knot;
    use crate::scalar::Rational;
    use crate::univariate::solve;

    fn q(s: &str) -> Rational {
        Rational::parse_decimal(s).unwrap()
    }

    fn zigzag() -> Dataset1D<Rational> {
        Dataset1D::new(vec![(q("0"), q("0")), (q("1"), q("1")), (q("2"), q("0")), (q("3"), q("1"))]).unwrap()
    }

    #[test]
    fn solver_output_passes() {
        let d = zigzag();
        let s = solve(&d, 0.5).unwrap();
        let rep = verify(&d, &s.f, 0.5, Some(s.report.lp_cost));
        assert!(rep.passed(), "{:?}", rep.failed().collect::<Vec<_>>());
    }

    #[test]
    fn knot_left_of_second_point_fails() {
        // Interpolates the data with an extra knot at x_1 = 0.
        let d = zigzag();
        let f = Cpwl::new(
            q("-1"),
            q("0"),
            q("0"),
            vec![
                Knot { at: q("0"), change: q("1") },
                Knot { at: q("1"), change: q("-2") },
                Knot { at: q("2"), change: q("2") },
            ],
        )
        .unwrap();
        let rep = verify(&d, &f, 0.5, None);
        assert!(rep.get(CHECK_INTERPOLATION).unwrap().passed);
        assert!(!rep.get(CHECK_KNOT_RANGE).unwrap().passed);
        assert!(!rep.passed());
    }

    #[test]
    fn non_interpolant_fails() {
        let d = zigzag();
        let f = Cpwl::line(q("0"), q("0"), q("0"));
        assert!(!verify(&d, &f, 0.5, None).get(CHECK_INTERPOLATION).unwrap().passed);
    }
}
