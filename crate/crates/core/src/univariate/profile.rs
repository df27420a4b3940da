use crate::dataset::Dataset1D;
use crate::scalar::Scalar;

/// Secant slopes and discrete curvature signs.
///
/// Indices are 0-based: `slope(k)` joins points `k` and `k + 1`, and
/// `curvature(i)` is defined for interior points `1 ..= N - 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeProfile<T> {
    slopes: Vec<T>,
    curvatures: Vec<i8>,
}

impl<T: Scalar> SlopeProfile<T> {
    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn slope(&self, k: usize) -> &T {
        &self.slopes[k]
    }

    /// Curvature signs of points `1 ..= N - 2`, in order.
    pub fn curvatures(&self) -> &[i8] {
        &self.curvatures
    }

    /// Curvature sign at interior point `i`.
    pub fn curvature(&self, i: usize) -> i8 {
        self.curvatures[i - 1]
    }

    /// Number of data points.
    pub fn num_points(&self) -> usize {
        self.slopes.len() + 1
    }

    /// `Σ |s_{k+1} - s_k|`, the `V_1` of every minimal interpolant.
    pub fn total_variation(&self) -> f64 {
        self.slopes.windows(2).map(|w| (w[1].clone() - w[0].clone()).abs().to_f64()).sum()
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.slopes.iter().map(|s| s.to_f64().abs()).fold(0.0, f64::max)
    }
}

pub fn slope_profile<T: Scalar>(d: &Dataset1D<T>) -> SlopeProfile<T> {
    let slopes: Vec<T> = (0..d.len() - 1)
        .map(|k| (d.y(k + 1).clone() - d.y(k).clone()) / (d.x(k + 1).clone() - d.x(k).clone()))
        .collect();
    let curvatures = slopes
        .windows(2)
        .map(|w| {
            let scale = T::max_of(&w[0].abs(), &w[1].abs());
            (w[1].clone() - w[0].clone()).sign_rel(&scale)
        })
        .collect();
    SlopeProfile { slopes, curvatures }
}

/// A maximal block of at least two consecutive interior points with the
/// same nonzero curvature: points `start ..= start + m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurvatureRun {
    pub start: usize,
    pub m: usize,
    pub sign: i8,
}

impl CurvatureRun {
    pub fn end(&self) -> usize {
        self.start + self.m
    }

    /// Number of free inner slopes.
    pub fn free_slopes(&self) -> usize {
        self.m - 1
    }

    /// Gap indices covered by the run (`start .. start + m`).
    pub fn gaps(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.m
    }

    /// Fewest knots any interpolant can place across the run.
    pub fn sparsest_knots(&self) -> usize {
        (self.m + 2) / 2
    }
}

/// One element of the partition of `[x_1, x_N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// Gaps `first ..= last` on which every minimizer is affine per gap.
    Linear { first: usize, last: usize },
    /// Gaps of `runs[index]`.
    Run(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub runs: Vec<CurvatureRun>,
    /// Gaps outside every run, ascending.
    pub forced_gaps: Vec<usize>,
    /// Partition of the gaps `0 .. N - 1`, left to right.
    pub regions: Vec<Region>,
}

impl Decomposition {
    /// Run containing gap `k`, if any.
    pub fn run_of_gap(&self, k: usize) -> Option<usize> {
        self.runs.iter().position(|r| r.gaps().contains(&k))
    }

    /// True when no run has free slopes.
    pub fn is_forced(&self) -> bool {
        self.runs.iter().all(|r| r.m < 2)
    }
}

pub fn decompose_runs<T: Scalar>(sp: &SlopeProfile<T>) -> Decomposition {
    let n = sp.num_points();
    let mut runs = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let sign = sp.curvature(i);
        let mut j = i;
        while sign != 0 && j + 2 < n && sp.curvature(j + 1) == sign {
            j += 1;
        }
        if sign != 0 && j > i {
            runs.push(CurvatureRun { start: i, m: j - i, sign });
        }
        i = j + 1;
    }

    let mut forced_gaps = Vec::new();
    let mut regions = Vec::new();
    let mut k = 0;
    let mut next_run = 0;
    while k + 1 < n {
        if next_run < runs.len() && runs[next_run].start == k {
            regions.push(Region::Run(next_run));
            k = runs[next_run].end();
            next_run += 1;
            continue;
        }
        forced_gaps.push(k);
        match regions.last_mut() {
            Some(Region::Linear { last, .. }) if *last + 1 == k => *last = k,
            _ => regions.push(Region::Linear { first: k, last: k }),
        }
        k += 1;
    }
    Decomposition { runs, forced_gaps, regions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn data(pts: &[(i64, i64)]) -> Dataset1D<Rational> {
        Dataset1D::new(pts.iter().map(|&(x, y)| (Rational::from_i64(x), Rational::from_i64(y))).collect()).unwrap()
    }

    #[test]
    fn profiles() {
        let sp = slope_profile(&data(&[(0, 0), (1, 1), (3, 1)]));
        assert_eq!(sp.slopes(), &[Rational::from_i64(1), Rational::from_i64(0)]);
        assert_eq!(sp.curvatures(), &[-1]);

        let sp = slope_profile(&data(&[(0, 0), (1, 1), (2, 2)]));
        assert_eq!(sp.curvatures(), &[0]);

        let sp = slope_profile(&data(&[(0, 0), (1, 1), (2, 0), (3, 1)]));
        assert_eq!(sp.slopes(), &[Rational::from_i64(1), Rational::from_i64(-1), Rational::from_i64(1)]);
        assert_eq!(sp.curvatures(), &[-1, 1]);
    }

    #[test]
    fn zigzag_has_no_runs() {
        let sp = slope_profile(&data(&[(0, 0), (1, 1), (2, 0), (3, 1)]));
        let dec = decompose_runs(&sp);
        assert!(dec.runs.is_empty());
        assert_eq!(dec.forced_gaps, vec![0, 1, 2]);
        assert_eq!(dec.regions, vec![Region::Linear { first: 0, last: 2 }]);
    }

    #[test]
    fn convex_run() {
        // slopes 0, 1, 2, 4
        let sp = slope_profile(&data(&[(0, 0), (1, 0), (2, 1), (3, 3), (4, 7)]));
        let dec = decompose_runs(&sp);
        assert_eq!(dec.runs, vec![CurvatureRun { start: 1, m: 2, sign: 1 }]);
        assert_eq!(dec.forced_gaps, vec![0, 3]);
        assert_eq!(
            dec.regions,
            vec![Region::Linear { first: 0, last: 0 }, Region::Run(0), Region::Linear { first: 3, last: 3 }]
        );
        assert_eq!(dec.run_of_gap(2), Some(0));
        assert_eq!(dec.run_of_gap(3), None);
    }

    #[test]
    fn collinear_has_no_runs() {
        let sp = slope_profile(&data(&[(0, 0), (1, 1), (2, 2)]));
        let dec = decompose_runs(&sp);
        assert!(dec.runs.is_empty());
        assert!(dec.is_forced());
    }

    #[test]
    fn sparsest_counts() {
        for (m, k) in [(1, 1), (2, 2), (3, 2), (4, 3), (5, 3)] {
            assert_eq!(CurvatureRun { start: 1, m, sign: 1 }.sparsest_knots(), k);
        }
    }
}
