//! Labeled point sets.

use crate::error::{Error, Result};
use crate::scalar::{convert, Scalar};

/// Univariate data sorted by strictly increasing abscissa.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset1D<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    /// `order[k]` is the input row (0-based) of sorted point `k`.
    order: Vec<usize>,
}

impl<T: Scalar> Dataset1D<T> {
    /// Sorts `points` by abscissa. Fails on fewer than two points or on a
    /// repeated abscissa; the error names both rows (1-based, input order).
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 points, got {}", points.len())));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].0.partial_cmp(&points[b].0).expect("finite abscissae").then(a.cmp(&b)));
        for w in order.windows(2) {
            if points[w[0]].0 == points[w[1]].0 {
                let (first, second) = (w[0].min(w[1]) + 1, w[0].max(w[1]) + 1);
                return Err(Error::DuplicateAbscissa { x: points[w[0]].0.to_string(), first, second });
            }
        }
        let xs = order.iter().map(|&i| points[i].0.clone()).collect();
        let ys = order.iter().map(|&i| points[i].1.clone()).collect();
        Ok(Self { xs, ys, order })
    }

    /// Convenience constructor from separate coordinate vectors.
    pub fn from_xy(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidDataset(format!("{} abscissae but {} ordinates", xs.len(), ys.len())));
        }
        Self::new(xs.into_iter().zip(ys).collect())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn x(&self, i: usize) -> &T {
        &self.xs[i]
    }

    pub fn y(&self, i: usize) -> &T {
        &self.ys[i]
    }

    /// Input row of each sorted point.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// True when the input was already sorted.
    pub fn was_sorted(&self) -> bool {
        self.order.iter().enumerate().all(|(k, &i)| k == i)
    }

    /// Same data in another arithmetic backend.
    pub fn convert<U: Scalar>(&self) -> Dataset1D<U> {
        Dataset1D {
            xs: self.xs.iter().map(convert).collect(),
            ys: self.ys.iter().map(convert).collect(),
            order: self.order.clone(),
        }
    }
}

/// Multivariate data. Stored in `f64`; the exact LP path converts each entry
/// to its exact binary rational.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetND {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl DatasetND {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidDataset("need at least 1 point".into()));
        }
        if x.len() != y.len() {
            return Err(Error::InvalidDataset(format!("{} inputs but {} targets", x.len(), y.len())));
        }
        let d = x[0].len();
        if d == 0 {
            return Err(Error::InvalidDataset("input dimension must be at least 1".into()));
        }
        for (i, row) in x.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Format(format!("row {} has {} coordinates, expected {d}", i + 1, row.len())));
            }
            if !row.iter().chain(std::iter::once(&y[i])).all(|v| v.is_finite()) {
                return Err(Error::InvalidDataset(format!("row {} is not finite", i + 1)));
            }
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Row `i` of `[X, 1]`.
    pub fn augmented_row(&self, i: usize) -> Vec<f64> {
        let mut row = self.x[i].clone();
        row.push(1.0);
        row
    }

    /// Views a univariate dataset as a one-column multivariate one.
    pub fn from_1d<T: Scalar>(d: &Dataset1D<T>) -> Self {
        let x = d.xs().iter().map(|v| vec![v.to_f64()]).collect();
        let y = d.ys().iter().map(|v| v.to_f64()).collect();
        Self { x, y }
    }
}
