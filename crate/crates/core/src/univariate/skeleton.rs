//! Forced structure of every minimal interpolant and assembly of complete
//! interpolants from per-run vertex choices.

use super::profile::{Decomposition, Region, SlopeProfile};
use super::vertex::inner_slopes;
use crate::cpwl::{Cpwl, Knot};
use crate::dataset::Dataset1D;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One step of the left-to-right layout of an interpolant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// The secant line of gap `k`.
    Secant(usize),
    /// The inner segments of `runs[index]` (`m ≥ 2`), still undetermined.
    Open(usize),
}

/// Forced segments plus placeholders for runs with free slopes. Runs with
/// `m = 1` leave no placeholder: their single knot is the intersection of
/// the neighbouring secants.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    pub pieces: Vec<Piece>,
    pub decomposition: Decomposition,
}

impl Skeleton {
    /// Indices of runs with free slopes, in order.
    pub fn open_runs(&self) -> Vec<usize> {
        self.pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Open(r) => Some(*r),
                Piece::Secant(_) => None,
            })
            .collect()
    }
}

pub fn skeleton<T: Scalar>(sp: &SlopeProfile<T>, dec: &Decomposition) -> Skeleton {
    let mut pieces = Vec::new();
    for region in &dec.regions {
        match region {
            Region::Linear { first, last } => pieces.extend((*first..=*last).map(Piece::Secant)),
            Region::Run(r) => {
                if dec.runs[*r].m >= 2 {
                    pieces.push(Piece::Open(*r));
                }
            }
        }
    }
    debug_assert_eq!(dec.forced_gaps.len() + dec.runs.iter().map(|r| r.m).sum::<usize>(), sp.slopes().len());
    Skeleton { pieces, decomposition: dec.clone() }
}

/// An infinite line, with the data points it is known to pass through.
#[derive(Clone, Debug)]
struct Segment<T> {
    slope: T,
    through: Vec<usize>,
}

fn intersect<T: Scalar>(d: &Dataset1D<T>, a: &Segment<T>, b: &Segment<T>) -> T {
    if let Some(&i) = a.through.iter().find(|i| b.through.contains(i)) {
        return d.x(i).clone();
    }
    let (i, j) = (a.through[0], b.through[0]);
    // y_i + s_a (x - x_i) = y_j + s_b (x - x_j)
    let num = d.y(j).clone() - d.y(i).clone() + a.slope.clone() * d.x(i).clone() - b.slope.clone() * d.x(j).clone();
    num / (a.slope.clone() - b.slope.clone())
}

/// Builds the interpolant for one vertex per open run. `choices[r]` is the
/// `α` of run `r` and is ignored for runs with `m < 2`.
pub fn assemble<T: Scalar>(
    d: &Dataset1D<T>,
    sp: &SlopeProfile<T>,
    sk: &Skeleton,
    choices: &[Vec<bool>],
) -> Result<Cpwl<T>> {
    let runs = &sk.decomposition.runs;
    if choices.len() != runs.len() {
        return Err(Error::Internal(format!("{} choices for {} runs", choices.len(), runs.len())));
    }
    let mut segs: Vec<Segment<T>> = Vec::new();
    let mut push = |s: Segment<T>| match segs.last_mut() {
        Some(last) if last.slope == s.slope => {
            for i in s.through {
                if !last.through.contains(&i) {
                    last.through.push(i);
                }
            }
        }
        _ => segs.push(s),
    };
    for piece in &sk.pieces {
        match piece {
            Piece::Secant(k) => push(Segment { slope: sp.slope(*k).clone(), through: vec![*k, k + 1] }),
            Piece::Open(r) => {
                let run = &runs[*r];
                let alpha = &choices[*r];
                if alpha.len() != run.free_slopes() {
                    return Err(Error::Internal(format!(
                        "run {r} needs {} slopes, got {}",
                        run.free_slopes(),
                        alpha.len()
                    )));
                }
                for (j, u) in inner_slopes(run, alpha, sp).into_iter().enumerate() {
                    let pt = run.start + j + 1;
                    let other = if alpha[j] { pt + 1 } else { pt - 1 };
                    push(Segment { slope: u, through: vec![pt, other] });
                }
            }
        }
    }
    let mut knots = Vec::with_capacity(segs.len().saturating_sub(1));
    for w in segs.windows(2) {
        knots.push(Knot { at: intersect(d, &w[0], &w[1]), change: w[1].slope.clone() - w[0].slope.clone() });
    }
    let first = &segs[0];
    let anchor_x = d.x(0).clone() - T::one();
    let anchor_y = d.y(0).clone() - first.slope.clone();
    Cpwl::new(anchor_x, anchor_y, first.slope.clone(), knots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::univariate::profile::{decompose_runs, slope_profile};

    fn data(pts: &[(&str, &str)]) -> Dataset1D<Rational> {
        Dataset1D::new(
            pts.iter()
                .map(|(x, y)| (Rational::parse_decimal(x).unwrap(), Rational::parse_decimal(y).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn q(s: &str) -> Rational {
        Rational::parse_decimal(s).unwrap()
    }

    #[test]
    fn zigzag_is_fully_forced() {
        let d = data(&[("0", "0"), ("1", "1"), ("2", "0"), ("3", "1")]);
        let sp = slope_profile(&d);
        let sk = skeleton(&sp, &decompose_runs(&sp));
        assert!(sk.open_runs().is_empty());
        let f = assemble(&d, &sp, &sk, &[]).unwrap();
        assert_eq!(f.knots(), &[Knot { at: q("1"), change: q("-2") }, Knot { at: q("2"), change: q("2") }]);
    }

    #[test]
    fn single_peak() {
        let d = data(&[("0", "0"), ("1", "1"), ("2", "0")]);
        let sp = slope_profile(&d);
        let sk = skeleton(&sp, &decompose_runs(&sp));
        let f = assemble(&d, &sp, &sk, &[]).unwrap();
        assert_eq!(f.knots(), &[Knot { at: q("1"), change: q("-2") }]);
    }

    #[test]
    fn pair_gets_single_knot_between() {
        // slopes 0, 1, 3: a convex pair at points 1 and 2
        let d = data(&[("0", "0"), ("1", "0"), ("2", "1"), ("3", "4")]);
        let sp = slope_profile(&d);
        let dec = decompose_runs(&sp);
        assert_eq!(dec.runs.len(), 1);
        assert_eq!(dec.runs[0].m, 1);
        let sk = skeleton(&sp, &dec);
        let f = assemble(&d, &sp, &sk, &[vec![]]).unwrap();
        // y = 0 meets y = 1 + 3 (x - 2) at x = 5/3
        assert_eq!(f.knots(), &[Knot { at: q("5/3"), change: q("3") }]);
        for i in 0..d.len() {
            assert_eq!(&f.eval(d.x(i)), d.y(i));
        }
    }

    #[test]
    fn collinear_stretch_is_one_segment() {
        let d = data(&[("0", "0"), ("1", "1"), ("2", "2"), ("3", "3"), ("4", "0")]);
        let sp = slope_profile(&d);
        let sk = skeleton(&sp, &decompose_runs(&sp));
        let f = assemble(&d, &sp, &sk, &[]).unwrap();
        assert_eq!(f.knots(), &[Knot { at: q("3"), change: q("-4") }]);
    }

    #[test]
    fn vertex_assembly_interpolates() {
        let d = data(&[("0", "0"), ("1", "0"), ("2", "0.05"), ("3", "5.05"), ("4", "14.95"), ("5", "24.95")]);
        let sp = slope_profile(&d);
        let sk = skeleton(&sp, &decompose_runs(&sp));
        assert_eq!(sk.open_runs(), vec![0]);
        for mask in 0..4u8 {
            let alpha = vec![mask & 2 != 0, mask & 1 != 0];
            let f = assemble(&d, &sp, &sk, &[alpha]).unwrap();
            for i in 0..d.len() {
                assert_eq!(&f.eval(d.x(i)), d.y(i), "mask {mask} point {i}");
            }
        }
        let f = assemble(&d, &sp, &sk, &[vec![true, false]]).unwrap();
        assert_eq!(f.num_knots(), 2);
    }
}
