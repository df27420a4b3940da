use super::profile::{decompose_runs, slope_profile, SlopeProfile};
use super::skeleton::{assemble, skeleton, Skeleton};
use super::vertex::{solve_run, sparsest_vertex, VertexChoice};
use crate::cpwl::{Cpwl, PathNormReport};
use crate::dataset::Dataset1D;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A minimal `V_p` interpolant with the vertex chosen in every free run.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub f: Cpwl<T>,
    /// Chosen vertex of each run with free slopes, left to right.
    pub choices: Vec<VertexChoice>,
    pub report: PathNormReport,
    /// False when some run has a co-optimal alternative vertex.
    pub unique: bool,
    /// Co-optimal alternatives, across all runs.
    pub ties: Vec<VertexChoice>,
}

fn check_open_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} is outside (0, 1]")))
    }
}

struct Prepared<T> {
    sp: SlopeProfile<T>,
    sk: Skeleton,
}

fn prepare<T: Scalar>(d: &Dataset1D<T>) -> Prepared<T> {
    let sp = slope_profile(d);
    let dec = decompose_runs(&sp);
    let sk = skeleton(&sp, &dec);
    Prepared { sp, sk }
}

fn build<T: Scalar>(d: &Dataset1D<T>, prep: &Prepared<T>, picks: &[(usize, Vec<bool>)]) -> Result<Cpwl<T>> {
    let mut alphas = vec![Vec::new(); prep.sk.decomposition.runs.len()];
    for (r, a) in picks {
        alphas[*r] = a.clone();
    }
    assemble(d, &prep.sp, &prep.sk, &alphas)
}

/// Minimizes `V_p` over interpolants of `d`.
pub fn solve<T: Scalar>(d: &Dataset1D<T>, p: f64) -> Result<SolveResult<T>> {
    check_open_p(p)?;
    let prep = prepare(d);
    let runs = &prep.sk.decomposition.runs;
    let mut choices = Vec::new();
    let mut ties = Vec::new();
    for r in prep.sk.open_runs() {
        let sol = solve_run(r, &runs[r], p, &prep.sp)?;
        choices.push(sol.choice);
        ties.extend(sol.ties);
    }
    let picks: Vec<_> = choices.iter().map(|c| (c.run, c.alpha.clone())).collect();
    let f = build(d, &prep, &picks)?;
    let report = f.report(p)?;
    Ok(SolveResult { f, choices, report, unique: ties.is_empty(), ties })
}

/// Sparsest interpolant.
#[derive(Clone, Debug, PartialEq)]
pub struct L0Result<T> {
    pub count: usize,
    pub witness: Cpwl<T>,
    pub choices: Vec<VertexChoice>,
}

/// Fewest knots of any interpolant, with a witness. Each free run uses its
/// vertex preferred as `p → 0⁺`.
pub fn min_l0<T: Scalar>(d: &Dataset1D<T>) -> Result<L0Result<T>> {
    let prep = prepare(d);
    let runs = &prep.sk.decomposition.runs;
    let mut choices = Vec::new();
    for r in prep.sk.open_runs() {
        let (v, curve) = sparsest_vertex(r, &runs[r], &prep.sp)?;
        if curve.knots() != runs[r].sparsest_knots() {
            return Err(Error::Internal(format!(
                "run {r}: sparsest vertex has {} knots, expected {}",
                curve.knots(),
                runs[r].sparsest_knots()
            )));
        }
        choices.push(v);
    }
    let picks: Vec<_> = choices.iter().map(|c| (c.run, c.alpha.clone())).collect();
    let witness = build(d, &prep, &picks)?;
    Ok(L0Result { count: witness.num_knots(), witness, choices })
}

/// Interpolant for explicit vertex choices (one entry per free run).
pub fn assemble_choices<T: Scalar>(d: &Dataset1D<T>, choices: &[VertexChoice]) -> Result<Cpwl<T>> {
    let prep = prepare(d);
    let picks: Vec<_> = choices.iter().map(|c| (c.run, c.alpha.clone())).collect();
    build(d, &prep, &picks)
}
