use serde::{Deserialize, Serialize};

use super::reformulation::{ReformulatedProblem, Side};
use super::solution::SparseSolution;
use crate::error::{Error, Result};

/// One hidden unit `v · (wᵀ x̄)₊`, with the pattern block it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeuronND {
    /// Input weights followed by the bias.
    pub w: Vec<f64>,
    pub v: f64,
    pub pattern: usize,
    pub side: Side,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedNet {
    pub neurons: Vec<NeuronND>,
}

impl ReconstructedNet {
    /// Output at an input `x` (without the trailing 1).
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.neurons
            .iter()
            .map(|n| {
                let pre: f64 = x.iter().zip(&n.w).map(|(a, b)| a * b).sum::<f64>() + n.w[x.len()];
                n.v * pre.max(0.0)
            })
            .sum()
    }

    /// `Σ_k Σ_c |v_k w_kc|^q`, restricted to penalized coordinates; `q = 0`
    /// counts nonzeros.
    pub fn path_cost(&self, q: f64, penalize_bias: bool) -> f64 {
        let mut total = 0.0;
        for n in &self.neurons {
            let d1 = n.w.len();
            for (c, w) in n.w.iter().enumerate() {
                let vw = (n.v * w).abs();
                if vw == 0.0 || (!penalize_bias && c == d1 - 1) {
                    continue;
                }
                total += if q == 0.0 { 1.0 } else { vw.powf(q) };
            }
        }
        total
    }
}

/// Each nonzero ν block becomes a neuron with `v = +1`, each nonzero ω block
/// one with `v = -1`, weights copied unchanged.
pub fn reconstruct_network(sol: &SparseSolution, problem: &ReformulatedProblem) -> Result<ReconstructedNet> {
    sol.check_feasible(problem)?;
    let w = problem.width();
    let mut neurons = Vec::new();
    for block in 0..problem.num_blocks() {
        let zb = &sol.z[block * w..(block + 1) * w];
        if zb.iter().all(|v| *v == 0.0) {
            continue;
        }
        let c = problem.block_map(block * w);
        neurons.push(NeuronND { w: zb.to_vec(), v: c.side.sign(), pattern: c.pattern, side: c.side });
    }
    let net = ReconstructedNet { neurons };
    let ds = &problem.dataset;
    for i in 0..ds.len() {
        let f = net.eval(&ds.x()[i]);
        if (f - ds.y()[i]).abs() > 1e-8 {
            return Err(Error::Internal(format!(
                "reconstructed network gives {f} at point {}, expected {}",
                i + 1,
                ds.y()[i]
            )));
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DatasetND;
    use crate::multivariate::exact::solve_l0;
    use crate::multivariate::patterns::{enumerate_patterns, ActivationPattern, PatternMode};
    use crate::multivariate::reformulation::{build_reformulation, default_radius};
    use crate::multivariate::solution::{Method, TRACKED_P};

    #[test]
    fn single_point_neuron() {
        let ds = DatasetND::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let p = build_reformulation(&ds, vec![ActivationPattern { s: vec![true] }], 2.0, true).unwrap();
        let s = solve_l0(&p, 8).unwrap().found().unwrap();
        let net = reconstruct_network(&s, &p).unwrap();
        assert_eq!(net.neurons.len(), 1);
        assert_eq!((net.neurons[0].w.clone(), net.neurons[0].v), (vec![0.0, 1.0], 1.0));
        assert_eq!(net.eval(&[0.0]), 1.0);
    }

    #[test]
    fn zero_solution_is_empty() {
        let ds = DatasetND::new(vec![vec![0.0], vec![2.0]], vec![0.0, 0.0]).unwrap();
        let p = build_reformulation(&ds, enumerate_patterns(&ds, PatternMode::All).unwrap(), 1.0, true).unwrap();
        let s = solve_l0(&p, 8).unwrap().found().unwrap();
        let net = reconstruct_network(&s, &p).unwrap();
        assert!(net.neurons.is_empty());
        assert_eq!(net.eval(&[5.0]), 0.0);
    }

    #[test]
    fn peak_costs_preserved() {
        let ds = DatasetND::new(vec![vec![-1.0], vec![0.0], vec![1.0]], vec![0.0, 1.0, 0.0]).unwrap();
        let p = build_reformulation(&ds, enumerate_patterns(&ds, PatternMode::All).unwrap(), default_radius(&ds), true)
            .unwrap();
        let s = solve_l0(&p, 8).unwrap().found().unwrap();
        let net = reconstruct_network(&s, &p).unwrap();
        assert!(net.neurons.len() <= 3);
        assert_eq!(net.path_cost(0.0, true), s.l0 as f64);
        for q in TRACKED_P {
            assert_eq!(net.path_cost(q, true), s.cost(q).unwrap());
        }
    }

    #[test]
    fn infeasible_solution_rejected() {
        let ds = DatasetND::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let p = build_reformulation(&ds, vec![ActivationPattern { s: vec![true] }], 2.0, true).unwrap();
        let bad = SparseSolution::new(&p, vec![0.0, 0.5, 0.0, 0.0], None, &[], Method::Irl1, false);
        assert!(reconstruct_network(&bad, &p).is_err());
    }
}
