//! Gradient training of a penalized, smoothed path-norm objective.
//!
//! The hard interpolation constraint becomes a squared-error term and the
//! `ℓᵖ` path norm is smoothed by `ρ_ε(t) = (t² + ε²)^{p/2}`:
//!
//! ```text
//! L(θ) = Σ_i (f_θ(x_i) - y_i)² + λ Σ ρ_ε(·)
//! ```
//!
//! Univariate models carry a skip connection `a x + c` and penalize the
//! products `w_k v_k`. Multivariate models have no skip connection and
//! penalize every coordinate of `v_k [w_k, b_k]`.
//!
//! Both `λ` and `ε` decay over training. Each step lowers `L` at the current
//! `(λ, ε)`, and lowering either one cannot raise `L`, so the recorded
//! objective never increases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cpwl::PathNormReport;
use crate::dataset::{Dataset1D, DatasetND};
use crate::error::{Error, Result};
use crate::network::{from_network, Neuron, ReluNet1D};

/// `ρ_ε(t) = (t² + ε²)^{p/2}`.
pub fn rho(t: f64, eps: f64, p: f64) -> f64 {
    (t * t + eps * eps).powf(p / 2.0)
}

/// `dρ_ε/dt = p t (t² + ε²)^{p/2 - 1}`.
pub fn rho_prime(t: f64, eps: f64, p: f64) -> f64 {
    p * t * (t * t + eps * eps).powf(p / 2.0 - 1.0)
}

/// Geometric decay `max(initial · decay^step, floor)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub initial: f64,
    /// Per-step factor in `(0, 1]`.
    pub decay: f64,
    pub floor: f64,
}

impl Schedule {
    pub fn constant(v: f64) -> Self {
        Self { initial: v, decay: 1.0, floor: v }
    }

    pub fn at(&self, step: usize) -> f64 {
        (self.initial * self.decay.powf(step as f64)).max(self.floor)
    }

    fn validate(&self, name: &str, allow_zero: bool) -> Result<()> {
        let ok_val = |v: f64| v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
        if !ok_val(self.initial) || !ok_val(self.floor) || self.floor > self.initial {
            return Err(Error::Domain(format!(
                "{name} schedule needs 0 < floor <= initial, got initial {} floor {}",
                self.initial, self.floor
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::Domain(format!("{name} decay must lie in (0, 1], got {}", self.decay)));
        }
        Ok(())
    }
}

/// Missing fields in a serialized config take their default values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub p: f64,
    /// Penalty weight; may be identically zero.
    pub lambda: Schedule,
    pub epsilon: Schedule,
    pub steps: usize,
    /// Largest step size tried by the line search.
    pub learning_rate: f64,
    /// Hidden width `K`, at least the number of data points.
    pub width: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            p: 0.5,
            lambda: Schedule { initial: 0.3, decay: 0.9997, floor: 1e-4 },
            epsilon: Schedule { initial: 1e-1, decay: 0.9995, floor: 1e-6 },
            steps: 20_000,
            learning_rate: 1.0,
            width: 8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Domain(format!("p = {} is outside (0, 1)", self.p)));
        }
        if self.width < n {
            return Err(Error::Domain(format!("width {} is below the {n} data points", self.width)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Domain("learning rate must be positive".into()));
        }
        self.lambda.validate("lambda", true)?;
        self.epsilon.validate("epsilon", false)
    }
}

/// How the penalty reads the parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    /// One input, skip connection, penalty on `w_k v_k`.
    Univariate,
    /// No skip connection, penalty on each entry of `v_k [w_k, b_k]`.
    Multivariate,
}

/// Flat parameters. Neuron `k` occupies `[w_k (d entries), b_k, v_k]`; the
/// univariate form appends `[a, c]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub form: Form,
    pub dim: usize,
    pub width: usize,
    pub theta: Vec<f64>,
}

impl Params {
    pub fn zeros(form: Form, dim: usize, width: usize) -> Self {
        let skip = if form == Form::Univariate { 2 } else { 0 };
        Self { form, dim, width, theta: vec![0.0; width * (dim + 2) + skip] }
    }

    fn stride(&self) -> usize {
        self.dim + 2
    }

    pub fn w(&self, k: usize) -> &[f64] {
        let s = k * self.stride();
        &self.theta[s..s + self.dim]
    }

    pub fn b(&self, k: usize) -> f64 {
        self.theta[k * self.stride() + self.dim]
    }

    pub fn v(&self, k: usize) -> f64 {
        self.theta[k * self.stride() + self.dim + 1]
    }

    /// Skip connection `(a, c)`; zero in the multivariate form.
    pub fn skip(&self) -> (f64, f64) {
        match self.form {
            Form::Univariate => {
                let s = self.width * self.stride();
                (self.theta[s], self.theta[s + 1])
            }
            Form::Multivariate => (0.0, 0.0),
        }
    }

    fn pre(&self, k: usize, x: &[f64]) -> f64 {
        self.w(k).iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.b(k)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (a, c) = self.skip();
        let mut out = if self.form == Form::Univariate { a * x[0] + c } else { 0.0 };
        for k in 0..self.width {
            out += self.v(k) * self.pre(k, x).max(0.0);
        }
        out
    }

    /// Penalized products: `w_k v_k` (univariate) or `v_k [w_k, b_k]`.
    fn products(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.width {
            let v = self.v(k);
            match self.form {
                Form::Univariate => out.push(self.w(k)[0] * v),
                Form::Multivariate => {
                    out.extend(self.w(k).iter().map(|w| w * v));
                    out.push(self.b(k) * v);
                }
            }
        }
        out
    }

    pub fn to_network_1d(&self) -> Result<ReluNet1D<f64>> {
        if self.form != Form::Univariate {
            return Err(Error::Domain("only univariate parameters form a 1D network".into()));
        }
        let (a, c) = self.skip();
        let neurons = (0..self.width).map(|k| Neuron { w: self.w(k)[0], b: self.b(k), v: self.v(k) }).collect();
        Ok(ReluNet1D { neurons, skip_a: a, skip_c: c })
    }
}

/// Data in the shape the trainer uses.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainData {
    pub form: Form,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl TrainData {
    pub fn univariate(d: &Dataset1D<f64>) -> Self {
        Self { form: Form::Univariate, x: d.xs().iter().map(|v| vec![*v]).collect(), y: d.ys().to_vec() }
    }

    pub fn multivariate(d: &DatasetND) -> Self {
        Self { form: Form::Multivariate, x: d.x().to_vec(), y: d.y().to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }
}

/// Value of `L` split into its parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Objective {
    pub total: f64,
    pub data_loss: f64,
    /// Unweighted `Σ ρ_ε`.
    pub penalty: f64,
}

pub fn penalized_objective(params: &Params, data: &TrainData, p: f64, lambda: f64, eps: f64) -> Objective {
    let data_loss: f64 = data.x.iter().zip(&data.y).map(|(x, y)| (params.eval(x) - y).powi(2)).sum();
    let penalty: f64 = params.products().iter().map(|t| rho(*t, eps, p)).sum();
    Objective { total: data_loss + lambda * penalty, data_loss, penalty }
}

/// For each unit, the augmented inputs `[x_i, 1]` of data points where its
/// pre-activation is within rounding of zero.
fn kink_rows(params: &Params, data: &TrainData) -> Vec<Vec<Vec<f64>>> {
    (0..params.width)
        .map(|k| {
            data.x
                .iter()
                .filter(|x| {
                    let scale =
                        1.0 + params.b(k).abs() + params.w(k).iter().zip(*x).map(|(a, b)| (a * b).abs()).sum::<f64>();
                    params.pre(k, x).abs() <= 1e-9 * scale
                })
                .map(|x| x.iter().copied().chain([1.0]).collect())
                .collect()
        })
        .collect()
}

/// Removes from `g` (one unit's `[w, b]` block) every component that would
/// move the unit's kink off the given points.
fn project_out(g: &mut [f64], rows: &[Vec<f64>]) {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut u = r.clone();
        for q in &basis {
            let c: f64 = u.iter().zip(q).map(|(a, b)| a * b).sum();
            u.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            basis.push(u.into_iter().map(|v| v / n).collect());
        }
    }
    for q in &basis {
        let c: f64 = g.iter().zip(q).map(|(a, b)| a * b).sum();
        g.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
    }
}

/// Analytic gradient of [`penalized_objective`]; the ReLU derivative at 0 is
/// taken as 0.
pub fn gradient(params: &Params, data: &TrainData, p: f64, lambda: f64, eps: f64) -> Vec<f64> {
    let mut g = vec![0.0; params.theta.len()];
    let d = params.dim;
    let stride = d + 2;
    for (x, y) in data.x.iter().zip(&data.y) {
        let r2 = 2.0 * (params.eval(x) - y);
        for k in 0..params.width {
            let z = params.pre(k, x);
            let s = k * stride;
            g[s + d + 1] += r2 * z.max(0.0);
            if z > 0.0 {
                let v = params.v(k);
                for c in 0..d {
                    g[s + c] += r2 * v * x[c];
                }
                g[s + d] += r2 * v;
            }
        }
        if params.form == Form::Univariate {
            let s = params.width * stride;
            g[s] += r2 * x[0];
            g[s + 1] += r2;
        }
    }
    if lambda != 0.0 {
        for k in 0..params.width {
            let s = k * stride;
            let v = params.v(k);
            match params.form {
                Form::Univariate => {
                    let w = params.w(k)[0];
                    let dr = lambda * rho_prime(w * v, eps, p);
                    g[s] += dr * v;
                    g[s + d + 1] += dr * w;
                }
                Form::Multivariate => {
                    for c in 0..=d {
                        let u = params.theta[s + c];
                        let dr = lambda * rho_prime(u * v, eps, p);
                        g[s + c] += dr * v;
                        g[s + d + 1] += dr * u;
                    }
                }
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub objective: f64,
    pub data_loss: f64,
    /// Unweighted smoothed penalty.
    pub penalty: f64,
    pub active_neurons: usize,
}

/// Outcome of [`train`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrainResult {
    /// Parameters after thresholding.
    pub params: Params,
    pub trajectory: Vec<TrajectoryRow>,
    /// `max_i |f(x_i) - y_i|` after thresholding.
    pub max_residual: f64,
    /// Exact `ℓᵖ` path norm of the thresholded network: `Σ|w_k v_k|^p`
    /// (univariate) or `Σ|v_k w̄_kc|^p` (multivariate).
    pub path_norm: f64,
    /// Function-level report, univariate form only.
    pub report: Option<PathNormReport>,
    pub active_neurons: usize,
}

/// Weights below `1e-6 · max|weight|` are set to zero. Biases and the skip
/// connection are left alone.
pub fn threshold(params: &Params) -> Params {
    let mut out = params.clone();
    let stride = params.dim + 2;
    let is_weight = |i: usize| i < params.width * stride && i % stride != params.dim;
    let top = (0..params.theta.len()).filter(|&i| is_weight(i)).map(|i| params.theta[i].abs()).fold(0.0, f64::max);
    let cut = 1e-6 * top;
    for i in 0..out.theta.len() {
        if is_weight(i) && out.theta[i].abs() < cut {
            out.theta[i] = 0.0;
        }
    }
    out
}

/// Neurons whose penalized products are not all zero after thresholding.
pub fn active_neurons(params: &Params) -> usize {
    let t = threshold(params);
    (0..t.width)
        .filter(|&k| {
            let v = t.v(k);
            v != 0.0
                && match t.form {
                    Form::Univariate => t.w(k)[0] != 0.0,
                    Form::Multivariate => t.w(k).iter().any(|w| *w != 0.0) || t.b(k) != 0.0,
                }
        })
        .count()
}

fn init(data: &TrainData, cfg: &TrainConfig) -> Params {
    let d = data.dim();
    let mut params = Params::zeros(data.form, d, cfg.width);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let out = Normal::new(0.0, 1.0 / (cfg.width as f64).sqrt()).expect("valid normal");
    // Each unit's kink passes through a random point of the data's bounding
    // box, so no unit starts dead on every sample.
    let lo: Vec<f64> = (0..d).map(|c| data.x.iter().map(|x| x[c]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|c| data.x.iter().map(|x| x[c]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let stride = d + 2;
    for k in 0..cfg.width {
        let s = k * stride;
        let mut pre = 0.0;
        for c in 0..d {
            let w = unit.sample(&mut rng);
            let u = lo[c] + (hi[c] - lo[c]) * rng.random::<f64>();
            params.theta[s + c] = w;
            pre += w * u;
        }
        params.theta[s + d] = -pre;
        params.theta[s + d + 1] = out.sample(&mut rng);
    }
    params
}

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Full-batch gradient descent with backtracking, starting each step from
/// twice the previous accepted step size (capped at the learning rate).
pub fn train(data: &TrainData, cfg: &TrainConfig) -> Result<TrainResult> {
    if data.x.is_empty() {
        return Err(Error::InvalidDataset("no data points".into()));
    }
    cfg.validate(data.x.len())?;
    let mut params = init(data, cfg);
    let mut trajectory = Vec::with_capacity(cfg.steps + 1);
    let mut eta = cfg.learning_rate;
    let record = |step: usize, params: &Params, trajectory: &mut Vec<TrajectoryRow>| -> Result<Objective> {
        let obj = penalized_objective(params, data, cfg.p, cfg.lambda.at(step), cfg.epsilon.at(step));
        trajectory.push(TrajectoryRow {
            step,
            objective: obj.total,
            data_loss: obj.data_loss,
            penalty: obj.penalty,
            active_neurons: active_neurons(params),
        });
        if !obj.total.is_finite() {
            return Err(Error::Divergence { step, trajectory: trajectory.clone() });
        }
        Ok(obj)
    };
    record(0, &params, &mut trajectory)?;
    for step in 0..cfg.steps {
        let (lambda, eps) = (cfg.lambda.at(step), cfg.epsilon.at(step));
        // When the full gradient makes no progress the iterate sits on kinks
        // through data points. The objective is smooth along moves that keep
        // those kinks in place, so retry with the gradient projected onto
        // them.
        let base = penalized_objective(&params, data, cfg.p, lambda, eps).total;
        let mut accepted = false;
        for attempt in 0..2 {
            let mut g = gradient(&params, data, cfg.p, lambda, eps);
            if attempt == 1 {
                let rows = kink_rows(&params, data);
                if rows.iter().all(|r| r.is_empty()) {
                    break;
                }
                let stride = params.dim + 2;
                for (k, r) in rows.iter().enumerate() {
                    project_out(&mut g[k * stride..k * stride + params.dim + 1], r);
                }
            }
            let gg: f64 = g.iter().map(|v| v * v).sum();
            if !gg.is_finite() {
                return Err(Error::Divergence { step, trajectory });
            }
            if gg == 0.0 {
                continue;
            }
            eta = (2.0 * eta).min(cfg.learning_rate);
            for _ in 0..MAX_HALVINGS {
                let trial = Params {
                    theta: params.theta.iter().zip(&g).map(|(t, gi)| t - eta * gi).collect(),
                    ..params.clone()
                };
                let obj = penalized_objective(&trial, data, cfg.p, lambda, eps);
                if obj.total < base && obj.total <= base - ARMIJO_C * eta * gg {
                    params = trial;
                    accepted = true;
                    break;
                }
                eta /= 2.0;
            }
            if accepted {
                break;
            }
            eta = cfg.learning_rate;
        }
        record(step + 1, &params, &mut trajectory)?;
    }
    let params = threshold(&params);
    let max_residual = data.x.iter().zip(&data.y).map(|(x, y)| (params.eval(x) - y).abs()).fold(0.0, f64::max);
    let path_norm: f64 = params.products().iter().filter(|t| **t != 0.0).map(|t| t.abs().powf(cfg.p)).sum();
    let report = match params.form {
        Form::Univariate => Some(from_network(&params.to_network_1d()?).report(cfg.p)?),
        Form::Multivariate => None,
    };
    let active = active_neurons(&params);
    Ok(TrainResult { params, trajectory, max_residual, path_norm, report, active_neurons: active })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zigzag() -> TrainData {
        let d = Dataset1D::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).unwrap();
        TrainData::univariate(&d)
    }

    #[test]
    fn zero_weights_objective() {
        let data = zigzag();
        let params = Params::zeros(Form::Univariate, 1, 5);
        let o = penalized_objective(&params, &data, 0.5, 2.0, 0.1);
        assert!((o.penalty - 5.0 * 0.01f64.powf(0.25)).abs() < 1e-15);
        assert!((o.total - (2.0 + 2.0 * 5.0 * 0.01f64.powf(0.25))).abs() < 1e-14);
        assert_eq!(o.data_loss, 2.0);
    }

    #[test]
    fn optimal_zigzag_network() {
        // x - 2(x-1)_+ + 2(x-2)_+ with two idle units.
        let data = zigzag();
        let mut params = Params::zeros(Form::Univariate, 1, 4);
        params.theta[..6].copy_from_slice(&[1.0, -1.0, -2.0, 1.0, -2.0, 2.0]);
        let k = params.theta.len();
        params.theta[k - 2] = 1.0;
        let (p, lambda, eps) = (0.5, 1e-3, 1e-6);
        let o = penalized_objective(&params, &data, p, lambda, eps);
        assert!(o.data_loss < 1e-24);
        let expect = lambda * (2.0 * 2f64.powf(p) + 2.0 * eps.powf(p));
        assert!((o.total - expect).abs() < 1e-12);
        // Perfect fit and no penalty: zero gradient.
        assert!(gradient(&params, &data, p, 0.0, eps).iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn single_neuron_by_hand() {
        // f(x) = v (w x + b)_+ on one point x=2, y=1, with w=1, b=0, v=1:
        // L = (2 - 1)² + λ ρ(w v); dL/dv = 2·1·2 + λ ρ'(1)·1, dL/dw = 2·1·v·x + λ ρ'(1)·v.
        let data = TrainData { form: Form::Multivariate, x: vec![vec![2.0]], y: vec![1.0] };
        let mut params = Params::zeros(Form::Multivariate, 1, 1);
        params.theta.copy_from_slice(&[1.0, 0.0, 1.0]);
        let (p, lambda, eps) = (0.5, 0.3, 0.2);
        let g = gradient(&params, &data, p, lambda, eps);
        let rp1 = p * (1.0 + eps * eps).powf(p / 2.0 - 1.0);
        let rp0 = 0.0;
        assert!((g[0] - (4.0 + lambda * rp1)).abs() < 1e-14);
        assert!((g[1] - (2.0 + lambda * rp0)).abs() < 1e-14);
        assert!((g[2] - (4.0 + lambda * rp1)).abs() < 1e-14);
    }

    #[test]
    fn rho_limit() {
        for t in [0.1, 0.5, 1.0, 3.0, -2.0] {
            for p in [0.1, 0.5, 0.9] {
                let exact = f64::abs(t).powf(p);
                assert!((rho(t, 1e-8, p) - exact).abs() <= 1e-4 * exact);
            }
        }
    }

    #[test]
    fn width_below_points_rejected() {
        let cfg = TrainConfig { width: 3, ..Default::default() };
        assert!(train(&zigzag(), &cfg).is_err());
    }

    #[test]
    fn collinear_goes_sparse() {
        let d = Dataset1D::new(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]).unwrap();
        let cfg = TrainConfig { steps: 4000, width: 4, ..Default::default() };
        let r = train(&TrainData::univariate(&d), &cfg).unwrap();
        assert!(r.max_residual < 1e-2, "{}", r.max_residual);
        assert!(r.path_norm < 0.5, "{}", r.path_norm);
    }

    #[test]
    fn objective_never_increases() {
        let cfg = TrainConfig { steps: 2000, seed: 3, ..Default::default() };
        let r = train(&zigzag(), &cfg).unwrap();
        for w in r.trajectory.windows(2) {
            assert!(w[1].objective <= w[0].objective, "step {}", w[1].step);
        }
    }

    #[test]
    fn no_penalty_interpolates() {
        // Plain least squares can still stall on a kink; most seeds fit.
        let fits = (0..10)
            .filter(|&seed| {
                let cfg = TrainConfig { lambda: Schedule::constant(0.0), seed, ..Default::default() };
                train(&zigzag(), &cfg).unwrap().max_residual < 1e-6
            })
            .count();
        assert!(fits >= 6, "{fits} of 10 seeds interpolate");
    }

    fn random_setup(form: Form, seed: u64) -> (Params, TrainData) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = if form == Form::Univariate { 1 } else { rng.random_range(1..=3) };
        let n = rng.random_range(1..=5);
        let width = rng.random_range(1..=4);
        let x = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let y = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut params = Params::zeros(form, d, width);
        for t in params.theta.iter_mut() {
            *t = rng.random_range(-1.5..1.5);
        }
        (params, TrainData { form, x, y })
    }

    fn near_kink(params: &Params, data: &TrainData, h: f64) -> bool {
        // A finite-difference probe of size h moves a pre-activation by at
        // most h (1 + |x|₁); stay well clear of zero.
        data.x.iter().any(|x| {
            let reach = 10.0 * h * (1.0 + x.iter().map(|v| v.abs()).sum::<f64>()) * 10.0;
            (0..params.width).any(|k| params.pre(k, x).abs() < reach)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn gradient_matches_finite_differences(seed in any::<u64>(), uni in any::<bool>(), p in 0.1f64..0.9, eps in 0.05f64..1.0, lambda in 0.0f64..2.0) {
            let form = if uni { Form::Univariate } else { Form::Multivariate };
            let (params, data) = random_setup(form, seed);
            let h = 1e-6;
            prop_assume!(!near_kink(&params, &data, h));
            let g = gradient(&params, &data, p, lambda, eps);
            for (i, gi) in g.iter().enumerate() {
                let mut up = params.clone();
                up.theta[i] += h;
                let mut dn = params.clone();
                dn.theta[i] -= h;
                let fd = (penalized_objective(&up, &data, p, lambda, eps).total
                    - penalized_objective(&dn, &data, p, lambda, eps).total) / (2.0 * h);
                let scale = gi.abs().max(fd.abs()).max(1.0);
                prop_assert!((gi - fd).abs() <= 1e-5 * scale, "coord {i}: analytic {gi} fd {fd}");
            }
        }
    }
}
