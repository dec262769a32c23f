//! Monte Carlo check that a `d`-parameter model with `n` outcomes has
//! `rank F ≤ min(d, n − 1)`, together with the factorization `F = η · d̃`
//! obtained by eliminating the last outcome.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::metrology::classical_fim;

/// Singular values above this fraction of the largest count toward the rank.
pub const RANK_REL_TOL: f64 = 1e-10;
/// `|det F| ≤ SINGULAR_DET_TOL · ‖F‖_F^d` counts as singular.
pub const SINGULAR_DET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankExperimentConfig {
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Evaluation point; zeros when empty.
    pub lambda: Vec<f64>,
}

impl RankExperimentConfig {
    pub fn new(d: usize, n: usize, trials: usize, seed: u64) -> Self {
        Self {
            d,
            n,
            trials,
            seed,
            lambda: vec![0.0; d],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 || self.n < 2 || self.trials < 1 {
            return Err(Error::InvalidConfig(format!(
                "need d >= 1, n >= 2, trials >= 1; got d={}, n={}, trials={}",
                self.d, self.n, self.trials
            )));
        }
        if self.lambda.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: self.lambda.len(),
            });
        }
        Ok(())
    }
}

/// Softmax-affine family `p_i ∝ exp(a_i + Σ_j b_ij λ_j)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxFamily {
    pub probs: Vec<f64>,
    /// `d × n`, entry `(j, i)` is `∂_j p_i`.
    pub grads: RMatrix,
}

impl SoftmaxFamily {
    /// `a` has length `n`; `b` is `n × d`.
    pub fn evaluate(a: &[f64], b: &RMatrix, lambda: &[f64]) -> Self {
        let n = a.len();
        let d = lambda.len();
        let logits: Vec<f64> = (0..n)
            .map(|i| a[i] + (0..d).map(|j| b[(i, j)] * lambda[j]).sum::<f64>())
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
        let total: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
        let mean_b: Vec<f64> = (0..d)
            .map(|j| (0..n).map(|i| probs[i] * b[(i, j)]).sum())
            .collect();
        let grads = RMatrix::from_fn(d, n, |j, i| probs[i] * (b[(i, j)] - mean_b[j]));
        Self { probs, grads }
    }
}

/// `η` (`d × (n−1)`) and `d̃` (`(n−1) × d`) with `F = η d̃`.
pub fn decomposition_factors(probs: &[f64], grads: &RMatrix) -> (RMatrix, RMatrix) {
    let d = grads.nrows();
    let k = probs.len() - 1;
    let p_rest = 1.0 - probs[..k].iter().sum::<f64>();
    let eta = RMatrix::from_fn(d, k, |i, col| {
        let row_sum: f64 = (0..k).map(|m| grads[(i, m)]).sum();
        grads[(i, col)] / probs[col] + row_sum / p_rest
    });
    let d_tilde = RMatrix::from_fn(k, d, |row, j| grads[(j, row)]);
    (eta, d_tilde)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `Σ_S det η_S det d̃_S` over column subsets `S` of size `d`; zero when `d > n − 1`.
pub fn cauchy_binet_det(eta: &RMatrix, d_tilde: &RMatrix) -> f64 {
    let d = eta.nrows();
    combinations(eta.ncols(), d)
        .iter()
        .map(|s| {
            let es = RMatrix::from_fn(d, d, |r, c| eta[(r, s[c])]);
            let ds = RMatrix::from_fn(d, d, |r, c| d_tilde[(s[r], c)]);
            es.determinant() * ds.determinant()
        })
        .sum()
}

pub fn numerical_rank(f: &RMatrix) -> usize {
    let sv = f.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_REL_TOL * max).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub rank: usize,
    pub singular: bool,
    pub decomposition_residual: f64,
    pub cauchy_binet_residual: f64,
}

/// Trial `index` draws from stream `index` of the seeded generator.
pub fn run_trial(config: &RankExperimentConfig, index: u64) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let (d, n) = (config.d, config.n);
    let a: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let b = RMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
    let fam = SoftmaxFamily::evaluate(&a, &b, &config.lambda);
    let f = classical_fim(&fam.probs, &fam.grads)?;
    let scale = f.amax();
    let det = f.determinant();
    let det_scale = f.norm().powi(d as i32);
    let (eta, d_tilde) = decomposition_factors(&fam.probs, &fam.grads);
    let product = &eta * &d_tilde;
    let floor = f64::MIN_POSITIVE;
    Ok(TrialOutcome {
        rank: numerical_rank(&f),
        singular: det.abs() <= SINGULAR_DET_TOL * det_scale,
        decomposition_residual: (&f - product).amax() / scale.max(floor),
        cauchy_binet_residual: (det - cauchy_binet_det(&eta, &d_tilde)).abs()
            / det_scale.max(floor),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rank_bound: usize,
    pub max_rank: usize,
    pub violations: usize,
    pub singular_fraction: f64,
    /// Only reported when `n ≥ d + 1`.
    pub full_rank_fraction: Option<f64>,
    pub max_decomposition_residual: f64,
    pub max_cauchy_binet_residual: f64,
}

pub fn fim_rank_experiment(config: &RankExperimentConfig) -> Result<RankReport> {
    config.validate()?;
    let outcomes = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<Vec<_>>>()?;
    let bound = config.d.min(config.n - 1);
    let trials = outcomes.len() as f64;
    let count = |f: &dyn Fn(&TrialOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
    let max = |f: &dyn Fn(&TrialOutcome) -> f64| outcomes.iter().map(f).fold(0.0, f64::max);
    Ok(RankReport {
        d: config.d,
        n: config.n,
        trials: config.trials,
        seed: config.seed,
        rank_bound: bound,
        max_rank: outcomes.iter().map(|o| o.rank).max().unwrap_or(0),
        violations: count(&|o| o.rank > bound),
        singular_fraction: count(&|o| o.singular) as f64 / trials,
        full_rank_fraction: (config.n > config.d)
            .then(|| count(&|o| o.rank == config.d) as f64 / trials),
        max_decomposition_residual: max(&|o| o.decomposition_residual),
        max_cauchy_binet_residual: max(&|o| o.cauchy_binet_residual),
    })
}
