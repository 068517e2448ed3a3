//! Seeded inverse-transform sampling and the Monte Carlo estimator study.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{CelDistribution, Theta};
use crate::error::{Error, Result};
use crate::fitting::{fit_cel_with, FitOptions, FittedModel, Sample};

/// A reproducible substream: ChaCha20 keyed by `seed`, with `stream_index`
/// selecting an independent keystream. Output is platform-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// `n` uniforms on the open interval (0, 1).
    pub fn uniforms(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| rng.sample(Open01)).collect()
    }
}

pub fn sample_cel(d: &CelDistribution, n: usize, stream: SeededStream) -> Vec<f64> {
    stream
        .uniforms(n)
        .into_iter()
        .map(|u| d.quantile(u).expect("u lies in (0, 1)"))
        .collect()
}

/// Draws from any fitted model by inverting its cdf.
pub fn sample_model(model: &FittedModel, n: usize, stream: SeededStream) -> Result<Vec<f64>> {
    stream.uniforms(n).into_iter().map(|u| model.quantile(u)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub n: usize,
    pub replications: usize,
    /// `mean(θ̂) − θ`.
    pub bias: f64,
    /// `mean((θ̂ − θ)²)`, divisor N.
    pub mse: f64,
    /// Sample variance of θ̂, divisor N − 1.
    pub variance: f64,
    pub mean_estimate: f64,
    /// Monte Carlo standard error of `mean_estimate` (and of `bias`).
    pub std_error: f64,
    pub failures: usize,
}

/// Estimator study: for each `n`, fit CEL to `replications` samples drawn
/// from CEL(θ).
///
/// Replication `r` always uses stream `(seed, r)`, for every `n`. Fits run in
/// parallel but are reduced in replication order, so results are identical
/// for any thread count.
pub fn run_simulation_study(
    theta: Theta,
    sizes: &[usize],
    replications: usize,
    seed: u64,
) -> Result<Vec<SimSummary>> {
    run_simulation_study_with(theta, sizes, replications, seed, &FitOptions::default())
}

pub fn run_simulation_study_with(
    theta: Theta,
    sizes: &[usize],
    replications: usize,
    seed: u64,
    opts: &FitOptions,
) -> Result<Vec<SimSummary>> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::domain("sizes must be a nonempty list of positive integers"));
    }
    if replications < 2 {
        return Err(Error::domain(format!("replications must be at least 2, got {replications}")));
    }
    let d = CelDistribution::new(theta);
    sizes
        .iter()
        .map(|&n| {
            let estimates: Vec<Option<f64>> = (0..replications)
                .into_par_iter()
                .map(|r| {
                    let xs = sample_cel(&d, n, SeededStream::new(seed, r as u64));
                    let s = Sample::new(xs, "replicate").ok()?;
                    fit_cel_with(&s, opts).ok().filter(|f| f.converged).map(|f| f.estimates[0])
                })
                .collect();
            summarize(theta.value(), n, &estimates)
        })
        .collect()
}

fn summarize(theta: f64, n: usize, estimates: &[Option<f64>]) -> Result<SimSummary> {
    let replications = estimates.len();
    let ok: Vec<f64> = estimates.iter().flatten().copied().collect();
    let failures = replications - ok.len();
    if failures * 100 > replications || ok.len() < 2 {
        return Err(Error::TooManyFailures { n, failures, replications });
    }
    let m = ok.len() as f64;
    let mean_estimate = ok.iter().sum::<f64>() / m;
    let mse = ok.iter().map(|t| (t - theta) * (t - theta)).sum::<f64>() / m;
    let variance = ok.iter().map(|t| (t - mean_estimate) * (t - mean_estimate)).sum::<f64>() / (m - 1.0);
    Ok(SimSummary {
        n,
        replications,
        bias: mean_estimate - theta,
        mse,
        variance,
        mean_estimate,
        std_error: (variance / m).sqrt(),
        failures,
    })
}
