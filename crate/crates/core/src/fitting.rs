//! Maximum-likelihood estimation.
//!
//! CEL has a single parameter and a closed-form score, so `fit_cel` solves the
//! score equation directly. The two-parameter competitors are fitted by
//! Nelder-Mead on an unconstrained reparametrization.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::competitors::{CompetitorFamily, CompetitorParams};
use crate::distribution::{CelDistribution, Theta};
use crate::error::{Error, Result};
use crate::numerics::{find_root_with, nelder_mead_with, RootOptions, SimplexOptions, SimplexResult};

/// Strictly positive observations, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    label: String,
}

impl Sample {
    pub fn new(mut values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sample is empty"));
        }
        let bad: Vec<String> = values
            .iter()
            .filter(|v| !(v.is_finite() && **v > 0.0))
            .map(|v| v.to_string())
            .collect();
        if !bad.is_empty() {
            return Err(Error::domain(format!(
                "sample values must be finite and positive; offending: {}",
                bad.join(", ")
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values, label: label.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn median(&self) -> f64 {
        let n = self.len();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }

    /// Unbiased sample variance; zero for a single observation.
    pub fn variance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cel,
    Epl,
    Ep,
    El,
    Weibull,
    Gamma,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Cel, Family::Epl, Family::Ep, Family::El, Family::Weibull, Family::Gamma];

    /// Number of free parameters.
    pub fn k(self) -> usize {
        match self {
            Family::Cel => 1,
            _ => 2,
        }
    }

    pub fn competitor(self) -> Option<CompetitorFamily> {
        match self {
            Family::Cel => None,
            Family::Epl => Some(CompetitorFamily::Epl),
            Family::Ep => Some(CompetitorFamily::Ep),
            Family::El => Some(CompetitorFamily::El),
            Family::Weibull => Some(CompetitorFamily::Weibull),
            Family::Gamma => Some(CompetitorFamily::Gamma),
        }
    }

    pub fn parameter_names(self) -> Vec<&'static str> {
        match self.competitor() {
            None => vec!["theta"],
            Some(c) => c.parameter_names().to_vec(),
        }
    }
}

impl From<CompetitorFamily> for Family {
    fn from(c: CompetitorFamily) -> Self {
        match c {
            CompetitorFamily::Epl => Family::Epl,
            CompetitorFamily::Ep => Family::Ep,
            CompetitorFamily::El => Family::El,
            CompetitorFamily::Weibull => Family::Weibull,
            CompetitorFamily::Gamma => Family::Gamma,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.competitor() {
            None => f.write_str("cel"),
            Some(c) => c.fmt(f),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cel" => Ok(Family::Cel),
            "epl" => Ok(Family::Epl),
            "ep" => Ok(Family::Ep),
            "el" => Ok(Family::El),
            "weibull" => Ok(Family::Weibull),
            "gamma" => Ok(Family::Gamma),
            other => Err(Error::domain(format!(
                "unknown family '{other}' (expected cel, epl, ep, el, weibull or gamma)"
            ))),
        }
    }
}

/// A fitted model, usable as a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedModel {
    Cel(CelDistribution),
    Competitor(CompetitorParams),
}

impl FittedModel {
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match self {
            FittedModel::Cel(d) => d.pdf(x),
            FittedModel::Competitor(c) => c.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            FittedModel::Cel(d) => d.cdf(x),
            FittedModel::Competitor(c) => c.cdf(x),
        }
    }

    /// Inverse cdf. Closed form for CEL; competitors are inverted numerically.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        let c = match self {
            FittedModel::Cel(d) => return d.quantile(u),
            FittedModel::Competitor(c) => c,
        };
        if !(u.is_finite() && (0.0..1.0).contains(&u)) {
            return Err(Error::domain(format!("quantile requires 0 <= u < 1, got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0 / c.params()[0];
        while c.cdf(hi)? < u {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::domain(format!("quantile of {u} overflows")));
            }
        }
        let f = |x: f64| c.cdf(x).map_or(f64::NAN, |v| v - u);
        let pdf = |x: f64| c.pdf(x).unwrap_or(f64::NAN);
        let opts = RootOptions { tol: 1e-14, max_iter: 400 };
        Ok(find_root_with(f, Some(&pdf), (0.0, hi), &opts)?.root)
    }

    pub fn log_likelihood(&self, sample: &Sample) -> f64 {
        match self {
            FittedModel::Cel(d) => cel_log_likelihood(d.theta(), sample),
            FittedModel::Competitor(c) => c.log_likelihood(sample.values()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    pub parameter_names: Vec<String>,
    pub estimates: Vec<f64>,
    /// Asymptotic standard error of θ̂ (CEL only).
    pub std_error: Option<f64>,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
    /// Confidence level `1 − α` of the interval, when one is reported.
    pub ci_level: Option<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn neg2ll(&self) -> f64 {
        -2.0 * self.log_likelihood
    }

    pub fn model(&self) -> Result<FittedModel> {
        match self.family.competitor() {
            None => CelDistribution::with_theta(self.estimates[0]).map(FittedModel::Cel),
            Some(c) => {
                CompetitorParams::new(c, self.estimates[0], self.estimates[1]).map(FittedModel::Competitor)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Score tolerance for CEL; simplex tolerance for competitors.
    pub tol: f64,
    pub alpha: f64,
    /// Newton steps (CEL) or simplex iterations per start (competitors);
    /// `None` picks the family default.
    pub max_iter: Option<usize>,
}

/// Newton steps allowed for the CEL score equation by default.
pub const CEL_MAX_ITER: usize = 200;
/// Simplex iterations per start allowed for competitor fits by default.
pub const SIMPLEX_MAX_ITER: usize = 2000;

impl Default for FitOptions {
    fn default() -> Self {
        Self { tol: 1e-10, alpha: 0.05, max_iter: None }
    }
}

pub fn cel_log_likelihood(theta: Theta, s: &Sample) -> f64 {
    let t = theta.value();
    let n = s.len() as f64;
    let sum: f64 = s.values().iter().map(|&x| (x + t + 2.0).ln() - 3.0 * (x + t).ln()).sum();
    2.0 * n * t.ln() - n * t.ln_1p() + sum
}

/// `d/dθ` of [`cel_log_likelihood`].
pub fn cel_score(theta: Theta, s: &Sample) -> f64 {
    let t = theta.value();
    let n = s.len() as f64;
    let sum: f64 = s.values().iter().map(|&x| 1.0 / (x + t + 2.0) - 3.0 / (x + t)).sum();
    2.0 * n / t - n / (t + 1.0) + sum
}

/// `−d²/dθ²` of [`cel_log_likelihood`].
pub fn cel_observed_information(theta: Theta, s: &Sample) -> f64 {
    let t = theta.value();
    let n = s.len() as f64;
    let sum: f64 = s
        .values()
        .iter()
        .map(|&x| 3.0 / ((x + t) * (x + t)) - 1.0 / ((x + t + 2.0) * (x + t + 2.0)))
        .sum();
    2.0 * n / (t * t) - n / ((t + 1.0) * (t + 1.0)) - sum
}

fn z_quantile(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// CEL maximum-likelihood fit with a `100(1−α)%` Wald interval.
///
/// The score is positive as θ → 0⁺ and negative for large θ, so a root
/// always exists. Candidate brackets come from a geometric scan around the
/// sample median; each sign change is refined by safeguarded Newton and the
/// root with the largest likelihood wins.
///
/// CEL is not a scale family, so rescaling the data does not simply rescale
/// θ̂.
pub fn fit_cel(s: &Sample, tol: f64, alpha: f64) -> Result<FitResult> {
    fit_cel_with(s, &FitOptions { tol, alpha, ..Default::default() })
}

pub fn fit_cel_with(s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    check_alpha(opts.alpha)?;
    let score = |t: f64| cel_score(Theta(t), s);
    let slope = |t: f64| -cel_observed_information(Theta(t), s);

    let m = s.median();
    let per_decade = 10.0;
    let ratio = 10f64.powf(1.0 / per_decade);
    let mut grid: Vec<f64> = (0..=60).map(|i| 1e-3 * m * ratio.powi(i)).collect();
    let mut brackets = sign_changes(&grid, &score);
    // The score is eventually negative; widen upward until it is seen.
    while brackets.is_empty() && grid.last().copied().unwrap_or(m) < 1e15 * m {
        let last = *grid.last().unwrap();
        let ext: Vec<f64> = (0..=10).map(|i| last * ratio.powi(i)).collect();
        brackets = sign_changes(&ext, &score);
        grid = ext;
    }
    if brackets.is_empty() {
        let (lo, hi) = (1e-3 * m, *grid.last().unwrap());
        return Err(Error::Bracket { lo, hi, f_lo: score(lo), f_hi: score(hi) });
    }

    let root_opts = RootOptions { tol: opts.tol, max_iter: opts.max_iter.unwrap_or(CEL_MAX_ITER) };
    let mut best: Option<(f64, crate::numerics::RootResult)> = None;
    for bracket in brackets {
        let r = find_root_with(score, Some(&slope), bracket, &root_opts)?;
        let ll = cel_log_likelihood(Theta(r.root), s);
        if best.as_ref().is_none_or(|(b, _)| ll > *b) {
            best = Some((ll, r));
        }
    }
    let (log_likelihood, root) = best.expect("at least one bracket");
    let theta_hat = root.root;

    let info = cel_observed_information(Theta(theta_hat), s);
    let mut warnings = Vec::new();
    let (std_error, ci_lower, ci_upper, ci_level) = if info > 0.0 && info.is_finite() {
        let se = info.sqrt().recip();
        let z = z_quantile(opts.alpha);
        (Some(se), Some(theta_hat - z * se), Some(theta_hat + z * se), Some(1.0 - opts.alpha))
    } else {
        warnings.push(format!(
            "observed information {info} is not positive at the estimate; no standard error reported"
        ));
        (None, None, None, None)
    };
    if !root.converged {
        warnings.push(format!("score residual {} did not reach tolerance", root.residual));
    }

    Ok(FitResult {
        family: Family::Cel,
        parameter_names: vec!["theta".into()],
        estimates: vec![theta_hat],
        std_error,
        ci_lower,
        ci_upper,
        ci_level,
        log_likelihood,
        iterations: root.iterations.max(1),
        converged: root.converged,
        warnings,
    })
}

/// Brackets `[a, b]` of adjacent grid points where `f` turns from positive to
/// non-positive (local maxima of the likelihood).
fn sign_changes(grid: &[f64], f: &impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    grid.windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] > 0.0 && v[1] <= 0.0)
        .map(|(g, _)| (g[0], g[1]))
        .collect()
}

/// Maps unconstrained coordinates to natural parameters.
fn to_natural(family: CompetitorFamily, z: &[f64]) -> (f64, f64) {
    let p2 = match family {
        CompetitorFamily::El => 1.0 / (1.0 + (-z[1]).exp()),
        _ => z[1].exp(),
    };
    (z[0].exp(), p2)
}

fn to_unconstrained(family: CompetitorFamily, p1: f64, p2: f64) -> [f64; 2] {
    let z2 = match family {
        CompetitorFamily::El => (p2 / (1.0 - p2)).ln(),
        _ => p2.ln(),
    };
    [p1.ln(), z2]
}

fn starting_point(family: CompetitorFamily, s: &Sample) -> (f64, f64) {
    let mean = s.mean();
    match family {
        CompetitorFamily::Epl => (1.0 / mean, 1.0),
        CompetitorFamily::Ep => (1.0 / mean, 1.0),
        CompetitorFamily::El => (1.0 / mean, 0.5),
        CompetitorFamily::Weibull => (1.0 / mean, 1.0),
        CompetitorFamily::Gamma => {
            let var = s.variance();
            if var > 0.0 {
                (mean / var, mean * mean / var)
            } else {
                (1.0 / mean, 1.0)
            }
        }
    }
}

/// Offsets applied to the starting point in the unconstrained space.
const JITTER: [[f64; 2]; 3] = [[0.0, 0.0], [0.35, -0.5], [-0.35, 0.5]];

pub fn fit_competitor(family: CompetitorFamily, s: &Sample) -> Result<FitResult> {
    fit_competitor_with(family, s, &FitOptions { tol: 1e-9, ..Default::default() })
}

/// Multi-start Nelder-Mead on `(ln β, ln p₂)` (logit for EL's `p`).
///
/// Restarts run in parallel; the winner is the lowest objective, ties going
/// to the lowest restart index, so the result does not depend on scheduling.
/// The winning simplex is restarted once from its own argmin to guard
/// against premature collapse.
pub fn fit_competitor_with(family: CompetitorFamily, s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    let objective = |z: &[f64]| {
        let (p1, p2) = to_natural(family, z);
        match CompetitorParams::new(family, p1, p2) {
            Ok(c) => -c.log_likelihood(s.values()),
            Err(_) => f64::INFINITY,
        }
    };
    let simplex = SimplexOptions {
        tol: opts.tol,
        max_iter: opts.max_iter.unwrap_or(SIMPLEX_MAX_ITER),
        ..Default::default()
    };
    let (b0, q0) = starting_point(family, s);
    let base = to_unconstrained(family, b0, q0);

    let runs: Vec<Result<SimplexResult>> = JITTER
        .par_iter()
        .map(|d| nelder_mead_with(objective, &[base[0] + d[0], base[1] + d[1]], &simplex))
        .collect();

    let mut best: Option<SimplexResult> = None;
    let mut last_err = None;
    for run in runs {
        match run {
            Ok(r) if best.as_ref().is_none_or(|b| r.min_value < b.min_value) => best = Some(r),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let Some(first) = best else {
        return Err(last_err.unwrap_or(Error::NoConvergence {
            routine: "Nelder-Mead",
            iterations: 0,
            residual: f64::NAN,
        }));
    };
    let polish = SimplexOptions { initial_step: 0.05, ..simplex };
    let result = match nelder_mead_with(objective, &first.argmin, &polish) {
        Ok(r) if r.min_value <= first.min_value => SimplexResult {
            iterations: first.iterations + r.iterations,
            ..r
        },
        _ => first,
    };

    let (p1, p2) = to_natural(family, &result.argmin);
    let params = CompetitorParams::new(family, p1, p2)?;
    Ok(FitResult {
        family: family.into(),
        parameter_names: family.parameter_names().iter().map(|s| s.to_string()).collect(),
        estimates: vec![p1, p2],
        std_error: None,
        ci_lower: None,
        ci_upper: None,
        ci_level: None,
        log_likelihood: params.log_likelihood(s.values()),
        iterations: result.iterations.max(1),
        converged: result.converged,
        warnings: Vec::new(),
    })
}

pub fn fit_family(family: Family, s: &Sample, opts: &FitOptions) -> Result<FitResult> {
    match family.competitor() {
        None => fit_cel_with(s, opts),
        Some(c) => fit_competitor_with(c, s, opts),
    }
}
