//! Goodness of fit: information criteria, the Kolmogorov-Smirnov statistic
//! and p-value, and the ranked model-comparison report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::ln_gamma_pos;
use crate::fitting::{fit_family, Family, FitOptions, FitResult, FittedModel, Sample};
use crate::sampling::{sample_model, SeededStream};

pub fn aic(neg2ll: f64, k: usize) -> f64 {
    neg2ll + 2.0 * k as f64
}

pub fn bic(neg2ll: f64, k: usize, n: usize) -> f64 {
    neg2ll + k as f64 * (n as f64).ln()
}

/// Small-sample corrected AIC; `+∞` when `n − k − 1 ≤ 0`.
pub fn aicc(neg2ll: f64, k: usize, n: usize) -> f64 {
    if n <= k + 1 {
        return f64::INFINITY;
    }
    let k = k as f64;
    aic(neg2ll, k as usize) + (2.0 * k * k + 2.0 * k) / (n as f64 - k - 1.0)
}

/// Fraction of observations `≤ x`.
pub fn ecdf(s: &Sample, x: f64) -> f64 {
    s.values().partition_point(|&v| v <= x) as f64 / s.len() as f64
}

/// `sup |Fₙ − F₀|`, evaluated exactly at the jumps of the empirical cdf.
pub fn ks_statistic(s: &Sample, f0: impl Fn(f64) -> f64) -> f64 {
    let n = s.len() as f64;
    s.values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = f0(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KsMethod {
    /// Exact for `n < 100` without ties, asymptotic otherwise.
    #[default]
    Auto,
    Exact,
    Asymptotic,
}

impl KsMethod {
    /// The concrete method `Auto` stands for at this sample size.
    pub fn resolve(self, n: usize, ties: bool) -> KsMethod {
        match self {
            KsMethod::Auto if n < 100 && !ties => KsMethod::Exact,
            KsMethod::Auto => KsMethod::Asymptotic,
            m => m,
        }
    }
}

/// `P(Dₙ ≥ d)` under the null, exact for `n < 100` and asymptotic beyond.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    ks_pvalue_with(d, n, KsMethod::Auto.resolve(n, false))
}

pub fn ks_pvalue_with(d: f64, n: usize, method: KsMethod) -> f64 {
    match method.resolve(n, false) {
        KsMethod::Exact => ks_pvalue_exact(d, n),
        _ => ks_pvalue_asymptotic(d, n),
    }
}

/// `Q(√n·d)` with `Q(t) = 2 Σ (−1)^{j−1} exp(−2j²t²)`.
pub fn ks_pvalue_asymptotic(d: f64, n: usize) -> f64 {
    if n == 0 || d.is_nan() {
        return f64::NAN;
    }
    kolmogorov_q((n as f64).sqrt() * d.max(0.0))
}

/// Upper tail of the Kolmogorov distribution.
pub fn kolmogorov_q(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.0 {
        // Jacobi-transformed series converges fast for small t.
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * t * t);
        let mut cdf = 0.0;
        for j in 1..100 {
            let k = (2 * j - 1) as f64;
            let term = (-k * k * c).exp();
            cdf += term;
            if term < 1e-16 * cdf {
                break;
            }
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / t * cdf).clamp(0.0, 1.0);
    }
    let mut q = 0.0;
    for j in 1..100 {
        let j = j as f64;
        let term = (-2.0 * j * j * t * t).exp();
        q += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * q).clamp(0.0, 1.0)
}

/// Exact `P(Dₙ ≥ d)` by the Marsaglia-Tsang-Wang matrix-power method.
pub fn ks_pvalue_exact(d: f64, n: usize) -> f64 {
    if n == 0 || d.is_nan() {
        return f64::NAN;
    }
    if d <= 0.0 {
        return 1.0;
    }
    if d >= 1.0 {
        return 0.0;
    }
    if d >= 0.5 {
        // The one-sided events are disjoint here, so doubling is exact.
        return (2.0 * smirnov_upper(n, d)).min(1.0);
    }
    let p = 1.0 - kolmogorov_cdf_exact(n, d);
    if p < 1e-4 {
        // 1 − cdf has lost its relative precision; the doubled one-sided
        // tail overcounts only by P(D⁺ ≥ d, D⁻ ≥ d), negligible this far out.
        return 2.0 * smirnov_upper(n, d);
    }
    p.clamp(0.0, 1.0)
}

/// One-sided `P(Dₙ⁺ ≥ d)` by the Smirnov-Birnbaum-Tingey sum.
fn smirnov_upper(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    let ln_n_fact = ln_gamma_pos(nf + 1.0);
    let last = (nf * (1.0 - d)).floor() as usize;
    let mut total = 0.0;
    for j in 0..=last.min(n) {
        let jf = j as f64;
        let a = 1.0 - d - jf / nf;
        if a <= 0.0 {
            continue;
        }
        let ln_binom = ln_n_fact - ln_gamma_pos(jf + 1.0) - ln_gamma_pos(nf - jf + 1.0);
        total += (ln_binom + (nf - jf) * a.ln() + (jf - 1.0) * (d + jf / nf).ln()).exp();
    }
    d * total
}

/// `P(Dₙ < d)`.
fn kolmogorov_cdf_exact(n: usize, d: f64) -> f64 {
    let nd = n as f64 * d;
    let k = nd.floor() as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nd;

    let mut hm = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i + 1 >= j {
                hm[i * m + j] = 1.0;
            }
        }
    }
    for i in 0..m {
        hm[i * m] -= h.powi(i as i32 + 1);
        hm[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        hm[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    hm[i * m + j] /= g as f64;
                }
            }
        }
    }

    let (q, mut e_q) = matrix_power(&hm, m, n);
    let mut s = q[(k - 1) * m + k - 1];
    for i in 1..=n {
        s *= i as f64 / n as f64;
        if s < 1e-140 {
            s *= 1e140;
            e_q -= 140;
        }
    }
    s * 10f64.powi(e_q)
}

fn matrix_multiply(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for l in 0..m {
            let a_il = a[i * m + l];
            if a_il == 0.0 {
                continue;
            }
            for j in 0..m {
                c[i * m + j] += a_il * b[l * m + j];
            }
        }
    }
    c
}

/// `a^p` as (mantissa matrix, decimal exponent), rescaling to avoid overflow.
fn matrix_power(a: &[f64], m: usize, p: usize) -> (Vec<f64>, i32) {
    if p == 1 {
        return (a.to_vec(), 0);
    }
    let (half, e_half) = matrix_power(a, m, p / 2);
    let mut v = matrix_multiply(&half, &half, m);
    let mut e = 2 * e_half;
    if p % 2 == 1 {
        v = matrix_multiply(a, &v, m);
    }
    let centre = (m / 2) * m + m / 2;
    if v[centre] > 1e140 {
        v.iter_mut().for_each(|x| *x *= 1e-140);
        e += 140;
    }
    (v, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComparisonOptions {
    pub fit: FitOptions,
    pub ks_method: KsMethod,
    /// Parametric-bootstrap KS p-value (refitting each replicate), if wanted.
    pub bootstrap: Option<Bootstrap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub family: Family,
    pub k: usize,
    pub n: usize,
    pub neg2ll: f64,
    pub aic: f64,
    pub bic: f64,
    pub aicc: f64,
    pub ks_stat: f64,
    pub ks_pvalue: f64,
    /// Method actually used for `ks_pvalue`.
    pub ks_method: KsMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_pvalue_bootstrap: Option<f64>,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ComparisonEntry {
    Fitted(GofReport),
    Failed { family: Family, error: String },
}

impl ComparisonEntry {
    pub fn family(&self) -> Family {
        match self {
            ComparisonEntry::Fitted(r) => r.family,
            ComparisonEntry::Failed { family, .. } => *family,
        }
    }

    pub fn report(&self) -> Option<&GofReport> {
        match self {
            ComparisonEntry::Fitted(r) => Some(r),
            ComparisonEntry::Failed { .. } => None,
        }
    }
}

fn has_ties(s: &Sample) -> bool {
    s.values().windows(2).any(|w| w[0] == w[1])
}

/// Builds the report for an existing fit.
pub fn gof_report(s: &Sample, fit: FitResult, method: KsMethod) -> Result<GofReport> {
    let model = fit.model()?;
    let n = s.len();
    let k = fit.family.k();
    let neg2ll = fit.neg2ll();
    let ks_stat = ks_statistic(s, |x| model.cdf(x).unwrap_or(f64::NAN));
    let ks_method = method.resolve(n, has_ties(s));
    Ok(GofReport {
        family: fit.family,
        k,
        n,
        neg2ll,
        aic: aic(neg2ll, k),
        bic: bic(neg2ll, k, n),
        aicc: aicc(neg2ll, k, n),
        ks_stat,
        ks_pvalue: ks_pvalue_with(ks_stat, n, ks_method),
        ks_method,
        ks_pvalue_bootstrap: None,
        fit,
    })
}

/// Lilliefors-style p-value: the share of parametric-bootstrap replicates,
/// each refitted, whose KS statistic reaches the observed one.
pub fn bootstrap_ks_pvalue(
    s: &Sample,
    family: Family,
    model: &FittedModel,
    observed: f64,
    boot: Bootstrap,
    opts: &FitOptions,
) -> Result<f64> {
    let exceed: Vec<Result<bool>> = (0..boot.replicates)
        .into_par_iter()
        .map(|b| {
            let xs = sample_model(model, s.len(), SeededStream::new(boot.seed, b as u64))?;
            let sb = Sample::new(xs, "bootstrap")?;
            let fit = fit_family(family, &sb, opts)?;
            let m = fit.model()?;
            Ok(ks_statistic(&sb, |x| m.cdf(x).unwrap_or(f64::NAN)) >= observed)
        })
        .collect();
    // Replicates whose refit fails are dropped.
    let ok: Vec<bool> = exceed.into_iter().flatten().collect();
    let used = ok.len();
    let hits = ok.iter().filter(|&&h| h).count();
    Ok((hits + 1) as f64 / (used + 1) as f64)
}

pub fn model_comparison(s: &Sample, families: &[Family]) -> Vec<ComparisonEntry> {
    model_comparison_with(s, families, &ComparisonOptions::default())
}

/// Fits every family and ranks the results by AIC, then KS statistic.
/// Families that fail to fit are listed after the ranked ones, in input
/// order.
pub fn model_comparison_with(s: &Sample, families: &[Family], opts: &ComparisonOptions) -> Vec<ComparisonEntry> {
    let entries: Vec<ComparisonEntry> = families
        .par_iter()
        .map(|&family| {
            let build = || -> Result<GofReport> {
                let fit = fit_family(family, s, &opts.fit)?;
                let mut report = gof_report(s, fit, opts.ks_method)?;
                if let Some(boot) = opts.bootstrap {
                    let model = report.fit.model()?;
                    report.ks_pvalue_bootstrap =
                        Some(bootstrap_ks_pvalue(s, family, &model, report.ks_stat, boot, &opts.fit)?);
                }
                Ok(report)
            };
            match build() {
                Ok(r) => ComparisonEntry::Fitted(r),
                Err(e) => ComparisonEntry::Failed { family, error: e.to_string() },
            }
        })
        .collect();

    let (mut fitted, failed): (Vec<_>, Vec<_>) =
        entries.into_iter().partition(|e| matches!(e, ComparisonEntry::Fitted(_)));
    fitted.sort_by(|a, b| {
        let (a, b) = (a.report().unwrap(), b.report().unwrap());
        a.aic.total_cmp(&b.aic).then(a.ks_stat.total_cmp(&b.ks_stat))
    });
    fitted.extend(failed);
    fitted
}
