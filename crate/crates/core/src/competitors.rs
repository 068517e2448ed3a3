//! Two-parameter decreasing-failure-rate families used as comparison models.
//!
//! | family  | p1 | p2 | density |
//! |---|---|---|---|
//! | EPL     | β | θ | `βθ²(1+θ)² e^{-βx} (3+θ−e^{-βx}) / ((1+3θ+θ²)(1+θ−e^{-βx})³)` |
//! | EP      | β | λ | `λβ/(1−e^{-λ}) · exp(−λ − βx + λe^{-βx})` |
//! | EL      | β | p | `β(1−p)e^{-βx} / (−ln p · (1−(1−p)e^{-βx}))`, `0 < p < 1` |
//! | Weibull | β | α | `αβ^α x^{α−1} exp(−(βx)^α)` |
//! | Gamma   | β | α | `β^α x^{α−1} e^{−βx} / Γ(α)` |
//!
//! Densities are evaluated in log space. All cdfs are closed forms; the EPL
//! and EP ones follow from the substitution `w = e^{-βx}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::numerics::{ln_gamma_pos, reg_inc_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompetitorFamily {
    Epl,
    Ep,
    El,
    Weibull,
    Gamma,
}

impl CompetitorFamily {
    pub const ALL: [CompetitorFamily; 5] = [
        CompetitorFamily::Epl,
        CompetitorFamily::Ep,
        CompetitorFamily::El,
        CompetitorFamily::Weibull,
        CompetitorFamily::Gamma,
    ];

    /// Names of the two parameters, in `(p1, p2)` order.
    pub fn parameter_names(self) -> [&'static str; 2] {
        match self {
            CompetitorFamily::Epl => ["beta", "theta"],
            CompetitorFamily::Ep => ["beta", "lambda"],
            CompetitorFamily::El => ["beta", "p"],
            CompetitorFamily::Weibull | CompetitorFamily::Gamma => ["beta", "alpha"],
        }
    }
}

impl fmt::Display for CompetitorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CompetitorFamily::Epl => "epl",
            CompetitorFamily::Ep => "ep",
            CompetitorFamily::El => "el",
            CompetitorFamily::Weibull => "weibull",
            CompetitorFamily::Gamma => "gamma",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompetitorParams {
    family: CompetitorFamily,
    p1: f64,
    p2: f64,
}

/// `ln(1 − e^{-a})` for `a > 0`.
fn ln_one_minus_exp_neg(a: f64) -> f64 {
    if a < std::f64::consts::LN_2 {
        (-(-a).exp_m1()).ln()
    } else {
        (-(-a).exp()).ln_1p()
    }
}

impl CompetitorParams {
    pub fn new(family: CompetitorFamily, p1: f64, p2: f64) -> Result<Self> {
        if !(p1.is_finite() && p1 > 0.0 && p2.is_finite() && p2 > 0.0) {
            return Err(Error::domain(format!(
                "{family} parameters must be finite and positive, got ({p1}, {p2})"
            )));
        }
        if family == CompetitorFamily::El && p2 >= 1.0 {
            return Err(Error::domain(format!("EL requires 0 < p < 1, got {p2}")));
        }
        Ok(Self { family, p1, p2 })
    }

    pub fn family(&self) -> CompetitorFamily {
        self.family
    }

    pub fn params(&self) -> [f64; 2] {
        [self.p1, self.p2]
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        require_finite("x", x)?;
        if x <= 0.0 {
            return Err(Error::domain(format!("density requires x > 0, got {x}")));
        }
        Ok(self.ln_pdf_unchecked(x))
    }

    pub(crate) fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        let (b, q) = (self.p1, self.p2);
        match self.family {
            CompetitorFamily::Epl => {
                let w = (-b * x).exp();
                b.ln() + 2.0 * q.ln() + 2.0 * q.ln_1p() - (1.0 + 3.0 * q + q * q).ln() - b * x
                    + (3.0 + q - w).ln()
                    - 3.0 * (1.0 + q - w).ln()
            }
            CompetitorFamily::Ep => {
                let w = (-b * x).exp();
                q.ln() + b.ln() - ln_one_minus_exp_neg(q) - q - b * x + q * w
            }
            CompetitorFamily::El => {
                let w = (-b * x).exp();
                let one_minus_p = 1.0 - q;
                -(-ln_p(q)).ln() + b.ln() + one_minus_p.ln() - b * x - (-one_minus_p * w).ln_1p()
            }
            CompetitorFamily::Weibull => {
                q.ln() + q * b.ln() + (q - 1.0) * x.ln() - (b * x).powf(q)
            }
            CompetitorFamily::Gamma => q * b.ln() + (q - 1.0) * x.ln() - b * x - ln_gamma_pos(q),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.ln_pdf(x).map(f64::exp)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        require_finite("x", x)?;
        if x < 0.0 {
            return Err(Error::domain(format!("cdf requires x >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let (b, q) = (self.p1, self.p2);
        // 1 − e^{-βx}
        let one_minus_w = -(-b * x).exp_m1();
        let value = match self.family {
            CompetitorFamily::Epl => {
                // F = K[(1/θ + 1/θ²) − (1/Y + 1/Y²)], Y = 1+θ−w, K = θ²(1+θ)²/(1+3θ+θ²)
                let k = q * q * (1.0 + q) * (1.0 + q) / (1.0 + 3.0 * q + q * q);
                let y = q + one_minus_w;
                k * one_minus_w * (1.0 / (q * y) + (y + q) / (q * q * y * y))
            }
            CompetitorFamily::Ep => (-q * one_minus_w).exp_m1() / (-q).exp_m1(),
            CompetitorFamily::El => {
                // 1 − ln(1−(1−p)w)/ln p = −ln(1 + (1−p)(1−w)/p)/ln p
                -((1.0 - q) * one_minus_w / q).ln_1p() / ln_p(q)
            }
            CompetitorFamily::Weibull => -(-(b * x).powf(q)).exp_m1(),
            CompetitorFamily::Gamma => reg_inc_gamma(q, b * x)?,
        };
        Ok(value.clamp(0.0, 1.0))
    }

    /// `Σ ln f(xᵢ)`; `−∞` if any density underflows to zero.
    pub fn log_likelihood(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for &x in values {
            let lp = self.ln_pdf_unchecked(x);
            if lp.is_nan() || lp == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            total += lp;
        }
        total
    }
}

/// `ln p`, exact near `p = 1` where `1 − p` is representable without rounding.
fn ln_p(p: f64) -> f64 {
    if p > 0.5 {
        (-(1.0 - p)).ln_1p()
    } else {
        p.ln()
    }
}

/// Log-likelihood of a sample under a competitor model.
pub fn comp_log_likelihood(c: &CompetitorParams, sample: &crate::fitting::Sample) -> f64 {
    c.log_likelihood(sample.values())
}
