//! The compounded exponential-Lindley distribution CEL(θ).
//!
//! An exponential lifetime whose rate λ is itself Lindley(θ) distributed,
//! `φ(λ) = θ²/(θ+1)·(1+λ)·e^{-θλ}`, integrates out to
//!
//! ```text
//! g(x) = θ²/(θ+1) · (x+θ+2)/(x+θ)³,   x ≥ 0
//! ```
//!
//! The tail decays like `x⁻²`, so no integer moment exists; the hazard
//! `h(x) = 2/(x+θ) − 1/(x+θ+1)` is strictly decreasing.

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};

/// The CEL shape/scale parameter θ > 0, in the units of the observations.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Theta(pub(crate) f64);

impl Theta {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Theta(value))
        } else {
            Err(Error::domain(format!("theta must be finite and > 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Theta {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Theta::new(value)
    }
}

impl From<Theta> for f64 {
    fn from(t: Theta) -> f64 {
        t.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CelDistribution {
    theta: Theta,
}

fn check_support(name: &str, x: f64) -> Result<f64> {
    require_finite(name, x)?;
    if x < 0.0 {
        return Err(Error::domain(format!("{name} must be >= 0, got {x}")));
    }
    Ok(x)
}

impl CelDistribution {
    pub fn new(theta: Theta) -> Self {
        Self { theta }
    }

    /// Shorthand for `CelDistribution::new(Theta::new(theta)?)`.
    pub fn with_theta(theta: f64) -> Result<Self> {
        Theta::new(theta).map(Self::new)
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }

    fn t(&self) -> f64 {
        self.theta.0
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        let x = check_support("x", x)?;
        let t = self.t();
        let s = x + t;
        Ok(t * t / (t + 1.0) * (s + 2.0) / (s * s * s))
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        let x = check_support("x", x)?;
        Ok(self.ln_pdf_unchecked(x))
    }

    pub(crate) fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        let t = self.t();
        2.0 * t.ln() - t.ln_1p() + (x + t + 2.0).ln() - 3.0 * (x + t).ln()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        let x = check_support("x", x)?;
        let t = self.t();
        let s = x + t;
        Ok(x * (x * (t + 1.0) + t * (t + 2.0)) / ((t + 1.0) * s * s))
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        let x = check_support("x", x)?;
        let t = self.t();
        let s = x + t;
        Ok(t * t * (s + 1.0) / ((t + 1.0) * s * s))
    }

    pub fn hazard(&self, x: f64) -> Result<f64> {
        let x = check_support("x", x)?;
        let s = x + self.t();
        Ok((s + 2.0) / (s * (s + 1.0)))
    }

    /// `H(t) = ∫₀ᵗ h = log[(θ+1)/(t+θ+1) · ((t+θ)/θ)²]`, evaluated with
    /// `ln_1p` so small `t` keeps relative accuracy.
    pub fn cumulative_hazard(&self, t: f64) -> Result<f64> {
        let t = check_support("t", t)?;
        let th = self.t();
        Ok(2.0 * (t / th).ln_1p() - (t / (th + 1.0)).ln_1p())
    }

    /// Glaser's `η(t) = −g′(t)/g(t) = 3/(t+θ) − 1/(t+θ+2)
    /// = 2(t+θ+3)/((t+θ)(t+θ+2))`, strictly decreasing in `t`.
    pub fn glaser_eta(&self, t: f64) -> Result<f64> {
        let t = check_support("t", t)?;
        let s = t + self.t();
        Ok(2.0 * (s + 3.0) / (s * (s + 2.0)))
    }

    /// Inverse cdf on `[0, 1)`.
    ///
    /// With `z = x/(x+θ)` the cdf equation is the quadratic
    /// `z² − (θ+2)z + u(θ+1) = 0`; the `+√` branch is the only one mapping into
    /// `[0, ∞)`. Rationalizing both the root and `θ(2/D − 1)` gives
    /// `Q(u) = θ·u·(s+θ) / ((1−u)(s+θ+2))` with `s = √(θ² + 4(θ+1)(1−u))`,
    /// which has no cancellation near `u = 0` or `u = 1`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        require_finite("u", u)?;
        if !(0.0..1.0).contains(&u) {
            return Err(Error::domain(format!("quantile requires 0 <= u < 1, got {u}")));
        }
        let t = self.t();
        let one_minus_u = 1.0 - u;
        let s = (t * t + 4.0 * (t + 1.0) * one_minus_u).sqrt();
        Ok(t * u * (s + t) / (one_minus_u * (s + t + 2.0)))
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).expect("0.5 is inside the quantile domain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cel(t: f64) -> CelDistribution {
        CelDistribution::with_theta(t).unwrap()
    }

    #[test]
    fn theta_rejects_invalid_values() {
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(Theta::new(bad).is_err(), "{bad}");
        }
        assert_eq!(Theta::new(2.5).unwrap().value(), 2.5);
    }

    #[test]
    fn pdf_examples() {
        let d = cel(1.0);
        assert!((d.pdf(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((d.pdf(0.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((d.pdf(0.0).unwrap() - d.hazard(0.0).unwrap() * d.survival(0.0).unwrap()).abs() < 1e-15);
        // central difference of the cdf
        let h = 1e-5;
        let fd = (d.cdf(1.0 + h).unwrap() - d.cdf(1.0 - h).unwrap()) / (2.0 * h);
        assert!((fd - 0.25).abs() < 1e-9);
        assert!((d.ln_pdf(1.0).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn cdf_survival_examples() {
        for t in [0.3, 1.0, 7.0385] {
            assert_eq!(cel(t).cdf(0.0).unwrap(), 0.0);
            assert_eq!(cel(t).survival(0.0).unwrap(), 1.0);
        }
        assert!((cel(1.0).cdf(1.0).unwrap() - 0.625).abs() < 1e-15);
        assert!((cel(1.0).survival(1.0).unwrap() - 0.375).abs() < 1e-15);
        let far = cel(2.0).cdf(1e12).unwrap();
        assert!(far < 1.0 && 1.0 - far < 1e-11);
        let d = cel(7.0385);
        let s = d.survival(5.0).unwrap();
        assert!(s > 0.0 && s < 1.0);
        assert!((s - (1.0 - d.cdf(5.0).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn hazard_examples() {
        let d = cel(1.0);
        assert!((d.hazard(0.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((d.hazard(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.hazard(1.0).unwrap() - 0.25 / 0.375).abs() < 1e-15);
        for t in [0.5, 2.0, 30.0] {
            let d = cel(t);
            for i in 0..200 {
                let x = i as f64 * 0.37;
                let pf = 2.0 / (x + t) - 1.0 / (x + t + 1.0);
                assert!((d.hazard(x).unwrap() - pf).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn cumulative_hazard_examples() {
        assert_eq!(cel(3.0).cumulative_hazard(0.0).unwrap(), 0.0);
        assert!((cel(1.0).cumulative_hazard(1.0).unwrap() - 0.980_829_253_011_726_2).abs() < 1e-15);
        assert!((cel(1.0).cumulative_hazard(1.0).unwrap() + 0.375f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn glaser_eta_examples() {
        let d = cel(1.0);
        assert!((d.glaser_eta(0.0).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!((d.glaser_eta(1.0).unwrap() - 1.25).abs() < 1e-15);
        for th in [0.3, 3.0, 12.0] {
            let d = cel(th);
            for i in 0..50 {
                let t = i as f64 * 0.7;
                let partial = 3.0 / (t + th) - 1.0 / (t + th + 2.0);
                assert!((d.glaser_eta(t).unwrap() - partial).abs() < 1e-14);
            }
        }
        // −d/dt log g by central differences
        for t in [0.0, 1.0] {
            let h = 1e-6;
            let lo = if t == 0.0 { 0.0 } else { t - h };
            let fd = -(d.ln_pdf(t + h).unwrap() - d.ln_pdf(lo).unwrap()) / (t + h - lo);
            let eta = d.glaser_eta(t + if t == 0.0 { h / 2.0 } else { 0.0 }).unwrap();
            assert!((fd - eta).abs() < 1e-6, "t={t}: fd {fd} eta {eta}");
        }
        for th in [0.5, 1.0, 2.0, 10.0] {
            let d = cel(th);
            let mut prev = f64::INFINITY;
            for i in 0..=10_000 {
                let eta = d.glaser_eta(i as f64 * 0.01).unwrap();
                assert!(eta < prev);
                prev = eta;
            }
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(cel(4.0).quantile(0.0).unwrap(), 0.0);
        let want = 2.0 * (10f64.sqrt() - 1.0) / 3.0;
        assert!((cel(2.0).quantile(0.5).unwrap() - want).abs() < 1e-14);
        assert!((want - 1.441_518_440_11).abs() < 1e-10);
        for t in [0.5, 2.0, 30.267] {
            let d = cel(t);
            for k in 1..=99 {
                let u = k as f64 / 100.0;
                let x = d.quantile(u).unwrap();
                assert!((d.cdf(x).unwrap() - u).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn quantile_matches_printed_branch() {
        // θ[2/(−θ + √((θ+2)² − 4u(θ+1))) − 1] away from the ends.
        for t in [0.2f64, 1.0, 5.0, 40.0] {
            for k in 1..20 {
                let u = k as f64 / 20.0;
                let naive = t * (2.0 / (-t + ((t + 2.0).powi(2) - 4.0 * u * (t + 1.0)).sqrt()) - 1.0);
                let q = cel(t).quantile(u).unwrap();
                assert!((q - naive).abs() <= 1e-11 * q.max(1.0));
            }
        }
    }

    #[test]
    fn quantile_far_tail_keeps_precision() {
        let d = cel(2.0);
        let u = 1.0 - 1e-15;
        let x = d.quantile(u).unwrap();
        // survival(x) ≈ θ²/(θ+1)/x in the tail
        let s = d.survival(x).unwrap();
        assert!(((s - (1.0 - u)) / (1.0 - u)).abs() < 1e-3, "s = {s}");
    }

    #[test]
    fn quantile_domain() {
        let d = cel(1.0);
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(-0.1).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn median_examples() {
        assert!((cel(2.0).median() - 1.441_518_440_11).abs() < 1e-10);
        assert!((cel(1.0).median() - (3.0 - 5f64.sqrt()) / (5f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((cel(1.0).median() - 0.618_033_988_7).abs() < 1e-10);
        for t in [0.01f64, 0.1, 1.0, 10.0, 1000.0] {
            let printed = t * (2.0 / (-t + ((t + 1.0).powi(2) + 1.0).sqrt()) - 1.0);
            let m = cel(t).median();
            assert!(m > 0.0);
            assert!((m - printed).abs() <= 1e-9 * m);
        }
    }

    #[test]
    fn negative_and_non_finite_arguments() {
        let d = cel(1.0);
        assert!(d.pdf(-1e-300).is_err());
        assert!(d.cdf(-1.0).is_err());
        assert!(d.survival(f64::NAN).is_err());
        assert!(d.hazard(f64::INFINITY).is_err());
        assert!(d.cumulative_hazard(-2.0).is_err());
        assert!(d.glaser_eta(-0.5).is_err());
    }
}
