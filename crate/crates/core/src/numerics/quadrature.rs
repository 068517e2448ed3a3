#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Tolerances and evaluation budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_evaluations: 1_000_000,
        }
    }
}

// 21-point Kronrod rule with embedded 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const KRONROD_POINTS: usize = 21;

struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut res_gauss = 0.0;
    let mut res_kronrod = fc * WGK[10];
    let mut res_abs = res_kronrod.abs();
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    if !res_kronrod.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let habs = half.abs();
    let value = res_kronrod * half;
    let res_abs = res_abs * habs;
    let res_asc = res_asc * habs;

    let mut err = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

/// Globally adaptive bisection over one or more mapped pieces. `g(piece, t)`
/// evaluates the (already transformed) integrand of `piece` at `t`.
fn adaptive<G: Fn(usize, f64) -> f64>(
    g: G,
    pieces: &[(usize, f64, f64)],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    let mut evaluations = 0;
    for &(piece, a, b) in pieces {
        let (value, error) = kronrod21(&|t| g(piece, t), a, b)?;
        evaluations += KRONROD_POINTS;
        heap.push(Segment { piece, a, b, value, error });
    }
    loop {
        let (total, total_err) = heap.iter().fold((settled_value, settled_error), |acc, s| {
            (acc.0 + s.value, acc.1 + s.error)
        });
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: total_err,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            // Every segment hit the resolution floor.
            return Err(Error::NoConvergence {
                routine: "adaptive quadrature",
                iterations: evaluations,
                residual: total_err,
            });
        };
        if evaluations + 2 * KRONROD_POINTS > opts.max_evaluations {
            return Err(Error::NoConvergence {
                routine: "adaptive quadrature",
                iterations: evaluations,
                residual: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            settled_value += worst.value;
            settled_error += worst.error;
            continue;
        }
        let piece = worst.piece;
        let f = |t| g(piece, t);
        let (v1, e1) = kronrod21(&f, worst.a, mid)?;
        let (v2, e2) = kronrod21(&f, mid, worst.b)?;
        evaluations += 2 * KRONROD_POINTS;
        heap.push(Segment { piece, a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { piece, a: mid, b: worst.b, value: v2, error: e2 });
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult> {
    integrate_with(
        f,
        a,
        b,
        &QuadratureOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        },
    )
}

pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("finite integration limits required"));
    }
    if a == b {
        return Ok(QuadratureResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 1 });
    }
    adaptive(|_, x| f(x), &[(0, a, b)], opts)
}

/// Integrates `f` over `[lower, ∞)` through the substitution
/// `x = lower + t/(1 - t)`.
///
/// The upper half `t ∈ [1/2, 1)` is parametrized by `s = 1 - t` so that the
/// neighbourhood of `x = ∞` keeps full floating-point resolution; this matters
/// for slowly decaying tails such as `x^-1.1`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_semi_infinite_with(
        f,
        lower,
        &QuadratureOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        },
    )
}

pub fn integrate_semi_infinite_with<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if !lower.is_finite() {
        return Err(Error::domain(format!("lower limit must be finite, got {lower}")));
    }
    let g = |piece: usize, t: f64| -> f64 {
        // piece 0: t in [0, 1/2]; piece 1: s = 1 - t in (0, 1/2].
        let (x, jac_root) = if piece == 0 {
            let s = 1.0 - t;
            (lower + t / s, 1.0 / s)
        } else {
            (lower + (1.0 - t) / t, 1.0 / t)
        };
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * jac_root * jac_root
        }
    };
    adaptive(g, &[(0, 0.0, 0.5), (1, 0.0, 0.5)], opts)
}
