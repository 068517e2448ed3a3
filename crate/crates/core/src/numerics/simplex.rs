use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult {
    pub argmin: Vec<f64>,
    pub min_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Bound on both the simplex diameter and the spread of vertex values.
    pub tol: f64,
    pub max_iter: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 2000, initial_step: 0.25 }
    }
}

/// Nelder-Mead minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Non-finite objective values are treated as `+∞`, so a region where the
/// objective is undefined simply repels the simplex.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], tol: f64) -> Result<SimplexResult> {
    nelder_mead_with(f, start, &SimplexOptions { tol, ..Default::default() })
}

pub fn nelder_mead_with(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    opts: &SimplexOptions,
) -> Result<SimplexResult> {
    let dim = start.len();
    if dim == 0 {
        return Err(Error::domain("nelder_mead needs at least one coordinate"));
    }
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(start);
    if !f0.is_finite() || start.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("objective must be finite at the starting point"));
    }

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    vertices.push((start.to_vec(), f0));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x);
        vertices.push((x, v));
    }

    let mut iterations = 0;
    loop {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &vertices[0];
        let diameter = vertices[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = vertices[dim].1 - best.1;
        if diameter < opts.tol && spread < opts.tol {
            return Ok(SimplexResult {
                argmin: best.0.clone(),
                min_value: best.1,
                iterations,
                converged: true,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                routine: "Nelder-Mead",
                iterations,
                residual: spread.max(diameter),
            });
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| vertices[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[dim].0)
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let f_reflected = eval(&reflected);
        if f_reflected < vertices[0].1 {
            let expanded = along(-2.0);
            let f_expanded = eval(&expanded);
            vertices[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < vertices[dim - 1].1 {
            vertices[dim] = (reflected, f_reflected);
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < vertices[dim].1 {
            let x = along(-0.5);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x);
            (x, v)
        };
        if f_contracted < vertices[dim].1.min(f_reflected) {
            vertices[dim] = (contracted, f_contracted);
            continue;
        }
        let best_x = vertices[0].0.clone();
        for (x, v) in vertices.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best_x) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *v = eval(x);
        }
    }
}
