//! Eigenvalue bracketing on a log-spaced grid and bisection refinement.

use rayon::prelude::*;

use super::basis::determinant;
use crate::error::{Error, Result};
use crate::material::{PencilCoefficients, CRITICAL_TOL};

/// Eigenvalues closer than this (relative) are merged.
const MERGE_REL: f64 = 1e-8;

/// Where and how densely to look for eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    /// Most negative eigenvalue considered.
    pub lambda_min: f64,
    /// Number of log-spaced grid points on each searched half-axis.
    pub grid: usize,
    /// Smallest `|lambda|` on the grid.
    pub lambda_floor: f64,
    /// Upper end of the positive half-axis search; `None` skips it.
    pub lambda_max: Option<f64>,
    /// `|B4|` below which the prestress is critical and zero is an eigenvalue.
    pub critical_tol: f64,
}

impl SearchWindow {
    /// `lambda_min = -1e4 max(1, 1/k1)`, 2000 points, positive side only in the
    /// unstable regime.
    pub fn default_for(coeffs: &PencilCoefficients) -> Self {
        let lambda_min = -1e4 * (1.0 / coeffs.groups.k1).max(1.0);
        SearchWindow {
            lambda_min,
            grid: 2000,
            lambda_floor: 1e-8,
            lambda_max: (coeffs.b4 < -CRITICAL_TOL).then_some(-lambda_min),
            critical_tol: CRITICAL_TOL,
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.lambda_min < 0.0
            && self.lambda_floor > 0.0
            && self.lambda_floor < -self.lambda_min
            && self.grid >= 2
            && self.lambda_max.is_none_or(|m| m > self.lambda_floor);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad search window {self:?}")))
        }
    }
}

/// Determinant with the small perturbation fallback for unevaluable points.
fn eval(lambda: f64, coeffs: &PencilCoefficients) -> Option<f64> {
    for l in [lambda, lambda * (1.0 + 1e-9), lambda * (1.0 - 1e-9)] {
        if let Ok(d) = determinant(l, coeffs) {
            if d.is_finite() {
                return Some(d);
            }
        }
    }
    None
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Refine a sign change on `[a, b]` down to adjacent floating-point numbers.
fn bisect(coeffs: &PencilCoefficients, mut a: f64, mut fa: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let Some(fm) = eval(mid, coeffs) else { break };
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// All sign changes of the determinant on the grid points `pts` (ordered).
fn roots_on(coeffs: &PencilCoefficients, pts: &[f64]) -> Vec<f64> {
    let vals: Vec<Option<f64>> = pts.par_iter().map(|&l| eval(l, coeffs)).collect();
    let brackets: Vec<(f64, f64, f64)> = pts
        .windows(2)
        .zip(vals.windows(2))
        .filter_map(|(p, v)| match (v[0], v[1]) {
            (Some(f0), _) if f0 == 0.0 => Some((p[0], f0, p[0])),
            (Some(f0), Some(f1)) if (f0 > 0.0) != (f1 > 0.0) && f1 != 0.0 => Some((p[0], f0, p[1])),
            _ => None,
        })
        .collect();
    brackets
        .par_iter()
        .map(|&(a, fa, b)| if a == b { a } else { bisect(coeffs, a, fa, b) })
        .collect()
}

/// Every eigenvalue the window detects, sorted by decreasing value.
pub fn find_all_eigenvalues(
    coeffs: &PencilCoefficients,
    window: &SearchWindow,
) -> Result<Vec<f64>> {
    window.validate()?;
    let mut found = Vec::new();
    let neg: Vec<f64> = log_grid(window.lambda_floor, -window.lambda_min, window.grid)
        .into_iter()
        .map(|v| -v)
        .collect();
    found.extend(roots_on(coeffs, &neg));
    if let Some(max) = window.lambda_max {
        found.extend(roots_on(
            coeffs,
            &log_grid(window.lambda_floor, max, window.grid),
        ));
    }
    if coeffs.b4.abs() <= window.critical_tol {
        found.push(0.0);
    }
    found.sort_by(|a, b| b.total_cmp(a));
    let mut merged: Vec<f64> = Vec::with_capacity(found.len());
    for l in found {
        match merged.last() {
            Some(&p) if (p - l).abs() <= MERGE_REL * p.abs().max(l.abs()) => {}
            _ => merged.push(l),
        }
    }
    Ok(merged)
}

/// The `count` eigenvalues closest to zero, sorted by decreasing value
/// (positive eigenvalues, if any, come first).
pub fn find_eigenvalues(
    coeffs: &PencilCoefficients,
    count: usize,
    window: &SearchWindow,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be >= 1".into()));
    }
    let mut all = find_all_eigenvalues(coeffs, window)?;
    if all.len() < count {
        return Err(Error::InsufficientBracket {
            found: all.len(),
            requested: count,
            lambda_min: window.lambda_min,
        });
    }
    all.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    all.truncate(count);
    all.sort_by(|a, b| b.total_cmp(a));
    Ok(all)
}
