//! First-eigenvalue tracking across prestress and the stability threshold.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::material::{classify_regime, MaterialParams, RegimeKind, CRITICAL_TOL};
use crate::pencil::{find_all_eigenvalues, SearchWindow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p0: f64,
    pub b4: f64,
    /// Rightmost eigenvalue; `None` if the point failed.
    pub lambda1: Option<f64>,
    pub regime: RegimeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Midpoint of the first bracket where `lambda1` changes sign.
    pub threshold_estimate: Option<f64>,
}

impl SweepResult {
    pub const HEADER: &'static str = "p0,B4,lambda1,regime";

    /// Failed points leave the `lambda1` field empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            let l = r.lambda1.map_or(String::new(), |l| format!("{l:.16e}"));
            let _ = writeln!(s, "{:.16e},{:.16e},{},{}", r.p0, r.b4, l, r.regime.as_str());
        }
        s
    }
}

/// Rightmost (least-damped or most-unstable) eigenvalue at prestress `p0`,
/// searching the positive axis as well. In the stable regime it is also the
/// eigenvalue of smallest magnitude.
pub fn first_eigenvalue(base: &MaterialParams, p0: f64) -> Result<f64> {
    let c = base.with_prestress(p0).coefficients()?;
    let mut w = SearchWindow::default_for(&c);
    w.lambda_max = Some(-w.lambda_min);
    find_all_eigenvalues(&c, &w)?
        .into_iter()
        .max_by(|a, b| a.total_cmp(b))
        .ok_or(Error::InsufficientBracket {
            found: 0,
            requested: 1,
            lambda_min: w.lambda_min,
        })
}

fn sign(l: f64) -> i8 {
    if l > 0.0 {
        1
    } else if l < 0.0 {
        -1
    } else {
        0
    }
}

pub fn sweep(base: &MaterialParams, p0_values: &[f64]) -> Result<SweepResult> {
    if p0_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(
            "p0 values must be sorted ascending".into(),
        ));
    }
    let rows: Vec<SweepRow> = p0_values
        .par_iter()
        .map(|&p0| {
            let params = base.with_prestress(p0);
            let (b4, regime) = match params.coefficients() {
                Ok(c) => (c.b4, classify_regime(&c, CRITICAL_TOL).kind),
                Err(_) => (f64::NAN, RegimeKind::Critical),
            };
            SweepRow {
                p0,
                b4,
                lambda1: first_eigenvalue(base, p0).ok(),
                regime,
            }
        })
        .collect();
    let threshold_estimate = rows
        .windows(2)
        .find_map(|w| match (w[0].lambda1, w[1].lambda1) {
            (Some(a), Some(b)) if sign(a) != sign(b) || a == 0.0 => Some(0.5 * (w[0].p0 + w[1].p0)),
            _ => None,
        });
    Ok(SweepResult {
        rows,
        threshold_estimate,
    })
}

/// Bisection on the sign of the first eigenvalue over `bracket`.
pub fn threshold(base: &MaterialParams, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if tol.is_nan() || tol <= 0.0 || lo.is_nan() || hi.is_nan() || hi <= lo {
        return Err(Error::InvalidInput(format!(
            "bad bracket {bracket:?} / tol {tol}"
        )));
    }
    let s_lo = sign(first_eigenvalue(base, lo)?);
    let s_hi = sign(first_eigenvalue(base, hi)?);
    if s_lo == 0 {
        return Ok(lo);
    }
    if s_hi == 0 {
        return Ok(hi);
    }
    if s_lo == s_hi {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let s = sign(first_eigenvalue(base, mid)?);
        if s == 0 {
            return Ok(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
