//! Bilinear form, orthogonality checks, Fourier coefficients and truncation.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::material::PencilCoefficients;
use crate::pencil::Eigenpair;

/// Off-diagonal Gram ratio below which eigenfunctions count as orthogonal.
pub const ORTHO_TOL: f64 = 1e-6;

/// Which weight formula feeds the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Orthogonality-validated weights.
    #[default]
    Resolved,
    /// The printed formula taken literally; for comparison only.
    PaperLiteral,
}

impl WeightMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightMode::Resolved => "resolved",
            WeightMode::PaperLiteral => "paper-literal",
        }
    }
}

/// Weights on `int XY, int X'Y', int X''Y'', int X'''Y'''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearWeights {
    pub alpha: [f64; 4],
}

impl BilinearWeights {
    /// Weights obtained by integrating the pencil against its boundary
    /// "potential" `C1 X'''' - (C2 + l C3) X'' + (C4 + l B5) X`.
    pub fn derived(c: &PencilCoefficients) -> Self {
        let g = c.g();
        BilinearWeights {
            alpha: [
                c.c4 * c.c6,
                c.c2 * c.c6 + c.c4 * g,
                c.c1 * c.c6 + c.c2 * g,
                c.c1 * g,
            ],
        }
    }

    /// The printed weight formula with every product read as `C_i B_j`,
    /// kept term by term even where terms cancel.
    #[allow(clippy::eq_op)]
    pub fn printed_literal(c: &PencilCoefficients) -> Self {
        BilinearWeights {
            alpha: [
                c.c4 * c.b6,
                c.c4 * c.b5 - c.c4 * c.b5 + c.c2 * c.b6,
                c.c4 * c.b3 - c.c3 * c.b4 + c.c2 * c.b5 - c.c2 * c.b5 + c.c1 * c.b6,
                c.c2 * c.b3 - c.c2 * c.b3 + c.c1 * c.b5 - c.c1 * c.b5,
            ],
        }
    }

    /// Additional forms produced by integration by parts; adding any multiple
    /// of them leaves the eigenfunctions orthogonal only in special cases.
    fn family(c: &PencilCoefficients) -> [[f64; 4]; 2] {
        [[c.c6, c.c5, c.c3, 0.0], [0.0, c.c4, c.c2, c.c1]]
    }

    /// Drops the `int XY` term (the quotient form used when `B4 = 0`).
    pub fn masked(mut self) -> Self {
        self.alpha[0] = 0.0;
        self
    }

    pub fn scaled(mut self, f: f64) -> Self {
        for a in &mut self.alpha {
            *a *= f;
        }
        self
    }

    pub fn all_positive(&self) -> bool {
        self.alpha.iter().all(|&a| a > 0.0)
    }
}

/// `int_0^1 X_a^(m) X_b^(m) dx` in closed form.
pub fn pair_integral(a: &Eigenpair, b: &Eigenpair, order: u32) -> f64 {
    a.function.product_integral(&b.function, order)
}

/// The bilinear form on arbitrary exponential sums.
pub fn inner_fn(a: &ExpSum, b: &ExpSum, w: &BilinearWeights) -> f64 {
    (0..4)
        .filter(|&m| w.alpha[m] != 0.0)
        .map(|m| w.alpha[m] * a.product_integral(b, m as u32))
        .sum()
}

pub fn inner(a: &Eigenpair, b: &Eigenpair, w: &BilinearWeights) -> f64 {
    inner_fn(&a.function, &b.function, w)
}

/// Gram matrix of a set of eigenfunctions.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub size: usize,
    pub max_offdiag_ratio: f64,
    /// `<X_k, X_k>`.
    pub diag: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

impl GramReport {
    /// Rows `k,h,gram,ratio` for every entry.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,h,gram,ratio\n");
        for (k, row) in self.matrix.iter().enumerate() {
            for (h, &g) in row.iter().enumerate() {
                let ratio = g / (self.diag[k].abs() * self.diag[h].abs()).sqrt();
                let _ = writeln!(s, "{},{},{:.16e},{:.16e}", k + 1, h + 1, g, ratio);
            }
        }
        s
    }
}

/// Per-order integral tables `I_m[k][h]`, `m = 0..3`.
fn integral_tables(pairs: &[Eigenpair]) -> [Vec<Vec<f64>>; 4] {
    let n = pairs.len();
    let rows: Vec<[Vec<f64>; 4]> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut r: [Vec<f64>; 4] = Default::default();
            for (m, rm) in r.iter_mut().enumerate() {
                *rm = (0..n)
                    .map(|h| pair_integral(&pairs[k], &pairs[h], m as u32))
                    .collect();
            }
            r
        })
        .collect();
    let mut t: [Vec<Vec<f64>>; 4] = Default::default();
    for row in rows {
        for (m, rm) in row.into_iter().enumerate() {
            t[m].push(rm);
        }
    }
    // Exact symmetry: keep the upper triangle.
    for tm in &mut t {
        for k in 1..n {
            let (upper, lower) = tm.split_at_mut(k);
            for (h, row) in upper.iter().enumerate() {
                lower[0][h] = row[k];
            }
        }
    }
    t
}

fn combine(tables: &[Vec<Vec<f64>>; 4], w: &[f64; 4]) -> Vec<Vec<f64>> {
    let n = tables[0].len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|h| (0..4).map(|m| w[m] * tables[m][k][h]).sum())
                .collect()
        })
        .collect()
}

fn report(matrix: Vec<Vec<f64>>) -> GramReport {
    let n = matrix.len();
    let diag: Vec<f64> = (0..n).map(|k| matrix[k][k]).collect();
    let mut max_ratio = 0.0f64;
    for k in 0..n {
        for h in 0..n {
            if k != h {
                let r = matrix[k][h].abs() / (diag[k].abs() * diag[h].abs()).sqrt();
                max_ratio = max_ratio.max(if r.is_nan() { f64::INFINITY } else { r });
            }
        }
    }
    GramReport {
        size: n,
        max_offdiag_ratio: max_ratio,
        diag,
        matrix,
    }
}

pub fn gram(pairs: &[Eigenpair], w: &BilinearWeights) -> GramReport {
    report(combine(&integral_tables(pairs), &w.alpha))
}

/// Chooses weights under which the probe eigenfunctions are orthogonal.
///
/// The derived weights are tried first; otherwise the best member of the
/// integration-by-parts family (least-squares fit of the off-diagonal Gram
/// entries) is accepted if it passes the gate.
pub fn resolve_weights(
    coeffs: &PencilCoefficients,
    probes: &[Eigenpair],
) -> Result<(BilinearWeights, GramReport)> {
    if probes.len() < 4 {
        return Err(Error::InvalidInput(
            "weight resolution needs at least 4 probe eigenpairs".into(),
        ));
    }
    let tables = integral_tables(probes);
    let base = BilinearWeights::derived(coeffs);
    let rep = report(combine(&tables, &base.alpha));
    if rep.max_offdiag_ratio <= ORTHO_TOL {
        return Ok((base, rep));
    }
    let fam = BilinearWeights::family(coeffs);
    let ge = combine(&tables, &base.alpha);
    let gs: Vec<Vec<Vec<f64>>> = fam.iter().map(|f| combine(&tables, f)).collect();
    let n = probes.len();
    let (mut a, mut rhs) = ([[0.0; 2]; 2], [0.0; 2]);
    for k in 0..n {
        for h in k + 1..n {
            let s = (ge[k][k].abs() * ge[h][h].abs()).sqrt();
            let v = [gs[0][k][h] / s, gs[1][k][h] / s];
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j] += v[i] * v[j];
                }
                rhs[i] -= v[i] * ge[k][h] / s;
            }
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det != 0.0 && det.is_finite() {
        let s = (rhs[0] * a[1][1] - rhs[1] * a[0][1]) / det;
        let t = (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det;
        let mut alpha = base.alpha;
        for m in 0..4 {
            alpha[m] += s * fam[0][m] + t * fam[1][m];
        }
        let w = BilinearWeights { alpha };
        let r = report(combine(&tables, &alpha));
        if r.max_offdiag_ratio <= ORTHO_TOL {
            return Ok((w, r));
        }
    }
    Err(Error::WeightsUnresolvable {
        max_offdiag_ratio: rep.max_offdiag_ratio,
    })
}

/// `p_k = alpha0 W_in int X_k / <X_k, X_k>` for the constant datum `W_in`.
pub fn fourier_coefficients(spectrum: &[Eigenpair], w_in: f64, w: &BilinearWeights) -> Vec<f64> {
    spectrum
        .par_iter()
        .map(|p| {
            if w_in == 0.0 {
                return 0.0;
            }
            w.alpha[0] * w_in * p.function.integral() / inner(p, p, w)
        })
        .collect()
}

/// Projection coefficients `<f, X_k> / <X_k, X_k>` of an arbitrary datum.
pub fn project(spectrum: &[Eigenpair], datum: &ExpSum, w: &BilinearWeights) -> Vec<f64> {
    spectrum
        .par_iter()
        .map(|p| inner_fn(datum, &p.function, w) / inner(p, p, w))
        .collect()
}

/// Relative error of the constant `W_in` against its first `n` modes, in the
/// norm induced by `w`.
pub fn reconstruction_error(
    gram: &GramReport,
    spectrum: &[Eigenpair],
    p: &[f64],
    w_in: f64,
    w: &BilinearWeights,
    n: usize,
) -> f64 {
    let norm_sq = w.alpha[0] * w_in * w_in;
    if norm_sq == 0.0 {
        return 0.0;
    }
    let mut err = norm_sq;
    for k in 0..n {
        err -= 2.0 * p[k] * w.alpha[0] * w_in * spectrum[k].function.integral();
        for h in 0..n {
            err += p[k] * p[h] * gram.matrix[k][h];
        }
    }
    (err.abs() / norm_sq.abs()).sqrt()
}

/// Smallest `n` whose reconstruction error is at most `target`.
pub fn truncation_order(
    spectrum: &[Eigenpair],
    p: &[f64],
    w_in: f64,
    w: &BilinearWeights,
    target: f64,
) -> Result<usize> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidInput(format!(
            "truncation target {target} outside (0, 1)"
        )));
    }
    if w_in == 0.0 {
        return Ok(0);
    }
    let g = gram(spectrum, w);
    let mut last = 1.0;
    for n in 1..=spectrum.len() {
        last = reconstruction_error(&g, spectrum, p, w_in, w, n);
        if last <= target {
            return Ok(n);
        }
    }
    Err(Error::SpectrumExhausted {
        available: spectrum.len(),
        target,
        reached: last,
    })
}
