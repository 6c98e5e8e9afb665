//! Eigenfunction extraction from the null space of the boundary matrix.

use num_complex::Complex64;

use super::basis::{boundary_matrix, row_scale};
use super::roots::{characteristic_roots, CharRoots};
use crate::error::{Error, Result};
use crate::expsum::{ExpSum, ExpTerm};
use crate::material::{PencilCoefficients, CRITICAL_TOL};

const NULL_RATIO: f64 = 1e-6;

/// An eigenvalue together with its real, normalized eigenfunction.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// Position in the spectrum as returned by the search (0-based).
    pub index: usize,
    pub lambda: f64,
    pub roots: CharRoots,
    /// Null vector of the row-scaled boundary matrix (basis weights).
    pub weights: [Complex64; 6],
    /// `X(x)` with `int X^2 = 1` and `int X >= 0`.
    pub function: ExpSum,
    /// Smallest over largest singular value at `lambda`.
    pub singular_ratio: f64,
    /// `sqrt(int (Im X)^2 / int |X|^2)` of the phase-aligned null-space
    /// function, before its imaginary part is dropped.
    pub imag_ratio: f64,
}

/// Builds the eigenfunction for a verified eigenvalue.
pub fn eigenfunction(lambda: f64, coeffs: &PencilCoefficients) -> Result<Eigenpair> {
    eigenfunction_with_tol(lambda, coeffs, CRITICAL_TOL)
}

pub fn eigenfunction_with_tol(
    lambda: f64,
    coeffs: &PencilCoefficients,
    critical_tol: f64,
) -> Result<Eigenpair> {
    let roots = characteristic_roots(lambda, coeffs, false)?;
    if lambda == 0.0 {
        // beta = 0 is a quadruple root when B4 = 0; the constant is the
        // eigenfunction, and for B4 != 0 zero is not an eigenvalue.
        if coeffs.b4.abs() > critical_tol {
            return Err(Error::NotAnEigenvalue { lambda, ratio: 1.0 });
        }
        return Ok(Eigenpair {
            index: 0,
            lambda,
            roots,
            weights: [Complex64::new(0.0, 0.0); 6],
            function: ExpSum::constant(1.0),
            singular_ratio: 0.0,
            imag_ratio: 0.0,
        });
    }
    let bm = boundary_matrix(lambda, &roots, coeffs);
    let svd = bm.scaled().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sv = &svd.singular_values;
    let (imin, smin) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, s)| (i, *s))
        .unwrap_or((0, 0.0));
    let smax = sv.iter().fold(0.0f64, |m, s| m.max(*s));
    let ratio = if smax > 0.0 { smin / smax } else { 1.0 };
    if ratio > NULL_RATIO || !ratio.is_finite() {
        return Err(Error::NotAnEigenvalue { lambda, ratio });
    }
    let mut weights = [Complex64::new(0.0, 0.0); 6];
    for (j, w) in weights.iter_mut().enumerate() {
        *w = v_t[(imin, j)].conj();
    }

    let mut terms: Vec<ExpTerm> = Vec::with_capacity(8);
    for (col, w) in bm.columns.iter().zip(weights.iter()) {
        col.unfold(*w, &mut terms);
    }
    let mut function = ExpSum::new(merge_terms(terms));

    // Rotate the complex null vector so that the real part carries the function.
    let sq = function.complex_square_integral();
    function.scale(Complex64::from_polar(1.0, -0.5 * sq.arg()));
    let total = function.modulus_square_integral();
    let re_sq = function.complex_square_integral().re;
    let imag_ratio = ((total - re_sq) / (2.0 * total)).max(0.0).sqrt();

    // Keep the real part only, written as a conjugate-closed sum.
    let mut real_terms = Vec::with_capacity(2 * function.terms.len());
    for t in &function.terms {
        real_terms.push(ExpTerm {
            coef: t.coef * 0.5,
            ..*t
        });
        real_terms.push(ExpTerm {
            coef: t.coef.conj() * 0.5,
            beta: t.beta.conj(),
            shift: t.shift,
        });
    }
    let mut function = ExpSum::new(merge_terms(real_terms));
    let norm_sq = function.product_integral(&function, 0);
    function.scale(Complex64::new(1.0 / norm_sq.sqrt(), 0.0));
    if function.integral() < 0.0 {
        function.scale(Complex64::new(-1.0, 0.0));
    }

    Ok(Eigenpair {
        index: 0,
        lambda,
        roots,
        weights,
        function,
        singular_ratio: ratio,
        imag_ratio,
    })
}

fn merge_terms(terms: Vec<ExpTerm>) -> Vec<ExpTerm> {
    let mut merged: Vec<ExpTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged
            .iter_mut()
            .find(|m| m.beta == t.beta && m.shift == t.shift)
        {
            Some(m) => m.coef += t.coef,
            None => merged.push(t),
        }
    }
    merged
}

impl Eigenpair {
    /// `order`-th derivative of the eigenfunction at `x`.
    pub fn eval(&self, x: f64, order: u32) -> f64 {
        self.function.eval(x, order)
    }

    /// Interior residual of the pencil equation at `x`, divided by the sum of
    /// the magnitudes of its terms.
    pub fn ode_residual(&self, coeffs: &PencilCoefficients, x: f64) -> f64 {
        let c = coeffs;
        let l = self.lambda;
        let f = &self.function;
        let d = |m| f.eval(x, m);
        let s = |m| f.magnitude(x, m);
        let r = c.c1 * d(6) - (c.c2 + l * c.c3) * d(4) + (c.c4 + l * c.c5) * d(2) - l * c.c6 * d(0);
        let scale = c.c1.abs() * s(6)
            + (c.c2 + l * c.c3).abs() * s(4)
            + (c.c4 + l * c.c5).abs() * s(2)
            + (l * c.c6).abs() * s(0);
        if scale == 0.0 {
            0.0
        } else {
            r.abs() / scale
        }
    }

    /// The six boundary rows applied to the eigenfunction, each divided by the
    /// row scale used in the boundary matrix.
    pub fn boundary_residuals(&self, coeffs: &PencilCoefficients) -> [f64; 6] {
        let c = coeffs;
        let l = self.lambda;
        let f = &self.function;
        let rho = 1.0 + self.roots.beta.iter().fold(0.0f64, |m, b| m.max(b.norm()));
        let raw = [
            c.b1 * f.eval(0.0, 4) - (c.b2 + l * c.b3) * f.eval(0.0, 2)
                + (c.b4 + l * c.b5) * f.eval(0.0, 0),
            f.eval(0.0, 1),
            f.eval(1.0, 1),
            f.eval(0.0, 3),
            f.eval(1.0, 3),
            f.eval(1.0, 5),
        ];
        let mut out = [0.0; 6];
        for (r, o) in out.iter_mut().enumerate() {
            *o = raw[r].abs() / row_scale(r, l, c, rho);
        }
        out
    }
}
