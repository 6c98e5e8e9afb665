//! Exponential basis, boundary matrix and the scaled real determinant.

use nalgebra::Matrix6;
use num_complex::Complex64;

use super::roots::{characteristic_roots, CharRoots};
use crate::error::Result;
use crate::expsum::{cpow, phi1, ExpTerm};
use crate::material::PencilCoefficients;

/// Roots closer than this (relative to `max(1, |beta|)`) share a confluent column.
const CLUSTER_REL: f64 = 1e-3;

/// One column of the boundary matrix, i.e. one basis function of the
/// sixth-order equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Column {
    /// `e^{beta (x - shift)}`.
    Exp { beta: Complex64, shift: f64 },
    /// Divided difference `(e^{b2 y} - e^{b1 y}) / (b2 - b1)`, `y = x - shift`;
    /// tends to `y e^{b1 y}` as the roots merge.
    Divided {
        b1: Complex64,
        b2: Complex64,
        shift: f64,
    },
}

impl Column {
    /// `order`-th derivative at `x`.
    pub fn deriv(&self, x: f64, order: u32) -> Complex64 {
        match *self {
            Column::Exp { beta, shift } => cpow(beta, order) * (beta * (x - shift)).exp(),
            Column::Divided { b1, b2, shift } => {
                let y = x - shift;
                // Leibniz rule for divided differences of u(b) = b^m, v(b) = e^{b y}.
                let e1 = (b1 * y).exp();
                let v12 = e1 * y * phi1((b2 - b1) * y);
                let mut u12 = Complex64::new(0.0, 0.0);
                for k in 0..order {
                    u12 += cpow(b1, k) * cpow(b2, order - 1 - k);
                }
                cpow(b1, order) * v12 + u12 * (b2 * y).exp()
            }
        }
    }

    /// Expansion into plain exponential terms with coefficient `weight`.
    pub fn unfold(&self, weight: Complex64, out: &mut Vec<ExpTerm>) {
        match *self {
            Column::Exp { beta, shift } => out.push(ExpTerm {
                coef: weight,
                beta,
                shift,
            }),
            Column::Divided { b1, b2, shift } => {
                let d = b2 - b1;
                out.push(ExpTerm {
                    coef: -weight / d,
                    beta: b1,
                    shift,
                });
                out.push(ExpTerm {
                    coef: weight / d,
                    beta: b2,
                    shift,
                });
            }
        }
    }

    fn shift(&self) -> f64 {
        match *self {
            Column::Exp { shift, .. } | Column::Divided { shift, .. } => shift,
        }
    }

    fn leading_beta(&self) -> Complex64 {
        match *self {
            Column::Exp { beta, .. } => beta,
            Column::Divided { b1, .. } => b1,
        }
    }
}

fn shift_for(re: f64) -> f64 {
    if re > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Columns for the six roots plus the Vandermonde product of the root pairs
/// that were not merged into confluent columns.
pub(crate) fn columns(roots: &CharRoots) -> ([Column; 6], Complex64) {
    let b = roots.beta;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            let scale = 1f64.max(b[i].norm()).max(b[j].norm());
            let d = (b[i] - b[j]).norm() / scale;
            if d <= CLUSTER_REL {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut partner: [Option<usize>; 6] = [None; 6];
    for (_, i, j) in pairs {
        if partner[i].is_none() && partner[j].is_none() {
            partner[i] = Some(j);
            partner[j] = Some(i);
        }
    }
    let mut cols = [Column::Exp {
        beta: Complex64::new(0.0, 0.0),
        shift: 0.0,
    }; 6];
    let mut vandermonde = Complex64::new(1.0, 0.0);
    for i in 0..6 {
        match partner[i] {
            None => {
                cols[i] = Column::Exp {
                    beta: b[i],
                    shift: shift_for(b[i].re),
                }
            }
            Some(j) => {
                let shift = shift_for((b[i] + b[j]).re);
                cols[i] = if i < j {
                    Column::Exp { beta: b[i], shift }
                } else {
                    Column::Divided {
                        b1: b[j],
                        b2: b[i],
                        shift,
                    }
                };
            }
        }
        for j in i + 1..6 {
            if partner[i] != Some(j) {
                vandermonde *= b[j] - b[i];
            }
        }
    }
    (cols, vandermonde)
}

/// The 6x6 boundary matrix in the shifted exponential basis.
#[derive(Debug, Clone)]
pub struct BoundaryMatrix {
    pub lambda: f64,
    pub roots: CharRoots,
    pub columns: [Column; 6],
    /// Unscaled entries.
    pub entries: Matrix6<Complex64>,
    /// Positive row divisors that bring every entry to O(1).
    pub row_scales: [f64; 6],
    /// `|e^{-beta shift}|` for each column, i.e. the exponential rescaling applied
    /// relative to the plain basis `e^{beta x}`.
    pub column_scales: [f64; 6],
    pub(crate) vandermonde: Complex64,
}

/// Row `r`, column function `f`: the six boundary conditions.
fn row_entry(r: usize, col: &Column, lambda: f64, c: &PencilCoefficients) -> Complex64 {
    match r {
        0 => {
            col.deriv(0.0, 4) * c.b1 - col.deriv(0.0, 2) * (c.b2 + lambda * c.b3)
                + col.deriv(0.0, 0) * (c.b4 + lambda * c.b5)
        }
        1 => col.deriv(0.0, 1),
        2 => col.deriv(1.0, 1),
        3 => col.deriv(0.0, 3),
        4 => col.deriv(1.0, 3),
        _ => col.deriv(1.0, 5),
    }
}

/// Positive scale of boundary row `r` for roots of magnitude up to `rho - 1`.
pub(crate) fn row_scale(r: usize, lambda: f64, c: &PencilCoefficients, rho: f64) -> f64 {
    match r {
        0 => {
            c.b1.abs() * rho.powi(4)
                + (c.b2 + lambda * c.b3).abs() * rho * rho
                + (c.b4 + lambda * c.b5).abs()
        }
        1 | 2 => rho,
        3 | 4 => rho.powi(3),
        _ => rho.powi(5),
    }
}

pub fn boundary_matrix(
    lambda: f64,
    roots: &CharRoots,
    coeffs: &PencilCoefficients,
) -> BoundaryMatrix {
    let (columns, vandermonde) = columns(roots);
    let rho = 1.0 + roots.beta.iter().fold(0.0f64, |m, b| m.max(b.norm()));
    let entries = Matrix6::from_fn(|r, j| row_entry(r, &columns[j], lambda, coeffs));
    let mut row_scales = [0.0; 6];
    for (r, s) in row_scales.iter_mut().enumerate() {
        *s = row_scale(r, lambda, coeffs, rho);
    }
    let mut column_scales = [0.0; 6];
    for (s, col) in column_scales.iter_mut().zip(columns.iter()) {
        *s = (-col.leading_beta().re * col.shift()).exp();
    }
    BoundaryMatrix {
        lambda,
        roots: *roots,
        columns,
        entries,
        row_scales,
        column_scales,
        vandermonde,
    }
}

impl BoundaryMatrix {
    /// Entries with each row divided by its scale.
    pub fn scaled(&self) -> Matrix6<Complex64> {
        let mut m = self.entries;
        for r in 0..6 {
            let s = 1.0 / self.row_scales[r];
            for j in 0..6 {
                m[(r, j)] *= s;
            }
        }
        m
    }

    /// Complex determinant of the row-scaled matrix divided by the Vandermonde
    /// factor of the distinct roots.
    pub fn normalized_determinant(&self) -> Complex64 {
        self.scaled().determinant() / self.vandermonde
    }
}

/// Real, continuous scaled determinant whose zeros are the eigenvalues.
///
/// The complex determinant is divided by the product of root differences,
/// which removes its dependence on the (arbitrary) ordering of the roots and
/// makes it real for real `lambda`, up to round-off.
pub fn determinant(lambda: f64, coeffs: &PencilCoefficients) -> Result<f64> {
    let roots = characteristic_roots(lambda, coeffs, false)?;
    let bm = boundary_matrix(lambda, &roots, coeffs);
    Ok(bm.normalized_determinant().re)
}
