//! The spectral pencil: characteristic roots, boundary matrix, determinant,
//! eigenvalue search and eigenfunctions.

mod basis;
mod eigen;
mod roots;
mod search;

pub use basis::{boundary_matrix, determinant, BoundaryMatrix, Column};
pub use eigen::{eigenfunction, eigenfunction_with_tol, Eigenpair};
pub use roots::{characteristic_roots, solve_cubic, CharRoots};
pub use search::{find_all_eigenvalues, find_eigenvalues, SearchWindow};

use crate::error::Result;
use crate::material::PencilCoefficients;

/// Eigenvalues and eigenfunctions of the `count` modes closest to zero.
pub fn spectrum(
    coeffs: &PencilCoefficients,
    count: usize,
    window: &SearchWindow,
) -> Result<Vec<Eigenpair>> {
    use rayon::prelude::*;
    let lambdas = find_eigenvalues(coeffs, count, window)?;
    lambdas
        .par_iter()
        .enumerate()
        .map(|(k, &l)| {
            let mut p = eigenfunction_with_tol(l, coeffs, window.critical_tol)?;
            p.index = k;
            Ok(p)
        })
        .collect()
}
