//! Spectral solver for one-dimensional consolidation of a second-gradient
//! poroelastic layer.
//!
//! The layer occupies the dimensionless interval `[0, 1]`: the loaded,
//! drained surface sits at `x = 0` and the impermeable wall at `x = 1`.
//! The primary unknown `V(x, t)` is expanded in eigenfunctions of a sixth
//! order operator pencil whose spectral parameter also appears in one of the
//! boundary conditions. Strain and fluid density are recovered from `V`.
//!
//! Module map:
//! - [`material`]: physical parameters, dimensionless groups, coefficient ledger, regimes.
//! - [`pencil`]: characteristic roots, boundary matrix, determinant, eigenpairs.
//! - [`spectral`]: bilinear weights, Gram checks, Fourier coefficients, truncation.
//! - [`field`]: stationary state, series solution, reconstruction, residuals.
//! - [`terzaghi`]: the classical limit, its series and a finite-difference oracle.
//! - [`sweep`]: first-eigenvalue tracking across prestress and threshold search.

pub mod error;
pub mod expsum;
pub mod field;
pub mod material;
pub mod pencil;
pub mod spectral;
pub mod sweep;
pub mod terzaghi;

pub use error::{Error, Result};
pub use expsum::{ExpSum, ExpTerm};
pub use field::{ProfileTable, SolutionField, Truncation};
pub use material::{
    DimensionlessGroups, MaterialParams, PencilCoefficients, Regime, RegimeKind, SecondGradient,
};
pub use pencil::{Eigenpair, SearchWindow};
pub use spectral::{BilinearWeights, GramReport, WeightMode};
pub use terzaghi::TerzaghiParams;
