//! The classical (first-gradient) limit: diffusion of the fluid density with
//! a drained surface and an impermeable wall.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{ProfileRow, ProfileTable, SolutionField};
use crate::material::{MaterialParams, PencilCoefficients};

/// Relative tolerance used to decide whether two parameter sets agree.
const MATCH_REL: f64 = 1e-12;
/// Interior window of the sup-norm comparison.
const INTERIOR: (f64, f64) = (0.1, 0.9);
/// Fraction of `|c|` defining the edge of a boundary layer.
const LAYER_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerzaghiParams {
    /// Dimensionless diffusivity `1 / (1 + k6)`.
    pub a: f64,
    /// Fluid density held at the drained surface, `-b dp / (lambda + 2 mu)`.
    pub c: f64,
    /// `B6 = dp / (b M)`.
    pub b6: f64,
    /// `C6` of the unstressed layer, `1 + k6`.
    pub c6: f64,
    /// `b k5`.
    pub bk5: f64,
}

impl TerzaghiParams {
    pub fn from_params(params: &MaterialParams) -> Result<Self> {
        let c = params.with_prestress(0.0).coefficients()?;
        Ok(Self::from_coefficients(&c))
    }

    /// Parameters of the classical limit sharing the first-gradient moduli of
    /// `coeffs` (prestress ignored).
    pub fn from_coefficients(coeffs: &PencilCoefficients) -> Self {
        let k = &coeffs.groups;
        let c6 = 1.0 + k.k6;
        // m - b eps = 0 at the surface, with eps = b k5 (m - B6) / c6.
        let c = -k.k6 * coeffs.b6;
        TerzaghiParams {
            a: 1.0 / c6,
            c,
            b6: coeffs.b6,
            c6,
            bk5: k.b * k.k5,
        }
    }

    /// The surface value in the printed form `(1 + k6) b dp / (lambda + 2 mu)`.
    pub fn printed_boundary_value(&self) -> f64 {
        -self.c6 * self.c
    }

    /// `V` consistent with fluid density `m` in the classical limit.
    pub fn v_of(&self, m: f64) -> f64 {
        (m - self.b6) / self.c6
    }

    /// Strain consistent with fluid density `m`.
    pub fn strain_of(&self, m: f64) -> f64 {
        self.bk5 * self.v_of(m)
    }

    fn row(&self, x: f64, t: f64, m: f64) -> ProfileRow {
        ProfileRow {
            x,
            t,
            v: self.v_of(m),
            eps: self.strain_of(m),
            mf: m,
        }
    }
}

fn omega(k: usize) -> f64 {
    PI / 2.0 + k as f64 * PI
}

/// Fluid density from the eigenfunction series with `modes` terms.
pub fn terzaghi_series(p: &TerzaghiParams, x: f64, t: f64, modes: usize) -> f64 {
    if p.c == 0.0 {
        return 0.0;
    }
    let mut s = p.c;
    for k in 0..modes {
        let w = omega(k);
        s += -2.0 * p.c / w * (w * x).sin() * (-p.a * w * w * t).exp();
    }
    s
}

/// The series as printed: coefficient `sqrt(2a)`, exponent `+a (pi/2 + k pi)^2`,
/// `k >= 1`. Kept for documentation; it grows in time and does not recover
/// the initial datum.
pub fn terzaghi_series_printed(p: &TerzaghiParams, x: f64, t: f64, modes: usize) -> f64 {
    let mut s = p.c;
    for k in 1..=modes {
        let w = omega(k);
        s += (2.0 * p.a).sqrt() * (w * x).sin() * (p.a * w * w * t).exp();
    }
    s
}

/// Series profiles on the given grids, t-major.
pub fn series_profiles(p: &TerzaghiParams, xs: &[f64], ts: &[f64], modes: usize) -> ProfileTable {
    let rows = ts
        .iter()
        .flat_map(|&t| {
            xs.iter()
                .map(move |&x| p.row(x, t, terzaghi_series(p, x, t, modes)))
        })
        .collect();
    ProfileTable { rows }
}

/// Explicit finite differences on `nx` nodes; returns the profiles at every
/// requested time (sorted ascending), with `m(0, t > 0) = c` and a ghost node
/// enforcing `m'(1) = 0`.
pub fn terzaghi_fd_profiles(p: &TerzaghiParams, nx: usize, times: &[f64]) -> Result<ProfileTable> {
    if nx < 101 {
        return Err(Error::InvalidInput(format!("nx = {nx} < 101")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| t.is_nan() || t < 0.0) {
        return Err(Error::InvalidInput(
            "times must be sorted and non-negative".into(),
        ));
    }
    let dx = 1.0 / (nx - 1) as f64;
    let dt_max = 0.4 * dx * dx / p.a;
    let xs: Vec<f64> = (0..nx).map(|i| i as f64 * dx).collect();
    let mut m = vec![0.0; nx];
    let mut next = vec![0.0; nx];
    let mut now = 0.0;
    let mut rows = Vec::with_capacity(nx * times.len());
    for &t_end in times {
        let span = t_end - now;
        if span > 0.0 {
            let steps = (span / dt_max).ceil() as usize;
            let dt = span / steps as f64;
            let r = p.a * dt / (dx * dx);
            m[0] = p.c;
            for _ in 0..steps {
                next[0] = p.c;
                for i in 1..nx - 1 {
                    next[i] = m[i] + r * (m[i + 1] - 2.0 * m[i] + m[i - 1]);
                }
                next[nx - 1] = m[nx - 1] + 2.0 * r * (m[nx - 2] - m[nx - 1]);
                std::mem::swap(&mut m, &mut next);
            }
            now = t_end;
        }
        rows.extend(xs.iter().zip(&m).map(|(&x, &v)| p.row(x, t_end, v)));
    }
    Ok(ProfileTable { rows })
}

/// Finite-difference oracle at a single time.
pub fn terzaghi_fd_oracle(p: &TerzaghiParams, nx: usize, t_end: f64) -> Result<ProfileTable> {
    terzaghi_fd_profiles(p, nx, &[t_end])
}

/// Distances between a second-gradient solution and the classical limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRecord {
    pub t: f64,
    pub sup_full: f64,
    pub sup_interior: f64,
    pub layer_width_0: f64,
    pub layer_width_1: f64,
}

impl ComparisonRecord {
    pub const HEADER: &'static str = "t,sup_full,sup_interior,layer_width_0,layer_width_1";

    pub fn to_csv(records: &[ComparisonRecord]) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in records {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t, r.sup_full, r.sup_interior, r.layer_width_0, r.layer_width_1
            );
        }
        s
    }
}

/// Number of series terms used by [`compare`].
pub const COMPARE_MODES: usize = 2000;
const COMPARE_SAMPLES: usize = 201;

/// Sup-norm distances and boundary-layer widths at time `t`.
pub fn compare(sg: &SolutionField, p: &TerzaghiParams, t: f64) -> Result<ComparisonRecord> {
    if sg.coeffs.c4 != 1.0 {
        return Err(Error::MismatchedParams(
            "the classical comparison requires zero prestress".into(),
        ));
    }
    let own = TerzaghiParams::from_coefficients(&sg.coeffs);
    let close = |a: f64, b: f64| (a - b).abs() <= MATCH_REL * a.abs().max(b.abs());
    if !(close(own.a, p.a) && close(own.c, p.c)) {
        return Err(Error::MismatchedParams(format!(
            "diffusivity/surface value ({}, {}) vs ({}, {})",
            own.a, own.c, p.a, p.c
        )));
    }
    let n = COMPARE_SAMPLES;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let diff: Vec<f64> = xs
        .iter()
        .map(|&x| (sg.mf(x, t) - terzaghi_series(p, x, t, COMPARE_MODES)).abs())
        .collect();
    let sup_full = diff.iter().fold(0.0f64, |m, v| m.max(*v));
    let sup_interior = xs
        .iter()
        .zip(&diff)
        .filter(|(&x, _)| x >= INTERIOR.0 - 1e-12 && x <= INTERIOR.1 + 1e-12)
        .fold(0.0f64, |m, (_, v)| m.max(*v));
    let tol = LAYER_FRACTION * p.c.abs();
    let width = |i: Option<usize>, wall: f64| i.map_or(1.0, |i| (xs[i] - wall).abs());
    let layer_width_0 = width((0..n).find(|&i| diff[i] <= tol), 0.0);
    let layer_width_1 = width((0..n).rev().find(|&i| diff[i] <= tol), 1.0);
    Ok(ComparisonRecord {
        t,
        sup_full,
        sup_interior,
        layer_width_0,
        layer_width_1,
    })
}
