//! Assembly of the consolidation solution and its physical fields.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::ExpSum;
use crate::material::{
    classify_regime, MaterialParams, PencilCoefficients, Regime, RegimeKind, CRITICAL_TOL,
};
use crate::pencil::{spectrum, Eigenpair, SearchWindow};
use crate::spectral::{
    fourier_coefficients, gram, project, reconstruction_error, resolve_weights, BilinearWeights,
    GramReport, WeightMode,
};

/// Hard cap on the number of modes used by a target-driven truncation.
pub const MODE_CAP: usize = 60;
/// Default reconstruction tolerance of the initial datum.
pub const DEFAULT_TARGET: f64 = 1e-2;
/// Number of eigenpairs used to validate the bilinear weights.
const PROBE_MODES: usize = 15;
/// Sample points used to check recovery of the initial datum.
const DATUM_SAMPLES: usize = 201;

/// How many modes to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Modes(usize),
    /// Smallest mode count reconstructing the initial datum to this relative error.
    Target(f64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Target(DEFAULT_TARGET)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub truncation: Truncation,
    pub weights: WeightMode,
    /// Evaluate the (growing) series in the unstable regime instead of refusing.
    pub allow_unstable: bool,
    /// Eigenvalue search window; `None` uses the default for the coefficients.
    pub window: Option<SearchWindow>,
}

/// Constant `V` of the stationary problem, `-B6 / B4`.
pub fn stationary_solution(coeffs: &PencilCoefficients) -> Result<f64> {
    if coeffs.b4.abs() <= CRITICAL_TOL {
        return Err(if coeffs.b6 != 0.0 {
            Error::CriticalPrestress
        } else {
            Error::UndeterminedConstant
        });
    }
    Ok(-coeffs.b6 / coeffs.b4)
}

/// Constant `V` for which the fluid density vanishes, `-B6 / C6`.
pub fn initial_value(coeffs: &PencilCoefficients) -> Result<f64> {
    if coeffs.c6 == 0.0 {
        return Err(Error::InvalidInput(
            "C6 = 0: initial value undefined".into(),
        ));
    }
    Ok(-coeffs.b6 / coeffs.c6)
}

/// The series solution `V = Vbar + sum p_k X_k e^{lambda_k t}`.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub coeffs: PencilCoefficients,
    pub regime: Regime,
    pub spectrum: Vec<Eigenpair>,
    pub fourier: Vec<f64>,
    pub weights: BilinearWeights,
    pub weight_mode: WeightMode,
    /// Gram matrix of the retained modes under `weights`.
    pub gram: GramReport,
    pub v_bar: f64,
    pub v_in: f64,
    pub modes_used: usize,
}

/// Sup-norm recovery of the initial datum by the first `n` modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatumRecovery {
    /// `max |V(x, 0) - V_in|`.
    pub v_err: f64,
    /// `max |m_f(x, 0)|`.
    pub mf_err: f64,
}

fn datum_recovery(
    c: &PencilCoefficients,
    modes: &[Eigenpair],
    p: &[f64],
    v_bar: f64,
    v_in: f64,
    xs: &[f64],
) -> Vec<DatumRecovery> {
    // Partial sums of V and V'' at every sample, one mode at a time.
    let mut v: Vec<f64> = vec![v_bar; xs.len()];
    let mut v2: Vec<f64> = vec![0.0; xs.len()];
    let mut out = Vec::with_capacity(modes.len());
    for (pair, &pk) in modes.iter().zip(p) {
        let contrib: Vec<(f64, f64)> = xs
            .par_iter()
            .map(|&x| (pk * pair.eval(x, 0), pk * pair.eval(x, 2)))
            .collect();
        let mut rec = DatumRecovery {
            v_err: 0.0,
            mf_err: 0.0,
        };
        for i in 0..xs.len() {
            v[i] += contrib[i].0;
            v2[i] += contrib[i].1;
            rec.v_err = rec.v_err.max((v[i] - v_in).abs());
            rec.mf_err = rec.mf_err.max((c.c6 * v[i] - c.g() * v2[i] + c.b6).abs());
        }
        out.push(rec);
    }
    out
}

fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Solves the consolidation problem for `params`.
pub fn solve(params: &MaterialParams, opts: &SolveOptions) -> Result<SolutionField> {
    let coeffs = params.coefficients()?;
    solve_coefficients(&coeffs, opts)
}

pub fn solve_coefficients(
    coeffs: &PencilCoefficients,
    opts: &SolveOptions,
) -> Result<SolutionField> {
    let c = *coeffs;
    let regime = classify_regime(&c, CRITICAL_TOL);
    match regime.kind {
        RegimeKind::Critical => {
            return Err(if c.b6 != 0.0 {
                Error::CriticalPrestress
            } else {
                Error::UndeterminedConstant
            })
        }
        RegimeKind::Unstable if !opts.allow_unstable => {
            return Err(Error::StabilityError { b4: c.b4 })
        }
        _ => {}
    }
    let v_bar = stationary_solution(&c)?;
    let v_in = initial_value(&c)?;
    let w_in = v_in - v_bar;
    let window = opts.window.unwrap_or_else(|| SearchWindow::default_for(&c));

    let wanted = match opts.truncation {
        Truncation::Modes(n) => n,
        Truncation::Target(t) => {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "truncation target {t} outside (0, 1)"
                )));
            }
            MODE_CAP
        }
    };
    let modes = spectrum(&c, wanted.max(PROBE_MODES), &window)?;

    let weights = match opts.weights {
        WeightMode::Resolved => resolve_weights(&c, &modes[..PROBE_MODES])?.0,
        WeightMode::PaperLiteral => BilinearWeights::printed_literal(&c),
    };
    let mut candidates: Vec<Eigenpair> = modes.into_iter().take(wanted).collect();
    let norms_ok = candidates
        .iter()
        .all(|p| crate::spectral::inner(p, p, &weights) != 0.0);
    if !norms_ok {
        return Err(Error::WeightsUnresolvable {
            max_offdiag_ratio: f64::INFINITY,
        });
    }
    let p_all = fourier_coefficients(&candidates, w_in, &weights);

    let n = match opts.truncation {
        Truncation::Modes(n) => n,
        Truncation::Target(target) => {
            if w_in == 0.0 {
                0
            } else {
                let g = gram(&candidates, &weights);
                let xs = unit_grid(DATUM_SAMPLES);
                let rec = datum_recovery(&c, &candidates, &p_all, v_bar, v_in, &xs);
                let mut chosen = None;
                let mut reached = f64::INFINITY;
                for n in 1..=candidates.len() {
                    let e = reconstruction_error(&g, &candidates, &p_all, w_in, &weights, n);
                    let r = rec[n - 1];
                    let worst = e.max(r.v_err / v_in.abs()).max(r.mf_err / c.b6.abs());
                    reached = reached.min(worst);
                    if worst <= target {
                        chosen = Some(n);
                        break;
                    }
                }
                chosen.ok_or(Error::SpectrumExhausted {
                    available: candidates.len(),
                    target,
                    reached,
                })?
            }
        }
    };
    candidates.truncate(n);
    let fourier: Vec<f64> = p_all.into_iter().take(n).collect();
    let gram_report = gram(&candidates, &weights);
    Ok(SolutionField {
        coeffs: c,
        regime,
        spectrum: candidates,
        fourier,
        weights,
        weight_mode: opts.weights,
        gram: gram_report,
        v_bar,
        v_in,
        modes_used: n,
    })
}

impl SolutionField {
    /// `order`-th x-derivative of `V` at `(x, t)`.
    pub fn v(&self, x: f64, t: f64, order: u32) -> f64 {
        let series: f64 = self
            .spectrum
            .iter()
            .zip(&self.fourier)
            .map(|(p, &pk)| pk * (p.lambda * t).exp() * p.eval(x, order))
            .sum();
        if order == 0 {
            self.v_bar + series
        } else {
            series
        }
    }

    /// `order`-th x-derivative of the time derivative of `V`.
    pub fn v_dot(&self, x: f64, t: f64, order: u32) -> f64 {
        self.spectrum
            .iter()
            .zip(&self.fourier)
            .map(|(p, &pk)| pk * p.lambda * (p.lambda * t).exp() * p.eval(x, order))
            .sum()
    }

    fn strain_d(&self, x: f64, t: f64, order: u32) -> f64 {
        let k = &self.coeffs.groups;
        k.k2 * k.k3 * k.k5 * self.v(x, t, order + 2) + k.b * k.k5 * self.v(x, t, order)
    }

    fn mf_d(&self, x: f64, t: f64, order: u32) -> f64 {
        let c = &self.coeffs;
        let base = c.c6 * self.v(x, t, order) - c.g() * self.v(x, t, order + 2);
        if order == 0 {
            base + c.b6
        } else {
            base
        }
    }

    fn mf_dot_d(&self, x: f64, t: f64, order: u32) -> f64 {
        let c = &self.coeffs;
        c.c6 * self.v_dot(x, t, order) - c.g() * self.v_dot(x, t, order + 2)
    }

    /// Solid strain `k2 k3 k5 V'' + b k5 V`.
    pub fn strain(&self, x: f64, t: f64) -> f64 {
        self.strain_d(x, t, 0)
    }

    /// Incremental fluid density `C6 V - (k1 + k3 k5 k2^2) V'' + B6`.
    pub fn mf(&self, x: f64, t: f64) -> f64 {
        self.mf_d(x, t, 0)
    }

    /// Samples `V`, strain and fluid density, t-major.
    pub fn profile(&self, xs: &[f64], ts: &[f64]) -> ProfileTable {
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
            .collect();
        let rows = pts
            .par_iter()
            .map(|&(x, t)| ProfileRow {
                x,
                t,
                v: self.v(x, t, 0),
                eps: self.strain(x, t),
                mf: self.mf(x, t),
            })
            .collect();
        ProfileTable { rows }
    }

    /// Residuals of the bulk equations for strain and fluid density at `(x, t)`,
    /// each divided by the sum of the magnitudes of its terms.
    pub fn bulk_residuals(&self, x: f64, t: f64) -> [f64; 2] {
        let k = &self.coeffs.groups;
        let c = &self.coeffs;
        let e = |m| self.strain_d(x, t, m);
        let mf = |m| self.mf_d(x, t, m);
        let load = -k.b * k.k5 * c.b6;
        let t1 = [
            c.c6 * e(0),
            -k.b * k.k5 * mf(0),
            -c.g() * e(2),
            -k.k3 * k.k5 * k.k2 * mf(2),
            -load,
        ];
        let mdot = |m| self.mf_dot_d(x, t, m);
        let t2 = [
            k.k3 * mf(4),
            k.k3 * k.k2 * e(4),
            -mf(2),
            k.b * e(2),
            -k.k4 * mdot(2),
            mdot(0),
        ];
        [normalized(&t1), normalized(&t2)]
    }

    /// The physical boundary conditions at time `t`: fluid traction at the
    /// surface, impermeability at the wall, overall double force at both
    /// ends, fluid double force at both ends. Each residual is divided by the
    /// magnitude of its terms plus `|B6|`.
    pub fn boundary_residuals(&self, t: f64) -> BoundaryResiduals {
        let k = &self.coeffs.groups;
        let b6 = self.coeffs.b6.abs();
        let norm = |terms: &[f64]| {
            let s: f64 = terms.iter().map(|v| v.abs()).sum::<f64>() + b6;
            if s == 0.0 {
                0.0
            } else {
                terms.iter().sum::<f64>().abs() / s
            }
        };
        let e = |x, m| self.strain_d(x, t, m);
        let mf = |x, m| self.mf_d(x, t, m);
        let mdot = |x, m| self.mf_dot_d(x, t, m);
        let traction = [
            mf(0.0, 0),
            -k.b * e(0.0, 0),
            -k.k3 * k.k2 * e(0.0, 2),
            -k.k3 * mf(0.0, 2),
            k.k4 * mdot(0.0, 0),
        ];
        let flux = [
            -mf(1.0, 1),
            k.b * e(1.0, 1),
            k.k3 * k.k2 * e(1.0, 3),
            k.k3 * mf(1.0, 3),
            -k.k4 * mdot(1.0, 1),
        ];
        let g = self.coeffs.g();
        let overall = |x| [k.k2 * k.k3 * k.k5 * mf(x, 1), g * e(x, 1)];
        let fluid = |x| [mf(x, 1), k.k2 * e(x, 1)];
        BoundaryResiduals {
            values: [
                norm(&traction),
                norm(&flux),
                norm(&overall(0.0)),
                norm(&overall(1.0)),
                norm(&fluid(0.0)),
                norm(&fluid(1.0)),
            ],
        }
    }
}

fn normalized(terms: &[f64]) -> f64 {
    let s: f64 = terms.iter().map(|v| v.abs()).sum();
    if s == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / s
    }
}

/// Normalized residuals of the six physical boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResiduals {
    pub values: [f64; 6],
}

impl BoundaryResiduals {
    pub const NAMES: [&'static str; 6] = [
        "fluid_traction_x0",
        "impermeability_x1",
        "double_force_x0",
        "double_force_x1",
        "fluid_double_force_x0",
        "fluid_double_force_x1",
    ];

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub x: f64,
    pub t: f64,
    pub v: f64,
    pub eps: f64,
    pub mf: f64,
}

/// Sampled fields, one row per `(t, x)` pair in t-major order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProfileTable {
    pub rows: Vec<ProfileRow>,
}

impl ProfileTable {
    pub const HEADER: &'static str = "x,t,V,eps,mf";

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(96 * (self.rows.len() + 1));
        s.push_str(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.x, r.t, r.v, r.eps, r.mf
            );
        }
        s
    }

    /// Rows at time `t`, in x order.
    pub fn at_time(&self, t: f64) -> impl Iterator<Item = &ProfileRow> {
        self.rows.iter().filter(move |r| r.t == t)
    }
}

/// Outcome at critical prestress.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalReport {
    /// Loaded layer at critical prestress: no solution exists.
    NoSolutionUnderLoad,
    /// Unloaded layer: `V` is an undetermined constant. `coefficients[k]` is the
    /// projection of the constant datum on the nonzero mode with eigenvalue
    /// `eigenvalues[k]` under the reduced form.
    ConstantFamily {
        eigenvalues: Vec<f64>,
        coefficients: Vec<f64>,
        weights: BilinearWeights,
    },
}

fn critical_modes(
    params: &MaterialParams,
    modes: usize,
) -> Result<(PencilCoefficients, Vec<Eigenpair>, BilinearWeights)> {
    let c = params.coefficients()?;
    if c.b4.abs() > CRITICAL_TOL {
        return Err(Error::InvalidInput(format!(
            "prestress is not critical (B4 = {:e})",
            c.b4
        )));
    }
    let window = SearchWindow::default_for(&c);
    let pairs: Vec<Eigenpair> = spectrum(&c, modes + 1, &window)?
        .into_iter()
        .filter(|p| p.lambda != 0.0)
        .collect();
    let w = BilinearWeights::derived(&c).masked();
    Ok((c, pairs, w))
}

/// Analysis of the critical prestress `B4 = 0`.
pub fn solve_critical(params: &MaterialParams, modes: usize) -> Result<CriticalReport> {
    let c = params.coefficients()?;
    if c.b4.abs() > CRITICAL_TOL {
        return Err(Error::InvalidInput(format!(
            "prestress is not critical (B4 = {:e})",
            c.b4
        )));
    }
    if c.b6 != 0.0 {
        return Ok(CriticalReport::NoSolutionUnderLoad);
    }
    let (_, pairs, w) = critical_modes(params, modes)?;
    let coefficients = project(&pairs, &ExpSum::constant(1.0), &w);
    Ok(CriticalReport::ConstantFamily {
        eigenvalues: pairs.iter().map(|p| p.lambda).collect(),
        coefficients,
        weights: w,
    })
}

/// Reduced-form projection of an arbitrary datum on the nonzero modes at
/// critical prestress; the solution is then known up to a constant.
pub fn critical_projection(
    params: &MaterialParams,
    datum: &ExpSum,
    modes: usize,
) -> Result<Vec<f64>> {
    let (_, pairs, w) = critical_modes(params, modes)?;
    Ok(project(&pairs, datum, &w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_constants() {
        let c = MaterialParams::reference().coefficients().unwrap();
        let v_bar = stationary_solution(&c).unwrap();
        let v_in = initial_value(&c).unwrap();
        assert!((v_bar + 2e-4 / (1.0 - 4.9 / 5.3)).abs() < 1e-15);
        assert!((v_in + 2e-4 / c.c6).abs() < 1e-15);
        let w_in = v_in - v_bar;
        assert!((w_in - c.b6 * c.groups.k6 / (c.c6 * c.b4)).abs() < 1e-15);
    }

    #[test]
    fn critical_stationary_errors() {
        let p = MaterialParams::reference();
        let c = p.with_prestress(p.p_wave_modulus()).coefficients().unwrap();
        assert!(matches!(
            stationary_solution(&c),
            Err(Error::CriticalPrestress)
        ));
        let c = p
            .with_prestress(p.p_wave_modulus())
            .with_load(0.0)
            .coefficients()
            .unwrap();
        assert!(matches!(
            stationary_solution(&c),
            Err(Error::UndeterminedConstant)
        ));
    }

    #[test]
    fn unloaded_layer_stays_at_rest() {
        let p = MaterialParams::reference().with_load(0.0);
        let f = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(f.modes_used, 0);
        for t in [0.0, 0.1] {
            assert_eq!(f.v(0.3, t, 0), 0.0);
            assert_eq!(f.mf(0.3, t), 0.0);
            assert_eq!(f.boundary_residuals(t).max(), 0.0);
        }
    }

    #[test]
    fn unstable_is_refused_by_default() {
        let p = MaterialParams::reference().with_prestress(6.0);
        assert!(matches!(
            solve(&p, &SolveOptions::default()),
            Err(Error::StabilityError { .. })
        ));
    }
}
