//! The five workflows. Each writes its CSV files (and optionally a plot
//! script) into the output directory and returns the paths written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sgconsol::field::solve_coefficients;
use sgconsol::sweep::{sweep, threshold};
use sgconsol::terzaghi::{compare, series_profiles, terzaghi_fd_profiles, ComparisonRecord};
use sgconsol::{MaterialParams, SolutionField, TerzaghiParams, Truncation};

use crate::config::RunConfig;
use crate::plot;

pub struct Outputs {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }
}

fn e(v: f64) -> String {
    format!("{v:.16e}")
}

/// `# key = value` lines followed by the echoed configuration.
fn summary(lines: &[(&str, String)], cfg: &RunConfig) -> String {
    let mut s = String::new();
    for (k, v) in lines {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s.push('\n');
    s.push_str(&cfg.echo());
    s
}

fn spectrum_csv(f: &SolutionField) -> String {
    let mut s = String::from("k,lambda_k,norm,p_k\n");
    for (i, (pair, p)) in f.spectrum.iter().zip(&f.fourier).enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            i + 1,
            e(pair.lambda),
            e(f.gram.diag[i]),
            e(*p)
        );
    }
    s
}

fn field_for(
    cfg: &RunConfig,
    params: &MaterialParams,
    force_unstable: bool,
) -> Result<SolutionField> {
    let coeffs = params.coefficients()?;
    let mut opts = cfg.solve_options(&coeffs);
    opts.allow_unstable |= force_unstable;
    Ok(solve_coefficients(&coeffs, &opts)?)
}

fn field_lines(f: &SolutionField) -> Vec<(&'static str, String)> {
    let a = f.weights.alpha;
    vec![
        ("regime", f.regime.kind.as_str().to_string()),
        ("B4", e(f.coeffs.b4)),
        ("B6", e(f.coeffs.b6)),
        ("V_bar", e(f.v_bar)),
        ("V_in", e(f.v_in)),
        ("modes_used", f.modes_used.to_string()),
        ("weights", f.weight_mode.as_str().to_string()),
        (
            "alpha",
            format!("{},{},{},{}", e(a[0]), e(a[1]), e(a[2]), e(a[3])),
        ),
        ("gram_max_offdiag_ratio", e(f.gram.max_offdiag_ratio)),
    ]
}

pub fn run_solve(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let params = cfg.params()?;
    let f = field_for(cfg, &params, false)?;
    let xs = cfg.x_grid();
    let ts = &cfg.output.t_values;
    out.write("profiles.csv", &f.profile(&xs, ts).to_csv())?;
    out.write("spectrum.csv", &spectrum_csv(&f))?;
    out.write("gram.csv", &f.gram.to_csv())?;

    let bc = ts
        .iter()
        .map(|&t| f.boundary_residuals(t).max())
        .fold(0.0f64, f64::max);
    let bulk = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
        .map(|(x, t)| {
            let [a, b] = f.bulk_residuals(x, t);
            a.max(b)
        })
        .fold(0.0f64, f64::max);
    let mut lines = field_lines(&f);
    lines.push(("max_boundary_residual", e(bc)));
    lines.push(("max_bulk_residual", e(bulk)));
    out.write("summary.txt", &summary(&lines, cfg))?;
    if cfg.output.plot {
        out.write("solve.gp", &plot::profiles("profiles.csv", xs.len(), ts))?;
    }
    Ok(())
}

pub fn run_spectrum(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let params = cfg.params()?;
    let mut cfg = cfg.clone();
    cfg.numerics.modes = Some(cfg.numerics.modes.unwrap_or(cfg.numerics.spectrum_modes));
    cfg.numerics.trunc_target = None;
    debug_assert!(matches!(cfg.truncation(), Truncation::Modes(_)));
    let f = field_for(&cfg, &params, true)?;
    out.write("spectrum.csv", &spectrum_csv(&f))?;
    out.write("gram.csv", &f.gram.to_csv())?;
    out.write("spectrum_summary.txt", &summary(&field_lines(&f), &cfg))?;
    if cfg.output.plot {
        out.write("spectrum.gp", plot::SPECTRUM)?;
    }
    Ok(())
}

pub fn run_terzaghi(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let p = TerzaghiParams::from_params(&cfg.params()?)?;
    let xs = cfg.x_grid();
    let ts = &cfg.output.t_values;
    out.write(
        "terzaghi.csv",
        &series_profiles(&p, &xs, ts, cfg.numerics.terzaghi_modes).to_csv(),
    )?;
    out.write(
        "terzaghi_fd.csv",
        &terzaghi_fd_profiles(&p, cfg.numerics.fd_nx, ts)?.to_csv(),
    )?;
    let lines = [
        ("diffusivity_a", e(p.a)),
        ("surface_value_c", e(p.c)),
        ("printed_surface_value", e(p.printed_boundary_value())),
        ("series_modes", cfg.numerics.terzaghi_modes.to_string()),
        ("fd_nx", cfg.numerics.fd_nx.to_string()),
    ];
    out.write("terzaghi_summary.txt", &summary(&lines, cfg))?;
    if cfg.output.plot {
        out.write("terzaghi.gp", &plot::profiles("terzaghi.csv", xs.len(), ts))?;
    }
    Ok(())
}

/// The classical comparison is defined at zero prestress; the configured
/// `p0_ext` is replaced by 0.
pub fn run_compare(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let params = cfg.params()?.with_prestress(0.0);
    let f = field_for(cfg, &params, false)?;
    let p = TerzaghiParams::from_params(&params)?;
    let records = cfg
        .output
        .compare_t
        .iter()
        .map(|&t| compare(&f, &p, t))
        .collect::<sgconsol::Result<Vec<_>>>()?;
    out.write("compare.csv", &ComparisonRecord::to_csv(&records))?;
    let mut lines = field_lines(&f);
    lines.push(("prestress_used", e(0.0)));
    out.write("compare_summary.txt", &summary(&lines, cfg))?;
    if cfg.output.plot {
        out.write("compare.gp", plot::COMPARE)?;
    }
    Ok(())
}

pub fn run_sweep(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let params = cfg.params()?;
    let r = sweep(&params, &cfg.sweep_grid())?;
    out.write("sweep.csv", &r.to_csv())?;
    let bracket = r
        .rows
        .windows(2)
        .find_map(|w| match (w[0].lambda1, w[1].lambda1) {
            (Some(a), Some(b)) if (a > 0.0) != (b > 0.0) || a == 0.0 => Some((w[0].p0, w[1].p0)),
            _ => None,
        });
    let refined = match bracket {
        Some((lo, hi)) if hi > lo => {
            Some(threshold(&params, (lo, hi), cfg.numerics.threshold_tol)?)
        }
        Some((lo, _)) => Some(lo),
        None => None,
    };
    let show = |v: Option<f64>| v.map_or("none".to_string(), e);
    let lines = [
        ("points", r.rows.len().to_string()),
        (
            "failed_points",
            r.rows
                .iter()
                .filter(|r| r.lambda1.is_none())
                .count()
                .to_string(),
        ),
        ("threshold_estimate", show(r.threshold_estimate)),
        ("threshold_refined", show(refined)),
        ("p_wave_modulus", e(params.p_wave_modulus())),
    ];
    out.write("sweep_summary.txt", &summary(&lines, cfg))?;
    if cfg.output.plot {
        out.write("sweep.gp", plot::SWEEP)?;
    }
    Ok(())
}
