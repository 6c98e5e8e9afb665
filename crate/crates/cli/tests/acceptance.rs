//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgconsol::field::{solve, solve_critical, CriticalReport, SolveOptions, Truncation};
use sgconsol::pencil::{find_all_eigenvalues, find_eigenvalues, spectrum, SearchWindow};
use sgconsol::spectral::resolve_weights;
use sgconsol::sweep::{sweep, threshold};
use sgconsol::terzaghi::{compare, terzaghi_fd_oracle, terzaghi_series, COMPARE_MODES};
use sgconsol::{Error, MaterialParams, SecondGradient, TerzaghiParams};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn reference() -> MaterialParams {
    MaterialParams::reference()
}

fn with_groups(p: MaterialParams, k1: f64, k2: f64, k3: f64, k4: f64) -> MaterialParams {
    MaterialParams {
        second_gradient: SecondGradient::Direct { k1, k2, k3, k4 },
        ..p
    }
}

/// Coefficient ledger against hand arithmetic, 1e-12 relative, < 1 ms.
fn criterion_1() -> Outcome {
    let (lam, mu, m, b, p0, dp) = (2.3f64, 1.5f64, 5.0f64, 1.0f64, 4.9f64, 1e-3f64);
    let (k1, k2, k3, k4) = (1e-2f64, 1e-2f64, 1e-2f64, 1e-2f64);
    let e = lam + 2.0 * mu;
    let k5 = m / e;
    let k6 = b * b * k5;
    let g = k1 + k3 * k5 * k2 * k2;
    let c4 = 1.0 - p0 / e;
    let c = [
        k1 * k3,
        k1 + k3 * k5 * (k2 + b) * (k2 + b) + k3 * c4,
        k4 * g,
        c4,
        k4 * (c4 + k6) + g,
        c4 + k6,
    ];
    let bb = [c[0], c[1], c[2], c[3], k4 * (c4 + k6), dp / (b * m)];

    let start = Instant::now();
    let got = reference().coefficients();
    let elapsed = start.elapsed();
    let Ok(got) = got else {
        return (false, format!("{got:?}"));
    };
    let gc = [got.c1, got.c2, got.c3, got.c4, got.c5, got.c6];
    let gb = [got.b1, got.b2, got.b3, got.b4, got.b5, got.b6];
    let gk = [
        got.groups.k1,
        got.groups.k2,
        got.groups.k3,
        got.groups.k4,
        got.groups.k5,
        got.groups.k6,
    ];
    let wk = [k1, k2, k3, k4, k5, k6];
    let worst = gc
        .iter()
        .zip(&c)
        .chain(gb.iter().zip(&bb))
        .chain(gk.iter().zip(&wk))
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0f64, f64::max);
    (
        worst <= 1e-12 && elapsed < Duration::from_millis(1),
        format!("max rel dev {worst:.1e}, {}", secs(elapsed)),
    )
}

/// First 15 eigenpairs: ODE <= 1e-7, boundary rows <= 1e-8, grid doubling
/// <= 1e-9 relative, < 5 s.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let c = reference().coefficients().unwrap();
    let w = SearchWindow::default_for(&c);
    let pairs = match spectrum(&c, 15, &w) {
        Ok(p) => p,
        Err(e) => return (false, e.to_string()),
    };
    let fine = match find_eigenvalues(&c, 15, &w.with_grid(2 * w.grid)) {
        Ok(l) => l,
        Err(e) => return (false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let xs = unit_grid(101);
    let ode = pairs
        .iter()
        .flat_map(|p| xs.iter().map(move |&x| p.ode_residual(&c, x)))
        .fold(0.0f64, f64::max);
    let bc = pairs
        .iter()
        .flat_map(|p| p.boundary_residuals(&c))
        .fold(0.0f64, f64::max);
    let drift = pairs
        .iter()
        .zip(&fine)
        .map(|(p, l)| rel(p.lambda, *l))
        .fold(0.0f64, f64::max);
    (
        pairs.len() == 15
            && ode <= 1e-7
            && bc <= 1e-8
            && drift <= 1e-9
            && elapsed < Duration::from_secs(5),
        format!(
            "ODE {ode:.1e}, BC {bc:.1e}, grid drift {drift:.1e}, {}",
            secs(elapsed)
        ),
    )
}

/// Sign dichotomy over 50 seeded random parameter sets, < 60 s.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let log_uniform = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-3.0..-1.0));
    let (mut stable, mut unstable, mut bad) = (0, 0, Vec::new());
    for draw in 0..50 {
        let (lam, mu, m, b) = (
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..3.0),
            rng.gen_range(1.0..10.0),
            rng.gen_range(0.5..1.0),
        );
        let (k1, k2, k3, k4) = (
            log_uniform(&mut rng),
            rng.gen_range(0.0..0.1),
            log_uniform(&mut rng),
            log_uniform(&mut rng),
        );
        let e = lam + 2.0f64 * mu;
        let k6 = b * b * m / e;
        let c4 = loop {
            let c4: f64 = rng.gen_range(-0.9 * k6..1.0);
            if c4.abs() >= 1e-3 {
                break c4;
            }
        };
        let p = MaterialParams {
            lambda_lame: lam,
            mu_lame: mu,
            biot_m: m,
            biot_b: b,
            second_gradient: SecondGradient::Direct { k1, k2, k3, k4 },
            mf0: 1.0,
            p0_ext: (1.0 - c4) * e,
            dp_ext: 1e-3,
        };
        let c = p.coefficients().unwrap();
        let found = find_all_eigenvalues(&c, &SearchWindow::default_for(&c));
        let ok = match found {
            Ok(l) if c.b4 > 0.0 => {
                stable += 1;
                !l.is_empty() && l.iter().all(|&x| x < 0.0)
            }
            Ok(l) => {
                unstable += 1;
                l.iter().any(|&x| x > 0.0)
            }
            Err(_) => false,
        };
        if !ok {
            bad.push(draw);
        }
    }
    let elapsed = start.elapsed();
    (
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{stable} stable / {unstable} unstable draws, violations {bad:?}, {}",
            secs(elapsed)
        ),
    )
}

/// Eigenvalue-based threshold at lambda + 2 mu = 5.3 within 1%, < 30 s.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let base = reference();
    let grid: Vec<f64> = (0..41).map(|i| 4.0 + 0.05 * i as f64).collect();
    let r = match sweep(&base, &grid) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let bracket = r
        .rows
        .windows(2)
        .find_map(|w| match (w[0].lambda1, w[1].lambda1) {
            (Some(a), Some(b)) if (a > 0.0) != (b > 0.0) => Some((w[0].p0, w[1].p0)),
            _ => None,
        });
    let Some(bracket) = bracket else {
        return (false, "no sign change of lambda_1 on [4, 6]".into());
    };
    let t = match threshold(&base, bracket, 1e-3) {
        Ok(t) => t,
        Err(e) => return (false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let dev = rel(t, base.p_wave_modulus());
    (
        dev <= 0.01 && elapsed < Duration::from_secs(30),
        format!(
            "threshold {t:.6} vs {:.6} (rel {dev:.1e}), {}",
            base.p_wave_modulus(),
            secs(elapsed)
        ),
    )
}

/// Off-diagonal Gram ratio <= 1e-6 over the first 15 modes.
fn criterion_5() -> Outcome {
    let c = reference().coefficients().unwrap();
    let pairs = spectrum(&c, 15, &SearchWindow::default_for(&c)).unwrap();
    match resolve_weights(&c, &pairs) {
        Ok((_, g)) => (
            g.size == 15 && g.max_offdiag_ratio <= 1e-6,
            format!("max off-diagonal ratio {:.1e}", g.max_offdiag_ratio),
        ),
        Err(e) => (false, e.to_string()),
    }
}

/// Reconstructed initial fluid density <= 1e-2 |B6| at the default target.
fn criterion_6() -> Outcome {
    let f = match solve(&reference(), &SolveOptions::default()) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let worst = unit_grid(1001)
        .iter()
        .map(|&x| f.mf(x, 0.0).abs())
        .fold(0.0f64, f64::max);
    let ratio = worst / f.coeffs.b6.abs();
    (
        ratio <= 1e-2,
        format!(
            "max|m_f(x,0)| = {ratio:.2e} |B6| with {} modes",
            f.modes_used
        ),
    )
}

/// One interior sign change of the fluid-density increment at 0.8 +- 0.1,
/// increasing towards the wall, at t = 10^-2.5.
fn criterion_7() -> Outcome {
    let opts = SolveOptions {
        truncation: Truncation::Modes(60),
        ..Default::default()
    };
    let f = match solve(&reference(), &opts) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let t = 10f64.powf(-2.5);
    let xs = unit_grid(201);
    let inc: Vec<f64> = xs.iter().map(|&x| f.mf(x, t) - f.mf(x, 0.0)).collect();
    let crossings: Vec<usize> = (1..xs.len() - 2)
        .filter(|&i| (inc[i] > 0.0) != (inc[i + 1] > 0.0))
        .collect();
    let [i] = crossings[..] else {
        return (false, format!("{} interior sign changes", crossings.len()));
    };
    let x_cr = 0.5 * (xs[i] + xs[i + 1]);
    let grows = inc[i + 1..].iter().all(|&d| d > 0.0);
    (
        (x_cr - 0.8).abs() <= 0.1 && grows,
        format!("x_cr = {x_cr:.3} at t = {t:.2e}, increment positive on (x_cr, 1]: {grows}"),
    )
}

/// At t = 50 the fluid density varies by <= 1e-4 |B6| and V is within
/// 1e-6 relative of V_bar.
fn criterion_8() -> Outcome {
    let f = match solve(&reference(), &SolveOptions::default()) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let t = 50.0;
    let xs = unit_grid(201);
    let mf: Vec<f64> = xs.iter().map(|&x| f.mf(x, t)).collect();
    let spread =
        mf.iter().cloned().fold(f64::MIN, f64::max) - mf.iter().cloned().fold(f64::MAX, f64::min);
    let v_bar = -f.coeffs.b6 / f.coeffs.b4;
    let dv = xs
        .iter()
        .map(|&x| rel(f.v(x, t, 0), v_bar))
        .fold(0.0f64, f64::max);
    let spread_ratio = spread / f.coeffs.b6.abs();
    (
        spread_ratio <= 1e-4 && dv <= 1e-6,
        format!(
            "m_f spread {spread_ratio:.2e} |B6|, max rel |V - V_bar| {dv:.2e}, slowest rate {:.5}",
            f.spectrum[0].lambda
        ),
    )
}

/// Classical series vs explicit finite differences, 1e-3 |c|, < 10 s.
fn criterion_9() -> Outcome {
    let start = Instant::now();
    let p = TerzaghiParams::from_params(&reference()).unwrap();
    let mut worst = 0.0f64;
    for t in [0.05, 0.1, 0.5] {
        let fd = match terzaghi_fd_oracle(&p, 201, t) {
            Ok(fd) => fd,
            Err(e) => return (false, e.to_string()),
        };
        for r in &fd.rows {
            worst = worst.max((r.mf - terzaghi_series(&p, r.x, t, COMPARE_MODES)).abs());
        }
    }
    let elapsed = start.elapsed();
    let ratio = worst / p.c.abs();
    (
        ratio <= 1e-3 && elapsed < Duration::from_secs(10),
        format!("max deviation {ratio:.2e} |c|, {}", secs(elapsed)),
    )
}

/// Interior distance to the classical limit shrinks with the second-gradient
/// groups; low eigenvalues within 10% of -a (pi/2 + k pi)^2 at 1e-4.
fn criterion_10() -> Outcome {
    let opts = SolveOptions {
        truncation: Truncation::Modes(60),
        ..Default::default()
    };
    let base = reference().with_prestress(0.0);
    let mut sups = Vec::new();
    for s in [1e-2, 1e-3, 1e-4] {
        let params = with_groups(base, s, s, s, s);
        let sg = match solve(&params, &opts) {
            Ok(f) => f,
            Err(e) => return (false, format!("k = {s:e}: {e}")),
        };
        let p = TerzaghiParams::from_params(&params).unwrap();
        match compare(&sg, &p, 0.1) {
            Ok(r) => sups.push(r.sup_interior),
            Err(e) => return (false, e.to_string()),
        }
    }
    let monotone = sups.windows(2).all(|w| w[1] < w[0]);
    let c = with_groups(base, 1e-4, 1e-4, 1e-4, 1e-4)
        .coefficients()
        .unwrap();
    let a = 1.0 / (1.0 + c.groups.k6);
    let low = find_eigenvalues(&c, 3, &SearchWindow::default_for(&c)).unwrap();
    let dev = low
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let w = PI / 2.0 + k as f64 * PI;
            rel(*l, -a * w * w)
        })
        .fold(0.0f64, f64::max);
    (
        monotone && dev <= 0.1,
        format!(
            "sup interior {}, eigenvalue deviation {dev:.1e}",
            sups.iter()
                .map(|s| format!("{s:.2e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    )
}

/// Critical prestress: no solution under load, constant family without.
fn criterion_11() -> Outcome {
    let loaded = reference().with_prestress(reference().p_wave_modulus());
    let diag = matches!(
        solve(&loaded, &SolveOptions::default()),
        Err(Error::CriticalPrestress)
    ) && matches!(
        solve_critical(&loaded, 10),
        Ok(CriticalReport::NoSolutionUnderLoad)
    );
    let unloaded = loaded.with_load(0.0);
    let family = match solve_critical(&unloaded, 10) {
        Ok(CriticalReport::ConstantFamily { coefficients, .. }) => {
            coefficients.len() == 10 && coefficients.iter().all(|&p| p.abs() <= 1e-14)
        }
        _ => false,
    };
    (
        diag && family,
        format!("loaded diagnosed: {diag}, unloaded constant family: {family}"),
    )
}

/// Two runs of every command give byte-identical CSV files.
fn criterion_12() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_sgconsol");
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[material]\nlambda_lame = 2.3\nmu_lame = 1.5\nbiot_m = 5.0\np0_ext = 4.9\ndp_ext = 0.001\n\
         k1 = 0.01\nk2 = 0.01\nk3 = 0.01\nk4 = 0.01\n\n[numerics]\nsweep_count = 21\n",
    )
    .unwrap();
    let run = |dir: &Path, cmd: &str| {
        Command::new(bin)
            .args([cmd, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir)
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
    };
    let mut compared = 0;
    for cmd in ["solve", "spectrum", "terzaghi", "compare", "sweep"] {
        let (a, b) = (
            root.path().join("a").join(cmd),
            root.path().join("b").join(cmd),
        );
        if !(run(&a, cmd) && run(&b, cmd)) {
            return (false, format!("`{cmd}` failed"));
        }
        let mut names: Vec<_> = std::fs::read_dir(&a)
            .unwrap()
            .filter_map(|e| e.ok().map(|e| e.file_name()))
            .filter(|n| n.to_string_lossy().ends_with(".csv"))
            .collect();
        names.sort();
        for n in &names {
            let (x, y) = (
                std::fs::read(a.join(n)).unwrap(),
                std::fs::read(b.join(n)).unwrap(),
            );
            if x != y {
                return (false, format!("{cmd}: {} differs", n.to_string_lossy()));
            }
            compared += 1;
        }
    }
    (
        compared == 9,
        format!("{compared} CSV files identical across two runs of all five commands"),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("coefficient ledger", criterion_1),
        ("spectral correctness", criterion_2),
        ("stability dichotomy", criterion_3),
        ("stability threshold", criterion_4),
        ("orthogonality gate", criterion_5),
        ("initial datum", criterion_6),
        ("segregation near the wall", criterion_7),
        ("late-time equilibrium", criterion_8),
        ("classical series vs finite differences", criterion_9),
        ("classical limit recovery", criterion_10),
        ("critical prestress", criterion_11),
        ("CLI determinism", criterion_12),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) =
            std::panic::catch_unwind(check).unwrap_or_else(|_| (false, "panicked".to_string()));
        println!(
            "criterion {:>2} ({name}): {} - {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {}/12 passed", 12 - failed.len());
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
