use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "[material]\nlambda_lame = 2.3\nmu_lame = 1.5\nbiot_m = 5.0\n\
                    k1 = 0.01\nk2 = 0.01\nk3 = 0.01\nk4 = 0.01\n";

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_sgconsol"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn material(p0: f64, dp: f64) -> String {
    format!("{BASE}p0_ext = {p0:?}\ndp_ext = {dp:?}\n")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect()
}

#[test]
fn solve_writes_outputs() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &material(4.9, 1e-3), &["solve", "--plot"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = d.path().join("out");
    for f in [
        "profiles.csv",
        "spectrum.csv",
        "gram.csv",
        "summary.txt",
        "solve.gp",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let profiles = fs::read_to_string(out.join("profiles.csv")).unwrap();
    assert!(profiles.starts_with("x,t,V,eps,mf\n"));
    assert!(!profiles.contains('\r'));
    assert_eq!(profiles.lines().count(), 1 + 201 * 9);
    let spectrum = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("k,lambda_k,norm,p_k\n"));
    assert_eq!(spectrum.lines().count(), 1 + 10);
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("# modes_used = 10"));
    assert!(summary.contains("# regime = stable"));
    assert!(fs::read_to_string(out.join("solve.gp"))
        .unwrap()
        .contains("profiles.csv"));
}

#[test]
fn unloaded_solve_is_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &material(4.9, 0.0), &["solve"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&d.path().join("out/profiles.csv"));
    assert!(rows
        .iter()
        .all(|r| r[2] == 0.0 && r[3] == 0.0 && r[4] == 0.0));
}

#[test]
fn unloaded_terzaghi_is_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &material(0.0, 0.0), &["terzaghi"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["terzaghi.csv", "terzaghi_fd.csv"] {
        let rows = csv_rows(&d.path().join("out").join(f));
        assert!(rows.iter().all(|r| r[4] == 0.0), "{f}");
    }
}

#[test]
fn summary_echo_reparses_to_the_same_run() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{}\n[numerics]\ntrunc_target = 0.005\n\n[output]\nx_count = 11\nt_values = [0.0, 0.1]\n",
        material(4.9, 1e-3)
    );
    assert!(run(d.path(), &cfg, &["solve"]).status.success());
    let out = d.path().join("out");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    let first = fs::read(out.join("profiles.csv")).unwrap();

    let e = tempfile::tempdir().unwrap();
    let o = run(e.path(), &summary, &["solve"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let again = fs::read_to_string(e.path().join("out/summary.txt")).unwrap();
    let echo = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("# ") && !l.starts_with("dir"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(echo(&summary), echo(&again));
    assert_eq!(first, fs::read(e.path().join("out/profiles.csv")).unwrap());
}

#[test]
fn critical_prestress_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &material(5.3, 1e-3), &["solve"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.starts_with("ERROR:CriticalPrestress:"), "{err}");
    assert!(err.contains("critical prestress"));
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn unstable_needs_override() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &material(6.0, 1e-3), &["solve"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("ERROR:StabilityError:"));
    let o = run(
        d.path(),
        &material(6.0, 1e-3),
        &["solve", "--allow-unstable", "--modes", "5"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(d.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("# regime = unstable"));
}

#[test]
fn config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    for bad in [
        format!("{}k_ss = 1.0\n", material(4.9, 1e-3)),
        format!("{}\n[numerics]\nbogus = 1\n", material(4.9, 1e-3)),
        format!("{}\n[output]\nt_values = [0.5, 0.1]\n", material(4.9, 1e-3)),
        "[material]\nlambda_lame = \n".to_string(),
    ] {
        let o = run(d.path(), &bad, &["solve"]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(
            stderr(&o).starts_with("ERROR:ConfigError:"),
            "{}",
            stderr(&o)
        );
    }
    let o = run(
        d.path(),
        &material(4.9, 1e-3),
        &["solve", "--modes", "3", "--trunc-target", "0.1"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR:ArgumentError:"));
    let neg = "[material]\nlambda_lame = 2.3\nmu_lame = 1.5\nbiot_m = -5.0\ndp_ext = 0.001\n\
               k1 = 0.01\nk2 = 0.01\nk3 = 0.01\nk4 = 0.01\n";
    let o = run(d.path(), neg, &["solve"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR:PositivityViolation:"));
}

#[test]
fn numerical_failure_exits_4() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!("{}\n[numerics]\nlambda_min = -100.0\n", material(4.9, 1e-3));
    let o = run(d.path(), &cfg, &["solve", "--modes", "20"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("ERROR:InsufficientBracket:"));
}

#[test]
fn sweep_changes_sign_once_near_the_pressure_modulus() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!("{}\n[numerics]\nsweep_count = 21\n", material(4.9, 1e-3));
    let o = run(d.path(), &cfg, &["sweep", "--plot"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&d.path().join("out/sweep.csv"));
    let pairs: Vec<_> = rows
        .windows(2)
        .filter(|w| (w[0][2] > 0.0) != (w[1][2] > 0.0))
        .collect();
    assert_eq!(pairs.len(), 1);
    assert!(pairs[0][0][0] <= 5.3 && pairs[0][1][0] >= 5.3);
    let summary = fs::read_to_string(d.path().join("out/sweep_summary.txt")).unwrap();
    let refined: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("# threshold_refined = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((refined - 5.3).abs() <= 1e-2);
}

#[test]
fn compare_reports_surface_layer() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &material(4.9, 1e-3), &["compare"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&d.path().join("out/compare.csv"));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][3] > 0.0);
}

#[test]
fn spectrum_lists_requested_modes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &material(4.9, 1e-3),
        &["spectrum", "--weights", "paper-literal"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&d.path().join("out/spectrum.csv"));
    assert_eq!(rows.len(), 15);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1] && w[0][1] < 0.0));
    let summary = fs::read_to_string(d.path().join("out/spectrum_summary.txt")).unwrap();
    assert!(summary.contains("# weights = paper-literal"));
}
