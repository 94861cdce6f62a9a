use std::path::Path;
use std::process::Command;

use hermite_svm::basis::BasisSpec;
use hermite_svm::cli::{
    cmd_basis_check, cmd_compare, cmd_run, cmd_sweep, CliError, FluxChoice, RunConfig, RunStatus,
};
use hermite_svm::solver::{Initial, SchemeConfig, Semidiscrete};
use hermite_svm::transform::BasisTable;
use hermite_svm::viscosity::{ViscosityKind, ViscositySpec};

fn config_in(dir: &Path) -> RunConfig {
    RunConfig {
        output_dir: dir.to_path_buf(),
        ..RunConfig::default()
    }
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

fn csv_rows(dir: &Path, name: &str) -> Vec<Vec<f64>> {
    let text = String::from_utf8(read(dir, name)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.n = 24;
    let names = ["profile.csv", "norms.csv", "summary.json", "errors.json"];
    let run = || {
        cmd_run(&cfg).unwrap();
        cmd_compare(&cfg).unwrap();
        names.map(|name| read(dir.path(), name))
    };
    let first = run();
    let second = run();
    for (name, (a, b)) in names.iter().zip(first.iter().zip(&second)) {
        assert!(a == b, "{name} differs between runs");
    }
}

#[test]
fn summary_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.n = 30;
    cfg.scheme = ViscosityKind::HighModeQ;
    let first = cmd_run(&cfg).unwrap();
    let summary: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "summary.json")).unwrap();
    let embedded: RunConfig = serde_json::from_value(summary["config"].clone()).unwrap();
    assert_eq!(embedded.eps_coeff, Some(0.5));
    let again = cmd_run(&embedded).unwrap();
    assert_eq!(first.final_coefficients, again.final_coefficients);
    assert_eq!(first.integrated, again.integrated);

    let toml_path = dir.path().join("again.toml");
    std::fs::write(&toml_path, embedded.to_toml_string()).unwrap();
    assert_eq!(RunConfig::load(&toml_path).unwrap(), embedded);
}

#[test]
fn zero_final_time_writes_the_projected_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.t_final = 0.0;
    let record = cmd_run(&cfg).unwrap();
    assert_eq!(record.status, RunStatus::Completed);
    assert_eq!(record.integrated.l2_sq, 0.0);

    let spec = BasisSpec::new(cfg.alpha, cfg.n).unwrap();
    let op = Semidiscrete::new(&SchemeConfig::burgers(
        spec,
        ViscositySpec::sturm_liouville_default(),
    ))
    .unwrap();
    let u0 = op.initial_coefficients(&Initial::Gaussian).unwrap();
    let rows = csv_rows(dir.path(), "profile.csv");
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let expected = BasisTable::new(&spec, &xs).synthesize(u0.values());
    for (row, e) in rows.iter().zip(expected) {
        assert_eq!(row[1], e);
        assert!((row[2] - (-row[0] * row[0]).exp()).abs() < 1e-3);
    }
    assert_eq!(csv_rows(dir.path(), "norms.csv").len(), 1);
}

#[test]
fn norms_csv_has_fixed_columns_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    cmd_run(&config_in(dir.path())).unwrap();
    let text = String::from_utf8(read(dir.path(), "norms.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,norm_l2,norm_dx,norm_x,norm_x2_l1");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 5);
    assert!(first[1].starts_with("1.1195"));
    assert_eq!(first[1].split('e').next().unwrap().len(), 18);
}

#[test]
fn corrupted_quadrature_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.check_quad_nodes = Some(20);
    let report = cmd_basis_check(&cfg).unwrap();
    assert!(!report.passed());
    let ortho = report.check("orthonormality").unwrap();
    assert!(!ortho.passed);
    let (m, n) = ortho.worst.unwrap();
    assert!(m <= n && n >= 20, "({m}, {n})");

    cfg.check_quad_nodes = None;
    assert!(cmd_basis_check(&cfg).unwrap().passed());
    cfg.alpha = 3.0;
    cfg.n = 80;
    assert!(cmd_basis_check(&cfg).unwrap().passed());
}

#[test]
fn zero_flux_sweep_follows_heat_decay() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.flux = FluxChoice::Zero;
    cfg.sweep_ns = Some(vec![8, 16]);
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-12;
    let report = cmd_sweep(&cfg).unwrap();
    for row in &report.rows {
        let n = row.n;
        let spec = BasisSpec::new(cfg.alpha, n).unwrap();
        let eps = cfg.viscosity().epsilon(n);
        let op = Semidiscrete::new(&SchemeConfig::burgers(spec, cfg.viscosity())).unwrap();
        let u0 = op.initial_coefficients(&Initial::Gaussian).unwrap();
        // ∫ Σ û_k² e^{−2ελ_k t} dt; the Gaussian is the ground mode for α = √2
        let closed: f64 = u0
            .values()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let rate = 2.0 * eps * spec.eigenvalue(k);
                c * c
                    * if rate == 0.0 {
                        cfg.t_final
                    } else {
                        (1.0 - (-rate * cfg.t_final).exp()) / rate
                    }
            })
            .sum();
        let got = row.result.as_ref().unwrap().l2_sq;
        assert!((got - closed).abs() < 1e-9, "N={n}: {got} vs {closed}");
    }
    let table = String::from_utf8(read(dir.path(), "table.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    let growth: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "growth.json")).unwrap();
    assert!(growth["l2_sq"]["exponent"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn failed_row_does_not_stop_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.scheme = ViscosityKind::HighModeQ;
    cfg.sweep_ns = Some(vec![1, 20, 24]);
    let report = cmd_sweep(&cfg).unwrap();
    assert!(report.rows[0].result.is_err());
    assert!(report.rows[1].result.is_ok() && report.rows[2].result.is_ok());
    assert_eq!(report.growth.ns, vec![20, 24]);
    let table = String::from_utf8(read(dir.path(), "table.csv")).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("1,failed,"));
}

#[test]
fn sweep_needs_two_values_and_invalid_config_is_rejected_early() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(&dir.path().join("never-created"));
    cfg.sweep_ns = Some(vec![40]);
    assert!(matches!(cmd_sweep(&cfg), Err(CliError::Config(_))));
    cfg.grid_dx = 0.0;
    assert!(cmd_run(&cfg).is_err());
    assert!(!dir.path().join("never-created").exists());
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let mut cfg = config_in(&blocker.join("sub"));
    cfg.t_final = 0.0;
    assert!(matches!(cmd_run(&cfg), Err(CliError::Io { .. })));
}

#[test]
fn larger_n_resolves_the_front_better() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    cfg.scheme = ViscosityKind::HighModeQ;
    let errs: Vec<f64> = [20, 30, 40, 60]
        .iter()
        .map(|&n| cmd_compare(&cfg.with_n(n)).unwrap().front_l1)
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}

#[test]
fn binary_runs_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg_path,
        format!(
            "N = 16\nt_final = 0.5\noutput_dir = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let exe = env!("CARGO_BIN_EXE_hermite-svm");
    let status = Command::new(exe)
        .args([
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--scheme",
            "high-mode-q",
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let summary: serde_json::Value = serde_json::from_slice(&read(&out, "summary.json")).unwrap();
    assert_eq!(summary["config"]["N"], 16);
    assert_eq!(summary["config"]["scheme"], "high_mode_q");
    assert_eq!(summary["final_time"], 0.5);

    let failing = Command::new(exe)
        .args([
            "basis-check",
            "--check-quad-nodes",
            "10",
            "--output-dir",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!failing.status.success());
    assert!(String::from_utf8_lossy(&failing.stdout).contains("FAILED orthonormality"));

    let bad = Command::new(exe)
        .args(["run", "--rel-tol", "5"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
