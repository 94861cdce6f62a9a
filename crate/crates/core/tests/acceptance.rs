//! Acceptance criteria for the Burgers experiments. Each test prints one
//! `criterion k: PASS|FAIL` line with the measured values.

use std::f64::consts::SQRT_2;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;

use hermite_svm::cli::{cmd_basis_check, cmd_compare, simulate, IntegratedNorms, RunConfig};
use hermite_svm::diagnostics::{
    fit_growth, norm_dx, norm_l2, time_integrate, NormLabel, NormSeries,
};
use hermite_svm::reference::{exact_pre_shock, shock_time, CharacteristicSolution, FvOracle};
use hermite_svm::solver::{integrate, Flux, Initial, SchemeConfig};
use hermite_svm::viscosity::{ViscosityKind, ViscositySpec};
use hermite_svm::BasisSpec;

const NS: [usize; 7] = [40, 45, 50, 55, 60, 65, 70];
const RETRY_TOLERANCES: (f64, f64) = (1e-6, 1e-9);

// scheme I rows: ‖u‖², ‖xu‖², ‖D_x u‖²
const TABLE1_L2: [f64; 7] = [1.8756, 1.8757, 1.8758, 1.8759, 1.8760, 1.8762, 1.8763];
const TABLE1_X: [f64; 7] = [0.9690, 0.9682, 0.9676, 0.9671, 0.9667, 0.9665, 0.9664];
const TABLE1_DX: [f64; 7] = [3.0621, 3.1076, 3.1504, 3.1926, 3.2350, 3.2766, 3.3145];
// scheme II rows: ‖v‖², ‖x²v‖_{L¹}, ‖D_x v‖²
const TABLE2_L2: [f64; 7] = [1.8829, 1.8824, 1.8814, 1.8805, 1.8804, 1.8812, 1.8819];
const TABLE2_X2: [f64; 7] = [1.9499, 1.9153, 1.8911, 1.8671, 1.8657, 1.8844, 1.8791];
const TABLE2_DX: [f64; 7] = [4.4442, 4.5220, 4.5099, 4.4977, 4.6272, 4.9252, 5.1875];

// fitted exponents: scheme I (D_x, x, L²), scheme II (D_x, L², x²)
const GROWTH1: [f64; 3] = [0.1420, -0.0049, 0.0007];
const GROWTH2: [f64; 3] = [0.2431, -0.0014, -0.0639];
const GROWTH_TOL: f64 = 0.08;

fn report(k: &str, pass: bool, detail: &str) {
    println!(
        "criterion {k}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn scratch_config(scheme: ViscosityKind) -> RunConfig {
    RunConfig {
        scheme,
        output_dir: std::env::temp_dir().join("hermite-svm-acceptance"),
        ..RunConfig::default()
    }
}

struct Sweep {
    tolerances: (f64, f64),
    rows: Vec<IntegratedNorms>,
    seconds: f64,
}

fn sweep(scheme: ViscosityKind, (rel, abs): (f64, f64)) -> Sweep {
    let started = Instant::now();
    let base = RunConfig {
        rel_tol: rel,
        abs_tol: abs,
        ..scratch_config(scheme)
    };
    let rows = NS
        .par_iter()
        .map(|&n| simulate(&base.with_n(n)).expect("sweep run").integrated)
        .collect();
    Sweep {
        tolerances: (rel, abs),
        rows,
        seconds: started.elapsed().as_secs_f64(),
    }
}

/// The default-tolerance sweep and, lazily, the retry sweep.
struct SweepPair {
    scheme: ViscosityKind,
    default: Sweep,
    retry: OnceLock<Sweep>,
}

impl SweepPair {
    fn new(scheme: ViscosityKind) -> Self {
        Self {
            scheme,
            default: sweep(scheme, (1e-3, 1e-6)),
            retry: OnceLock::new(),
        }
    }

    /// First sweep on which `check` passes, else the retry sweep.
    fn evaluate<T>(&self, check: impl Fn(&Sweep) -> (bool, T)) -> (bool, T, (f64, f64)) {
        let (ok, detail) = check(&self.default);
        if ok {
            return (ok, detail, self.default.tolerances);
        }
        let retry = self
            .retry
            .get_or_init(|| sweep(self.scheme, RETRY_TOLERANCES));
        let (ok, detail) = check(retry);
        (ok, detail, retry.tolerances)
    }
}

fn scheme_one() -> &'static SweepPair {
    static CELL: OnceLock<SweepPair> = OnceLock::new();
    CELL.get_or_init(|| SweepPair::new(ViscosityKind::HighModeQ))
}

fn scheme_two() -> &'static SweepPair {
    static CELL: OnceLock<SweepPair> = OnceLock::new();
    CELL.get_or_init(|| SweepPair::new(ViscosityKind::SturmLiouville))
}

/// Largest relative deviation and whether it is within `tol`.
fn band(got: &[f64], paper: &[f64], tol: f64) -> (bool, f64) {
    let worst = got
        .iter()
        .zip(paper)
        .map(|(g, p)| (g - p).abs() / p)
        .fold(0.0, f64::max);
    (worst <= tol, worst)
}

fn column(s: &Sweep, pick: fn(&IntegratedNorms) -> f64) -> Vec<f64> {
    s.rows.iter().map(pick).collect()
}

fn fmt_col(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Column label, norm picker, published values, relative band.
type Column<'a> = (&'a str, fn(&IntegratedNorms) -> f64, &'a [f64; 7], f64);

fn table_check(pair: &SweepPair, cols: [Column; 3]) -> (bool, String) {
    let (ok, detail, tol) = pair.evaluate(|s| {
        let mut all = true;
        let mut parts = vec![];
        for (name, pick, paper, tol) in cols {
            let got = column(s, pick);
            let (ok, worst) = band(&got, paper, tol);
            all &= ok;
            parts.push(format!(
                "{name}: {} [{}] worst {:.2}% (limit {:.0}%)",
                if ok { "ok" } else { "out" },
                fmt_col(&got),
                100.0 * worst,
                100.0 * tol
            ));
        }
        parts.push(format!("sweep {:.1}s", s.seconds));
        (all, parts.join("; "))
    });
    (
        ok,
        format!("(rel_tol {:e}, abs_tol {:e}) {detail}", tol.0, tol.1),
    )
}

#[test]
fn criterion_1_table_one() {
    let (ok, detail) = table_check(
        scheme_one(),
        [
            ("‖u‖²", |v| v.l2_sq, &TABLE1_L2, 0.02),
            ("‖xu‖²", |v| v.x_sq, &TABLE1_X, 0.03),
            ("‖D_x u‖²", |v| v.dx_sq, &TABLE1_DX, 0.08),
        ],
    );
    let fast = scheme_one().default.seconds < 60.0;
    report("1", ok && fast, &detail);
    assert!(ok && fast, "{detail}");
}

#[test]
fn criterion_2_table_two() {
    let (ok, detail) = table_check(
        scheme_two(),
        [
            ("‖v‖²", |v| v.l2_sq, &TABLE2_L2, 0.02),
            ("‖x²v‖_L¹", |v| v.x2_l1, &TABLE2_X2, 0.05),
            ("‖D_x v‖²", |v| v.dx_sq, &TABLE2_DX, 0.10),
        ],
    );
    report("2", ok, &detail);
    assert!(ok, "{detail}");
}

fn growth_check(
    pair: &SweepPair,
    picks: [fn(&IntegratedNorms) -> f64; 3],
    paper: [f64; 3],
) -> (bool, String) {
    let (ok, detail, tol) = pair.evaluate(|s| {
        let mut all = true;
        let mut parts = vec![];
        for (pick, p) in picks.iter().zip(paper) {
            let pts: Vec<(f64, f64)> = NS
                .iter()
                .zip(&s.rows)
                .map(|(n, r)| (*n as f64, pick(r)))
                .collect();
            let e = fit_growth(&pts).expect("positive norms").exponent;
            let ok = (e - p).abs() <= GROWTH_TOL;
            all &= ok;
            parts.push(format!(
                "N^{e:.4} vs N^{p:.4} {}",
                if ok { "ok" } else { "out" }
            ));
        }
        (all, parts.join(", "))
    });
    (ok, format!("(rel_tol {:e}) {detail}", tol.0))
}

#[test]
fn criterion_3_growth_exponents() {
    let (ok1, d1) = growth_check(
        scheme_one(),
        [|v| v.dx_sq, |v| v.x_sq, |v| v.l2_sq],
        GROWTH1,
    );
    let (ok2, d2) = growth_check(
        scheme_two(),
        [|v| v.dx_sq, |v| v.l2_sq, |v| v.x2_l1],
        GROWTH2,
    );
    let detail = format!("scheme I {d1}; scheme II {d2}");
    report("3", ok1 && ok2, &detail);
    assert!(ok1 && ok2, "{detail}");
}

#[test]
fn criterion_4_shock_time() {
    let g = |x: f64| -2.0 * x * (-x * x).exp();
    // golden-section search for min u0' on [0, 2]
    let (mut a, mut b) = (0.0f64, 2.0f64);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let numeric = -1.0 / g(0.5 * (a + b));
    let t = shock_time();
    let ok = (t - (std::f64::consts::E / 2.0).sqrt()).abs() < 1e-15 && (t - numeric).abs() < 1e-10;
    let detail = format!("T* = {t:.12}, −1/min u0′ = {numeric:.12}");
    report("4", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_5_basis_properties() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut failures = vec![];
    let mut worst = [0.0f64; 2];
    for alpha in [1.0, SQRT_2, 3.0] {
        for n in [1, 2, 5, 10, 20, 40, 60, 80] {
            let cfg = RunConfig {
                alpha,
                n,
                output_dir: dir.path().to_path_buf(),
                ..RunConfig::default()
            };
            let r = cmd_basis_check(&cfg).unwrap();
            for c in &r.checks {
                let slot = if c.tolerance >= 1e-10 { 0 } else { 1 };
                worst[slot] = worst[slot].max(c.max_defect);
                if !c.passed {
                    failures.push(format!(
                        "α={alpha} N={n} {} {:e} at {:?}",
                        c.name, c.max_defect, c.worst
                    ));
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let ok = failures.is_empty() && secs < 10.0;
    let detail = format!(
        "Gram defects ≤ {:.1e} (limit 1e-10), operator defects ≤ {:.1e} (limit 1e-12), {secs:.2}s {failures:?}",
        worst[0], worst[1]
    );
    report("5", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_6_energy_laws() {
    let spec = BasisSpec::new(SQRT_2, 40).unwrap();

    // zero flux: û_k(t) = e^{−ελ_k t}
    let mut decay_err = 0.0f64;
    for k in [0, 1, 5, 20, 40] {
        let mut cfg = SchemeConfig::burgers(spec, ViscositySpec::sturm_liouville_default());
        cfg.flux = Flux::zero();
        cfg.initial = Initial::Mode(k);
        cfg.rel_tol = 1e-6;
        cfg.abs_tol = 1e-9;
        let rate = cfg.epsilon() * spec.eigenvalue(k);
        let traj = integrate(&cfg).unwrap();
        for (i, t) in traj.times.iter().enumerate() {
            decay_err = decay_err.max((traj.state(i).get(k) - (-rate * t).exp()).abs());
        }
    }

    // Burgers, scheme II, default tolerances: ‖v_N‖(t) nonincreasing
    let traj = integrate(&SchemeConfig::burgers(
        spec,
        ViscositySpec::sturm_liouville_default(),
    ))
    .unwrap();
    let norms: Vec<f64> = (0..traj.len()).map(|i| norm_l2(&traj.state(i))).collect();
    let max_rise = norms
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::MIN, f64::max);

    // ‖u0‖² ≥ ‖v_N(T)‖² + 2ε∫‖D_x v_N‖², time grid fine enough for the trapezoid
    let mut cfg = SchemeConfig::burgers(spec, ViscositySpec::sturm_liouville_default());
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;
    let eps = cfg.epsilon();
    let fine = integrate(&cfg).unwrap();
    let dx: Vec<f64> = (0..fine.len()).map(|i| norm_dx(&fine.state(i))).collect();
    let dissipated = 2.0
        * eps
        * time_integrate(&NormSeries::new(NormLabel::DxL2, fine.times.clone(), dx).unwrap())
            .unwrap();
    let balance =
        norm_l2(&fine.state(0)).powi(2) - norm_l2(&fine.final_state()).powi(2) - dissipated;

    let ok = decay_err < 1e-6 && max_rise <= 1e-8 && balance >= -1e-6;
    let detail = format!(
        "decay error {decay_err:.2e} (< 1e-6), largest norm rise {max_rise:.2e} (≤ 1e-8), \
         ‖u0‖² − ‖v(T)‖² − 2ε∫‖D_x v‖² = {balance:.2e} (≥ −1e-6)"
    );
    report("6", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_7_oracle_self_validation() {
    let profiles = FvOracle::default().run_to_times(&[0.25, 0.5, 1.0]).unwrap();
    let devs: Vec<f64> = profiles
        .iter()
        .map(|p| {
            let sol = CharacteristicSolution::new(p.t).unwrap();
            p.centers
                .iter()
                .zip(&p.values)
                .map(|(x, v)| (v - exact_pre_shock(*x, p.t, &sol).unwrap()).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let ok = devs.iter().all(|d| *d < 5e-3);
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.2e}")).collect();
    let detail = format!(
        "L∞ deviations at t = 0.25, 0.5, 1.0: {} (< 5e-3)",
        shown.join(", ")
    );
    report("7", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_8_qualitative_figures() {
    let dir = tempfile::tempdir().unwrap();
    let base = RunConfig {
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };

    let inviscid = RunConfig {
        scheme: ViscosityKind::None,
        ..base.clone()
    };
    let osc: Vec<f64> = [15, 40, 60]
        .iter()
        .map(|&n| cmd_compare(&inviscid.with_n(n)).unwrap().oscillation)
        .collect();
    let monotone_down = osc.windows(2).all(|w| w[1] < w[0]);
    let ok_a = !monotone_down;

    let runs: Vec<_> = [-0.45, -0.33, -0.2]
        .iter()
        .map(|&p| {
            cmd_compare(&RunConfig {
                eps_exp: p,
                ..base.clone()
            })
            .unwrap()
        })
        .collect();
    let osc_eps: Vec<f64> = runs.iter().map(|r| r.oscillation).collect();
    let front: Vec<f64> = runs.iter().map(|r| r.front_l1).collect();
    let ok_b = osc_eps.windows(2).all(|w| w[1] < w[0]) && front.windows(2).all(|w| w[1] > w[0]);

    let detail = format!(
        "(a) inviscid oscillation at N = 15, 40, 60: {osc:.4?} {}; \
         (b) N = 40, ε exponent −0.45, −0.33, −0.2: oscillation {osc_eps:.4?}, front L¹ {front:.4?} {}",
        if ok_a { "ok" } else { "out" },
        if ok_b { "ok" } else { "out" }
    );
    report("8", ok_a && ok_b, &detail);
    assert!(ok_a && ok_b, "{detail}");
}
