//! Standalone self-checks of the basis, quadrature and coefficient operators.

use serde::Serialize;

use crate::basis::{eval_basis_with_derivative, BasisSpec};
use crate::transform::{
    analyze, commutator_defect, dx, ladder, make_quadrature, mul_x, project, sturm_liouville,
    CoeffVec, QuadRule,
};

use super::config::RunConfig;
use super::output::{ensure_dir, write_json};
use super::CliError;

const GRAM_TOL: f64 = 1e-10;
const OPERATOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_defect: f64,
    pub tolerance: f64,
    /// Index pair (or single index twice) where the defect is largest;
    /// `None` when every defect is exactly zero.
    pub worst: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisCheckReport {
    pub alpha: f64,
    pub n: usize,
    pub quad_nodes: usize,
    pub checks: Vec<CheckResult>,
}

impl BasisCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest entry of `defect(m, n)` over `0 ≤ m ≤ n ≤ last`.
fn worst_pair(last: usize, defect: impl Fn(usize, usize) -> f64) -> (f64, (usize, usize)) {
    let mut worst = (0.0, (0, 0));
    for n in 0..=last {
        for m in 0..=n {
            let d = defect(m, n);
            if !(d <= worst.0) {
                worst = (d, (m, n));
            }
        }
    }
    worst
}

fn result(
    name: &'static str,
    (max_defect, at): (f64, (usize, usize)),
    tolerance: f64,
) -> CheckResult {
    CheckResult {
        name,
        passed: max_defect <= tolerance,
        max_defect,
        tolerance,
        worst: (max_defect > 0.0).then_some(at),
    }
}

/// `∫ H_m H_n` and `∫ D_x H_m D_x H_n` by quadrature, row-major.
fn gram_matrices(spec: &BasisSpec, rule: &QuadRule) -> (Vec<f64>, Vec<f64>) {
    let k = spec.len();
    let a2 = spec.alpha * spec.alpha;
    let mut gram = vec![0.0; k * k];
    let mut gram_dx = vec![0.0; k * k];
    for (x, w) in rule
        .physical_nodes()
        .into_iter()
        .zip(rule.physical_weights())
    {
        let (h, dh) = eval_basis_with_derivative(spec, x);
        let ladder: Vec<f64> = h.iter().zip(&dh).map(|(h, d)| d + a2 * x * h).collect();
        for m in 0..k {
            for n in m..k {
                gram[m * k + n] += w * h[m] * h[n];
                gram_dx[m * k + n] += w * ladder[m] * ladder[n];
            }
        }
    }
    (gram, gram_dx)
}

fn max_abs_diff(a: &CoeffVec, b: &CoeffVec) -> (f64, usize) {
    let len = a.values().len().max(b.values().len());
    (0..len)
        .map(|i| ((a.get(i) - b.get(i)).abs(), i))
        .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc })
}

fn operator_checks(spec: &BasisSpec) -> Vec<CheckResult> {
    let a2 = spec.alpha * spec.alpha;
    let n_max = spec.n_max;
    let mut ladder_worst = (0.0, (0, 0));
    let mut sl_worst = (0.0, (0, 0));
    let mut factor_worst = (0.0, (0, 0));
    for k in 0..=n_max {
        let e = CoeffVec::unit(*spec, k);
        let composite = dx(&e).add(&mul_x(&e).scaled(a2));
        let (d, i) = max_abs_diff(&ladder(&e), &composite);
        if d > ladder_worst.0 {
            ladder_worst = (d, (k, i));
        }
        let (d, i) = max_abs_diff(&sturm_liouville(&e), &e.scaled(spec.eigenvalue(k)));
        if d > sl_worst.0 {
            sl_worst = (d, (k, i));
        }
        // L_α = D_x^* D_x with D_x^* = −∂_x + α² x
        let lowered = ladder(&e);
        let adjoint = mul_x(&lowered).scaled(a2).sub(&dx(&lowered));
        let (d, i) = max_abs_diff(&sturm_liouville(&e), &adjoint);
        if d > factor_worst.0 {
            factor_worst = (d, (k, i));
        }
    }

    // P_N ∂_x φ − ∂_x P_N φ for a dense φ ∈ R_{N+1}
    let phi = CoeffVec::new(
        spec.with_n_max(n_max + 1),
        (0..n_max + 2)
            .map(|k| ((k as f64 + 1.0) * 0.7).sin())
            .collect(),
    )
    .expect("finite");
    let lhs = project(&dx(&phi), n_max).sub(&dx(&project(&phi, n_max)));
    let (d, i) = max_abs_diff(&lhs, &commutator_defect(&phi, n_max));

    vec![
        result("ladder_identity", ladder_worst, OPERATOR_TOL),
        result("sturm_liouville_diagonal", sl_worst, OPERATOR_TOL),
        result("sturm_liouville_factorization", factor_worst, OPERATOR_TOL),
        result("commutator", (d, (i, i)), OPERATOR_TOL),
    ]
}

/// Bessel's inequality for the Gaussian `e^{-x²}`: the projection error
/// `‖u‖² − Σ_{k≤n} û_k²` must be nonnegative and nonincreasing in `n`.
fn projection_check(spec: &BasisSpec) -> Result<CheckResult, CliError> {
    // the integrand is a degree-N polynomial times e^{-(1 + α²/2)x²}
    let rule = QuadRule::gauss_hermite(spec.n_max / 2 + 2, 1.0 + 0.5 * spec.alpha * spec.alpha)?;
    let u = analyze(|x| (-x * x).exp(), spec, &rule)?;
    let norm_sq = (std::f64::consts::PI / 2.0).sqrt();
    let mut remaining = norm_sq;
    let mut worst = (0.0, (0, 0));
    let mut previous = remaining;
    for (k, c) in u.values().iter().enumerate() {
        remaining -= c * c;
        let violation = (-remaining).max(remaining - previous).max(0.0);
        if violation > worst.0 {
            worst = (violation, (k, k));
        }
        previous = remaining;
    }
    Ok(result("projection_decay", worst, OPERATOR_TOL))
}

/// Runs all checks for `(alpha, N)` of the config and writes
/// `basis_check.json`. `check_quad_nodes` replaces the node count of the
/// default Gram quadrature, the rule sized for a linear flux.
pub fn cmd_basis_check(cfg: &RunConfig) -> Result<BasisCheckReport, CliError> {
    cfg.validate()?;
    let spec = cfg.basis()?;
    let rule = match cfg.check_quad_nodes {
        Some(m) => QuadRule::gauss_hermite(m, spec.alpha * spec.alpha)?,
        None => make_quadrature(&spec, 1)?,
    };
    let quad_nodes = rule.node_count();
    let (gram, gram_dx) = gram_matrices(&spec, &rule);
    let k = spec.len();
    let delta = |m: usize, n: usize| if m == n { 1.0 } else { 0.0 };

    let mut checks = vec![
        result(
            "orthonormality",
            worst_pair(spec.n_max, |m, n| (gram[m * k + n] - delta(m, n)).abs()),
            GRAM_TOL,
        ),
        // relative to √(λ_m λ_n) so the tolerance does not scale with N
        result(
            "dx_orthogonality",
            worst_pair(spec.n_max, |m, n| {
                let scale = (spec.eigenvalue(m) * spec.eigenvalue(n)).sqrt().max(1.0);
                (gram_dx[m * k + n] - spec.eigenvalue(n) * delta(m, n)).abs() / scale
            }),
            GRAM_TOL,
        ),
    ];
    checks.extend(operator_checks(&spec));
    checks.push(projection_check(&spec)?);

    let report = BasisCheckReport {
        alpha: spec.alpha,
        n: spec.n_max,
        quad_nodes,
        checks,
    };
    ensure_dir(&cfg.output_dir)?;
    write_json(&cfg.output_dir, "basis_check.json", &report)?;
    Ok(report)
}
