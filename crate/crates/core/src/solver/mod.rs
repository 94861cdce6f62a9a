//! Semi-discrete Galerkin schemes and their time integration.
//!
//! The unknowns are the coefficients `û_0..û_N`. Testing the conservation
//! law against `H_m^α`, `m = 0..N`, gives
//!
//! ```text
//! dû/dt = −P_N ∂_x P_{N+1} f(u_N) + viscosity(u_N)
//! ```
//!
//! where `P_{N+1} f(u_N)` is computed by a Gauss–Hermite rule sized to be
//! exact for polynomial fluxes.

mod dopri;

use std::fmt;
use std::sync::Arc;

pub use dopri::{Dopri5, StepStats};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::transform::{analyze, make_quadrature, project, BasisTable, CoeffVec, QuadRule};
use crate::viscosity::{make_multipliers, MultiplierSet, ViscosityKind, ViscositySpec};

/// Flux function `f(u)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Flux {
    /// `u²/2`
    Burgers,
    /// `Σ_k c_k u^k`
    Polynomial(Vec<f64>),
}

impl Flux {
    pub fn zero() -> Self {
        Flux::Polynomial(Vec::new())
    }

    pub fn degree(&self) -> usize {
        match self {
            Flux::Burgers => 2,
            Flux::Polynomial(c) => c.iter().rposition(|&v| v != 0.0).unwrap_or(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Flux::Polynomial(c) if c.iter().all(|&v| v == 0.0))
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Flux::Burgers => 0.5 * u * u,
            Flux::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck),
        }
    }
}

/// Initial data `u_0`.
#[derive(Clone)]
pub enum Initial {
    /// `e^{-x²}`
    Gaussian,
    /// `H_k^α`
    Mode(usize),
    /// Coefficients given directly, zero-padded or truncated to `R_N`.
    Coefficients(Vec<f64>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Initial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Initial::Gaussian => write!(f, "Gaussian"),
            Initial::Mode(k) => write!(f, "Mode({k})"),
            Initial::Coefficients(c) => f.debug_tuple("Coefficients").field(c).finish(),
            Initial::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl Initial {
    /// Pointwise value where one is defined.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        match self {
            Initial::Gaussian => Some((-x * x).exp()),
            Initial::Function(f) => Some(f(x)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub basis: BasisSpec,
    pub viscosity: ViscositySpec,
    pub flux: Flux,
    pub t_final: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial: Initial,
}

impl SchemeConfig {
    /// Burgers flux, Gaussian data, `t_final = 1.5`, default tolerances.
    pub fn burgers(basis: BasisSpec, viscosity: ViscositySpec) -> Self {
        Self {
            basis,
            viscosity,
            flux: Flux::Burgers,
            t_final: 1.5,
            rel_tol: 1e-3,
            abs_tol: 1e-6,
            initial: Initial::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "final time must be nonnegative, got {}",
                self.t_final
            )));
        }
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1), got {tol}"
                )));
            }
        }
        self.viscosity.validate(self.basis.n_max)
    }

    pub fn epsilon(&self) -> f64 {
        self.viscosity.epsilon(self.basis.n_max)
    }
}

/// The right-hand side operator with all per-run tables precomputed.
#[derive(Debug, Clone)]
pub struct Semidiscrete {
    spec: BasisSpec,
    flux: Flux,
    rule: QuadRule,
    /// `H_0..H_{N+1}` at the physical nodes.
    table: BasisTable,
    weights: Vec<f64>,
    kind: ViscosityKind,
    eps: f64,
    multipliers: Option<MultiplierSet>,
}

#[derive(Debug, Default)]
struct Scratch {
    point_values: Vec<f64>,
    flux_coeffs: Vec<f64>,
}

impl Semidiscrete {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let spec = cfg.basis;
        let rule = make_quadrature(&spec, cfg.flux.degree().max(1))?;
        let table = BasisTable::new(&spec.with_n_max(spec.n_max + 1), &rule.physical_nodes());
        let multipliers = match cfg.viscosity.kind {
            ViscosityKind::HighModeQ => Some(make_multipliers(
                spec.n_max,
                cfg.viscosity.cutoff(spec.n_max),
                cfg.viscosity.multiplier_family,
            )?),
            _ => None,
        };
        Ok(Self {
            spec,
            flux: cfg.flux.clone(),
            weights: rule.physical_weights(),
            rule,
            table,
            kind: cfg.viscosity.kind,
            eps: cfg.epsilon(),
            multipliers,
        })
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn rule(&self) -> &QuadRule {
        &self.rule
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn multipliers(&self) -> Option<&MultiplierSet> {
        self.multipliers.as_ref()
    }

    /// `P_N u_0` computed with this run's quadrature rule.
    pub fn initial_coefficients(&self, initial: &Initial) -> Result<CoeffVec> {
        match initial {
            Initial::Gaussian => analyze(|x| (-x * x).exp(), &self.spec, &self.rule),
            Initial::Function(f) => analyze(|x| f(x), &self.spec, &self.rule),
            Initial::Mode(k) => Ok(CoeffVec::unit(self.spec, *k)),
            Initial::Coefficients(c) => {
                let given = CoeffVec::from_slice(self.spec.alpha, c)?;
                Ok(project(&given, self.spec.n_max))
            }
        }
    }

    /// Flux part only: `−P_N ∂_x P_{N+1} f(u_N)`.
    fn flux_term(&self, u: &[f64], out: &mut [f64], scratch: &mut Scratch) -> Result<()> {
        let n = self.spec.n_max;
        if self.flux.is_zero() {
            out.iter_mut().for_each(|v| *v = 0.0);
            return Ok(());
        }
        let npts = self.weights.len();
        scratch.point_values.resize(npts, 0.0);
        scratch.flux_coeffs.resize(n + 2, 0.0);

        self.table.synthesize_into(u, &mut scratch.point_values);
        for (j, v) in scratch.point_values.iter_mut().enumerate() {
            let f = self.flux.eval(*v);
            if !f.is_finite() {
                return Err(Error::NonFiniteAtNode {
                    node: j,
                    x: self.table.points()[j],
                });
            }
            *v = f * self.weights[j];
        }
        self.table
            .analyze_into(&scratch.point_values, &mut scratch.flux_coeffs);

        let fh = &scratch.flux_coeffs;
        for (m, o) in out.iter_mut().enumerate().take(n + 1) {
            let lower = if m > 0 { fh[m - 1] } else { 0.0 };
            let d = -0.5 * self.spec.sqrt_eigenvalue(m) * lower
                + 0.5 * self.spec.sqrt_eigenvalue(m + 1) * fh[m + 1];
            *o = -d;
        }
        Ok(())
    }

    fn add_viscosity(&self, u: &[f64], out: &mut [f64]) {
        let s = &self.spec;
        match self.kind {
            ViscosityKind::None => {}
            ViscosityKind::SturmLiouville => {
                for (k, (o, v)) in out.iter_mut().zip(u).enumerate() {
                    *o -= self.eps * s.eigenvalue(k) * v;
                }
            }
            ViscosityKind::HighModeQ => {
                // ε ∂_x D_x Q u: w_m = √λ_{m+1} q_{m+1} u_{m+1}, then ∂_x and truncate
                let q = self
                    .multipliers
                    .as_ref()
                    .expect("multipliers built")
                    .values();
                let n = s.n_max;
                let w = |m: usize| -> f64 {
                    if m + 1 > n {
                        0.0
                    } else {
                        s.sqrt_eigenvalue(m + 1) * q[m + 1] * u[m + 1]
                    }
                };
                for (m, o) in out.iter_mut().enumerate().take(n + 1) {
                    let lower = if m > 0 { w(m - 1) } else { 0.0 };
                    let d = -0.5 * s.sqrt_eigenvalue(m) * lower
                        + 0.5 * s.sqrt_eigenvalue(m + 1) * w(m + 1);
                    *o += self.eps * d;
                }
            }
        }
    }

    fn eval_into(&self, u: &[f64], out: &mut [f64], scratch: &mut Scratch) -> Result<()> {
        self.flux_term(u, out, scratch)?;
        self.add_viscosity(u, out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                stage: "right-hand side assembly",
            });
        }
        Ok(())
    }

    /// `du/dt` for the coefficients `u`.
    pub fn eval(&self, u: &CoeffVec) -> Result<CoeffVec> {
        if u.values().len() != self.spec.len() {
            return Err(Error::LengthMismatch {
                expected: self.spec.len(),
                got: u.values().len(),
            });
        }
        let mut out = vec![0.0; self.spec.len()];
        self.eval_into(u.values(), &mut out, &mut Scratch::default())?;
        CoeffVec::new(self.spec, out)
    }

    /// Flux contribution alone, `−P_N ∂_x P_{N+1} f(u_N)`.
    pub fn flux_tendency(&self, u: &CoeffVec) -> Result<CoeffVec> {
        let mut out = vec![0.0; self.spec.len()];
        self.flux_term(u.values(), &mut out, &mut Scratch::default())?;
        CoeffVec::new(self.spec, out)
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub u: CoeffVec,
    pub step_history: Vec<(f64, f64)>,
}

/// `du/dt` at `state` for the scheme described by `cfg`.
pub fn rhs(state: &SolverState, cfg: &SchemeConfig) -> Result<CoeffVec> {
    Semidiscrete::new(cfg)?.eval(&state.u)
}

/// Accepted states of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: BasisSpec,
    pub epsilon: f64,
    pub cutoff: Option<usize>,
    /// Accepted times, starting at 0.
    pub times: Vec<f64>,
    /// Coefficients at each entry of `times`.
    pub states: Vec<Vec<f64>>,
    /// `(t, h)` for each accepted step, `t` the step's end time.
    pub step_sizes: Vec<(f64, f64)>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn final_state(&self) -> CoeffVec {
        CoeffVec::new(self.spec, self.states.last().expect("nonempty").clone())
            .expect("accepted states are finite")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn state(&self, i: usize) -> CoeffVec {
        CoeffVec::new(self.spec, self.states[i].clone()).expect("accepted states are finite")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// An aborted run together with everything accepted before the failure.
#[derive(Debug, Clone)]
pub struct Aborted {
    pub error: Error,
    pub partial: Option<Trajectory>,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.partial {
            Some(p) => write!(
                f,
                "{} (last valid state at t = {})",
                self.error,
                p.final_time()
            ),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for Aborted {}

impl From<Error> for Aborted {
    fn from(error: Error) -> Self {
        Self {
            error,
            partial: None,
        }
    }
}

/// Advances `P_N u_0` to `cfg.t_final`, recording every accepted step.
pub fn integrate(cfg: &SchemeConfig) -> std::result::Result<Trajectory, Aborted> {
    let op = Semidiscrete::new(cfg)?;
    let u0 = op.initial_coefficients(&cfg.initial)?;
    integrate_from(
        &op,
        u0,
        cfg.t_final,
        &Dopri5::with_tolerances(cfg.rel_tol, cfg.abs_tol),
    )
}

pub fn integrate_from(
    op: &Semidiscrete,
    u0: CoeffVec,
    t_final: f64,
    stepper: &Dopri5,
) -> std::result::Result<Trajectory, Aborted> {
    let mut traj = Trajectory {
        spec: op.spec(),
        epsilon: op.epsilon(),
        cutoff: op.multipliers().map(|m| m.cutoff()),
        times: vec![0.0],
        states: vec![u0.values().to_vec()],
        step_sizes: Vec::new(),
        stats: StepStats::default(),
    };
    let mut scratch = Scratch::default();
    let result = stepper.integrate(
        |_, y, dy| op.eval_into(y, dy, &mut scratch),
        0.0,
        u0.values(),
        t_final,
        |t, y, h| {
            traj.times.push(t);
            traj.states.push(y.to_vec());
            traj.step_sizes.push((t, h));
        },
    );
    match result {
        Ok(stats) => {
            traj.stats = stats;
            Ok(traj)
        }
        Err(error) => Err(Aborted {
            error,
            partial: Some(traj),
        }),
    }
}
