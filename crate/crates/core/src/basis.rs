//! Generalized Hermite functions with a scaling factor.
//!
//! `H_n^α(x) = √α · ψ_n(αx)` where `ψ_n` is the orthonormal Hermite function.
//! All evaluation goes through the normalized three-term recurrence
//!
//! ```text
//! ψ_0(y)     = π^{-1/4} e^{-y²/2}
//! ψ_1(y)     = √2 · y · ψ_0(y)
//! ψ_{n+1}(y) = y·√(2/(n+1))·ψ_n(y) − √(n/(n+1))·ψ_{n-1}(y)
//! ```
//!
//! The Gaussian factor is carried as a separate logarithmic scale while the
//! recurrence runs, so neither `2^n n!` nor `e^{-y²/2}` is ever formed on its
//! own. Values in the far tail underflow to zero.

use crate::error::{Error, Result};

/// `π^{-1/4}`
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

const RESCALE_LIMIT: f64 = 1e150;
const RESCALE_LOG: f64 = 345.387_763_949_107; // ln(1e150)

/// The space `R_N = span{H_0^α, …, H_N^α}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BasisSpec {
    pub alpha: f64,
    pub n_max: usize,
}

impl BasisSpec {
    pub fn new(alpha: f64, n_max: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scaling factor must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self { alpha, n_max })
    }

    /// Number of retained modes, `n_max + 1`.
    pub fn len(&self) -> usize {
        self.n_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same scaling factor, different truncation.
    pub fn with_n_max(&self, n_max: usize) -> Self {
        Self {
            alpha: self.alpha,
            n_max,
        }
    }

    /// Sturm–Liouville eigenvalue `λ_n = 2α²n`.
    #[inline]
    pub fn eigenvalue(&self, n: usize) -> f64 {
        2.0 * self.alpha * self.alpha * n as f64
    }

    /// `√λ_n`, the ladder factor of `D_x`.
    #[inline]
    pub fn sqrt_eigenvalue(&self, n: usize) -> f64 {
        self.eigenvalue(n).sqrt()
    }

    /// All eigenvalues `λ_0..=λ_{n_max}`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.eigenvalue(n)).collect()
    }
}

/// `λ_n = 2α²n`. Negative indices are rejected.
pub fn lambda(spec: &BasisSpec, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue index must be nonnegative, got {n}"
        )));
    }
    Ok(spec.eigenvalue(n as usize))
}

/// Orthonormal Hermite functions `ψ_0(y)..ψ_{count-1}(y)` written into `out`.
pub fn hermite_functions_into(y: f64, out: &mut [f64]) {
    let count = out.len();
    if count == 0 {
        return;
    }
    // p holds ψ_n·e^{y²/2}·e^{-shift}; the true value is p·exp(log_scale).
    let mut log_scale = -0.5 * y * y;
    let mut prev = 0.0_f64;
    let mut cur = PI_POW_NEG_QUARTER;
    out[0] = cur * log_scale.exp();
    for n in 0..count - 1 {
        let nf = n as f64;
        let next = y * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_LIMIT {
            cur /= RESCALE_LIMIT;
            prev /= RESCALE_LIMIT;
            log_scale += RESCALE_LOG;
        }
        out[n + 1] = cur * log_scale.exp();
    }
}

/// Orthonormal Hermite functions and their derivatives in `y`.
///
/// Derivatives come from differentiating the recurrence itself, not from the
/// ladder identity, so they serve as an independent route for checks.
pub fn hermite_functions_with_derivative(y: f64, values: &mut [f64], derivs: &mut [f64]) {
    assert_eq!(values.len(), derivs.len());
    let count = values.len();
    if count == 0 {
        return;
    }
    let mut log_scale = -0.5 * y * y;
    // With ψ_n = p_n·e^{-y²/2}: ψ_n' = (p_n' − y p_n)·e^{-y²/2}.
    let (mut p_prev, mut p_cur) = (0.0_f64, PI_POW_NEG_QUARTER);
    let (mut d_prev, mut d_cur) = (0.0_f64, 0.0_f64);
    let store = |n: usize, p: f64, d: f64, s: f64, values: &mut [f64], derivs: &mut [f64]| {
        let g = s.exp();
        values[n] = p * g;
        derivs[n] = (d - y * p) * g;
    };
    store(0, p_cur, d_cur, log_scale, values, derivs);
    for n in 0..count - 1 {
        let nf = n as f64;
        let a = (2.0 / (nf + 1.0)).sqrt();
        let b = (nf / (nf + 1.0)).sqrt();
        let p_next = y * a * p_cur - b * p_prev;
        let d_next = a * (p_cur + y * d_cur) - b * d_prev;
        p_prev = p_cur;
        p_cur = p_next;
        d_prev = d_cur;
        d_cur = d_next;
        let big = p_cur.abs().max(d_cur.abs());
        if big > RESCALE_LIMIT {
            p_cur /= RESCALE_LIMIT;
            p_prev /= RESCALE_LIMIT;
            d_cur /= RESCALE_LIMIT;
            d_prev /= RESCALE_LIMIT;
            log_scale += RESCALE_LOG;
        }
        store(n + 1, p_cur, d_cur, log_scale, values, derivs);
    }
}

/// `H_0^α(x)..H_{n_max}^α(x)`.
pub fn eval_basis(spec: &BasisSpec, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; spec.len()];
    eval_basis_into(spec, x, &mut out);
    out
}

/// Fills `out` with `H_0^α(x)..H_{out.len()-1}^α(x)`.
pub fn eval_basis_into(spec: &BasisSpec, x: f64, out: &mut [f64]) {
    hermite_functions_into(spec.alpha * x, out);
    let scale = spec.alpha.sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
}

/// Values and x-derivatives of `H_0^α..H_{n_max}^α` at `x`.
pub fn eval_basis_with_derivative(spec: &BasisSpec, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut values = vec![0.0; spec.len()];
    let mut derivs = vec![0.0; spec.len()];
    hermite_functions_with_derivative(spec.alpha * x, &mut values, &mut derivs);
    let scale = spec.alpha.sqrt();
    values.iter_mut().for_each(|v| *v *= scale);
    // chain rule: d/dx ψ(αx) = α ψ'(αx)
    derivs.iter_mut().for_each(|d| *d *= scale * spec.alpha);
    (values, derivs)
}

/// Synthesis `Σ_n û_n H_n^α(x)`.
pub fn eval_series(coeffs: &crate::CoeffVec, x: f64) -> f64 {
    let basis = eval_basis(&coeffs.spec(), x);
    basis.iter().zip(coeffs.values()).map(|(h, c)| h * c).sum()
}
