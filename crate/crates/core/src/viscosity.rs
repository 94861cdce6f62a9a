//! Spectral viscosity operators and their parameter laws.
//!
//! Scheme I damps high modes through `ε ∂_x D_x Q_{m_N} u`, where `Q_{m_N}`
//! is a diagonal multiplier that vanishes on modes `k ≤ m_N`. Scheme II uses
//! the Sturm–Liouville operator directly, `−ε L_α u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{dx, ladder, project, CoeffVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViscosityKind {
    None,
    HighModeQ,
    SturmLiouville,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierFamily {
    /// `q̂_k = N/(N−m_N)·(1 − m_N/k)` for `k > m_N`.
    #[default]
    PaperFraction,
}

/// Viscosity selector plus the power laws `ε_N = a·N^p`, `m_N = ⌊b·N^q⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscositySpec {
    pub kind: ViscosityKind,
    pub eps_coeff: f64,
    pub eps_exp: f64,
    pub m_coeff: f64,
    pub m_exp: f64,
    #[serde(default)]
    pub multiplier_family: MultiplierFamily,
}

impl ViscositySpec {
    pub fn none() -> Self {
        Self {
            kind: ViscosityKind::None,
            eps_coeff: 0.0,
            eps_exp: 0.0,
            m_coeff: 0.0,
            m_exp: 0.0,
            multiplier_family: MultiplierFamily::PaperFraction,
        }
    }

    /// `ε_N = 0.5 N^{-0.33}`, `m_N = ⌊5 N^{0.16}⌋`.
    pub fn high_mode_default() -> Self {
        Self {
            kind: ViscosityKind::HighModeQ,
            eps_coeff: 0.5,
            eps_exp: -0.33,
            m_coeff: 5.0,
            m_exp: 0.16,
            multiplier_family: MultiplierFamily::PaperFraction,
        }
    }

    /// `ε_N = 0.05 N^{-0.33}`.
    pub fn sturm_liouville_default() -> Self {
        Self {
            kind: ViscosityKind::SturmLiouville,
            eps_coeff: 0.05,
            eps_exp: -0.33,
            m_coeff: 5.0,
            m_exp: 0.16,
            multiplier_family: MultiplierFamily::PaperFraction,
        }
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        match self.kind {
            ViscosityKind::None => 0.0,
            _ => self.eps_coeff * (n as f64).powf(self.eps_exp),
        }
    }

    /// `⌊m_coeff·N^{m_exp}⌋` clamped to `[1, N−1]`.
    pub fn cutoff(&self, n: usize) -> usize {
        let raw = (self.m_coeff * (n as f64).powf(self.m_exp)).floor();
        let upper = n.saturating_sub(1).max(1);
        (raw.max(1.0) as usize).min(upper)
    }

    /// Checks the invariants for truncation `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.kind {
            ViscosityKind::None => Ok(()),
            ViscosityKind::SturmLiouville => check_eps(self.epsilon(n)),
            ViscosityKind::HighModeQ => {
                check_eps(self.epsilon(n))?;
                if n < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "high-mode viscosity needs N ≥ 2 so that 1 ≤ m_N < N, got N = {n}"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "viscosity amplitude must be positive, got {eps}"
        )))
    }
}

/// The multipliers `q̂_0..q̂_N` of `Q_{m_N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet {
    cutoff: usize,
    q: Vec<f64>,
}

impl MultiplierSet {
    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `1 − q̂_k`, the multipliers of `R_{m_N} = I − Q_{m_N}`.
    pub fn complement(&self) -> Vec<f64> {
        self.q.iter().map(|q| 1.0 - q).collect()
    }
}

pub fn make_multipliers(
    n: usize,
    cutoff: usize,
    family: MultiplierFamily,
) -> Result<MultiplierSet> {
    if cutoff < 1 || cutoff >= n {
        return Err(Error::InvalidParameter(format!(
            "cutoff must satisfy 1 ≤ m_N < N, got m_N = {cutoff}, N = {n}"
        )));
    }
    let q = match family {
        MultiplierFamily::PaperFraction => {
            let scale = n as f64 / (n - cutoff) as f64;
            (0..=n)
                .map(|k| {
                    if k <= cutoff {
                        0.0
                    } else if k == n {
                        1.0
                    } else {
                        scale * (1.0 - cutoff as f64 / k as f64)
                    }
                })
                .collect()
        }
    };
    Ok(MultiplierSet { cutoff, q })
}

/// `(Q u)_k = q̂_k û_k`.
pub fn apply_q(u: &CoeffVec, mult: &MultiplierSet) -> Result<CoeffVec> {
    if u.values().len() != mult.len() {
        return Err(Error::LengthMismatch {
            expected: mult.len(),
            got: u.values().len(),
        });
    }
    let values = u.values().iter().zip(&mult.q).map(|(v, q)| v * q).collect();
    CoeffVec::new(u.spec(), values)
}

/// `ε ∂_x D_x Q u`, Galerkin-truncated back to the modes of `u`.
pub fn high_mode_viscosity(u: &CoeffVec, mult: &MultiplierSet, eps: f64) -> Result<CoeffVec> {
    let qu = apply_q(u, mult)?;
    let out = dx(&ladder(&qu));
    Ok(project(&out, u.n_max()).scaled(eps))
}

/// `−ε λ_k û_k`, the scheme II contribution to `du/dt`.
pub fn sturm_liouville_viscosity(u: &CoeffVec, eps: f64) -> CoeffVec {
    let spec = u.spec();
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| -eps * spec.eigenvalue(k) * v)
        .collect();
    CoeffVec::new(spec, values).expect("finite input stays finite")
}
