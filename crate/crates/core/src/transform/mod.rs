//! Analysis into Fourier–Hermite coefficients, the orthogonal projection,
//! and the banded coefficient-space operators.

mod ops;
mod quadrature;

pub use ops::{commutator_defect, dx, ladder, mul_x, sturm_liouville};
pub use quadrature::{make_quadrature, oversampled_quadrature, QuadRule};

use crate::basis::{eval_basis_into, BasisSpec};
use crate::error::{Error, Result};

/// Coefficients `û_0..û_N` of a function in `R_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVec {
    spec: BasisSpec,
    values: Vec<f64>,
}

impl CoeffVec {
    pub fn new(spec: BasisSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::LengthMismatch {
                expected: spec.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                stage: "coefficient construction",
            });
        }
        Ok(Self { spec, values })
    }

    /// Coefficients from a slice whose length defines `n_max`.
    pub fn from_slice(alpha: f64, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient sequence".into()));
        }
        Self::new(BasisSpec::new(alpha, values.len() - 1)?, values.to_vec())
    }

    pub fn zeros(spec: BasisSpec) -> Self {
        Self {
            values: vec![0.0; spec.len()],
            spec,
        }
    }

    /// Unit coefficient `e_k`, i.e. the function `H_k^α`.
    pub fn unit(spec: BasisSpec, k: usize) -> Self {
        let mut out = Self::zeros(spec);
        if k < out.values.len() {
            out.values[k] = 1.0;
        }
        out
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn n_max(&self) -> usize {
        self.spec.n_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_raw(spec: BasisSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    /// Coefficient `k`, zero outside the stored range.
    pub fn get(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// `⟨u, v⟩`, exact by Parseval. Missing modes count as zero.
    pub fn dot(&self, other: &CoeffVec) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(self.spec, self.values.iter().map(|v| v * factor).collect())
    }

    /// Entrywise sum over the longer of the two index ranges.
    pub fn add(&self, other: &CoeffVec) -> Self {
        let (long, short) = if self.values.len() >= other.values.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut values = long.values.clone();
        values
            .iter_mut()
            .zip(&short.values)
            .for_each(|(a, b)| *a += b);
        Self::from_raw(long.spec, values)
    }

    pub fn sub(&self, other: &CoeffVec) -> Self {
        self.add(&other.scaled(-1.0))
    }
}

/// `û_n = ∫ f H_n^α dx` for `n = 0..=spec.n_max`, summed with folded weights.
pub fn analyze<F: Fn(f64) -> f64>(f: F, spec: &BasisSpec, rule: &QuadRule) -> Result<CoeffVec> {
    let xs = rule.physical_nodes();
    let ws = rule.physical_weights();
    let mut values = vec![0.0; spec.len()];
    let mut basis = vec![0.0; spec.len()];
    for (j, (&x, &w)) in xs.iter().zip(&ws).enumerate() {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFiniteAtNode { node: j, x });
        }
        eval_basis_into(spec, x, &mut basis);
        let wf = w * fx;
        values
            .iter_mut()
            .zip(&basis)
            .for_each(|(v, h)| *v += wf * h);
    }
    Ok(CoeffVec::from_raw(*spec, values))
}

/// The projection `P_N`: truncates to modes `0..=n`, or zero-extends when
/// `n` exceeds the current truncation.
pub fn project(coeffs: &CoeffVec, n: usize) -> CoeffVec {
    let spec = coeffs.spec.with_n_max(n);
    let mut values = vec![0.0; n + 1];
    let keep = values.len().min(coeffs.values.len());
    values[..keep].copy_from_slice(&coeffs.values[..keep]);
    CoeffVec::from_raw(spec, values)
}

/// Precomputed basis values `H_n^α(x_j)` at a fixed set of points.
///
/// Row-major: `table[j * modes + n]`.
#[derive(Debug, Clone)]
pub struct BasisTable {
    points: Vec<f64>,
    modes: usize,
    table: Vec<f64>,
}

impl BasisTable {
    pub fn new(spec: &BasisSpec, points: &[f64]) -> Self {
        let modes = spec.len();
        let mut table = vec![0.0; points.len() * modes];
        for (row, &x) in table.chunks_mut(modes).zip(points) {
            eval_basis_into(spec, x, row);
        }
        Self {
            points: points.to_vec(),
            modes,
            table,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.table[j * self.modes..(j + 1) * self.modes]
    }

    /// `Σ_n û_n H_n^α(x_j)` at every point; extra modes in either side are
    /// ignored.
    pub fn synthesize_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let k = coeffs.len().min(self.modes);
        for (o, row) in out.iter_mut().zip(self.table.chunks(self.modes)) {
            *o = row[..k].iter().zip(&coeffs[..k]).map(|(h, c)| h * c).sum();
        }
    }

    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.points.len()];
        self.synthesize_into(coeffs, &mut out);
        out
    }

    /// `Σ_j w_j g_j H_n^α(x_j)` for every mode `n`.
    pub fn analyze_into(&self, weighted: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let k = out.len().min(self.modes);
        for (row, &g) in self.table.chunks(self.modes).zip(weighted) {
            out[..k]
                .iter_mut()
                .zip(&row[..k])
                .for_each(|(v, h)| *v += g * h);
        }
    }
}
