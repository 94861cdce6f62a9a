//! Norms, time integrals of norm series, and power-law growth fits.

use serde::{Deserialize, Serialize};

use crate::basis::eval_basis_into;
use crate::error::{Error, Result};
use crate::transform::{ladder, mul_x, BasisTable, CoeffVec};

/// `‖u‖ = (Σ û_n²)^{1/2}` by Parseval.
pub fn norm_l2(u: &CoeffVec) -> f64 {
    u.values().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖D_x u‖ = (Σ λ_n û_n²)^{1/2}`.
pub fn norm_dx(u: &CoeffVec) -> f64 {
    let spec = u.spec();
    u.values()
        .iter()
        .enumerate()
        .map(|(n, v)| spec.eigenvalue(n) * v * v)
        .sum::<f64>()
        .sqrt()
}

/// `‖x u‖`; `x u` lives in `R_{N+1}` so Parseval is exact.
pub fn norm_xweighted(u: &CoeffVec) -> f64 {
    norm_l2(&mul_x(u))
}

/// Equidistant grid `−L, −L + dx, …, L` used for physical-space norms.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    pub half_width: f64,
    pub dx: f64,
    points: Vec<f64>,
}

impl UniformGrid {
    pub fn new(half_width: f64, dx: f64) -> Result<Self> {
        if !(half_width > 0.0 && dx > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid needs L > 0 and dx > 0, got L = {half_width}, dx = {dx}"
            )));
        }
        let intervals = (2.0 * half_width / dx).round() as usize;
        if intervals == 0 {
            return Err(Error::InvalidParameter(
                "grid spacing exceeds the domain".into(),
            ));
        }
        let h = 2.0 * half_width / intervals as f64;
        let points = (0..=intervals)
            .map(|i| -half_width + i as f64 * h)
            .collect();
        Ok(Self {
            half_width,
            dx: h,
            points,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Trapezoid rule for samples on this grid.
    pub fn trapezoid(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.points.len());
        let n = samples.len();
        if n < 2 {
            return 0.0;
        }
        let inner: f64 = samples[1..n - 1].iter().sum();
        self.dx * (inner + 0.5 * (samples[0] + samples[n - 1]))
    }
}

/// `‖x² u‖_{L¹}` by the trapezoid rule on `[−L, L]` with spacing `dx`.
pub fn norm_x2_l1(u: &CoeffVec, half_width: f64, dx: f64) -> Result<f64> {
    let grid = UniformGrid::new(half_width, dx)?;
    let spec = u.spec();
    let mut basis = vec![0.0; spec.len()];
    let samples: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            eval_basis_into(&spec, x, &mut basis);
            let v: f64 = basis.iter().zip(u.values()).map(|(h, c)| h * c).sum();
            (x * x * v).abs()
        })
        .collect();
    Ok(grid.trapezoid(&samples))
}

/// Same as [`norm_x2_l1`] with a precomputed basis table on the grid.
pub fn norm_x2_l1_tabulated(u: &[f64], grid: &UniformGrid, table: &BasisTable) -> f64 {
    let mut values = table.synthesize(u);
    values
        .iter_mut()
        .zip(grid.points())
        .for_each(|(v, x)| *v = (x * x * *v).abs());
    grid.trapezoid(&values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormLabel {
    L2,
    DxL2,
    XL2,
    X2L1,
}

impl NormLabel {
    /// L²-type norms are squared before integrating in time.
    pub fn squared_in_time(self) -> bool {
        !matches!(self, NormLabel::X2L1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub label: NormLabel,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl NormSeries {
    pub fn new(label: NormLabel, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                got: values.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "series times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "norm values must be nonnegative".into(),
            ));
        }
        Ok(Self {
            label,
            times,
            values,
        })
    }
}

/// Trapezoid rule over the series' own time grid: `∫ value² dt` for L²-type
/// labels, `∫ value dt` for the `x²` L¹ label.
pub fn time_integrate(series: &NormSeries) -> Result<f64> {
    if series.times.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: series.times.len(),
        });
    }
    let g = |v: f64| {
        if series.label.squared_in_time() {
            v * v
        } else {
            v
        }
    };
    Ok(series
        .times
        .windows(2)
        .zip(series.values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (g(v[0]) + g(v[1])))
        .sum())
}

/// `value ≈ prefactor · N^exponent` by least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

pub fn fit_growth(points: &[(f64, f64)]) -> Result<GrowthFit> {
    if points.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: points.len(),
        });
    }
    for (i, &(n, v)) in points.iter().enumerate() {
        if !(n > 0.0) {
            return Err(Error::NonPositive { index: i, value: n });
        }
        if !(v > 0.0) {
            return Err(Error::NonPositive { index: i, value: v });
        }
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "growth fit needs at least two distinct N".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(GrowthFit {
        exponent: slope,
        prefactor: intercept.exp(),
        residual,
    })
}

/// `‖D_x u‖` via the explicit ladder map, for cross-checks.
pub fn norm_dx_by_ladder(u: &CoeffVec) -> f64 {
    norm_l2(&ladder(u))
}
