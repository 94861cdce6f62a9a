//! Reference solutions for inviscid Burgers with `u_0 = e^{-x²}`.
//!
//! Before the shock time the solution follows from characteristics,
//! `u(η + t e^{-η²}, t) = e^{-η²}`. Past it, a fine first-order Godunov
//! scheme with the exact Riemann solver stands in for the exact solution.

use crate::error::{Error, Result};

/// First crossing of characteristics for `u_0 = e^{-x²}`: `√(e/2)`.
pub fn shock_time() -> f64 {
    (std::f64::consts::E / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicSolution {
    pub t: f64,
    pub newton_tol: f64,
    pub max_iter: usize,
}

impl CharacteristicSolution {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..shock_time()).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "characteristics solution is single-valued only for 0 ≤ t < {}, got {t}",
                shock_time()
            )));
        }
        Ok(Self {
            t,
            newton_tol: 1e-14,
            max_iter: 200,
        })
    }

    /// Foot point `η` with `η + t e^{-η²} = x`.
    pub fn foot(&self, x: f64) -> Result<f64> {
        let t = self.t;
        let g = |eta: f64| eta + t * (-eta * eta).exp() - x;
        // 0 < e^{-η²} ≤ 1 puts the root in [x − t, x]
        let (mut lo, mut hi) = (x - t, x);
        if t == 0.0 {
            return Ok(x);
        }
        let mut eta = 0.5 * (lo + hi);
        let mut residual = g(eta);
        for _ in 0..self.max_iter {
            if residual.abs() <= self.newton_tol * (1.0 + x.abs()) {
                return Ok(eta);
            }
            if residual > 0.0 {
                hi = eta;
            } else {
                lo = eta;
            }
            let slope = 1.0 - 2.0 * t * eta * (-eta * eta).exp();
            let newton = eta - residual / slope;
            eta = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            residual = g(eta);
            if hi - lo <= f64::EPSILON * (1.0 + x.abs()) {
                return Ok(eta);
            }
        }
        if residual.abs() <= self.newton_tol * (1.0 + x.abs()) {
            return Ok(eta);
        }
        Err(Error::NoConvergence {
            iterations: self.max_iter,
            residual: residual.abs(),
        })
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let eta = self.foot(x)?;
        Ok((-eta * eta).exp())
    }
}

pub fn exact_pre_shock(x: f64, t: f64, sol: &CharacteristicSolution) -> Result<f64> {
    CharacteristicSolution { t, ..*sol }.value(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvOracle {
    pub half_width: f64,
    pub cell_count: usize,
    pub cfl: f64,
}

impl Default for FvOracle {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            cell_count: 20001,
            cfl: 0.45,
        }
    }
}

/// Flux of the exact Riemann solution of `u_t + (u²/2)_x = 0` at `x/t = 0`.
pub fn godunov_flux(left: f64, right: f64) -> f64 {
    let f = |u: f64| 0.5 * u * u;
    if left > right {
        // shock with speed (left + right)/2
        if left + right > 0.0 {
            f(left)
        } else {
            f(right)
        }
    } else if left > 0.0 {
        f(left)
    } else if right < 0.0 {
        f(right)
    } else {
        // transonic rarefaction
        0.0
    }
}

/// Cell averages on a uniform grid at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct FvProfile {
    pub t: f64,
    pub centers: Vec<f64>,
    pub values: Vec<f64>,
    pub dx: f64,
}

impl FvProfile {
    /// Piecewise-linear interpolation between cell centres; zero outside.
    pub fn interpolate(&self, x: f64) -> f64 {
        let x0 = self.centers[0];
        let s = (x - x0) / self.dx;
        if s < 0.0 || s > (self.centers.len() - 1) as f64 {
            return 0.0;
        }
        let i = (s.floor() as usize).min(self.centers.len() - 2);
        let w = s - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

impl FvOracle {
    pub fn validate(&self) -> Result<()> {
        if self.cell_count.is_multiple_of(2) || self.cell_count < 3 {
            return Err(Error::InvalidParameter(format!(
                "cell count must be odd and at least 3, got {}",
                self.cell_count
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::InvalidParameter(format!(
                "CFL must lie in (0, 0.9], got {}",
                self.cfl
            )));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::InvalidParameter(
                "domain half width must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.cell_count as f64
    }

    pub fn initial(&self) -> FvProfile {
        let dx = self.dx();
        let centers: Vec<f64> = (0..self.cell_count)
            .map(|i| -self.half_width + (i as f64 + 0.5) * dx)
            .collect();
        let values = centers.iter().map(|x| (-x * x).exp()).collect();
        FvProfile {
            t: 0.0,
            centers,
            values,
            dx,
        }
    }

    /// Profiles at each of the increasing times in `times`, from one march.
    pub fn run_to_times(&self, times: &[f64]) -> Result<Vec<FvProfile>> {
        self.validate()?;
        if times.iter().any(|&t| !(t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "times must be nonnegative and increasing".into(),
            ));
        }
        let mut profile = self.initial();
        let dx = profile.dx;
        let n = profile.values.len();
        let mut fluxes = vec![0.0; n + 1];
        let mut out = Vec::with_capacity(times.len());
        let mut t = 0.0;
        for &target in times {
            while t < target {
                let speed = profile
                    .values
                    .iter()
                    .fold(0.0f64, |a, u| a.max(u.abs()))
                    .max(1e-12);
                let dt = (self.cfl * dx / speed).min(target - t);
                // outflow boundaries: ghost cells copy the edge values
                let u = &profile.values;
                fluxes[0] = godunov_flux(u[0], u[0]);
                fluxes[n] = godunov_flux(u[n - 1], u[n - 1]);
                for i in 1..n {
                    fluxes[i] = godunov_flux(u[i - 1], u[i]);
                }
                let ratio = dt / dx;
                for (i, v) in profile.values.iter_mut().enumerate() {
                    *v -= ratio * (fluxes[i + 1] - fluxes[i]);
                }
                t = if target - t - dt <= 1e-15 * target.max(1.0) {
                    target
                } else {
                    t + dt
                };
            }
            profile.t = target;
            out.push(profile.clone());
        }
        Ok(out)
    }
}

pub fn fv_reference(t: f64, oracle: &FvOracle) -> Result<FvProfile> {
    Ok(oracle.run_to_times(&[t])?.remove(0))
}

/// Index of the largest downward jump between neighbouring samples, and the
/// midpoint between them.
pub fn steepest_front(xs: &[f64], values: &[f64]) -> (usize, f64) {
    let (i, _) = values
        .windows(2)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bd), (i, w)| {
            let drop = w[0] - w[1];
            if drop > bd {
                (i, drop)
            } else {
                (bi, bd)
            }
        });
    (i, 0.5 * (xs[i] + xs[i + 1]))
}
