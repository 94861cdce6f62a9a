//! Dormand–Prince 5(4) with a PI step-size controller.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub safety: f64,
    /// PI stabilization exponent.
    pub beta: f64,
    pub max_growth: f64,
    pub min_shrink: f64,
    pub max_steps: usize,
    /// Abort once `h < min_step_factor · |t_end − t_0|`.
    pub min_step_factor: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rel_tol: 1e-3,
            abs_tol: 1e-6,
            safety: 0.9,
            beta: 0.04,
            max_growth: 10.0,
            min_shrink: 0.2,
            max_steps: 1_000_000,
            min_step_factor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl Dopri5 {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    fn error_norm(&self, y: &[f64], y_new: &[f64], err: &[f64]) -> f64 {
        let n = y.len().max(1) as f64;
        let sum: f64 = y
            .iter()
            .zip(y_new)
            .zip(err)
            .map(|((a, b), e)| {
                let sc = self.abs_tol + self.rel_tol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum();
        (sum / n).sqrt()
    }

    fn initial_step<F>(
        &self,
        rhs: &mut F,
        t0: f64,
        y0: &[f64],
        f0: &[f64],
        span: f64,
    ) -> Result<f64>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let scaled = |v: &[f64]| -> f64 {
            let n = v.len().max(1) as f64;
            (v.iter()
                .zip(y0)
                .map(|(x, y)| (x / (self.abs_tol + self.rel_tol * y.abs())).powi(2))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = scaled(y0);
        let d1 = scaled(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
        let mut f1 = vec![0.0; y0.len()];
        rhs(t0 + h0, &y1, &mut f1)?;
        let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = scaled(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }

    /// Integrates `y' = rhs(t, y)` from `t0` to `t_end`.
    ///
    /// `on_accept(t, y, h)` is called after every accepted step. On error the
    /// observer has already seen every accepted state.
    pub fn integrate<F, O>(
        &self,
        mut rhs: F,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        mut on_accept: O,
    ) -> Result<StepStats>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
        O: FnMut(f64, &[f64], f64),
    {
        let dim = y0.len();
        let mut stats = StepStats::default();
        let span = t_end - t0;
        if span <= 0.0 {
            return Ok(stats);
        }
        let h_min = self.min_step_factor * span;

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k1 = vec![0.0; dim];
        let mut k2 = vec![0.0; dim];
        let mut k3 = vec![0.0; dim];
        let mut k4 = vec![0.0; dim];
        let mut k5 = vec![0.0; dim];
        let mut k6 = vec![0.0; dim];
        let mut k7 = vec![0.0; dim];
        let mut stage = vec![0.0; dim];
        let mut y_new = vec![0.0; dim];
        let mut err = vec![0.0; dim];

        rhs(t, &y, &mut k1)?;
        stats.rhs_evals += 1;
        let mut h = self.initial_step(&mut rhs, t, &y, &k1, span)?;
        stats.rhs_evals += 1;

        let expo = 0.2 - 0.75 * self.beta;
        let mut err_old: f64 = 1e-4;
        let mut last_rejected = false;

        loop {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::TooManySteps {
                    t,
                    max_steps: self.max_steps,
                });
            }
            let remaining = t_end - t;
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h < h_min && !last {
                return Err(Error::StepSizeUnderflow { t, h, h_min });
            }

            for i in 0..dim {
                stage[i] = y[i] + h * A21 * k1[i];
            }
            rhs(t + C2 * h, &stage, &mut k2)?;
            for i in 0..dim {
                stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * h, &stage, &mut k3)?;
            for i in 0..dim {
                stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * h, &stage, &mut k4)?;
            for i in 0..dim {
                stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * h, &stage, &mut k5)?;
            for i in 0..dim {
                stage[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(t + h, &stage, &mut k6)?;
            for i in 0..dim {
                y_new[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            rhs(t + h, &y_new, &mut k7)?;
            stats.rhs_evals += 6;
            for i in 0..dim {
                err[i] = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let e = self.error_norm(&y, &y_new, &err);
            if !e.is_finite() {
                return Err(Error::NonFinite {
                    stage: "error estimate",
                });
            }

            let fac_raw = e.powf(expo);
            if e <= 1.0 {
                let fac = (fac_raw / err_old.powf(self.beta) / self.safety)
                    .clamp(1.0 / self.max_growth, 1.0 / self.min_shrink);
                let mut h_next = h / fac;
                if last_rejected {
                    h_next = h_next.min(h);
                }
                err_old = e.max(1e-4);
                t = if last { t_end } else { t + h };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                stats.accepted += 1;
                on_accept(t, &y, h);
                if last {
                    return Ok(stats);
                }
                h = h_next;
                last_rejected = false;
            } else {
                h /= (fac_raw / self.safety).min(1.0 / self.min_shrink);
                stats.rejected += 1;
                last_rejected = true;
            }
        }
    }
}
