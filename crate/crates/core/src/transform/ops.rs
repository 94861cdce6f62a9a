//! Matrix-free banded maps on Fourier–Hermite coefficients.

use super::CoeffVec;

/// `∂_x u`, one mode longer:
/// `(∂_x u)_m = −(√λ_m/2) û_{m−1} + (√λ_{m+1}/2) û_{m+1}`.
pub fn dx(u: &CoeffVec) -> CoeffVec {
    let spec = u.spec();
    let out_spec = spec.with_n_max(spec.n_max + 1);
    let values = (0..out_spec.len())
        .map(|m| {
            let lower = if m > 0 { u.get(m - 1) } else { 0.0 };
            -0.5 * spec.sqrt_eigenvalue(m) * lower
                + 0.5 * spec.sqrt_eigenvalue(m + 1) * u.get(m + 1)
        })
        .collect();
    CoeffVec::from_raw(out_spec, values)
}

/// `D_x u = (∂_x + α²x) u`, one mode shorter: `(D_x u)_m = √λ_{m+1} û_{m+1}`.
///
/// A single-mode input maps to the single zero coefficient.
pub fn ladder(u: &CoeffVec) -> CoeffVec {
    let spec = u.spec();
    let out_spec = spec.with_n_max(spec.n_max.saturating_sub(1));
    let values = (0..out_spec.len())
        .map(|m| spec.sqrt_eigenvalue(m + 1) * u.get(m + 1))
        .collect();
    CoeffVec::from_raw(out_spec, values)
}

/// `x·u`, one mode longer:
/// `(x u)_m = (√λ_m û_{m−1} + √λ_{m+1} û_{m+1}) / (2α²)`.
pub fn mul_x(u: &CoeffVec) -> CoeffVec {
    let spec = u.spec();
    let out_spec = spec.with_n_max(spec.n_max + 1);
    let inv = 1.0 / (2.0 * spec.alpha * spec.alpha);
    let values = (0..out_spec.len())
        .map(|m| {
            let lower = if m > 0 { u.get(m - 1) } else { 0.0 };
            inv * (spec.sqrt_eigenvalue(m) * lower + spec.sqrt_eigenvalue(m + 1) * u.get(m + 1))
        })
        .collect();
    CoeffVec::from_raw(out_spec, values)
}

/// `L_α u`, diagonal: `(L_α u)_n = λ_n û_n`.
pub fn sturm_liouville(u: &CoeffVec) -> CoeffVec {
    let spec = u.spec();
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(n, v)| spec.eigenvalue(n) * v)
        .collect();
    CoeffVec::from_raw(spec, values)
}

/// `P_N ∂_x φ − ∂_x P_N φ = ½√λ_{N+1} [φ̂_N H_{N+1} + φ̂_{N+1} H_N]`,
/// returned in `R_{N+1}`.
pub fn commutator_defect(phi: &CoeffVec, n: usize) -> CoeffVec {
    let spec = phi.spec().with_n_max(n + 1);
    let half_root = 0.5 * spec.sqrt_eigenvalue(n + 1);
    let mut values = vec![0.0; n + 2];
    values[n] = half_root * phi.get(n + 1);
    values[n + 1] = half_root * phi.get(n);
    CoeffVec::from_raw(spec, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{eval_basis, BasisSpec};
    use crate::transform::project;
    use std::f64::consts::SQRT_2;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn derivative_of_single_mode() {
        let spec = BasisSpec::new(1.3, 6).unwrap();
        let n = 3;
        let d = dx(&CoeffVec::unit(spec, n));
        assert_eq!(d.values().len(), 8);
        for m in 0..8 {
            let expected = match m {
                4 => -spec.sqrt_eigenvalue(4) / 2.0,
                2 => spec.sqrt_eigenvalue(3) / 2.0,
                _ => 0.0,
            };
            assert!((d.get(m) - expected).abs() < 1e-15);
        }
        let one = BasisSpec::new(1.0, 0).unwrap();
        let d0 = dx(&CoeffVec::unit(one, 0));
        assert!(close(d0.values(), &[0.0, -SQRT_2 / 2.0], 1e-15));
    }

    #[test]
    fn ladder_of_single_mode() {
        let spec = BasisSpec::new(SQRT_2, 6).unwrap();
        let d = ladder(&CoeffVec::unit(spec, 5));
        assert_eq!(d.values().len(), 6);
        assert!((d.get(4) - 20f64.sqrt()).abs() < 1e-14);
        assert!(ladder(&CoeffVec::unit(spec, 0))
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn position_of_single_mode() {
        let spec = BasisSpec::new(1.0, 0).unwrap();
        let x0 = mul_x(&CoeffVec::unit(spec, 0));
        assert!(close(x0.values(), &[0.0, SQRT_2 / 2.0], 1e-15));
        let spec = BasisSpec::new(2.0, 5).unwrap();
        let x = mul_x(&CoeffVec::unit(spec, 2));
        assert!((x.get(3) - spec.sqrt_eigenvalue(3) / 8.0).abs() < 1e-15);
        assert!((x.get(1) - spec.sqrt_eigenvalue(2) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn sturm_liouville_is_diagonal() {
        let spec = BasisSpec::new(SQRT_2, 6).unwrap();
        let l = sturm_liouville(&CoeffVec::unit(spec, 4));
        assert!((l.get(4) - 16.0).abs() < 1e-13);
        assert!(sturm_liouville(&CoeffVec::unit(spec, 0))
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_agrees_with_pointwise_synthesis() {
        let spec = BasisSpec::new(1.7, 9).unwrap();
        let u = CoeffVec::new(
            spec,
            (0..10).map(|k| ((k * 7 % 5) as f64 - 2.0) / 3.0).collect(),
        )
        .unwrap();
        let du = dx(&u);
        let h = 1e-5;
        for &x in &[-1.2, -0.3, 0.0, 0.4, 1.9] {
            let fd = (crate::basis::eval_series(&u, x + h) - crate::basis::eval_series(&u, x - h))
                / (2.0 * h);
            assert!((fd - crate::basis::eval_series(&du, x)).abs() < 1e-6);
        }
    }

    #[test]
    fn commutator_for_top_mode() {
        let spec = BasisSpec::new(SQRT_2, 8).unwrap();
        let n = 7;
        let defect = commutator_defect(&CoeffVec::unit(spec, n), n);
        assert!((defect.get(n + 1) - 0.5 * spec.sqrt_eigenvalue(n + 1)).abs() < 1e-15);
        assert_eq!(defect.get(n), 0.0);
        let low = project(&CoeffVec::unit(spec, 3), 8);
        assert!(commutator_defect(&low, 7)
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn basis_values_respect_recurrence_identities() {
        // x·H_n and ∂_x H_n pointwise against the banded maps
        let spec = BasisSpec::new(1.4, 10).unwrap();
        let wide = spec.with_n_max(11);
        for &x in &[-2.0, 0.3, 1.1] {
            let h = eval_basis(&wide, x);
            for n in 0..=10 {
                let xe = mul_x(&CoeffVec::unit(spec, n));
                let s: f64 = xe.values().iter().zip(&h).map(|(c, v)| c * v).sum();
                assert!((s - x * h[n]).abs() < 1e-13);
            }
        }
    }
}
