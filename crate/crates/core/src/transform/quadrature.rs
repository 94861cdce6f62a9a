use nalgebra::{DMatrix, SymmetricEigen};

use crate::basis::{hermite_functions_into, BasisSpec};
use crate::error::{Error, Result};

/// Gauss–Hermite rule for integrals of the form `∫ g(x) e^{-c x²} dx`.
///
/// Nodes are the standard abscissae `y_j` for the weight `e^{-y²}`; the
/// physical nodes are `x_j = y_j / √c`. Weights are stored folded,
/// `w_j · e^{y_j²}`, so integrands that already carry their own Gaussian
/// decay can be summed without any `e^{+y²}` factor appearing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    nodes: Vec<f64>,
    folded_weights: Vec<f64>,
    gauss_exponent: f64,
}

impl QuadRule {
    /// `count`-point rule with Gaussian exponent `c`.
    pub fn gauss_hermite(count: usize, gauss_exponent: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter(
                "quadrature needs at least one node".into(),
            ));
        }
        if !(gauss_exponent.is_finite() && gauss_exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gauss exponent must be positive, got {gauss_exponent}"
            )));
        }
        let (nodes, folded_weights) = golub_welsch(count);
        Ok(Self {
            nodes,
            folded_weights,
            gauss_exponent,
        })
    }

    /// Standard abscissae `y_j`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `w_j · e^{y_j²}`.
    pub fn folded_weights(&self) -> &[f64] {
        &self.folded_weights
    }

    pub fn gauss_exponent(&self) -> f64 {
        self.gauss_exponent
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Physical nodes `x_j = y_j / √c`.
    pub fn physical_nodes(&self) -> Vec<f64> {
        let s = self.gauss_exponent.sqrt();
        self.nodes.iter().map(|y| y / s).collect()
    }

    /// Weights for `∫ h(x) dx ≈ Σ_j W_j h(x_j)`, i.e. `w_j e^{y_j²} / √c`.
    pub fn physical_weights(&self) -> Vec<f64> {
        let s = self.gauss_exponent.sqrt();
        self.folded_weights.iter().map(|w| w / s).collect()
    }

    /// Approximates `∫ h(x) dx` for an integrand that decays like `e^{-c x²}`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, h: F) -> f64 {
        let s = self.gauss_exponent.sqrt();
        self.nodes
            .iter()
            .zip(&self.folded_weights)
            .map(|(y, w)| w * h(y / s))
            .sum::<f64>()
            / s
    }
}

/// Nodes from the Jacobi matrix eigenvalues, refined by Newton on `ψ_M`,
/// with folded weights `1 / (M ψ_{M-1}(y_j)²)` from Christoffel–Darboux.
fn golub_welsch(count: usize) -> (Vec<f64>, Vec<f64>) {
    let m = count;
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut psi = vec![0.0; m + 1];
    let mf = m as f64;
    for y in nodes.iter_mut() {
        for _ in 0..4 {
            hermite_functions_into(*y, &mut psi);
            let deriv = (2.0 * mf).sqrt() * psi[m - 1] - *y * psi[m];
            if deriv == 0.0 {
                break;
            }
            let step = psi[m] / deriv;
            *y -= step;
            if step.abs() <= 1e-16 * y.abs().max(1.0) {
                break;
            }
        }
    }
    // enforce exact symmetry
    for j in 0..m / 2 {
        let k = m - 1 - j;
        let a = 0.5 * (nodes[k] - nodes[j]);
        nodes[j] = -a;
        nodes[k] = a;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&y| {
            hermite_functions_into(y, &mut psi[..m]);
            1.0 / (mf * psi[m - 1] * psi[m - 1])
        })
        .collect();
    for j in 0..m / 2 {
        let k = m - 1 - j;
        let w = 0.5 * (weights[j] + weights[k]);
        weights[j] = w;
        weights[k] = w;
    }
    (nodes, weights)
}

/// Rule that integrates `H_m^α · f(u_N)` exactly for `u_N ∈ R_N`, `m ≤ N+1`,
/// and polynomial `f` of degree `flux_degree`.
///
/// The integrand is a polynomial of degree `(d+1)N + 1` times
/// `e^{-(d+1)α²x²/2}`, hence `c = (d+1)α²/2` and
/// `M = ⌈((d+1)N + 2)/2⌉ + 2`.
pub fn make_quadrature(spec: &BasisSpec, flux_degree: usize) -> Result<QuadRule> {
    if flux_degree < 1 {
        return Err(Error::InvalidParameter(
            "flux degree must be at least 1".into(),
        ));
    }
    let d1 = flux_degree + 1;
    let c = d1 as f64 * spec.alpha * spec.alpha / 2.0;
    let count = (d1 * spec.n_max + 2).div_ceil(2) + 2;
    QuadRule::gauss_hermite(count, c)
}

/// Fallback rule for non-polynomial fluxes: `M = factor·(N+1)` nodes with
/// `c = α²`.
pub fn oversampled_quadrature(spec: &BasisSpec, factor: usize) -> Result<QuadRule> {
    if factor == 0 {
        return Err(Error::InvalidParameter(
            "oversampling factor must be positive".into(),
        ));
    }
    QuadRule::gauss_hermite(factor * spec.len(), spec.alpha * spec.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    // ∫ x^k e^{-c x²} dx = Γ((k+1)/2) / c^{(k+1)/2} for even k
    fn gaussian_moment(k: usize, c: f64) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        // Γ(1/2 + k/2) = √π (k-1)!! / 2^{k/2}
        let mut g = PI.sqrt();
        let mut j = 1.0;
        while j < k as f64 {
            g *= j / 2.0;
            j += 2.0;
        }
        g / c.powf((k as f64 + 1.0) / 2.0)
    }

    #[test]
    fn sizes_follow_degree_counting() {
        let s = BasisSpec::new(SQRT_2, 40).unwrap();
        let q = make_quadrature(&s, 2).unwrap();
        assert!((q.gauss_exponent() - 3.0).abs() < 1e-14);
        assert_eq!(q.node_count(), 63);

        let s = BasisSpec::new(1.0, 0).unwrap();
        assert_eq!(make_quadrature(&s, 2).unwrap().node_count(), 3);

        let s = BasisSpec::new(1.0, 10).unwrap();
        let q = make_quadrature(&s, 1).unwrap();
        assert_eq!(q.node_count(), 13);
        assert_eq!(q.gauss_exponent(), 1.0);

        assert!(make_quadrature(&s, 0).is_err());
    }

    #[test]
    fn symmetric_with_positive_weights() {
        for m in [1, 2, 5, 30, 63, 120] {
            let q = QuadRule::gauss_hermite(m, 1.0).unwrap();
            let n = q.nodes();
            for j in 0..m {
                assert_eq!(n[j], -n[m - 1 - j]);
            }
            assert!(q.folded_weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn exact_for_gaussian_moments() {
        for &(m, c) in &[(5usize, 1.0), (20, 3.0), (63, 2.0), (108, 3.0)] {
            let q = QuadRule::gauss_hermite(m, c).unwrap();
            for k in (0..2 * m).step_by(2) {
                // the monomial moment scale varies wildly, compare relative
                let exact = gaussian_moment(k, c);
                let got = q.integrate(|x| x.powi(k as i32) * (-c * x * x).exp());
                if got == 0.0 && exact < 1e-300 {
                    continue;
                }
                let rel = (got - exact).abs() / exact;
                assert!(rel < 1e-12, "m={m} k={k}: rel err {rel:e}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(QuadRule::gauss_hermite(0, 1.0).is_err());
        assert!(QuadRule::gauss_hermite(3, 0.0).is_err());
    }
}
