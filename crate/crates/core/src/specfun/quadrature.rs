use crate::error::{Error, Result};
use crate::linalg::symmetric_tridiagonal_eigen;

use super::poly::legendre_with_derivative;

/// Nodes and weights of a Gaussian rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine map of a rule on (−1, 1) onto (a, b).
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| half * w).collect(),
        }
    }
}

/// `n`-point Gauss–Legendre rule on (−1, 1), exact through degree `2n − 1`.
///
/// Newton iteration on `P_n` from the Tricomi initial guess; nodes are
/// returned in increasing order.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("Gauss–Legendre rule needs n ≥ 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// `n`-point Gauss–Hermite rule for `∫ e^{−y²} f(y) dy`, built by
/// Golub–Welsch from the Hermite Jacobi matrix.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("Gauss–Hermite rule needs n ≥ 1".into()));
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let eig = symmetric_tridiagonal_eigen(&diag, &off, 1)?;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let weights = (0..n).map(|k| sqrt_pi * eig.component(0, k).powi(2)).collect();
    Ok(QuadratureRule { nodes: eig.eigenvalues, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);

        let r2 = gauss_legendre(2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r2.nodes[0] + x).abs() < 1e-15 && (r2.nodes[1] - x).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-14 && (r2.weights[1] - 1.0).abs() < 1e-14);

        let r3 = gauss_legendre(3).unwrap();
        assert!((r3.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn legendre_invariants() {
        for n in 1..60 {
            let r = gauss_legendre(n).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12, "n={n}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            // exact through degree 2n − 1
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn legendre_nodes_are_roots() {
        let r = gauss_legendre(20).unwrap();
        for &x in &r.nodes {
            let (p, _) = legendre_with_derivative(20, x);
            assert!(p.abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite(30).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((r.integrate(|_| 1.0) - sqrt_pi).abs() < 1e-13);
        assert!((r.integrate(|y| y * y) - sqrt_pi / 2.0).abs() < 1e-13);
        assert!((r.integrate(|y| (2.0 * y).cos()) - sqrt_pi * (-1.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn zero_points_rejected() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_hermite(0).is_err());
    }
}
