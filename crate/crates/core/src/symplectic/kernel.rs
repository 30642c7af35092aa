use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{ground_state_tomogram, SymplecticPoint};
use crate::error::{Error, Result};
use crate::specfun::{gauss_hermite, gauss_legendre, QuadratureRule};

/// The three-point kernel split into its delta constraint and smooth part.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct KernelClosedForm {
    /// `μ(ν1+ν2) − ν(μ1+μ2)`; the kernel is supported on its zero set.
    pub constraint: f64,
    /// `(1/4π²) exp[(i/2)((ν1μ2 − ν2μ1) + 2X1 + 2X2 − 2(ν1+ν2)X/ν)]`.
    pub phase_density: Complex64,
}

/// Closed-form kernel for `p1` carrying the left factor of the product.
pub fn symplectic_kernel_closed_form(
    p1: &SymplecticPoint,
    p2: &SymplecticPoint,
    p: &SymplecticPoint,
) -> Result<KernelClosedForm> {
    if p.nu() == 0.0 {
        return Err(Error::InvalidParameter(
            "the closed-form kernel is singular at ν = 0; evaluate Tr[D(x1) D(x2) U(x)] instead".into(),
        ));
    }
    let constraint = p.mu() * (p1.nu() + p2.nu()) - p.nu() * (p1.mu() + p2.mu());
    let phase = 0.5 * (p1.nu() * p2.mu() - p2.nu() * p1.mu()) + p1.x() + p2.x() - (p1.nu() + p2.nu()) * p.x() / p.nu();
    Ok(KernelClosedForm { constraint, phase_density: Complex64::from_polar(1.0 / (4.0 * PI * PI), phase) })
}

/// Quadrature settings for `(w0 ⋆ w0)(x)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IdempotencyQuadrature {
    /// Gauss–Legendre nodes per frame coordinate.
    pub nodes: usize,
    /// A second, finer rule; the difference is the error estimate.
    pub check_nodes: usize,
    /// Frame coordinates are integrated over `[−half_width, half_width]`.
    pub half_width: f64,
    /// Gauss–Hermite nodes for the `X1`, `X2` integrals.
    pub hermite_nodes: usize,
    /// Largest acceptable error estimate.
    pub tolerance: f64,
}

impl Default for IdempotencyQuadrature {
    fn default() -> Self {
        IdempotencyQuadrature { nodes: 48, check_nodes: 64, half_width: 9.0, hermite_nodes: 256, tolerance: 1e-6 }
    }
}

/// Sample points `(X, μ, ν)` used by the verification suites.
pub const IDEMPOTENCY_SAMPLE_POINTS: [(f64, f64, f64); 5] =
    [(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.5, 0.6, 0.8), (-0.7, 1.0, 0.5), (1.2, -0.4, 1.1)];

#[derive(Clone, Debug)]
pub struct IdempotencyResidual {
    pub point: SymplecticPoint,
    pub star_value: Complex64,
    pub target: f64,
    pub residual: f64,
    pub error_estimate: f64,
}

/// `∫ w0(X', μ', ν') e^{iX'} dX'` as a function of `ρ = |(μ', ν')|`, by
/// Gauss–Hermite after `X' = ρy`.
struct CharacteristicW0 {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CharacteristicW0 {
    fn new(n: usize) -> Result<Self> {
        let rule = gauss_hermite(n)?;
        // the rule is symmetric; fold onto y ≥ 0
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
            if y > 1e-300 {
                nodes.push(y);
                weights.push(2.0 * w / PI.sqrt());
            } else if y.abs() <= 1e-300 {
                nodes.push(0.0);
                weights.push(w / PI.sqrt());
            }
        }
        Ok(CharacteristicW0 { nodes, weights })
    }

    fn eval(&self, rho: f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(y, w)| w * (rho * y).cos()).sum()
    }
}

fn star_w0_at(pt: &SymplecticPoint, rule: &QuadratureRule, chi: &CharacteristicW0) -> Complex64 {
    let (x, mu, nu) = (pt.x(), pt.mu(), pt.nu());
    let n = rule.len();
    let g = &rule.nodes;
    let w = &rule.weights;
    // eliminate the frame coordinate with the better-conditioned Jacobian
    let eliminate_mu2 = mu.abs() <= nu.abs();
    let (slope, jac) = if eliminate_mu2 { (mu / nu, 1.0 / nu.abs()) } else { (nu / mu, 1.0 / mu.abs()) };
    let first: Vec<f64> = (0..n * n).map(|k| chi.eval(g[k / n].hypot(g[k % n]))).collect();
    let pref = jac / (4.0 * PI * PI);
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..n {
                let (mu1, nu1) = (g[a], g[b]);
                let f1 = first[a * n + b] * w[a] * w[b];
                for c in 0..n {
                    let (mu2, nu2) = if eliminate_mu2 {
                        (slope * (nu1 + g[c]) - mu1, g[c])
                    } else {
                        (g[c], slope * (mu1 + g[c]) - nu1)
                    };
                    let phase = 0.5 * (nu1 * mu2 - nu2 * mu1) - (nu1 + nu2) * x / nu;
                    acc += Complex64::from_polar(f1 * w[c] * chi.eval(mu2.hypot(nu2)), phase);
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum::<Complex64>()
        * pref
}

/// `(w0 ⋆ w0)(x)` through the closed-form kernel, compared with `w0(x)`.
///
/// The `X1`, `X2` integrals factor into characteristic functions of `w0`; the
/// delta constraint removes one frame coordinate, and the remaining three are
/// integrated by tensor Gauss–Legendre.
pub fn star_w0_idempotency(points: &[SymplecticPoint], quad: &IdempotencyQuadrature) -> Result<Vec<IdempotencyResidual>> {
    if quad.nodes == 0 || quad.check_nodes == 0 || quad.half_width.is_nan() || quad.half_width <= 0.0 {
        return Err(Error::InvalidParameter("idempotency quadrature needs nodes and a positive half-width".into()));
    }
    let chi = CharacteristicW0::new(quad.hermite_nodes)?;
    let coarse = gauss_legendre(quad.nodes)?.mapped(-quad.half_width, quad.half_width);
    let fine = gauss_legendre(quad.check_nodes)?.mapped(-quad.half_width, quad.half_width);
    points
        .iter()
        .map(|pt| {
            if pt.nu() == 0.0 {
                return Err(Error::InvalidParameter("idempotency sample points need ν ≠ 0".into()));
            }
            let a = star_w0_at(pt, &coarse, &chi);
            let b = star_w0_at(pt, &fine, &chi);
            let error_estimate = (a - b).norm();
            if error_estimate.is_nan() || error_estimate > quad.tolerance {
                return Err(Error::NotConverged {
                    estimate: error_estimate,
                    tolerance: quad.tolerance,
                    detail: format!(
                        "(w0 ⋆ w0) at (X, μ, ν) = ({}, {}, {}) with {} vs {} nodes on ±{}: {} vs {}",
                        pt.x(),
                        pt.mu(),
                        pt.nu(),
                        quad.nodes,
                        quad.check_nodes,
                        quad.half_width,
                        a,
                        b
                    ),
                });
            }
            let target = ground_state_tomogram(pt);
            Ok(IdempotencyResidual { point: *pt, star_value: b, target, residual: (b - target).norm(), error_estimate })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::FockSpace;
    use nalgebra::DMatrix;

    fn pt(x: f64, mu: f64, nu: f64) -> SymplecticPoint {
        SymplecticPoint::new(x, mu, nu).unwrap()
    }

    #[test]
    fn closed_form_basics() {
        let k = symplectic_kernel_closed_form(&pt(0.3, 0.2, 0.4), &pt(-1.0, 0.2, 0.4), &pt(0.7, 0.4, 0.8)).unwrap();
        assert!(k.constraint.abs() < 1e-15);
        assert!((k.phase_density.norm() - 0.025330295910584444).abs() < 1e-15);
        assert!(symplectic_kernel_closed_form(&pt(0.0, 1.0, 0.0), &pt(0.0, 1.0, 0.0), &pt(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn characteristic_function_of_ground_state() {
        let chi = CharacteristicW0::new(256).unwrap();
        for rho in [0.0, 1.0, 5.0, 20.0, 28.5] {
            assert!((chi.eval(rho) - (-rho * rho / 4.0f64).exp()).abs() < 1e-14, "{rho}");
        }
    }

    #[test]
    fn ground_state_is_idempotent() {
        let points: Vec<_> = IDEMPOTENCY_SAMPLE_POINTS[..2].iter().map(|&(x, m, n)| pt(x, m, n)).collect();
        let report = star_w0_idempotency(&points, &IdempotencyQuadrature::default()).unwrap();
        for r in &report {
            assert!(r.residual < 1e-3, "{r:?}");
        }
        assert!((report[0].target - 1.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn star_value_is_homogeneous() {
        let quad = IdempotencyQuadrature::default();
        let p = pt(0.5, 0.6, 0.8);
        let r = star_w0_idempotency(&[p, p.scaled(2.0).unwrap()], &quad).unwrap();
        assert!((r[1].star_value * 2.0 - r[0].star_value).norm() < 1e-6);
    }

    #[test]
    fn coarse_quadrature_is_reported() {
        let quad = IdempotencyQuadrature { nodes: 6, check_nodes: 8, ..IdempotencyQuadrature::default() };
        assert!(matches!(star_w0_idempotency(&[pt(0.0, 0.0, 1.0)], &quad), Err(Error::NotConverged { .. })));
        assert!(star_w0_idempotency(&[pt(0.0, 1.0, 0.0)], &IdempotencyQuadrature::default()).is_err());
    }

    /// `Tr[D(x1) D(x2) U_τ(x)]` smeared over `(μ2, ν2)`, where `U_τ` replaces the
    /// delta in `X` by a normalized Gaussian of width `τ`.
    #[test]
    fn closed_form_agrees_with_trace_definition_when_smeared() {
        let n = 64;
        let f = FockSpace::new(n).unwrap();
        let (x1, mu1, nu1) = (0.3, 0.4, 0.2);
        let x2 = -0.2;
        let (x, mu, nu) = (0.5, 0.6, 0.8);
        let (c_mu, c_nu, width, tau) = (0.25, 0.55, 0.3, 0.3);
        let g = |m: f64, v: f64| {
            (-((m - c_mu).powi(2) + (v - c_nu).powi(2)) / (2.0 * width * width)).exp() / (2.0 * PI * width * width)
        };
        let gauss = |y: f64| (-0.5 * (y / tau).powi(2)).exp() / (tau * (2.0 * PI).sqrt());

        // closed side: line integral over the constraint μ(ν1+ν2) = ν(μ1+μ2)
        let p = pt(x, mu, nu);
        let steps = 4000;
        let h = 16.0 * width / steps as f64;
        let mut closed = Complex64::new(0.0, 0.0);
        for i in 0..=steps {
            let nu2 = c_nu - 8.0 * width + h * i as f64;
            let mu2 = mu / nu * (nu1 + nu2) - mu1;
            let k = symplectic_kernel_closed_form(&pt(x1, mu1, nu1), &pt(x2, mu2, nu2), &p).unwrap();
            assert!(k.constraint.abs() < 1e-12);
            let t = (nu1 + nu2) / nu;
            let trap = if i == 0 || i == steps { 0.5 } else { 1.0 };
            closed += k.phase_density * (trap * h * g(mu2, nu2) * (-0.5 * tau * tau * t * t).exp() / nu.abs());
        }

        // trace side on the truncated space, 2D grid in (μ2, ν2)
        let vx = f.rotated_eigenvectors(nu.atan2(mu));
        let rx = mu.hypot(nu);
        let gx: Vec<f64> = f.eigenvalues().iter().map(|l| gauss(x - rx * l)).collect();
        let smear_u = DMatrix::from_fn(n, n, |a, b| (0..n).map(|k| vx[a * n + k] * gx[k] * vx[b * n + k].conj()).sum::<Complex64>());
        let v0 = DMatrix::from_fn(n, n, |a, k| Complex64::new(f.eigenvector_component(a, k), 0.0));
        let ng = 61;
        let step = 8.0 * width / (ng - 1) as f64;
        let cells: Vec<(f64, f64)> = (0..ng * ng)
            .map(|k| (c_mu - 4.0 * width + step * (k / ng) as f64, c_nu - 4.0 * width + step * (k % ng) as f64))
            .collect();
        let traced: Complex64 = cells
            .par_iter()
            .map(|&(mu2, nu2)| {
                let (s_mu, s_nu) = (mu1 + mu2, nu1 + nu2);
                let (s, phi) = (s_mu.hypot(s_nu), s_nu.atan2(s_mu));
                // e^{−i s·R} = Rot(φ) V0 diag(e^{−i|s|λ}) V0ᵀ Rot(φ)†
                let rotated = DMatrix::from_fn(n, n, |a, b| {
                    smear_u[(a, b)] * Complex64::from_polar(1.0, phi * (b as f64 - a as f64))
                });
                let y = rotated * &v0;
                let tr: Complex64 = (0..n)
                    .map(|k| {
                        let diag: Complex64 = (0..n).map(|a| v0[(a, k)] * y[(a, k)]).sum();
                        diag * Complex64::from_polar(1.0, -s * f.eigenvalues()[k])
                    })
                    .sum();
                let pre = Complex64::from_polar(1.0 / (4.0 * PI * PI), x1 + x2 + 0.5 * (nu1 * mu2 - mu1 * nu2));
                pre * tr * (g(mu2, nu2) * step * step)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let rel = (traced - closed).norm() / closed.norm();
        assert!(rel < 0.05, "closed {closed}, trace {traced}, relative {rel}");
    }
}
