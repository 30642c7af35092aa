use std::f64::consts::PI;

use num_complex::Complex64;

use super::{FockSpace, SymplecticPoint};
use crate::operator::{matrix_exponential, OperatorMatrix};
use crate::specfun::{laguerre_assoc, log_factorial};
use crate::error::Result;

/// `(1/2π) exp(iX − iνp − iμq)` on the truncated space, by matrix exponential.
pub fn displacement_quantizer(pt: &SymplecticPoint, fock: &FockSpace) -> Result<OperatorMatrix> {
    let mut generator = fock.p().scale(Complex64::new(0.0, -pt.nu()));
    generator.add_scaled(Complex64::new(0.0, -pt.mu()), fock.q());
    let e = matrix_exponential(&generator)?;
    Ok(e.scale(Complex64::from_polar(1.0 / (2.0 * PI), pt.x())))
}

/// `⟨m| exp(−iνp − iμq) |n⟩` for `m, n < dim` from the untruncated operator:
/// a displacement by `α = (ν − iμ)/√2`, whose elements are Laguerre polynomials.
pub fn displacement_matrix_elements(mu: f64, nu: f64, dim: usize) -> OperatorMatrix {
    let alpha = Complex64::new(nu, -mu) * std::f64::consts::FRAC_1_SQRT_2;
    let x = alpha.norm_sqr();
    let damping = (-0.5 * x).exp();
    OperatorMatrix::from_fn(dim, |m, n| {
        let (lo, hi) = (m.min(n), m.max(n));
        let ratio = (0.5 * (log_factorial(lo as i32) - log_factorial(hi as i32))).exp();
        let base = if m >= n { alpha } else { -alpha.conj() };
        base.powu((hi - lo) as u32) * (ratio * damping * laguerre_assoc(lo, hi - lo, x))
    })
}
