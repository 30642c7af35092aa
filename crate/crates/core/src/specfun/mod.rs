//! Special functions for angular momentum and quadrature.

mod half;
mod poly;
mod quadrature;
mod wigner;

pub use half::{projection_index, HalfInteger};
pub use poly::{jacobi_polynomial, laguerre_assoc};
pub use quadrature::{gauss_hermite, gauss_legendre, QuadratureRule};
pub use wigner::{log_factorial, rotation_matrix, small_d_matrix, wigner_3j, wigner_d, wigner_small_d};
