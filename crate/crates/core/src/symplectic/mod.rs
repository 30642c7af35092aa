//! Symplectic tomography on a truncated oscillator basis.
//!
//! The dequantizer is `δ(X − μq − νp)` and the quantizer
//! `(1/2π) exp(iX − iνp − iμq)`. Every direction `(μ, ν) = r(cos θ, sin θ)`
//! reduces to the rotated quadrature `O(θ) = cos θ·q + sin θ·p = R q R†` with
//! `R = e^{iθ n}`, so a single tridiagonal eigen-solve of `q` serves all angles.

mod kernel;
mod quantizer;
mod reconstruct;
mod tomogram;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_tridiagonal_eigen, TridiagonalEigen};
use crate::operator::OperatorMatrix;

pub use kernel::{
    star_w0_idempotency, symplectic_kernel_closed_form, IdempotencyResidual, IdempotencyQuadrature, KernelClosedForm,
    IDEMPOTENCY_SAMPLE_POINTS,
};
pub use quantizer::{displacement_matrix_elements, displacement_quantizer};
pub use reconstruct::{
    convergence_ladder, symplectic_reconstruct, LadderRung, ReconstructionGrid, CONVERGENCE_LADDER,
};
pub use tomogram::{
    spectral_direction, symplectic_tomogram, theta_nodes, SampledTomogram, SpectralTomogram, SymplecticTomogram,
    TomogramMode, XGrid,
};

/// Truncated oscillator space of dimension `n_trunc`.
///
/// The quadrature spectrum used for tomograms and reconstruction comes from
/// `q` truncated at `quad_dim ≥ n_trunc`; operators are embedded by padding
/// with zeros. A larger `quad_dim` resolves the continuous spectrum more finely
/// without changing the operator space.
#[derive(Clone, Debug)]
pub struct FockSpace {
    n_trunc: usize,
    quad_dim: usize,
    q: OperatorMatrix,
    p: OperatorMatrix,
    spectrum: TridiagonalEigen,
}

impl FockSpace {
    pub fn new(n_trunc: usize) -> Result<Self> {
        Self::with_quadrature_dim(n_trunc, n_trunc)
    }

    pub fn with_quadrature_dim(n_trunc: usize, quad_dim: usize) -> Result<Self> {
        if n_trunc == 0 {
            return Err(Error::InvalidParameter("truncation must be at least 1".into()));
        }
        if quad_dim < n_trunc {
            return Err(Error::InvalidParameter(format!(
                "quadrature dimension {quad_dim} is smaller than the truncation {n_trunc}"
            )));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ladder = |k: usize| (k as f64).sqrt();
        let q = OperatorMatrix::from_fn(n_trunc, |r, c| {
            if c == r + 1 {
                Complex64::new(ladder(c) * s, 0.0)
            } else if r == c + 1 {
                Complex64::new(ladder(r) * s, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        // p = (a − a†)/(i√2)
        let p = OperatorMatrix::from_fn(n_trunc, |r, c| {
            if c == r + 1 {
                Complex64::new(0.0, -ladder(c) * s)
            } else if r == c + 1 {
                Complex64::new(0.0, ladder(r) * s)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let off: Vec<f64> = (1..quad_dim).map(|k| ladder(k) * s).collect();
        let spectrum = symmetric_tridiagonal_eigen(&vec![0.0; quad_dim], &off, n_trunc)?;
        Ok(FockSpace { n_trunc, quad_dim, q, p, spectrum })
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn quad_dim(&self) -> usize {
        self.quad_dim
    }

    pub fn q(&self) -> &OperatorMatrix {
        &self.q
    }

    pub fn p(&self) -> &OperatorMatrix {
        &self.p
    }

    /// Eigenvalues of `q` at `quad_dim`, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Component `n < n_trunc` of eigenvector `k` of `q`; real.
    pub fn eigenvector_component(&self, n: usize, k: usize) -> f64 {
        self.spectrum.component(n, k)
    }

    /// `cos θ·q + sin θ·p` on the truncated space.
    pub fn rotated_quadrature(&self, theta: f64) -> OperatorMatrix {
        let mut o = self.q.scale(Complex64::new(theta.cos(), 0.0));
        o.add_scaled(Complex64::new(theta.sin(), 0.0), &self.p);
        o
    }

    /// Leading `n_trunc` components of the eigenvectors of `O(θ)` at
    /// `quad_dim`, as an `n_trunc × quad_dim` row-major array.
    pub fn rotated_eigenvectors(&self, theta: f64) -> Vec<Complex64> {
        let (n, m) = (self.n_trunc, self.quad_dim);
        let mut v = Vec::with_capacity(n * m);
        for row in 0..n {
            let phase = Complex64::from_polar(1.0, theta * row as f64);
            v.extend((0..m).map(|k| phase * self.spectrum.component(row, k)));
        }
        v
    }
}

/// A point `(X, μ, ν)` with `(μ, ν) ≠ (0, 0)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SymplecticPoint {
    x: f64,
    mu: f64,
    nu: f64,
}

impl SymplecticPoint {
    pub fn new(x: f64, mu: f64, nu: f64) -> Result<Self> {
        if !(x.is_finite() && mu.is_finite() && nu.is_finite()) {
            return Err(Error::NonFinite("symplectic point"));
        }
        if mu == 0.0 && nu == 0.0 {
            return Err(Error::InvalidParameter("the direction (μ, ν) must not vanish".into()));
        }
        Ok(SymplecticPoint { x, mu, nu })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.x, lambda * self.mu, lambda * self.nu)
    }
}

/// Oscillator ground state: `[π(μ²+ν²)]^{−1/2} exp(−X²/(μ²+ν²))`.
pub fn ground_state_tomogram(pt: &SymplecticPoint) -> f64 {
    let r2 = pt.mu * pt.mu + pt.nu * pt.nu;
    (-pt.x * pt.x / r2).exp() / (std::f64::consts::PI * r2).sqrt()
}
