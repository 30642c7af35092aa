//! Dense complex operators on a finite-dimensional Hilbert space.
//!
//! Everything downstream (spin and oscillator schemes, kernels, reconstruction)
//! is expressed through [`OperatorMatrix`]. The type is a thin newtype over a
//! `nalgebra` dense matrix so that products and adjoints stay cheap, plus a
//! handful of operations the rest of the crate needs: trace, commutator,
//! matrix exponential and seeded random test operators.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A square complex matrix. Rows and columns index the same orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix(DMatrix<Complex64>);

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Builds an operator from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::MalformedOperator { expected: dim * dim, found: entries.len() });
        }
        Ok(Self::from_fn(dim, |i, j| entries[i * dim + j]))
    }

    /// The matrix unit |row⟩⟨col|.
    pub fn basis(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.0[(row, col)] = ONE;
        m
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n * n).map(|k| self.0[(k / n, k % n)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    /// `self += factor * other`, the accumulation used by every reconstruction sum.
    pub fn add_scaled(&mut self, factor: Complex64, other: &OperatorMatrix) {
        self.0.zip_apply(&other.0, |a, b| *a += factor * b);
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// The leading `k × k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        let k = k.min(self.dim());
        Self(self.0.view((0, 0), (k, k)).into_owned())
    }

    /// Embeds `self` in the top-left corner of a `dim × dim` zero matrix.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim });
        }
        let mut out = Self::zeros(dim);
        out.0.view_mut((0, 0), (self.dim(), self.dim())).copy_from(&self.0);
        Ok(out)
    }

    pub fn try_mul(&self, other: &OperatorMatrix) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(Self(&self.0 * &other.0))
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

fn check_same_dim(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

pub fn trace(a: &OperatorMatrix) -> Complex64 {
    a.0.diagonal().iter().sum()
}

/// `Tr[A B]` without forming the product.
pub fn trace_of_product(a: &OperatorMatrix, b: &OperatorMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a.0[(i, k)] * b.0[(k, i)];
        }
    }
    acc
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_same_dim(a, b)?;
    Ok(OperatorMatrix(&a.0 * &b.0 - &b.0 * &a.0))
}

/// `exp(A)` by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2; the
/// series is then summed until the next term no longer changes the partial
/// sum in double precision.
pub fn matrix_exponential(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix_exponential input"));
    }
    let n = a.dim();
    let norm = a.norm_one();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = &a.0 * Complex64::new(0.5f64.powi(squarings), 0.0);

    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        let term_norm: f64 = term.iter().map(|z| z.norm()).sum();
        let sum_norm: f64 = sum.iter().map(|z| z.norm()).sum();
        if term_norm <= 1e-18 * sum_norm {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    let out = OperatorMatrix(sum);
    if !out.is_finite() {
        return Err(Error::NonFinite("matrix_exponential result"));
    }
    Ok(out)
}

/// Seeded random Hermitian matrix from the Gaussian unitary ensemble:
/// diagonal entries are N(0, 1); real and imaginary parts of each
/// off-diagonal entry are independent N(0, 1/2). Generated with ChaCha8
/// seeded from `seed`, filling the upper triangle row by row.
pub fn random_hermitian(dim: usize, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = OperatorMatrix::zeros(dim);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        let d: f64 = StandardNormal.sample(&mut rng);
        m.0[(i, i)] = Complex64::new(d, 0.0);
        for j in i + 1..dim {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex64::new(re * half, im * half);
            m.0[(i, j)] = z;
            m.0[(j, i)] = z.conj();
        }
    }
    m
}

/// Seeded random complex matrix with i.i.d. standard normal real and
/// imaginary parts (Ginibre ensemble).
pub fn random_complex(dim: usize, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    OperatorMatrix::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    })
}

/// Seeded random mixed state `G G† / Tr[G G†]` with `G` from [`random_complex`].
pub fn random_density(dim: usize, seed: u64) -> OperatorMatrix {
    let g = random_complex(dim, seed);
    let rho = &g * &g.adjoint();
    let t = trace(&rho);
    rho.scale(t.inv())
}

/// Wire format: `{"dim": n, "re": [[...]], "im": [[...]]}`, rows in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&OperatorMatrix> for OperatorJson {
    fn from(a: &OperatorMatrix) -> Self {
        let n = a.dim();
        let rows = |f: fn(Complex64) -> f64| {
            (0..n).map(|i| (0..n).map(|j| f(a.get(i, j))).collect()).collect()
        };
        OperatorJson { dim: n, re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl TryFrom<OperatorJson> for OperatorMatrix {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let n = j.dim;
        if n == 0 {
            return Err(Error::Parse("operator dimension must be positive".into()));
        }
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(Error::Parse(format!("\"re\" and \"im\" must both be {n}x{n} arrays")));
        }
        let m = OperatorMatrix::from_fn(n, |r, c| Complex64::new(j.re[r][c], j.im[r][c]));
        if !m.is_finite() {
            return Err(Error::Parse("operator entries must be finite".into()));
        }
        Ok(m)
    }
}

impl OperatorMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&OperatorJson::from(self)).expect("operator serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: OperatorJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        OperatorMatrix::try_from(j)
    }
}

/// Pauli matrices in the basis (|↑⟩, |↓⟩).
pub fn pauli_x() -> OperatorMatrix {
    OperatorMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> OperatorMatrix {
    OperatorMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn pauli_z() -> OperatorMatrix {
    OperatorMatrix::from_diagonal(&[ONE, -ONE])
}
