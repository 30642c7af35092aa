//! Wigner rotation matrices and 3j symbols.
//!
//! Phase convention: `D^{(j)}_{m′m}(α, β, γ) = e^{i m′ γ} d^{(j)}_{m′m}(β) e^{i m α}`
//! with both exponents positive. `d` is evaluated from the Jacobi-polynomial
//! form on the region `m′ ≥ |m|` and extended with
//! `d_{m′m} = (−1)^{m′−m} d_{mm′} = d_{−m,−m′}`.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::half::{integer_sign, HalfInteger};
use super::poly::jacobi_polynomial;
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;

const LOG_FACTORIAL_TABLE: usize = 512;

fn log_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LOG_FACTORIAL_TABLE];
        for n in 1..LOG_FACTORIAL_TABLE {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

/// `ln(n!)` from the precomputed table.
pub fn log_factorial(n: i32) -> f64 {
    assert!(n >= 0 && (n as usize) < LOG_FACTORIAL_TABLE, "log_factorial({n}) out of table range");
    log_factorials()[n as usize]
}

/// `ln(x!)` for an integer-valued half-integer argument.
fn lf(x: HalfInteger) -> f64 {
    log_factorial(x.as_int().expect("factorial of an integer"))
}

fn check_projection(j: HalfInteger, m: HalfInteger) -> Result<()> {
    if j.twice() < 0 || m.abs() > j || !(j - m).is_integer() {
        return Err(Error::InvalidAngularMomentum(format!("invalid pair j = {j}, m = {m}")));
    }
    Ok(())
}

/// Jacobi form, valid for `mp ≥ |m|`.
fn small_d_direct(j: HalfInteger, mp: HalfInteger, m: HalfInteger, beta: f64) -> f64 {
    let log_ratio = 0.5 * (lf(j + mp) + lf(j - mp) - lf(j + m) - lf(j - m));
    let c = (0.5 * beta).cos();
    let s = (0.5 * beta).sin();
    let pc = (mp + m).as_int().expect("integer exponent");
    let ps = (mp - m).as_int().expect("integer exponent");
    let n = (j - mp).as_int().expect("integer degree") as usize;
    log_ratio.exp()
        * c.powi(pc)
        * s.powi(ps)
        * jacobi_polynomial(n, ps as f64, pc as f64, beta.cos())
}

/// Wigner small-d matrix element `d^{(j)}_{mp,m}(β)`.
pub fn wigner_small_d(j: HalfInteger, mp: HalfInteger, m: HalfInteger, beta: f64) -> Result<f64> {
    check_projection(j, mp)?;
    check_projection(j, m)?;
    let value = if mp >= m.abs() {
        small_d_direct(j, mp, m, beta)
    } else if m >= mp.abs() {
        integer_sign(mp - m) * small_d_direct(j, m, mp, beta)
    } else if -m >= mp.abs() {
        small_d_direct(j, -m, -mp, beta)
    } else {
        integer_sign(mp - m) * small_d_direct(j, -mp, -m, beta)
    };
    Ok(value)
}

/// Wigner D-matrix element `e^{i mp γ} d^{(j)}_{mp,m}(β) e^{i m α}`.
pub fn wigner_d(
    j: HalfInteger,
    mp: HalfInteger,
    m: HalfInteger,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<Complex64> {
    let d = wigner_small_d(j, mp, m, beta)?;
    Ok(Complex64::from_polar(d, mp.value() * gamma + m.value() * alpha))
}

/// The real `(2j+1) × (2j+1)` matrix `[d_{m′m}(β)]`, rows and columns in descending `m`.
pub fn small_d_matrix(j: HalfInteger, beta: f64) -> Result<DMatrix<f64>> {
    if j.twice() < 0 {
        return Err(Error::InvalidAngularMomentum(format!("negative j = {j}")));
    }
    let n = j.multiplicity();
    let ms: Vec<HalfInteger> = j.projections().collect();
    let mut out = DMatrix::zeros(n, n);
    for (r, &mp) in ms.iter().enumerate() {
        for (c, &m) in ms.iter().enumerate() {
            out[(r, c)] = wigner_small_d(j, mp, m, beta)?;
        }
    }
    Ok(out)
}

/// The full rotation matrix `U = [D_{m′m}(α, β, γ)]` as an operator.
pub fn rotation_matrix(j: HalfInteger, alpha: f64, beta: f64, gamma: f64) -> Result<OperatorMatrix> {
    let d = small_d_matrix(j, beta)?;
    let ms: Vec<HalfInteger> = j.projections().collect();
    Ok(OperatorMatrix::from_fn(j.multiplicity(), |r, c| {
        Complex64::from_polar(d[(r, c)], ms[r].value() * gamma + ms[c].value() * alpha)
    }))
}

/// Wigner 3j symbol by the Racah single sum, accumulated in log-factorials.
///
/// Returns exactly zero when the projections do not sum to zero or the
/// triangle condition fails. Projections outside `|m| ≤ j` or with the wrong
/// parity are rejected.
pub fn wigner_3j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger,
    m3: HalfInteger,
) -> Result<f64> {
    check_projection(j1, m1)?;
    check_projection(j2, m2)?;
    check_projection(j3, m3)?;
    if (m1 + m2 + m3).twice() != 0 {
        return Ok(0.0);
    }
    let (t1, t2, t3) = (j1.twice(), j2.twice(), j3.twice());
    if t3 < (t1 - t2).abs() || t3 > t1 + t2 || (t1 + t2 + t3) % 2 != 0 {
        return Ok(0.0);
    }

    let tri = lf(j1 + j2 - j3) + lf(j1 - j2 + j3) + lf(-j1 + j2 + j3) - lf(j1 + j2 + j3 + HalfInteger::from_int(1));
    let proj = lf(j1 + m1) + lf(j1 - m1) + lf(j2 + m2) + lf(j2 - m2) + lf(j3 + m3) + lf(j3 - m3);
    let log_prefactor = 0.5 * (tri + proj);

    let as_int = |x: HalfInteger| x.as_int().expect("integer combination");
    let k_min = 0.max(as_int(j2 - j3 - m1)).max(as_int(j1 - j3 + m2));
    let k_max = as_int(j1 + j2 - j3).min(as_int(j1 - m1)).min(as_int(j2 + m2));

    // Leading term from logarithms, the rest by the exact term ratio so that
    // rounding in the logarithms does not feed the alternating cancellation.
    let a = as_int(j1 + j2 - j3);
    let b = as_int(j1 - m1);
    let c = as_int(j2 + m2);
    let d = as_int(j3 - j2 + m1);
    let e = as_int(j3 - j1 - m2);
    let lead = log_factorial(k_min)
        + log_factorial(d + k_min)
        + log_factorial(e + k_min)
        + log_factorial(a - k_min)
        + log_factorial(b - k_min)
        + log_factorial(c - k_min);
    let mut term = 1.0;
    let mut series = 0.0;
    for k in k_min..=k_max {
        series += term;
        let num = ((a - k) * (b - k) * (c - k)) as f64;
        let den = ((k + 1) * (d + k + 1) * (e + k + 1)) as f64;
        term *= -num / den;
    }
    let sign = if k_min % 2 == 0 { 1.0 } else { -1.0 };
    let sum = sign * (log_prefactor - lead).exp() * series;
    Ok(integer_sign(j1 - j2 - m3) * sum)
}
