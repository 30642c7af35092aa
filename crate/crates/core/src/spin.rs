//! Spin-`j` tomography on a finite Euler-angle grid.
//!
//! The tomogram `w(m1, α, β) = ⟨j m1| U A U† |j m1⟩` with `U = D^{(j)}(α, β, 0)`
//! is the symbol of `A` for the dequantizer `U†|j m1⟩⟨j m1|U`. Its inverse uses
//! the operators `B̂_{m1}(α, β)` assembled from 3j symbols, and the angular
//! integral is replaced by a uniform α rule times Gauss–Legendre in `cos β`,
//! which is exact for the trigonometric polynomials involved.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{trace, OperatorMatrix, ZERO};
use crate::scheme::{fmt_f64, star_kernel, KernelTensor, Scheme, SchemeParts};
use crate::specfun::{gauss_legendre, projection_index, rotation_matrix, wigner_3j, wigner_d, wigner_small_d, HalfInteger};

fn check_spin(j: HalfInteger) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::InvalidAngularMomentum(format!("spin must be nonnegative, got {j}")));
    }
    Ok(())
}

fn check_projection(j: HalfInteger, m: HalfInteger) -> Result<()> {
    if m.abs() > j || !(j - m).is_integer() {
        return Err(Error::InvalidAngularMomentum(format!("m = {m} is not a projection of j = {j}")));
    }
    Ok(())
}

/// Euler-angle grid: α uniform on `[0, 2π)`, β at Gauss–Legendre nodes in `cos β`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularGrid {
    j: HalfInteger,
    n_alpha: usize,
    n_beta: usize,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    /// Per `(α, β)` pair, index `ia · n_beta + ib`; sums to 1.
    weights: Vec<f64>,
}

impl AngularGrid {
    pub fn min_alpha(j: HalfInteger) -> usize {
        (2 * j.twice() + 1).max(1) as usize
    }

    pub fn min_beta(j: HalfInteger) -> usize {
        (j.twice() + 1).max(1) as usize
    }

    pub fn new(j: HalfInteger, n_alpha: usize, n_beta: usize) -> Result<Self> {
        check_spin(j)?;
        let (min_alpha, min_beta) = (Self::min_alpha(j), Self::min_beta(j));
        if n_alpha < min_alpha || n_beta < min_beta {
            return Err(Error::GridTooCoarse { j: j.to_string(), min_alpha, min_beta });
        }
        let rule = gauss_legendre(n_beta)?;
        let alphas: Vec<f64> = (0..n_alpha).map(|i| 2.0 * PI * i as f64 / n_alpha as f64).collect();
        // descending cos β gives ascending β
        let betas: Vec<f64> = rule.nodes.iter().rev().map(|x| x.acos()).collect();
        let beta_weights: Vec<f64> = rule.weights.iter().rev().copied().collect();
        let da = 2.0 * PI / n_alpha as f64;
        let gamma_and_norm = 2.0 * PI / (8.0 * PI * PI);
        let weights = (0..n_alpha * n_beta).map(|k| da * beta_weights[k % n_beta] * gamma_and_norm).collect();
        Ok(AngularGrid { j, n_alpha, n_beta, alphas, betas, weights })
    }

    /// `n_alpha = 4j + 2`, `n_beta = 2j + 2`.
    pub fn default_for(j: HalfInteger) -> Result<Self> {
        check_spin(j)?;
        Self::new(j, (2 * j.twice() + 2) as usize, (j.twice() + 2) as usize)
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Number of `(α, β)` pairs.
    pub fn len(&self) -> usize {
        self.n_alpha * self.n_beta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(α, β)` of pair `k = ia · n_beta + ib`.
    pub fn angles(&self, k: usize) -> (f64, f64) {
        (self.alphas[k / self.n_beta], self.betas[k % self.n_beta])
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Tomogram values indexed `(m1, α, β)` with `m1` in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinTomogram {
    grid: AngularGrid,
    values: Vec<Complex64>,
}

impl SpinTomogram {
    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn j(&self) -> HalfInteger {
        self.grid.j
    }

    /// Flat values, index `(m_index · n_alpha + ia) · n_beta + ib`; the same
    /// order as the points of [`spin_scheme`].
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, m_index: usize, ia: usize, ib: usize) -> Complex64 {
        self.values[(m_index * self.grid.n_alpha + ia) * self.grid.n_beta + ib]
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// CSV `m1_twice,alpha,beta,value`. Only real tomograms can be written.
    pub fn to_csv(&self) -> Result<String> {
        if self.max_imag() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "tomogram has imaginary parts up to {:e}; the operator is not Hermitian",
                self.max_imag()
            )));
        }
        let mut out = String::from("m1_twice,alpha,beta,value\n");
        let g = &self.grid;
        for (mi, m) in g.j.projections().enumerate() {
            for ia in 0..g.n_alpha {
                for ib in 0..g.n_beta {
                    let v = self.value(mi, ia, ib).re;
                    writeln!(out, "{},{},{},{}", m.twice(), fmt_f64(g.alphas[ia]), fmt_f64(g.betas[ib]), fmt_f64(v))
                        .unwrap();
                }
            }
        }
        Ok(out)
    }

    /// Parses a CSV written by [`SpinTomogram::to_csv`] on `grid`.
    pub fn from_csv(text: &str, grid: &AngularGrid) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty tomogram file".into()))?;
        if header.split(',').map(str::trim).collect::<Vec<_>>() != ["m1_twice", "alpha", "beta", "value"] {
            return Err(Error::Parse(format!("unexpected tomogram header {header:?}")));
        }
        let n = grid.j.multiplicity() * grid.len();
        let mut values = vec![None; n];
        for (lineno, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 2));
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let m2: i32 = f[0].parse().map_err(|_| bad("bad m1_twice"))?;
            let nums: Vec<f64> =
                f[1..].iter().map(|t| t.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad number"))?;
            let m = HalfInteger::from_twice(m2);
            check_projection(grid.j, m).map_err(|_| bad("projection out of range"))?;
            let find = |nodes: &[f64], x: f64| nodes.iter().position(|&y| (y - x).abs() <= 1e-12 * y.abs().max(1.0));
            let ia = find(&grid.alphas, nums[0]).ok_or_else(|| bad("alpha is not a grid node"))?;
            let ib = find(&grid.betas, nums[1]).ok_or_else(|| bad("beta is not a grid node"))?;
            let idx = (projection_index(grid.j, m) * grid.n_alpha + ia) * grid.n_beta + ib;
            values[idx] = Some(Complex64::new(nums[2], 0.0));
        }
        let values = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse("tomogram does not cover the grid".into()))?;
        Ok(SpinTomogram { grid: grid.clone(), values })
    }
}

/// Rotated diagonal `⟨m1| U A U† |m1⟩` for every `m1` at one angle, with `U = D(α, β, γ)`.
pub fn spin_tomogram_at(a: &OperatorMatrix, j: HalfInteger, alpha: f64, beta: f64, gamma: f64) -> Result<Vec<Complex64>> {
    check_spin(j)?;
    if a.dim() != j.multiplicity() {
        return Err(Error::DimensionMismatch { expected: j.multiplicity(), found: a.dim() });
    }
    let u = rotation_matrix(j, alpha, beta, gamma)?;
    let rotated = &(&u * a) * &u.adjoint();
    Ok((0..a.dim()).map(|i| rotated.get(i, i)).collect())
}

pub fn spin_tomogram(a: &OperatorMatrix, grid: &AngularGrid) -> Result<SpinTomogram> {
    spin_tomogram_with_gamma(a, grid, 0.0)
}

/// As [`spin_tomogram`] but with the third Euler angle set to `gamma`.
pub fn spin_tomogram_with_gamma(a: &OperatorMatrix, grid: &AngularGrid, gamma: f64) -> Result<SpinTomogram> {
    let dim = grid.j.multiplicity();
    if a.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
    }
    let per_angle = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (alpha, beta) = grid.angles(k);
            spin_tomogram_at(a, grid.j, alpha, beta, gamma)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![ZERO; dim * grid.len()];
    for (k, diag) in per_angle.iter().enumerate() {
        for (mi, v) in diag.iter().enumerate() {
            values[mi * grid.len() + k] = *v;
        }
    }
    Ok(SpinTomogram { grid: grid.clone(), values })
}

fn check_coupling(j: HalfInteger, j3: HalfInteger) -> Result<i32> {
    check_spin(j)?;
    match j3.as_int() {
        Some(l) if l >= 0 && l <= j.twice() => Ok(l),
        _ => Err(Error::InvalidAngularMomentum(format!("j3 = {j3} must be an integer in [0, {}]", j.twice()))),
    }
}

/// `Φ = (−1)^{m2′} Σ_{m3} D^{(j3)}_{0 m3}(α, β, 0) (j j j3; m1′ −m2′ m3)`; only
/// `m3 = m2′ − m1′` survives.
pub fn phi_on_sphere(
    j: HalfInteger,
    j3: HalfInteger,
    m1p: HalfInteger,
    m2p: HalfInteger,
    alpha: f64,
    beta: f64,
) -> Result<Complex64> {
    check_coupling(j, j3)?;
    check_projection(j, m1p)?;
    check_projection(j, m2p)?;
    let m3 = m2p - m1p;
    if m3.abs() > j3 {
        return Ok(ZERO);
    }
    let d = wigner_d(j3, HalfInteger::ZERO, m3, alpha, beta, 0.0)?;
    Ok(m2p.minus_one_pow() * d * wigner_3j(j, j, j3, m1p, -m2p, m3)?)
}

/// `Â^{(j3)} = (2j3+1)² Σ |m1′⟩ Φ ⟨m2′|`.
pub fn sphere_operator(j: HalfInteger, j3: HalfInteger, alpha: f64, beta: f64) -> Result<OperatorMatrix> {
    check_coupling(j, j3)?;
    let ms: Vec<HalfInteger> = j.projections().collect();
    let pref = ((j3.twice() + 1) as f64).powi(2);
    let mut out = OperatorMatrix::zeros(ms.len());
    for (r, &m1p) in ms.iter().enumerate() {
        for (c, &m2p) in ms.iter().enumerate() {
            out.set(r, c, phi_on_sphere(j, j3, m1p, m2p, alpha, beta)? * pref);
        }
    }
    Ok(out)
}

/// `B̂_{m1} = (−1)^{m1} Σ_{j3=0}^{2j} (j j j3; m1 −m1 0) Â^{(j3)}`, before calibration.
pub fn b_operator(j: HalfInteger, m1: HalfInteger, alpha: f64, beta: f64) -> Result<OperatorMatrix> {
    check_spin(j)?;
    check_projection(j, m1)?;
    let mut out = OperatorMatrix::zeros(j.multiplicity());
    for l in 0..=j.twice() {
        let j3 = HalfInteger::from_int(l);
        let c = wigner_3j(j, j, j3, m1, -m1, HalfInteger::ZERO)?;
        if c != 0.0 {
            out.add_scaled(m1.minus_one_pow() * c, &sphere_operator(j, j3, alpha, beta)?);
        }
    }
    Ok(out)
}

/// Angle-independent factors of the quantizers, tabulated once per `j`.
struct QuantizerTables {
    j: HalfInteger,
    /// `[l][r][c]`: `(2l+1)² (−1)^{m2′} (j j l; m1′ −m2′ m3)`, zero outside the band.
    sphere: Vec<Vec<Complex64>>,
    /// `[m_index][l]`: `(−1)^{m1} (j j l; m1 −m1 0)`.
    coupling: Vec<Vec<Complex64>>,
}

impl QuantizerTables {
    fn new(j: HalfInteger) -> Result<Self> {
        let ms: Vec<HalfInteger> = j.projections().collect();
        let n = ms.len();
        let mut sphere = Vec::new();
        for l in 0..=j.twice() {
            let j3 = HalfInteger::from_int(l);
            let pref = ((2 * l + 1) as f64).powi(2);
            let mut t = vec![ZERO; n * n];
            for (r, &m1p) in ms.iter().enumerate() {
                for (c, &m2p) in ms.iter().enumerate() {
                    let m3 = m2p - m1p;
                    if m3.abs() <= j3 {
                        t[r * n + c] = m2p.minus_one_pow() * pref * wigner_3j(j, j, j3, m1p, -m2p, m3)?;
                    }
                }
            }
            sphere.push(t);
        }
        let coupling = ms
            .iter()
            .map(|&m| {
                (0..=j.twice())
                    .map(|l| Ok(m.minus_one_pow() * wigner_3j(j, j, HalfInteger::from_int(l), m, -m, HalfInteger::ZERO)?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantizerTables { j, sphere, coupling })
    }

    /// All `B̂_{m1}(α, β)`, descending `m1`.
    fn b_operators(&self, alpha: f64, beta: f64) -> Result<Vec<OperatorMatrix>> {
        let ms: Vec<HalfInteger> = self.j.projections().collect();
        let n = ms.len();
        let mut spheres = Vec::with_capacity(self.sphere.len());
        for (l, table) in self.sphere.iter().enumerate() {
            let j3 = HalfInteger::from_int(l as i32);
            let mut a = OperatorMatrix::zeros(n);
            for r in 0..n {
                for c in 0..n {
                    let t = table[r * n + c];
                    if t != ZERO {
                        let m3 = ms[c] - ms[r];
                        let d = wigner_small_d(j3, HalfInteger::ZERO, m3, beta)?;
                        a.set(r, c, t * Complex64::from_polar(d, m3.value() * alpha));
                    }
                }
            }
            spheres.push(a);
        }
        Ok(self
            .coupling
            .iter()
            .map(|row| {
                let mut b = OperatorMatrix::zeros(n);
                for (c, a) in row.iter().zip(&spheres) {
                    if *c != ZERO {
                        b.add_scaled(*c, a);
                    }
                }
                b
            })
            .collect())
    }
}

struct RawSpinScheme {
    labels: Vec<Vec<f64>>,
    dequantizers: Vec<OperatorMatrix>,
    quantizers: Vec<OperatorMatrix>,
    weights: Vec<f64>,
}

fn raw_spin_scheme(grid: &AngularGrid) -> Result<RawSpinScheme> {
    let j = grid.j;
    let tables = QuantizerTables::new(j)?;
    let per_angle = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (alpha, beta) = grid.angles(k);
            let u = rotation_matrix(j, alpha, beta, 0.0)?;
            let n = u.dim();
            let deq: Vec<OperatorMatrix> =
                (0..n).map(|m| OperatorMatrix::from_fn(n, |r, c| u.get(m, r).conj() * u.get(m, c))).collect();
            Ok((deq, tables.b_operators(alpha, beta)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let n_points = j.multiplicity() * grid.len();
    let mut raw = RawSpinScheme {
        labels: Vec::with_capacity(n_points),
        dequantizers: Vec::with_capacity(n_points),
        quantizers: Vec::with_capacity(n_points),
        weights: Vec::with_capacity(n_points),
    };
    for (mi, m) in j.projections().enumerate() {
        for (k, (deq, quant)) in per_angle.iter().enumerate() {
            let (alpha, beta) = grid.angles(k);
            raw.labels.push(vec![m.twice() as f64, alpha, beta]);
            raw.dequantizers.push(deq[mi].clone());
            raw.quantizers.push(quant[mi].clone());
            raw.weights.push(grid.weight(k));
        }
    }
    Ok(raw)
}

fn calibration_of(raw: &RawSpinScheme, dim: usize) -> Complex64 {
    let mut sum = OperatorMatrix::zeros(dim);
    for (w, q) in raw.weights.iter().zip(&raw.quantizers) {
        sum.add_scaled(Complex64::new(*w, 0.0), q);
    }
    trace(&sum) / dim as f64
}

/// `Tr[Σ_x w(x) B̂(x)] / (2j+1)`: the constant by which the uncalibrated
/// reconstruction of the identity differs from the identity.
pub fn spin_calibration(grid: &AngularGrid) -> Result<Complex64> {
    Ok(calibration_of(&raw_spin_scheme(grid)?, grid.j.multiplicity()))
}

/// The spin scheme on `grid`: points `(m1, α, β)` in tomogram order,
/// dequantizers `U†|m1⟩⟨m1|U`, quantizers `B̂_{m1}(α, β)` divided by the
/// identity calibration, weights from the grid.
pub fn spin_scheme(grid: &AngularGrid) -> Result<Scheme> {
    let dim = grid.j.multiplicity();
    let mut raw = raw_spin_scheme(grid)?;
    let c = calibration_of(&raw, dim);
    log::info!("spin j = {}: identity calibration factor {} {:+}i", grid.j, c.re, c.im);
    if c.norm() < 1e-300 {
        return Err(Error::InvalidParameter("quantizers integrate to zero; calibration impossible".into()));
    }
    let inv = c.inv();
    for q in &mut raw.quantizers {
        *q = q.scale(inv);
    }
    Scheme::new(SchemeParts {
        name: format!("spin-{}", grid.j),
        hilbert_dim: dim,
        label_names: vec!["m1_twice".into(), "alpha".into(), "beta".into()],
        labels: raw.labels,
        dequantizers: raw.dequantizers,
        quantizers: raw.quantizers,
        weights: raw.weights,
        round_trip_tolerance: 1e-10,
    })
}

/// The scheme on `grid` together with its star-product kernel.
pub fn spin_star_kernel(grid: &AngularGrid) -> Result<(Scheme, KernelTensor)> {
    let s = spin_scheme(grid)?;
    let k = star_kernel(&s);
    Ok((s, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{random_density, random_hermitian, ONE};
    use crate::scheme::{operator_of, symbol_of};

    fn h(twice: i32) -> HalfInteger {
        HalfInteger::from_twice(twice)
    }

    #[test]
    fn grid_weights_sum_to_one() {
        for twice in 0..=10 {
            let g = AngularGrid::default_for(h(twice)).unwrap();
            assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(g.betas().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn coarse_grid_reports_minimum() {
        match AngularGrid::new(h(2), 4, 3) {
            Err(Error::GridTooCoarse { min_alpha, min_beta, .. }) => assert_eq!((min_alpha, min_beta), (5, 3)),
            other => panic!("{other:?}"),
        }
        assert!(AngularGrid::new(h(2), 5, 3).is_ok());
        assert!(AngularGrid::new(h(-1), 5, 3).is_err());
    }

    #[test]
    fn identity_tomogram_is_one() {
        for twice in [1, 2, 5] {
            let g = AngularGrid::default_for(h(twice)).unwrap();
            let t = spin_tomogram(&OperatorMatrix::identity(twice as usize + 1), &g).unwrap();
            assert!(t.values().iter().all(|v| (v - ONE).norm() < 1e-13));
        }
    }

    #[test]
    fn spin_half_projector_tomogram() {
        let g = AngularGrid::new(h(1), 5, 4).unwrap();
        let p = OperatorMatrix::basis(2, 0, 0);
        let t = spin_tomogram(&p, &g).unwrap();
        for ia in 0..g.n_alpha() {
            for (ib, &b) in g.betas().iter().enumerate() {
                assert!((t.value(0, ia, ib).re - (b / 2.0).cos().powi(2)).abs() < 1e-14);
                assert!((t.value(1, ia, ib).re - (b / 2.0).sin().powi(2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tomogram_sums_to_trace() {
        let g = AngularGrid::default_for(h(3)).unwrap();
        let a = random_hermitian(4, 17);
        let t = spin_tomogram(&a, &g).unwrap();
        let tr = trace(&a);
        for k in 0..g.len() {
            let s: Complex64 = (0..4).map(|m| t.values()[m * g.len() + k]).sum();
            assert!((s - tr).norm() < 1e-12);
        }
        assert!(t.max_imag() < 1e-12);
    }

    #[test]
    fn tomogram_ignores_gamma() {
        let g = AngularGrid::default_for(h(4)).unwrap();
        let a = random_hermitian(5, 3);
        let t0 = spin_tomogram(&a, &g).unwrap();
        let t1 = spin_tomogram_with_gamma(&a, &g, 1.234).unwrap();
        let diff = t0.values().iter().zip(t1.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn density_tomograms_are_probabilities() {
        let g = AngularGrid::default_for(h(3)).unwrap();
        for seed in 0..5 {
            let t = spin_tomogram(&random_density(4, seed), &g).unwrap();
            assert!(t.values().iter().all(|v| v.re >= -1e-10 && v.re <= 1.0 + 1e-10));
        }
    }

    /// Euler angles of an SU(2) matrix in the `e^{+i…}` convention, up to sign.
    fn euler_angles(v: &OperatorMatrix) -> (f64, f64) {
        let (vpp, vpm) = (v.get(0, 0), v.get(0, 1));
        let beta = 2.0 * vpm.norm().atan2(vpp.norm());
        let dpp = wigner_small_d(h(1), h(1), h(1), beta).unwrap();
        let dpm = wigner_small_d(h(1), h(1), h(-1), beta).unwrap();
        let alpha = (vpp / vpm).arg() - (Complex64::new(dpp, 0.0) / dpm).arg();
        (alpha, beta)
    }

    #[test]
    fn rotational_covariance() {
        let j = h(2);
        let a = random_hermitian(3, 8);
        let (a0, b0) = (0.7, 1.3);
        let r_half = rotation_matrix(h(1), a0, b0, 0.0).unwrap();
        let r = rotation_matrix(j, a0, b0, 0.0).unwrap();
        let rotated = &(&r * &a) * &r.adjoint();
        let g = AngularGrid::default_for(j).unwrap();
        for k in 0..g.len() {
            let (alpha, beta) = g.angles(k);
            let composed = &rotation_matrix(h(1), alpha, beta, 0.0).unwrap() * &r_half;
            let (ca, cb) = euler_angles(&composed);
            let lhs = spin_tomogram_at(&rotated, j, alpha, beta, 0.0).unwrap();
            let rhs = spin_tomogram_at(&a, j, ca, cb, 0.0).unwrap();
            for (x, y) in lhs.iter().zip(&rhs) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn z_rotation_shifts_alpha_index() {
        let j = h(3);
        let g = AngularGrid::default_for(j).unwrap();
        let a = random_hermitian(4, 2);
        let shift = 3;
        let r = rotation_matrix(j, g.alphas()[shift], 0.0, 0.0).unwrap();
        let rotated = &(&r * &a) * &r.adjoint();
        let (t, tr) = (spin_tomogram(&a, &g).unwrap(), spin_tomogram(&rotated, &g).unwrap());
        for m in 0..4 {
            for ia in 0..g.n_alpha() {
                for ib in 0..g.n_beta() {
                    let moved = (ia + shift) % g.n_alpha();
                    assert!((tr.value(m, ia, ib) - t.value(m, moved, ib)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        // band selection rule
        assert_eq!(phi_on_sphere(h(2), h(0), h(2), h(-2), 0.3, 0.4).unwrap(), ZERO);
        assert_eq!(phi_on_sphere(h(0), h(0), h(0), h(0), 0.3, 0.4).unwrap(), ONE);
        let got = phi_on_sphere(h(1), h(2), h(1), h(1), 0.0, PI / 2.0).unwrap();
        let d = wigner_d(h(2), h(0), h(0), 0.0, PI / 2.0, 0.0).unwrap();
        let c = wigner_3j(h(1), h(1), h(2), h(1), h(-1), h(0)).unwrap();
        assert!((got - h(1).minus_one_pow() * d * c).norm() < 1e-15);
        assert!(phi_on_sphere(h(1), h(3), h(1), h(1), 0.0, 0.0).is_err());
        assert!(phi_on_sphere(h(1), h(1), h(1), h(1), 0.0, 0.0).is_err());
    }

    #[test]
    fn scalar_sphere_operator_is_constant_diagonal() {
        for twice in 1..=6 {
            let j = h(twice);
            let a = sphere_operator(j, h(0), 0.4, 1.9).unwrap();
            let first = a.get(0, 0);
            assert!((first.norm() - 1.0 / ((twice + 1) as f64).sqrt()).abs() < 1e-14);
            let expected = OperatorMatrix::identity(a.dim()).scale(first);
            assert!(a.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn sphere_operator_band_structure() {
        let j = h(4);
        for l in 0..=4 {
            let a = sphere_operator(j, HalfInteger::from_int(l), 0.9, 2.2).unwrap();
            for r in 0..5usize {
                for c in 0..5usize {
                    if r.abs_diff(c) > l as usize {
                        assert_eq!(a.get(r, c), ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_operator_matches_phi() {
        let (j, j3) = (h(1), h(2));
        let a = sphere_operator(j, j3, 1.1, 0.6).unwrap();
        for (r, m1p) in j.projections().enumerate() {
            for (c, m2p) in j.projections().enumerate() {
                let phi = phi_on_sphere(j, j3, m1p, m2p, 1.1, 0.6).unwrap();
                assert!((a.get(r, c) - phi * 9.0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn b_operator_examples() {
        let b = b_operator(h(0), h(0), 0.5, 0.5).unwrap();
        assert_eq!(b.dim(), 1);
        assert!((b.get(0, 0) - ONE).norm() < 1e-15);
        assert!(b_operator(h(2), h(4), 0.0, 0.0).is_err());

        // dropping the top coupling removes exactly its term
        let (j, m) = (h(2), h(2));
        let full = b_operator(j, m, 0.3, 1.2).unwrap();
        let top = sphere_operator(j, h(4), 0.3, 1.2).unwrap();
        let c = wigner_3j(j, j, h(4), m, -m, h(0)).unwrap();
        let mut truncated = OperatorMatrix::zeros(3);
        for l in 0..2 {
            let cl = wigner_3j(j, j, HalfInteger::from_int(l), m, -m, h(0)).unwrap();
            truncated.add_scaled(Complex64::new(cl, 0.0), &sphere_operator(j, HalfInteger::from_int(l), 0.3, 1.2).unwrap());
        }
        let truncated = truncated.scale(m.minus_one_pow());
        let diff = &full - &truncated;
        assert!(diff.max_abs_diff(&top.scale(m.minus_one_pow() * c)) < 1e-13);
    }

    #[test]
    fn tabulated_quantizers_match_direct_construction() {
        let j = h(3);
        let tables = QuantizerTables::new(j).unwrap();
        let fast = tables.b_operators(0.8, 2.0).unwrap();
        for (mi, m) in j.projections().enumerate() {
            let direct = b_operator(j, m, 0.8, 2.0).unwrap();
            assert!(fast[mi].max_abs_diff(&direct) < 1e-13);
        }
    }

    #[test]
    fn calibration_is_a_sign() {
        for twice in 0..=6 {
            let g = AngularGrid::default_for(h(twice)).unwrap();
            let c = spin_calibration(&g).unwrap();
            let expected = if twice % 2 == 0 { 1.0 } else { -1.0 };
            assert!((c - expected).norm() < 1e-12, "2j={twice}: {c}");
        }
    }

    #[test]
    fn symbol_matches_tomogram() {
        let g = AngularGrid::default_for(h(3)).unwrap();
        let s = spin_scheme(&g).unwrap();
        let a = random_hermitian(4, 5);
        let f = symbol_of(&a, &s).unwrap();
        let t = spin_tomogram(&a, &g).unwrap();
        for (x, y) in f.values().iter().zip(t.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_round_trip() {
        let g = AngularGrid::default_for(h(1)).unwrap();
        let s = spin_scheme(&g).unwrap();
        let f = symbol_of(&OperatorMatrix::identity(2), &s).unwrap();
        assert!(f.values().iter().all(|v| (v - ONE).norm() < 1e-14));
        let back = operator_of(&s.constant_symbol(ONE), &s).unwrap();
        assert!(back.max_abs_diff(&OperatorMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn basis_round_trip_up_to_five_halves() {
        for twice in 1..=5 {
            let g = AngularGrid::default_for(h(twice)).unwrap();
            let s = spin_scheme(&g).unwrap();
            let n = s.hilbert_dim();
            for a in crate::scheme::test_operator_family(n, 0, 0) {
                let back = operator_of(&symbol_of(&a, &s).unwrap(), &s).unwrap();
                assert!(back.max_abs_diff(&a) < 1e-10, "2j={twice}");
            }
        }
    }

    #[test]
    fn reconstruction_of_hermitian_is_hermitian() {
        let g = AngularGrid::default_for(h(2)).unwrap();
        let s = spin_scheme(&g).unwrap();
        for seed in 0..5 {
            let a = random_hermitian(3, seed);
            let f = symbol_of(&a, &s).unwrap();
            let real = s.symbol_from_values(f.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect()).unwrap();
            assert!(operator_of(&real, &s).unwrap().is_hermitian(1e-10));
        }
    }

    #[test]
    fn minimal_and_doubled_grids_agree() {
        for twice in [1, 2, 3] {
            let j = h(twice);
            let a = random_hermitian(j.multiplicity(), 9);
            let coarse = AngularGrid::new(j, AngularGrid::min_alpha(j), AngularGrid::min_beta(j)).unwrap();
            let fine = AngularGrid::new(j, 2 * coarse.n_alpha(), 2 * coarse.n_beta()).unwrap();
            let rec = |g: &AngularGrid| {
                let s = spin_scheme(g).unwrap();
                operator_of(&symbol_of(&a, &s).unwrap(), &s).unwrap()
            };
            let (rc, rf) = (rec(&coarse), rec(&fine));
            assert!(rc.max_abs_diff(&rf) < 1e-12);
            assert!(rc.max_abs_diff(&a) < 1e-10);
        }
    }

    #[test]
    fn tomogram_csv_round_trip() {
        let g = AngularGrid::default_for(h(1)).unwrap();
        let t = spin_tomogram(&random_hermitian(2, 1), &g).unwrap();
        let text = t.to_csv().unwrap();
        assert!(text.starts_with("m1_twice,alpha,beta,value\n"));
        let back = SpinTomogram::from_csv(&text, &g).unwrap();
        assert!(back.values().iter().zip(t.values()).all(|(b, v)| b.re == v.re && b.im == 0.0));
        let complex = spin_tomogram(&crate::operator::random_complex(2, 1), &g).unwrap();
        assert!(complex.to_csv().is_err());
        let other = AngularGrid::new(h(1), 7, 4).unwrap();
        assert!(SpinTomogram::from_csv(&text, &other).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = AngularGrid::default_for(h(1)).unwrap();
        assert!(matches!(spin_tomogram(&OperatorMatrix::identity(3), &g), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spin_kernel_has_no_negligible_entries() {
        // the band structure of the sphere operators does not survive the
        // contraction with dense rotated projectors: every entry is kept
        for twice in [2, 3] {
            let (s, k) = spin_star_kernel(&AngularGrid::default_for(h(twice)).unwrap()).unwrap();
            let n = s.len();
            assert_eq!(k.count_at_least(crate::scheme::SPARSE_THRESHOLD), n * n * n);
            let sp = k.to_sparse(crate::scheme::SPARSE_THRESHOLD);
            let (fa, fb) = (
                symbol_of(&random_hermitian(twice as usize + 1, 1), &s).unwrap(),
                symbol_of(&random_hermitian(twice as usize + 1, 2), &s).unwrap(),
            );
            let dense = crate::scheme::star(&fa, &fb, &k, &s).unwrap();
            assert!(crate::scheme::star(&fa, &fb, &sp, &s).unwrap().max_abs_diff(&dense) < 1e-13);
        }
    }
}
