use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FockSpace;
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::scheme::fmt_f64;

/// `n` angles `π t / n` on `[0, π)`.
pub fn theta_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|t| PI * t as f64 / n as f64).collect()
}

/// Uniform symmetric grid `−x_max, −x_max + dx, …, x_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct XGrid {
    x_max: f64,
    dx: f64,
    points: Vec<f64>,
}

impl XGrid {
    pub fn new(x_max: f64, dx: f64) -> Result<Self> {
        if !(x_max.is_finite() && dx.is_finite() && x_max > 0.0 && dx > 0.0) {
            return Err(Error::InvalidParameter(format!("X grid needs x_max > 0 and dx > 0, got {x_max}, {dx}")));
        }
        let steps = (2.0 * x_max / dx).round();
        if (steps * dx - 2.0 * x_max).abs() > 1e-9 * x_max {
            return Err(Error::InvalidParameter(format!("dx = {dx} does not divide 2·x_max = {}", 2.0 * x_max)));
        }
        let steps = steps as usize;
        let points = (0..=steps).map(|i| -x_max + 2.0 * x_max * i as f64 / steps as f64).collect();
        Ok(XGrid { x_max, dx, points })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Point masses of `δ(X − O(θ))` per direction.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTomogram {
    n_trunc: usize,
    thetas: Vec<f64>,
    /// Eigenvalues of `O(θ)`, identical for every θ.
    eigenvalues: Vec<f64>,
    /// `masses[t][k] = ⟨v_k(θ_t)| A |v_k(θ_t)⟩`.
    masses: Vec<Vec<Complex64>>,
}

impl SpectralTomogram {
    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn masses(&self, t: usize) -> &[Complex64] {
        &self.masses[t]
    }

    pub fn to_json(&self) -> String {
        let dump = SpectralDump {
            n_trunc: self.n_trunc,
            directions: self
                .thetas
                .iter()
                .zip(&self.masses)
                .map(|(&theta, m)| DirectionDump {
                    theta,
                    eigenvalues: self.eigenvalues.clone(),
                    masses: m.iter().map(|z| z.re).collect(),
                    masses_im: m.iter().map(|z| z.im).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&dump).expect("tomogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: SpectralDump = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let first = dump.directions.first().ok_or_else(|| Error::Parse("tomogram has no directions".into()))?;
        let eigenvalues = first.eigenvalues.clone();
        let mut thetas = Vec::new();
        let mut masses = Vec::new();
        for d in &dump.directions {
            if d.eigenvalues != eigenvalues || d.masses.len() != eigenvalues.len() || d.masses_im.len() != eigenvalues.len() {
                return Err(Error::Parse("inconsistent spectral directions".into()));
            }
            thetas.push(d.theta);
            masses.push(d.masses.iter().zip(&d.masses_im).map(|(&r, &i)| Complex64::new(r, i)).collect());
        }
        Ok(SpectralTomogram { n_trunc: dump.n_trunc, thetas, eigenvalues, masses })
    }
}

#[derive(Serialize, Deserialize)]
struct DirectionDump {
    theta: f64,
    eigenvalues: Vec<f64>,
    masses: Vec<f64>,
    #[serde(default)]
    masses_im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectralDump {
    n_trunc: usize,
    directions: Vec<DirectionDump>,
}

/// Point masses convolved with a normalized Gaussian of width `smoothing`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTomogram {
    thetas: Vec<f64>,
    x_grid: XGrid,
    smoothing: f64,
    /// `values[t][i]` at `(θ_t, X_i)`.
    values: Vec<Vec<Complex64>>,
}

impl SampledTomogram {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn x_grid(&self) -> &XGrid {
        &self.x_grid
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn values(&self, t: usize) -> &[Complex64] {
        &self.values[t]
    }

    /// `∫ w dX` per direction by the trapezoid rule.
    pub fn integrals(&self) -> Vec<Complex64> {
        let dx = self.x_grid.dx;
        self.values
            .iter()
            .map(|row| {
                let inner: Complex64 = row.iter().sum();
                (inner - 0.5 * (row[0] + row[row.len() - 1])) * dx
            })
            .collect()
    }

    /// CSV `theta,X,value,smoothing`; only real tomograms can be written.
    pub fn to_csv(&self) -> Result<String> {
        let max_im = self.values.iter().flatten().map(|v| v.im.abs()).fold(0.0, f64::max);
        if max_im > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "tomogram has imaginary parts up to {max_im:e}; the operator is not Hermitian"
            )));
        }
        let mut out = String::from("theta,X,value,smoothing\n");
        for (theta, row) in self.thetas.iter().zip(&self.values) {
            for (x, v) in self.x_grid.points.iter().zip(row) {
                writeln!(out, "{},{},{},{}", fmt_f64(*theta), fmt_f64(*x), fmt_f64(v.re), fmt_f64(self.smoothing)).unwrap();
            }
        }
        Ok(out)
    }

    /// Reads a CSV written by [`SampledTomogram::to_csv`]; rows must be grouped
    /// by θ with the same uniform X grid in each group.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty tomogram file".into()))?;
        if header.split(',').map(str::trim).collect::<Vec<_>>() != ["theta", "X", "value", "smoothing"] {
            return Err(Error::Parse(format!("unexpected tomogram header {header:?}")));
        }
        let mut thetas: Vec<f64> = Vec::new();
        let mut rows: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut smoothing = None;
        for (lineno, line) in lines.enumerate() {
            let f: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            if f.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 fields", lineno + 2)));
            }
            if *smoothing.get_or_insert(f[3]) != f[3] {
                return Err(Error::Parse("smoothing width changes between rows".into()));
            }
            if thetas.last() != Some(&f[0]) {
                thetas.push(f[0]);
                rows.push(Vec::new());
            }
            rows.last_mut().unwrap().push((f[1], f[2]));
        }
        let first = rows.first().ok_or_else(|| Error::Parse("tomogram has no rows".into()))?;
        if first.len() < 2 {
            return Err(Error::Parse("each direction needs at least two X samples".into()));
        }
        let x_max = first[first.len() - 1].0;
        let x_grid = XGrid::new(x_max, first[1].0 - first[0].0).map_err(|e| Error::Parse(e.to_string()))?;
        let mut values = Vec::new();
        for row in &rows {
            if row.len() != x_grid.points.len()
                || row.iter().zip(&x_grid.points).any(|(r, x)| (r.0 - x).abs() > 1e-9 * x_max)
            {
                return Err(Error::Parse("X samples differ between directions or are not uniform".into()));
            }
            values.push(row.iter().map(|r| Complex64::new(r.1, 0.0)).collect());
        }
        let smoothing = smoothing.unwrap_or(0.0);
        if smoothing <= 0.0 {
            return Err(Error::Parse("sampled tomogram must declare a positive smoothing width".into()));
        }
        Ok(SampledTomogram { thetas, x_grid, smoothing, values })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymplecticTomogram {
    Spectral(SpectralTomogram),
    Sampled(SampledTomogram),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TomogramMode {
    Spectral,
    Sampled { x_grid: XGrid, smoothing: f64 },
}

fn check_dim(a: &OperatorMatrix, fock: &FockSpace) -> Result<()> {
    if a.dim() != fock.n_trunc() {
        return Err(Error::DimensionMismatch { expected: fock.n_trunc(), found: a.dim() });
    }
    Ok(())
}

/// Real eigenvector block of `q` as a complex `n_trunc × quad_dim` matrix.
fn base_vectors(fock: &FockSpace) -> DMatrix<Complex64> {
    DMatrix::from_fn(fock.n_trunc(), fock.quad_dim(), |r, k| Complex64::new(fock.eigenvector_component(r, k), 0.0))
}

/// `⟨v_k(θ)| A |v_k(θ)⟩` for all `k`, using `v_k(θ)(n) = e^{iθn} v_k(0)(n)`.
fn masses_at(a: &OperatorMatrix, v: &DMatrix<Complex64>, theta: f64) -> Vec<Complex64> {
    let n = a.dim();
    let rotated = DMatrix::from_fn(n, n, |r, c| a.get(r, c) * Complex64::from_polar(1.0, theta * (c as f64 - r as f64)));
    let y = rotated * v;
    (0..v.ncols()).map(|k| (0..n).map(|r| v[(r, k)] * y[(r, k)]).sum()).collect()
}

/// Eigenvalues and masses of `δ(X − μq − νp)` for one arbitrary direction.
pub fn spectral_direction(a: &OperatorMatrix, fock: &FockSpace, mu: f64, nu: f64) -> Result<(Vec<f64>, Vec<Complex64>)> {
    check_dim(a, fock)?;
    let r = mu.hypot(nu);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter("the direction (μ, ν) must be finite and nonzero".into()));
    }
    let masses = masses_at(a, &base_vectors(fock), nu.atan2(mu));
    Ok((fock.eigenvalues().iter().map(|l| r * l).collect(), masses))
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}

/// `w_A(X, cos θ, sin θ) = Tr[A δ(X − O(θ))]` for each θ in `thetas`.
pub fn symplectic_tomogram(
    a: &OperatorMatrix,
    fock: &FockSpace,
    thetas: &[f64],
    mode: &TomogramMode,
) -> Result<SymplecticTomogram> {
    check_dim(a, fock)?;
    if thetas.is_empty() {
        return Err(Error::InvalidParameter("at least one direction is required".into()));
    }
    if let TomogramMode::Sampled { smoothing, .. } = mode {
        if !(smoothing.is_finite() && *smoothing > 0.0) {
            return Err(Error::InvalidParameter(format!("sampled tomograms need a positive smoothing width, got {smoothing}")));
        }
    }
    let v = base_vectors(fock);
    let masses: Vec<Vec<Complex64>> = thetas.par_iter().map(|&t| masses_at(a, &v, t)).collect();
    let eigenvalues = fock.eigenvalues().to_vec();
    Ok(match mode {
        TomogramMode::Spectral => SymplecticTomogram::Spectral(SpectralTomogram {
            n_trunc: fock.n_trunc(),
            thetas: thetas.to_vec(),
            eigenvalues,
            masses,
        }),
        TomogramMode::Sampled { x_grid, smoothing } => {
            let values = masses
                .par_iter()
                .map(|m| {
                    x_grid
                        .points
                        .iter()
                        .map(|&x| m.iter().zip(&eigenvalues).map(|(mass, &l)| mass * gaussian(x - l, *smoothing)).sum())
                        .collect()
                })
                .collect();
            SymplecticTomogram::Sampled(SampledTomogram {
                thetas: thetas.to_vec(),
                x_grid: x_grid.clone(),
                smoothing: *smoothing,
                values,
            })
        }
    })
}
