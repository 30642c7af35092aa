use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::tomogram::{symplectic_tomogram, theta_nodes, SymplecticTomogram, TomogramMode};
use super::FockSpace;
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;

/// Radial grid for the polar form of the inverse: trapezoid rule on `n_r`
/// uniform nodes over `[−r_max, r_max]`, Jacobian `|r|` damped by `e^{−εr²}`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ReconstructionGrid {
    pub r_max: f64,
    pub n_r: usize,
    pub epsilon: f64,
}

impl Default for ReconstructionGrid {
    fn default() -> Self {
        ReconstructionGrid { r_max: 8.0, n_r: 256, epsilon: 1e-4 }
    }
}

impl ReconstructionGrid {
    pub fn new(r_max: f64, n_r: usize, epsilon: f64) -> Result<Self> {
        let g = ReconstructionGrid { r_max, n_r, epsilon };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "damping ε must be positive, got {}; the undamped radial integral diverges",
                self.epsilon
            )));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) || self.n_r < 2 {
            return Err(Error::InvalidParameter(format!(
                "radial grid needs r_max > 0 and at least 2 nodes, got r_max = {}, n_r = {}",
                self.r_max, self.n_r
            )));
        }
        Ok(())
    }

    /// Nodes and the combined weights `Δr_trap · |r| · e^{−εr²}`.
    pub fn nodes_and_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let h = 2.0 * self.r_max / (self.n_r - 1) as f64;
        let nodes: Vec<f64> = (0..self.n_r).map(|i| -self.r_max + h * i as f64).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let trap = if i == 0 || i == self.n_r - 1 { 0.5 * h } else { h };
                trap * r.abs() * (-self.epsilon * r * r).exp()
            })
            .collect();
        (nodes, weights)
    }
}

fn check_thetas(thetas: &[f64]) -> Result<()> {
    let expected = theta_nodes(thetas.len());
    if thetas.is_empty() || thetas.iter().zip(&expected).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::InvalidParameter("reconstruction needs the uniform angles π t / n_θ".into()));
    }
    Ok(())
}

/// `Â = (1/2π) ∫_0^π dθ ∫ |r| e^{−εr²} dr χ(r, θ) e^{−ir O(θ)}` with
/// `χ(r, θ) = ∫ w(Y, θ) e^{irY} dY`, evaluated in the eigenbasis of `O(θ)`.
pub fn symplectic_reconstruct(tomo: &SymplecticTomogram, fock: &FockSpace, grid: &ReconstructionGrid) -> Result<OperatorMatrix> {
    grid.validate()?;
    let (nodes, weights) = grid.nodes_and_weights();
    let lambda = fock.eigenvalues();
    let (n, m) = (fock.n_trunc(), fock.quad_dim());

    // characteristic function per direction
    let (thetas, chi): (&[f64], Vec<Vec<Complex64>>) = match tomo {
        SymplecticTomogram::Spectral(s) => {
            if s.n_trunc() != n
                || s.eigenvalues().len() != m
                || s.eigenvalues().iter().zip(lambda).any(|(a, b)| (a - b).abs() > 1e-12)
            {
                return Err(Error::InvalidParameter(
                    "spectral tomogram was computed on a different oscillator space".into(),
                ));
            }
            check_thetas(s.thetas())?;
            let chi = (0..s.thetas().len())
                .into_par_iter()
                .map(|t| {
                    let masses = s.masses(t);
                    nodes
                        .iter()
                        .map(|&r| masses.iter().zip(lambda).map(|(w, &l)| w * Complex64::from_polar(1.0, r * l)).sum())
                        .collect()
                })
                .collect();
            (s.thetas(), chi)
        }
        SymplecticTomogram::Sampled(s) => {
            check_thetas(s.thetas())?;
            let xs = s.x_grid().points();
            let dx = s.x_grid().dx();
            let trap: Vec<f64> =
                (0..xs.len()).map(|i| if i == 0 || i == xs.len() - 1 { 0.5 * dx } else { dx }).collect();
            let chi = (0..s.thetas().len())
                .into_par_iter()
                .map(|t| {
                    let vals = s.values(t);
                    nodes
                        .iter()
                        .map(|&r| {
                            vals.iter()
                                .zip(xs)
                                .zip(&trap)
                                .map(|((v, &x), &h)| v * h * Complex64::from_polar(1.0, r * x))
                                .sum()
                        })
                        .collect()
                })
                .collect();
            (s.thetas(), chi)
        }
    };

    // e^{−irλ_k}, shared by all directions
    let phases: Vec<Complex64> =
        (0..m).flat_map(|k| nodes.iter().map(move |&r| Complex64::from_polar(1.0, -r * lambda[k]))).collect();
    let v = DMatrix::from_fn(n, m, |r, k| fock.eigenvector_component(r, k));
    let dtheta = PI / thetas.len() as f64;

    let terms: Vec<DMatrix<Complex64>> = thetas
        .par_iter()
        .zip(chi.par_iter())
        .map(|(&theta, chi)| {
            let cw: Vec<Complex64> = chi.iter().zip(&weights).map(|(c, w)| c * w).collect();
            let d: Vec<Complex64> =
                (0..m).map(|k| phases[k * nodes.len()..(k + 1) * nodes.len()].iter().zip(&cw).map(|(e, c)| e * c).sum()).collect();
            // V diag(d) Vᵀ, then the rotation phases e^{iθ(r − c)}
            let vd = DMatrix::from_fn(n, m, |r, k| d[k] * v[(r, k)]);
            let vt = v.transpose().map(|x| Complex64::new(x, 0.0));
            let mut block = vd * vt;
            let scale = dtheta / (2.0 * PI);
            for r in 0..n {
                for c in 0..n {
                    block[(r, c)] *= Complex64::from_polar(scale, theta * (r as f64 - c as f64));
                }
            }
            block
        })
        .collect();
    let mut total = DMatrix::zeros(n, n);
    for t in &terms {
        total += t;
    }
    OperatorMatrix::from_matrix(total)
}

/// `(r_max, ε)` rungs with `n_r = 256`, ordered from coarse to fine.
pub const CONVERGENCE_LADDER: [(f64, f64); 5] = [(6.0, 1e-2), (6.0, 3e-3), (8.0, 1e-3), (8.0, 3e-4), (8.0, 1e-4)];

#[derive(Clone, Debug)]
pub struct LadderRung {
    pub grid: ReconstructionGrid,
    /// Max-entry error on the leading block, one per requested Fock level.
    pub errors: Vec<f64>,
}

/// Reconstructs `|n⟩⟨n|` for each level along [`CONVERGENCE_LADDER`].
pub fn convergence_ladder(fock: &FockSpace, n_theta: usize, levels: &[usize], block: usize) -> Result<Vec<LadderRung>> {
    let n = fock.n_trunc();
    if levels.iter().any(|&l| l >= n) || block > n {
        return Err(Error::InvalidParameter("Fock level or block exceeds the truncation".into()));
    }
    let thetas = theta_nodes(n_theta);
    let tomograms = levels
        .iter()
        .map(|&l| symplectic_tomogram(&OperatorMatrix::basis(n, l, l), fock, &thetas, &TomogramMode::Spectral))
        .collect::<Result<Vec<_>>>()?;
    CONVERGENCE_LADDER
        .iter()
        .map(|&(r_max, epsilon)| {
            let grid = ReconstructionGrid::new(r_max, 256, epsilon)?;
            let errors = levels
                .iter()
                .zip(&tomograms)
                .map(|(&l, t)| {
                    let rec = symplectic_reconstruct(t, fock, &grid)?;
                    Ok(rec.leading_block(block).max_abs_diff(&OperatorMatrix::basis(n, l, l).leading_block(block)))
                })
                .collect::<Result<Vec<_>>>()?;
            log::info!("ladder r_max = {r_max}, ε = {epsilon:e}: errors {errors:?}");
            Ok(LadderRung { grid, errors })
        })
        .collect()
}
