//! Runtime property suite: every invariant of the toolkit, measured and
//! compared with its tolerance. Used by `tomo verify`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::Result;
use crate::operator::{
    commutator, matrix_exponential, pauli_x, pauli_y, pauli_z, random_density, random_hermitian, trace, OperatorMatrix,
    I, ONE,
};
use crate::scheme::{
    convert_symbol, heisenberg_evolve, intertwine_kernel, matrix_element_scheme, operator_of, star, star_bracket,
    star_kernel_with_order, symbol_of, test_operator_family, KernelOrder, KernelTensor, Scheme, Symbol,
};
use crate::specfun::{small_d_matrix, wigner_3j, HalfInteger};
use crate::spin::{spin_scheme, spin_tomogram, AngularGrid};
use crate::symplectic::{
    convergence_ladder, ground_state_tomogram, star_w0_idempotency, symplectic_reconstruct, symplectic_tomogram,
    theta_nodes, FockSpace, IdempotencyQuadrature, ReconstructionGrid, SymplecticPoint, SymplecticTomogram, TomogramMode,
    XGrid, IDEMPOTENCY_SAMPLE_POINTS,
};

#[derive(Clone, Debug)]
pub struct PropertyCheck {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl PropertyCheck {
    /// Passes when `measured < tolerance`.
    fn below(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        PropertyCheck { name: name.into(), measured, tolerance, passed: measured < tolerance }
    }

    /// Passes when `measured ≥ threshold`.
    fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        PropertyCheck { name: name.into(), measured, tolerance: threshold, passed: measured >= threshold }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<PropertyCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per property: status, name, measured value and tolerance.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{status} {:<48} measured {:.3e} tolerance {:.3e}", c.name, c.measured, c.tolerance).unwrap();
        }
        let failed = self.failures().count();
        writeln!(out, "{} properties, {} failed", self.checks.len(), failed).unwrap();
        out
    }
}

#[derive(Copy, Clone, Debug)]
pub struct VerifyOptions {
    pub kernel_order: KernelOrder,
    pub seed: u64,
    /// Fewer spins and samples; every property is still exercised.
    pub quick: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { kernel_order: KernelOrder::default(), seed: 2024, quick: false }
    }
}

fn h(twice: i32) -> HalfInteger {
    HalfInteger::from_twice(twice)
}

fn spin_setup(twice: i32, order: KernelOrder) -> Result<(Scheme, KernelTensor)> {
    let s = spin_scheme(&AngularGrid::default_for(h(twice))?)?;
    let k = star_kernel_with_order(&s, order);
    Ok((s, k))
}

fn sym(a: &OperatorMatrix, s: &Scheme) -> Result<Symbol> {
    symbol_of(a, s)
}

fn spin_round_trip(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let spins: &[i32] = if opts.quick { &[1, 2, 3] } else { &[1, 2, 3, 4, 5, 6, 8, 10] };
    let randoms = if opts.quick { 3 } else { 20 };
    for &twice in spins {
        let s = spin_scheme(&AngularGrid::default_for(h(twice))?)?;
        let n = s.hilbert_dim();
        let mut worst: f64 = 0.0;
        let family = test_operator_family(n, 0, 0)
            .into_iter()
            .chain((0..randoms).map(|i| random_hermitian(n, opts.seed + i)));
        for a in family {
            worst = worst.max(operator_of(&sym(&a, &s)?, &s)?.max_abs_diff(&a));
        }
        out.push(PropertyCheck::below(format!("spin round trip j={}", h(twice)), worst, 1e-10));
    }
    Ok(())
}

fn star_product(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let pairs = if opts.quick { 5 } else { 20 };
    for twice in [1, 2] {
        let (s, k) = spin_setup(twice, opts.kernel_order)?;
        let n = s.hilbert_dim();
        let mut worst: f64 = 0.0;
        for i in 0..pairs {
            let (a, b) = (random_hermitian(n, opts.seed + 2 * i), random_hermitian(n, opts.seed + 2 * i + 1));
            let fab = star(&sym(&a, &s)?, &sym(&b, &s)?, &k, &s)?;
            worst = worst.max(fab.max_abs_diff(&sym(&(&a * &b), &s)?));
        }
        out.push(PropertyCheck::below(format!("star equals product symbol j={}", h(twice)), worst, 1e-10));
    }
    let (s, k) = spin_setup(1, opts.kernel_order)?;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let [fa, fb, fc] = [0, 1, 2].map(|t| sym(&random_hermitian(2, opts.seed + 3 * i + t), &s).unwrap());
        let left = star(&star(&fa, &fb, &k, &s)?, &fc, &k, &s)?;
        let right = star(&fa, &star(&fb, &fc, &k, &s)?, &k, &s)?;
        worst = worst.max(left.max_abs_diff(&right));
    }
    out.push(PropertyCheck::below("star associativity j=1/2", worst, 1e-9));
    Ok(())
}

fn bracket(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let (s, k) = spin_setup(1, opts.kernel_order)?;
    let br = |f: &Symbol, g: &Symbol| star_bracket(f, g, &k, &s);
    let commutator_symbol = br(&sym(&pauli_x(), &s)?, &sym(&pauli_y(), &s)?)?;
    let expected = sym(&pauli_z().scale(2.0 * I), &s)?;
    out.push(PropertyCheck::below("bracket is commutator symbol", commutator_symbol.max_abs_diff(&expected), 1e-10));

    let (mut anti, mut jacobi, mut leibniz): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..10 {
        let [f, g, hh] = [0, 1, 2].map(|t| sym(&random_hermitian(2, opts.seed + 100 + 3 * i + t), &s).unwrap());
        anti = anti.max(br(&f, &g)?.add(&br(&g, &f)?)?.max_abs());
        let cyclic = br(&f, &br(&g, &hh)?)?.add(&br(&g, &br(&hh, &f)?)?)?.add(&br(&hh, &br(&f, &g)?)?)?;
        jacobi = jacobi.max(cyclic.max_abs());
        let lhs = br(&f, &star(&g, &hh, &k, &s)?)?;
        let rhs = star(&br(&f, &g)?, &hh, &k, &s)?.add(&star(&g, &br(&f, &hh)?, &k, &s)?)?;
        leibniz = leibniz.max(lhs.max_abs_diff(&rhs));
    }
    out.push(PropertyCheck::below("bracket antisymmetry", anti, f64::MIN_POSITIVE));
    out.push(PropertyCheck::below("bracket Jacobi identity", jacobi, 1e-9));
    out.push(PropertyCheck::below("bracket Leibniz rule", leibniz, 1e-9));
    Ok(())
}

fn evolution(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let (s, k) = spin_setup(1, opts.kernel_order)?;
    let (hm, a) = (pauli_z(), pauli_x());
    let t = FRAC_PI_4;
    let u = matrix_exponential(&hm.scale(Complex64::new(0.0, t)))?;
    let exact = sym(&(&(&u * &a) * &u.adjoint()), &s)?;
    let (fa, fh) = (sym(&a, &s)?, sym(&hm, &s)?);
    let e200 = heisenberg_evolve(&fa, &fh, t, 200, &k, &s)?.max_abs_diff(&exact);
    let e400 = heisenberg_evolve(&fa, &fh, t, 400, &k, &s)?.max_abs_diff(&exact);
    out.push(PropertyCheck::below("Heisenberg evolution 200 steps", e200, 1e-6));
    out.push(PropertyCheck::at_least("Heisenberg integrator order", (e200 / e400).log2(), 3.5));
    let conserved = heisenberg_evolve(&fh, &fh, 1.0, 50, &k, &s)?.max_abs_diff(&fh);
    out.push(PropertyCheck::below("Heisenberg energy conservation", conserved, 1e-8));
    Ok(())
}

fn tomogram_probabilities(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let g = AngularGrid::default_for(h(3))?;
    let (mut negativity, mut normalization): (f64, f64) = (0.0, 0.0);
    let states = if opts.quick { 5 } else { 20 };
    for i in 0..states {
        let t = spin_tomogram(&random_density(4, opts.seed + i), &g)?;
        negativity = negativity.max(t.values().iter().map(|v| -v.re).fold(0.0, f64::max));
        for kk in 0..g.len() {
            let total: Complex64 = (0..4).map(|m| t.values()[m * g.len() + kk]).sum();
            normalization = normalization.max((total - ONE).norm());
        }
    }
    out.push(PropertyCheck::below("spin tomogram negativity", negativity, 1e-10));
    out.push(PropertyCheck::below("spin tomogram normalization", normalization, 1e-10));
    let ident = spin_tomogram(&OperatorMatrix::identity(4), &g)?;
    let dev = ident.values().iter().map(|v| (v - ONE).norm()).fold(0.0, f64::max);
    out.push(PropertyCheck::below("identity tomogram is one", dev, 1e-12));
    Ok(())
}

fn symplectic(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let w = ground_state_tomogram(&SymplecticPoint::new(0.0, 1.0, 0.0)?);
    out.push(PropertyCheck::below("ground state tomogram at origin", (w - 1.0 / PI.sqrt()).abs(), 1e-12));

    let fine = FockSpace::with_quadrature_dim(64, 1024)?;
    let grid = XGrid::new(4.0, 0.01)?;
    let mode = TomogramMode::Sampled { x_grid: grid.clone(), smoothing: 0.05 };
    if let SymplecticTomogram::Sampled(t) = symplectic_tomogram(&OperatorMatrix::basis(64, 0, 0), &fine, &[0.0], &mode)? {
        let mut err: f64 = 0.0;
        for (&x, v) in grid.points().iter().zip(t.values(0)) {
            err = err.max((v.re - ground_state_tomogram(&SymplecticPoint::new(x, 1.0, 0.0)?)).abs());
        }
        out.push(PropertyCheck::below("smoothed ground state tomogram", err, 2e-3));
    }

    let fock = FockSpace::new(64)?;
    let thetas = theta_nodes(64);
    for level in 0..3 {
        let a = OperatorMatrix::basis(64, level, level);
        let t = symplectic_tomogram(&a, &fock, &thetas, &TomogramMode::Spectral)?;
        let rec = symplectic_reconstruct(&t, &fock, &ReconstructionGrid::default())?;
        let err = rec.leading_block(8).max_abs_diff(&a.leading_block(8));
        out.push(PropertyCheck::below(format!("symplectic round trip |{level}>"), err, 1e-3));
    }
    if !opts.quick {
        let ladder = convergence_ladder(&fock, 64, &[0, 1, 2], 8)?;
        let rises = ladder
            .windows(2)
            .flat_map(|w| w[0].errors.iter().zip(&w[1].errors).map(|(a, b)| b - a).collect::<Vec<_>>())
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(PropertyCheck::below("reconstruction ladder largest increase", rises, 0.0));
    }

    let points: Vec<SymplecticPoint> = IDEMPOTENCY_SAMPLE_POINTS
        .iter()
        .take(if opts.quick { 2 } else { 5 })
        .map(|&(x, m, n)| SymplecticPoint::new(x, m, n))
        .collect::<Result<_>>()?;
    let worst = star_w0_idempotency(&points, &IdempotencyQuadrature::default())?
        .iter()
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    out.push(PropertyCheck::below("ground state idempotency", worst, 1e-3));
    Ok(())
}

fn intertwining(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    for twice in [1, 2] {
        let s = spin_scheme(&AngularGrid::default_for(h(twice))?)?;
        let me = matrix_element_scheme(s.hilbert_dim())?;
        let (forward, back) = (intertwine_kernel(&s, &me)?, intertwine_kernel(&me, &s)?);
        let mut worst: f64 = 0.0;
        for (i, a) in test_operator_family(s.hilbert_dim(), 0, 0).iter().enumerate() {
            let b = random_hermitian(s.hilbert_dim(), opts.seed + i as u64);
            for op in [a, &b] {
                let f = sym(op, &s)?;
                worst = worst.max(convert_symbol(&convert_symbol(&f, &forward)?, &back)?.max_abs_diff(&f));
            }
        }
        out.push(PropertyCheck::below(format!("intertwining round trip j={}", h(twice)), worst, 1e-10));
    }
    Ok(())
}

fn special_functions(out: &mut Vec<PropertyCheck>) -> Result<()> {
    let (mut unitarity, mut composition): (f64, f64) = (0.0, 0.0);
    for twice in 0..=20 {
        for beta in [0.3, 1.1, 2.7] {
            let d = small_d_matrix(h(twice), beta)?;
            let eye = nalgebra::DMatrix::<f64>::identity(d.nrows(), d.nrows());
            unitarity = unitarity.max((&d * d.transpose() - eye).amax());
        }
        let prod = small_d_matrix(h(twice), 0.4)? * small_d_matrix(h(twice), 0.9)?;
        composition = composition.max((prod - small_d_matrix(h(twice), 1.3)?).amax());
    }
    out.push(PropertyCheck::below("d-matrix orthogonality j<=10", unitarity, 1e-12));
    out.push(PropertyCheck::below("d-matrix composition j<=10", composition, 1e-11));
    let mut orth: f64 = 0.0;
    for j3 in 0..=2 {
        for m3 in -j3..=j3 {
            let mut total = 0.0;
            for m1 in -1..=1 {
                for m2 in -1..=1 {
                    let c = wigner_3j(h(2), h(2), h(2 * j3), h(2 * m1), h(2 * m2), h(2 * m3))?;
                    total += (2 * j3 + 1) as f64 * c * c;
                }
            }
            orth = orth.max((total - 1.0).abs());
        }
    }
    out.push(PropertyCheck::below("3j orthogonality j1=j2=1", orth, 1e-12));
    Ok(())
}

fn operator_core(opts: &VerifyOptions, out: &mut Vec<PropertyCheck>) -> Result<()> {
    let mut tr: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    for i in 0..5 {
        let (a, b) = (random_hermitian(6, opts.seed + i), random_hermitian(6, opts.seed + 50 + i));
        tr = tr.max(trace(&commutator(&a, &b)?).norm());
        let x = a.scale(Complex64::new(0.0, 10.0 / a.norm_one().max(1.0)));
        let prod = &matrix_exponential(&x)? * &matrix_exponential(&x.scale(-ONE))?;
        inverse = inverse.max(prod.max_abs_diff(&OperatorMatrix::identity(6)));
    }
    out.push(PropertyCheck::below("commutator is traceless", tr, 1e-10));
    out.push(PropertyCheck::below("exp(A) exp(-A) = I", inverse, 1e-10));
    Ok(())
}

/// Runs every property and collects the measurements.
pub fn run_property_suite(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    operator_core(opts, &mut checks)?;
    special_functions(&mut checks)?;
    spin_round_trip(opts, &mut checks)?;
    star_product(opts, &mut checks)?;
    bracket(opts, &mut checks)?;
    evolution(opts, &mut checks)?;
    tomogram_probabilities(opts, &mut checks)?;
    intertwining(opts, &mut checks)?;
    symplectic(opts, &mut checks)?;
    Ok(VerifyReport { checks })
}
