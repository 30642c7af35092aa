//! Discretized quantization schemes and the symbol calculus built on them.
//!
//! A [`Scheme`] is a finite set of points `x`, each carrying a dequantizer
//! `U(x)`, a quantizer `D(x)` and a positive measure weight `w(x)`. Integrals
//! over `x` become weighted sums, so every identity of the symbol calculus
//! (star product, bracket, intertwining) holds exactly whenever the scheme
//! reproduces operators: `Σ_x w(x) Tr[A U(x)] D(x) = A`.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{trace_of_product, OperatorMatrix, I, ZERO};

static NEXT_SCHEME_ID: AtomicU64 = AtomicU64::new(1);

/// A labeled point of a scheme. `label` holds the coordinates named by
/// [`Scheme::label_names`], e.g. `(2·m1, α, β)` or `(row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemePoint {
    pub index: usize,
    pub label: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Scheme {
    id: u64,
    name: String,
    hilbert_dim: usize,
    label_names: Vec<String>,
    points: Vec<SchemePoint>,
    dequantizers: Vec<OperatorMatrix>,
    quantizers: Vec<OperatorMatrix>,
    weights: Vec<f64>,
    round_trip_tolerance: f64,
}

/// Everything needed to assemble a [`Scheme`].
pub struct SchemeParts {
    pub name: String,
    pub hilbert_dim: usize,
    pub label_names: Vec<String>,
    pub labels: Vec<Vec<f64>>,
    pub dequantizers: Vec<OperatorMatrix>,
    pub quantizers: Vec<OperatorMatrix>,
    pub weights: Vec<f64>,
    pub round_trip_tolerance: f64,
}

impl Scheme {
    pub fn new(parts: SchemeParts) -> Result<Self> {
        let n = parts.labels.len();
        for (what, len) in [("dequantizers", parts.dequantizers.len()), ("quantizers", parts.quantizers.len()), ("weights", parts.weights.len())] {
            if len != n {
                return Err(Error::InvalidParameter(format!("scheme has {n} points but {len} {what}")));
            }
        }
        for m in parts.dequantizers.iter().chain(&parts.quantizers) {
            if m.dim() != parts.hilbert_dim {
                return Err(Error::DimensionMismatch { expected: parts.hilbert_dim, found: m.dim() });
            }
        }
        if let Some(w) = parts.weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("scheme weights must be positive and finite, found {w}")));
        }
        let points = parts
            .labels
            .into_iter()
            .enumerate()
            .map(|(index, label)| SchemePoint { index, label })
            .collect();
        Ok(Scheme {
            id: NEXT_SCHEME_ID.fetch_add(1, Ordering::Relaxed),
            name: parts.name,
            hilbert_dim: parts.hilbert_dim,
            label_names: parts.label_names,
            points,
            dequantizers: parts.dequantizers,
            quantizers: parts.quantizers,
            weights: parts.weights,
            round_trip_tolerance: parts.round_trip_tolerance,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SchemePoint] {
        &self.points
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn dequantizers(&self) -> &[OperatorMatrix] {
        &self.dequantizers
    }

    pub fn quantizers(&self) -> &[OperatorMatrix] {
        &self.quantizers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn round_trip_tolerance(&self) -> f64 {
        self.round_trip_tolerance
    }

    fn check_symbol(&self, f: &Symbol) -> Result<()> {
        if f.scheme_id != self.id {
            return Err(Error::SchemeMismatch { expected: self.id, found: f.scheme_id });
        }
        Ok(())
    }

    fn check_kernel(&self, k: &KernelTensor) -> Result<()> {
        if k.scheme_id != self.id {
            return Err(Error::SchemeMismatch { expected: self.id, found: k.scheme_id });
        }
        Ok(())
    }

    /// Constant symbol on this scheme.
    pub fn constant_symbol(&self, value: Complex64) -> Symbol {
        Symbol { scheme_id: self.id, values: vec![value; self.len()] }
    }

    pub fn symbol_from_values(&self, values: Vec<Complex64>) -> Result<Symbol> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: values.len() });
        }
        Ok(Symbol { scheme_id: self.id, values })
    }
}

/// Values of a function on the points of one scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    scheme_id: u64,
    values: Vec<Complex64>,
}

impl Symbol {
    pub fn scheme_id(&self) -> u64 {
        self.scheme_id
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn zip_with(&self, other: &Symbol, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Symbol> {
        if self.scheme_id != other.scheme_id {
            return Err(Error::SchemeMismatch { expected: self.scheme_id, found: other.scheme_id });
        }
        Ok(Symbol {
            scheme_id: self.scheme_id,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Symbol) -> Result<Symbol> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Symbol {
        Symbol { scheme_id: self.scheme_id, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Sup-norm distance; infinite when the symbols live on different schemes.
    pub fn max_abs_diff(&self, other: &Symbol) -> f64 {
        if self.scheme_id != other.scheme_id || self.len() != other.len() {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// `f_A(x) = Tr[A U(x)]` at every scheme point.
pub fn symbol_of(a: &OperatorMatrix, s: &Scheme) -> Result<Symbol> {
    if a.dim() != s.hilbert_dim {
        return Err(Error::DimensionMismatch { expected: s.hilbert_dim, found: a.dim() });
    }
    let values = s.dequantizers.par_iter().map(|u| trace_of_product(a, u)).collect();
    Ok(Symbol { scheme_id: s.id, values })
}

/// `A = Σ_x w(x) f(x) D(x)`.
pub fn operator_of(f: &Symbol, s: &Scheme) -> Result<OperatorMatrix> {
    s.check_symbol(f)?;
    let mut out = OperatorMatrix::zeros(s.hilbert_dim);
    for ((&w, &v), d) in s.weights.iter().zip(&f.values).zip(&s.quantizers) {
        out.add_scaled(v * w, d);
    }
    Ok(out)
}

/// Which quantizer carries the left factor of the operator product.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum KernelOrder {
    /// `K(x_A, x_B, x) = Tr[D(x_A) D(x_B) U(x)]`: the first index is the left factor.
    LeftFirst,
    /// `Tr[D(x_B) D(x_A) U(x)]`, the wrong pairing; kept as a negative control.
    Swapped,
}

impl Default for KernelOrder {
    fn default() -> Self {
        if cfg!(feature = "swap-kernel-order") {
            KernelOrder::Swapped
        } else {
            KernelOrder::LeftFirst
        }
    }
}

/// Entries below this magnitude are dropped by [`KernelTensor::to_sparse`].
pub const SPARSE_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub enum KernelStorage {
    /// Index `(a·n + b)·n + x`.
    Dense(Vec<Complex64>),
    /// `(a, b, x, value)` sorted lexicographically.
    Sparse { threshold: f64, entries: Vec<(u32, u32, u32, Complex64)> },
}

/// Star-product kernel `K(x_A, x_B, x)` over triples of scheme points.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTensor {
    scheme_id: u64,
    n_points: usize,
    storage: KernelStorage,
}

impl KernelTensor {
    pub fn scheme_id(&self) -> u64 {
        self.scheme_id
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn storage(&self) -> &KernelStorage {
        &self.storage
    }

    pub fn get(&self, a: usize, b: usize, x: usize) -> Complex64 {
        let n = self.n_points;
        match &self.storage {
            KernelStorage::Dense(v) => v[(a * n + b) * n + x],
            KernelStorage::Sparse { entries, .. } => {
                let key = (a as u32, b as u32, x as u32);
                entries
                    .binary_search_by(|e| (e.0, e.1, e.2).cmp(&key))
                    .map(|i| entries[i].3)
                    .unwrap_or(ZERO)
            }
        }
    }

    /// Number of stored entries with magnitude at or above `threshold`.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        match &self.storage {
            KernelStorage::Dense(v) => v.iter().filter(|z| z.norm() >= threshold).count(),
            KernelStorage::Sparse { entries, .. } => entries.iter().filter(|e| e.3.norm() >= threshold).count(),
        }
    }

    pub fn is_finite(&self) -> bool {
        let fin = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match &self.storage {
            KernelStorage::Dense(v) => v.iter().all(fin),
            KernelStorage::Sparse { entries, .. } => entries.iter().all(|e| fin(&e.3)),
        }
    }

    /// Keeps exactly the triples with `|K| ≥ threshold`.
    pub fn to_sparse(&self, threshold: f64) -> KernelTensor {
        let n = self.n_points;
        let entries = match &self.storage {
            KernelStorage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() >= threshold)
                .map(|(k, &z)| ((k / (n * n)) as u32, ((k / n) % n) as u32, (k % n) as u32, z))
                .collect(),
            KernelStorage::Sparse { entries, .. } => {
                entries.iter().copied().filter(|e| e.3.norm() >= threshold).collect()
            }
        };
        KernelTensor { scheme_id: self.scheme_id, n_points: n, storage: KernelStorage::Sparse { threshold, entries } }
    }

    pub fn to_json(&self) -> String {
        let (mode, threshold) = match &self.storage {
            KernelStorage::Dense(_) => ("dense", None),
            KernelStorage::Sparse { threshold, .. } => ("sparse", Some(*threshold)),
        };
        let entries: Vec<KernelEntry> = match &self.storage {
            KernelStorage::Dense(v) => {
                let n = self.n_points;
                v.iter()
                    .enumerate()
                    .map(|(k, z)| KernelEntry(k / (n * n), (k / n) % n, k % n, z.re, z.im))
                    .collect()
            }
            KernelStorage::Sparse { entries, .. } => entries
                .iter()
                .map(|e| KernelEntry(e.0 as usize, e.1 as usize, e.2 as usize, e.3.re, e.3.im))
                .collect(),
        };
        let dump = KernelDump { n_points: self.n_points, storage: mode.to_string(), threshold, entries };
        serde_json::to_string(&dump).expect("kernel serializes")
    }

    /// Reads a dump produced by [`KernelTensor::to_json`] and binds it to `s`.
    pub fn from_json(text: &str, s: &Scheme) -> Result<KernelTensor> {
        let dump: KernelDump = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = dump.n_points;
        if n != s.len() {
            return Err(Error::DimensionMismatch { expected: s.len(), found: n });
        }
        if dump.entries.iter().any(|e| e.0 >= n || e.1 >= n || e.2 >= n) {
            return Err(Error::Parse("kernel index out of range".into()));
        }
        let storage = match dump.storage.as_str() {
            "dense" => {
                let mut v = vec![ZERO; n * n * n];
                for e in &dump.entries {
                    v[(e.0 * n + e.1) * n + e.2] = Complex64::new(e.3, e.4);
                }
                KernelStorage::Dense(v)
            }
            "sparse" => {
                let mut entries: Vec<_> = dump
                    .entries
                    .iter()
                    .map(|e| (e.0 as u32, e.1 as u32, e.2 as u32, Complex64::new(e.3, e.4)))
                    .collect();
                entries.sort_by_key(|e| (e.0, e.1, e.2));
                KernelStorage::Sparse { threshold: dump.threshold.unwrap_or(SPARSE_THRESHOLD), entries }
            }
            other => return Err(Error::Parse(format!("unknown kernel storage {other:?}"))),
        };
        Ok(KernelTensor { scheme_id: s.id, n_points: n, storage })
    }
}

#[derive(Serialize, Deserialize)]
struct KernelEntry(usize, usize, usize, f64, f64);

#[derive(Serialize, Deserialize)]
struct KernelDump {
    n_points: usize,
    storage: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    threshold: Option<f64>,
    entries: Vec<KernelEntry>,
}

/// `K(x_A, x_B, x) = Tr[D(x_A) D(x_B) U(x)]`, dense.
pub fn star_kernel(s: &Scheme) -> KernelTensor {
    star_kernel_with_order(s, KernelOrder::default())
}

pub fn star_kernel_with_order(s: &Scheme, order: KernelOrder) -> KernelTensor {
    let n = s.len();
    let mut data = vec![ZERO; n * n * n];
    // Each entry is one trace with a fixed summation order, so the parallel
    // split over the first index cannot change any value.
    data.par_chunks_mut(n * n).enumerate().for_each(|(a, block)| {
        for b in 0..n {
            let product = match order {
                KernelOrder::LeftFirst => &s.quantizers[a] * &s.quantizers[b],
                KernelOrder::Swapped => &s.quantizers[b] * &s.quantizers[a],
            };
            for (x, u) in s.dequantizers.iter().enumerate() {
                block[b * n + x] = trace_of_product(&product, u);
            }
        }
    });
    KernelTensor { scheme_id: s.id, n_points: n, storage: KernelStorage::Dense(data) }
}

/// `(f_A ⋆ f_B)(x) = Σ_{a,b} w_a w_b f_A(a) f_B(b) K(a, b, x)`.
pub fn star(fa: &Symbol, fb: &Symbol, k: &KernelTensor, s: &Scheme) -> Result<Symbol> {
    s.check_symbol(fa)?;
    s.check_symbol(fb)?;
    s.check_kernel(k)?;
    let n = s.len();
    let wa: Vec<Complex64> = fa.values.iter().zip(&s.weights).map(|(v, w)| v * w).collect();
    let wb: Vec<Complex64> = fb.values.iter().zip(&s.weights).map(|(v, w)| v * w).collect();
    let mut out = vec![ZERO; n];
    match &k.storage {
        KernelStorage::Dense(data) => {
            for a in 0..n {
                if wa[a] == ZERO {
                    continue;
                }
                for b in 0..n {
                    let c = wa[a] * wb[b];
                    if c == ZERO {
                        continue;
                    }
                    let row = &data[(a * n + b) * n..(a * n + b + 1) * n];
                    for (o, kv) in out.iter_mut().zip(row) {
                        *o += c * kv;
                    }
                }
            }
        }
        KernelStorage::Sparse { entries, .. } => {
            for &(a, b, x, kv) in entries {
                out[x as usize] += wa[a as usize] * wb[b as usize] * kv;
            }
        }
    }
    Ok(Symbol { scheme_id: s.id, values: out })
}

/// Quantum Poisson bracket `{f_A, f_B}_⋆ = f_A ⋆ f_B − f_B ⋆ f_A`.
pub fn star_bracket(fa: &Symbol, fb: &Symbol, k: &KernelTensor, s: &Scheme) -> Result<Symbol> {
    star(fa, fb, k, s)?.sub(&star(fb, fa, k, s)?)
}

/// Integrates `ḟ_A = i {f_H, f_A}_⋆` from 0 to `t` with `steps` classical
/// fourth-order Runge–Kutta steps.
pub fn heisenberg_evolve(
    fa0: &Symbol,
    fh: &Symbol,
    t: f64,
    steps: usize,
    k: &KernelTensor,
    s: &Scheme,
) -> Result<Symbol> {
    if steps == 0 {
        return Err(Error::InvalidParameter("evolution needs at least one step".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("evolution time must be finite, got {t}")));
    }
    s.check_symbol(fa0)?;
    s.check_symbol(fh)?;
    s.check_kernel(k)?;
    let h = t / steps as f64;
    let rhs = |f: &Symbol| -> Result<Symbol> { Ok(star_bracket(fh, f, k, s)?.scale(I)) };
    let axpy = |f: &Symbol, c: f64, d: &Symbol| -> Symbol {
        Symbol {
            scheme_id: f.scheme_id,
            values: f.values.iter().zip(&d.values).map(|(a, b)| a + b * c).collect(),
        }
    };
    let mut f = fa0.clone();
    for step in 0..steps {
        let k1 = rhs(&f)?;
        let k2 = rhs(&axpy(&f, 0.5 * h, &k1))?;
        let k3 = rhs(&axpy(&f, 0.5 * h, &k2))?;
        let k4 = rhs(&axpy(&f, h, &k3))?;
        for i in 0..f.values.len() {
            f.values[i] += (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i]) * (h / 6.0);
        }
        if !f.is_finite() {
            return Err(Error::EvolutionDiverged { step: step + 1 });
        }
    }
    Ok(f)
}

/// Kernel transporting symbols from `source` to `target`:
/// `W[y][x] = Tr[D_source(x) U_target(y)]`.
#[derive(Clone, Debug)]
pub struct IntertwinerMatrix {
    source_id: u64,
    target_id: u64,
    rows: usize,
    cols: usize,
    source_weights: Vec<f64>,
    entries: Vec<Complex64>,
}

impl IntertwinerMatrix {
    pub fn get(&self, y: usize, x: usize) -> Complex64 {
        self.entries[y * self.cols + x]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn source_id(&self) -> u64 {
        self.source_id
    }

    pub fn target_id(&self) -> u64 {
        self.target_id
    }
}

pub fn intertwine_kernel(source: &Scheme, target: &Scheme) -> Result<IntertwinerMatrix> {
    if source.hilbert_dim != target.hilbert_dim {
        return Err(Error::DimensionMismatch { expected: source.hilbert_dim, found: target.hilbert_dim });
    }
    let (rows, cols) = (target.len(), source.len());
    let entries = (0..rows * cols)
        .into_par_iter()
        .map(|k| trace_of_product(&source.quantizers[k % cols], &target.dequantizers[k / cols]))
        .collect();
    Ok(IntertwinerMatrix {
        source_id: source.id,
        target_id: target.id,
        rows,
        cols,
        source_weights: source.weights.clone(),
        entries,
    })
}

/// `φ(y) = Σ_x w(x) f(x) W[y][x]`, a symbol of the target scheme.
pub fn convert_symbol(f: &Symbol, w: &IntertwinerMatrix) -> Result<Symbol> {
    if f.scheme_id != w.source_id {
        return Err(Error::SchemeMismatch { expected: w.source_id, found: f.scheme_id });
    }
    let weighted: Vec<Complex64> = f.values.iter().zip(&w.source_weights).map(|(v, wt)| v * wt).collect();
    let values = (0..w.rows)
        .map(|y| {
            let row = &w.entries[y * w.cols..(y + 1) * w.cols];
            row.iter().zip(&weighted).map(|(k, v)| k * v).sum()
        })
        .collect();
    Ok(Symbol { scheme_id: w.target_id, values })
}

/// Matrix-element scheme: point `(r, c)` has symbol value `A[r][c]`,
/// dequantizer `|c⟩⟨r|`, quantizer `|r⟩⟨c|` and weight 1.
pub fn matrix_element_scheme(dim: usize) -> Result<Scheme> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut labels = Vec::with_capacity(dim * dim);
    let mut deq = Vec::with_capacity(dim * dim);
    let mut quant = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            labels.push(vec![r as f64, c as f64]);
            deq.push(OperatorMatrix::basis(dim, c, r));
            quant.push(OperatorMatrix::basis(dim, r, c));
        }
    }
    Scheme::new(SchemeParts {
        name: "matrix-element".into(),
        hilbert_dim: dim,
        label_names: vec!["row".into(), "col".into()],
        labels,
        dequantizers: deq,
        quantizers: quant,
        weights: vec![1.0; dim * dim],
        round_trip_tolerance: 1e-14,
    })
}

/// The operators used to probe reproducibility: all matrix units for
/// dimensions up to 16, otherwise `count` seeded random Hermitian matrices.
pub fn test_operator_family(dim: usize, count: usize, seed: u64) -> Vec<OperatorMatrix> {
    if dim <= 16 {
        (0..dim * dim).map(|k| OperatorMatrix::basis(dim, k / dim, k % dim)).collect()
    } else {
        (0..count as u64).map(|i| crate::operator::random_hermitian(dim, seed + i)).collect()
    }
}

/// CSV with header `index,<label names>,re,im`, one row per point.
pub fn symbol_to_csv(f: &Symbol, s: &Scheme) -> Result<String> {
    s.check_symbol(f)?;
    let mut out = String::from("index");
    for name in &s.label_names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",re,im\n");
    for (p, v) in s.points.iter().zip(&f.values) {
        write!(out, "{}", p.index).unwrap();
        for c in &p.label {
            write!(out, ",{}", fmt_f64(*c)).unwrap();
        }
        writeln!(out, ",{},{}", fmt_f64(v.re), fmt_f64(v.im)).unwrap();
    }
    Ok(out)
}

/// Parses [`symbol_to_csv`] output back onto `s`; labels must match.
pub fn symbol_from_csv(text: &str, s: &Scheme) -> Result<Symbol> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty symbol file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let width = s.label_names.len() + 3;
    if cols.len() != width {
        return Err(Error::Parse(format!("expected {width} columns, header has {}", cols.len())));
    }
    let mut values = vec![None; s.len()];
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
        if fields.len() != width {
            return Err(Error::Parse(format!("line {}: expected {width} fields", lineno + 2)));
        }
        let idx = fields[0] as usize;
        let point = s.points.get(idx).ok_or_else(|| Error::Parse(format!("point index {idx} out of range")))?;
        let labels = &fields[1..width - 2];
        if labels.iter().zip(&point.label).any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0)) {
            return Err(Error::Parse(format!("labels of point {idx} do not match the scheme")));
        }
        values[idx] = Some(Complex64::new(fields[width - 2], fields[width - 1]));
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing value for point {i}"))))
        .collect::<Result<Vec<_>>>()?;
    s.symbol_from_values(values)
}

/// 17 significant digits, enough to reproduce every f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
