//! `tomo`: tomograms, reconstructions, star kernels and the property suite
//! from the command line.
//!
//! Exit status: 0 success, 1 a property failed, 2 invalid input or
//! parameters, 3 unreadable or unwritable files and malformed documents.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use tomo_core::operator::{pauli_z, OperatorMatrix};
use tomo_core::scheme::{
    convert_symbol, fmt_f64, heisenberg_evolve, intertwine_kernel, matrix_element_scheme, operator_of, star_kernel_with_order,
    symbol_from_csv, symbol_of, symbol_to_csv, KernelOrder, Scheme, SPARSE_THRESHOLD,
};
use tomo_core::spin::{spin_scheme, spin_tomogram, AngularGrid, SpinTomogram};
use tomo_core::symplectic::{
    star_w0_idempotency, symplectic_kernel_closed_form, symplectic_reconstruct, symplectic_tomogram, theta_nodes,
    FockSpace, IdempotencyQuadrature, ReconstructionGrid, SampledTomogram, SpectralTomogram, SymplecticPoint,
    SymplecticTomogram, TomogramMode, XGrid, IDEMPOTENCY_SAMPLE_POINTS,
};
use tomo_core::verify::{run_property_suite, VerifyOptions};
use tomo_core::{Error, HalfInteger};

#[derive(Parser)]
#[command(name = "tomo", version, about = "Star-product quantization through spin and symplectic tomograms")]
struct Cli {
    /// Worker threads for the parallel kernels; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random operator drawn by the command.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-j tomographic scheme.
    #[command(subcommand)]
    Spin(SpinCommand),
    /// Symplectic tomograms of a truncated oscillator.
    #[command(subcommand)]
    Symplectic(SymplecticCommand),
    /// Heisenberg evolution of a spin symbol under a Hamiltonian.
    Evolve(EvolveArgs),
    /// Transport a spin symbol to the matrix-element scheme or back.
    Intertwine(IntertwineArgs),
    /// Run the property suite and report every residual.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SpinCommand {
    /// Operator JSON to tomogram CSV.
    Tomogram(SpinIo),
    /// Tomogram CSV to operator JSON.
    Reconstruct(SpinIo),
    /// Star kernel as JSON.
    Kernel(SpinKernelArgs),
}

#[derive(Subcommand)]
enum SymplecticCommand {
    /// Operator JSON to spectral JSON or sampled CSV.
    Tomogram(SympTomogramArgs),
    /// Spectral JSON or sampled CSV to operator JSON.
    Reconstruct(SympReconstructArgs),
    /// Closed-form star kernel at one triple of points.
    Kernel(SympKernelArgs),
    /// Residuals of w0 ⋆ w0 = w0 at sample points.
    Idempotency(IdempotencyArgs),
}

#[derive(Args, Clone)]
struct SpinGridArgs {
    /// Twice the spin, so `--j 3` is j = 3/2.
    #[arg(long = "j", value_name = "TWICE_J")]
    twice_j: i32,
    #[arg(long)]
    n_alpha: Option<usize>,
    #[arg(long)]
    n_beta: Option<usize>,
}

#[derive(Args)]
struct SpinIo {
    #[command(flatten)]
    grid: SpinGridArgs,
    #[arg(long, short)]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpinKernelArgs {
    #[command(flatten)]
    grid: SpinGridArgs,
    /// Keep only entries with magnitude at least this.
    #[arg(long)]
    sparse: Option<Option<f64>>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum SympMode {
    Spectral,
    Sampled,
}

#[derive(Args)]
struct SympTomogramArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "spectral")]
    mode: SympMode,
    /// Must equal the operator dimension when given.
    #[arg(long)]
    n_trunc: Option<usize>,
    /// Size of the position matrix whose spectrum supplies the sampled masses.
    #[arg(long)]
    quad_dim: Option<usize>,
    #[arg(long, default_value_t = 64)]
    n_theta: usize,
    #[arg(long, default_value_t = 6.0)]
    x_max: f64,
    #[arg(long, default_value_t = 0.01)]
    dx: f64,
    #[arg(long, default_value_t = 0.05)]
    smoothing: f64,
}

#[derive(Args)]
struct SympReconstructArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Required for sampled CSV input; spectral JSON carries it.
    #[arg(long)]
    n_trunc: Option<usize>,
    #[arg(long)]
    quad_dim: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    r_max: f64,
    #[arg(long, default_value_t = 256)]
    n_r: usize,
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    epsilon: f64,
}

#[derive(Args)]
struct SympKernelArgs {
    /// First point `X,mu,nu`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x1: SymplecticPoint,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x2: SymplecticPoint,
    /// Output point; its ν must be nonzero.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x: SymplecticPoint,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IdempotencyArgs {
    /// Extra `X,mu,nu` points; the built-in five are used when none are given.
    #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
    points: Vec<SymplecticPoint>,
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    grid: SpinGridArgs,
    /// Operator JSON of the observable.
    #[arg(long, short)]
    input: PathBuf,
    /// Operator JSON of the Hamiltonian; σz when omitted.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    #[arg(long)]
    time: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Symbol CSV of the evolved observable.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the evolved operator as JSON.
    #[arg(long)]
    operator_output: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Direction {
    /// Spin symbol to matrix elements.
    ToMatrix,
    /// Matrix elements to spin symbol.
    FromMatrix,
}

#[derive(Args)]
struct IntertwineArgs {
    #[command(flatten)]
    grid: SpinGridArgs,
    #[arg(long, value_enum, default_value = "to-matrix")]
    direction: Direction,
    /// Symbol CSV in the source scheme.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Pair the quantizers in the wrong order; the suite must then fail.
    #[arg(long)]
    swap_kernel_order: bool,
    /// Smaller samples, same properties.
    #[arg(long)]
    quick: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_point(text: &str) -> Result<SymplecticPoint, String> {
    let v: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, mu, nu] => SymplecticPoint::new(x, mu, nu).map_err(|e| e.to_string()),
        _ => Err(format!("expected X,mu,nu, got {text:?}")),
    }
}

/// Failure classes, one per nonzero exit status.
#[derive(Debug)]
enum Failure {
    Property(String),
    Invalid(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Property(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Property(m) | Failure::Invalid(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Io(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn read_operator(path: &Path) -> Result<OperatorMatrix, Failure> {
    let text = read(path)?;
    OperatorMatrix::from_json(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

impl SpinGridArgs {
    fn grid(&self) -> Result<AngularGrid, Failure> {
        if self.twice_j < 1 {
            return Err(Failure::Invalid(format!("--j takes twice the spin and must be at least 1, got {}", self.twice_j)));
        }
        let j = HalfInteger::from_twice(self.twice_j);
        let default = AngularGrid::default_for(j)?;
        let n_alpha = self.n_alpha.unwrap_or(default.n_alpha());
        let n_beta = self.n_beta.unwrap_or(default.n_beta());
        Ok(AngularGrid::new(j, n_alpha, n_beta)?)
    }

    fn scheme(&self) -> Result<Scheme, Failure> {
        Ok(spin_scheme(&self.grid()?)?)
    }
}

fn spin_tomogram_cmd(args: &SpinIo) -> Outcome {
    let grid = args.grid.grid()?;
    let a = read_operator(&args.input)?;
    if a.dim() != grid.j().multiplicity() {
        return Err(Failure::Invalid(format!(
            "operator has dimension {} but spin {} needs {}",
            a.dim(),
            grid.j(),
            grid.j().multiplicity()
        )));
    }
    let t = spin_tomogram(&a, &grid)?;
    emit(args.output.as_deref(), &t.to_csv()?)
}

fn spin_reconstruct_cmd(args: &SpinIo) -> Outcome {
    let grid = args.grid.grid()?;
    let text = read(&args.input)?;
    let t = SpinTomogram::from_csv(&text, &grid).map_err(|e| Failure::Io(format!("{}: {e}", args.input.display())))?;
    let s = spin_scheme(&grid)?;
    let a = operator_of(&s.symbol_from_values(t.values().to_vec())?, &s)?;
    emit(args.output.as_deref(), &with_newline(a.to_json()))
}

fn spin_kernel_cmd(args: &SpinKernelArgs) -> Outcome {
    let s = args.grid.scheme()?;
    let k = star_kernel_with_order(&s, KernelOrder::default());
    let k = match args.sparse {
        None => k,
        Some(t) => {
            let t = t.unwrap_or(SPARSE_THRESHOLD);
            if !(t.is_finite() && t >= 0.0) {
                return Err(Failure::Invalid(format!("sparse threshold must be nonnegative, got {t}")));
            }
            k.to_sparse(t)
        }
    };
    emit(args.output.as_deref(), &with_newline(k.to_json()))
}

fn fock_space(n_trunc: usize, quad_dim: Option<usize>) -> Result<FockSpace, Failure> {
    Ok(match quad_dim {
        Some(m) => FockSpace::with_quadrature_dim(n_trunc, m)?,
        None => FockSpace::new(n_trunc)?,
    })
}

fn symp_tomogram_cmd(args: &SympTomogramArgs) -> Outcome {
    let a = read_operator(&args.input)?;
    if let Some(n) = args.n_trunc {
        if n != a.dim() {
            return Err(Failure::Invalid(format!("--n-trunc {n} differs from the operator dimension {}", a.dim())));
        }
    }
    if args.n_theta == 0 {
        return Err(Failure::Invalid("--n-theta must be positive".into()));
    }
    let thetas = theta_nodes(args.n_theta);
    match args.mode {
        SympMode::Spectral => {
            if args.quad_dim.is_some_and(|m| m != a.dim()) {
                return Err(Failure::Invalid("--quad-dim applies to sampled tomograms only".into()));
            }
            let fock = FockSpace::new(a.dim())?;
            match symplectic_tomogram(&a, &fock, &thetas, &TomogramMode::Spectral)? {
                SymplecticTomogram::Spectral(t) => emit(args.output.as_deref(), &with_newline(t.to_json())),
                SymplecticTomogram::Sampled(_) => unreachable!("spectral mode returns spectral data"),
            }
        }
        SympMode::Sampled => {
            let fock = fock_space(a.dim(), Some(args.quad_dim.unwrap_or(a.dim().max(1024))))?;
            let mode = TomogramMode::Sampled { x_grid: XGrid::new(args.x_max, args.dx)?, smoothing: args.smoothing };
            match symplectic_tomogram(&a, &fock, &thetas, &mode)? {
                SymplecticTomogram::Sampled(t) => emit(args.output.as_deref(), &t.to_csv()?),
                SymplecticTomogram::Spectral(_) => unreachable!("sampled mode returns sampled data"),
            }
        }
    }
}

fn symp_reconstruct_cmd(args: &SympReconstructArgs) -> Outcome {
    let grid = ReconstructionGrid::new(args.r_max, args.n_r, args.epsilon)?;
    let text = read(&args.input)?;
    let bad = |e: Error| Failure::Io(format!("{}: {e}", args.input.display()));
    let (tomo, fock) = if text.trim_start().starts_with('{') {
        let t = SpectralTomogram::from_json(&text).map_err(bad)?;
        if args.n_trunc.is_some_and(|n| n != t.n_trunc()) {
            return Err(Failure::Invalid(format!("--n-trunc differs from the tomogram's {}", t.n_trunc())));
        }
        let quad = (t.eigenvalues().len() != t.n_trunc()).then_some(t.eigenvalues().len());
        let fock = fock_space(t.n_trunc(), quad.or(args.quad_dim))?;
        (SymplecticTomogram::Spectral(t), fock)
    } else {
        let t = SampledTomogram::from_csv(&text).map_err(bad)?;
        let n = args.n_trunc.ok_or_else(|| Failure::Invalid("sampled input needs --n-trunc".into()))?;
        (SymplecticTomogram::Sampled(t), fock_space(n, args.quad_dim)?)
    };
    let a = symplectic_reconstruct(&tomo, &fock, &grid)?;
    emit(args.output.as_deref(), &with_newline(a.to_json()))
}

fn complex_json(z: Complex64) -> serde_json::Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

fn symp_kernel_cmd(args: &SympKernelArgs) -> Outcome {
    let k = symplectic_kernel_closed_form(&args.x1, &args.x2, &args.x)?;
    let point = |p: &SymplecticPoint| serde_json::json!([p.x(), p.mu(), p.nu()]);
    let doc = serde_json::json!({
        "x1": point(&args.x1),
        "x2": point(&args.x2),
        "x": point(&args.x),
        "delta_argument": k.constraint,
        "phase_density": complex_json(k.phase_density),
    });
    emit(args.output.as_deref(), &with_newline(serde_json::to_string_pretty(&doc).expect("kernel report serializes")))
}

fn idempotency_cmd(args: &IdempotencyArgs) -> Outcome {
    let points = if args.points.is_empty() {
        IDEMPOTENCY_SAMPLE_POINTS
            .iter()
            .map(|&(x, m, n)| SymplecticPoint::new(x, m, n))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        args.points.clone()
    };
    let rows = star_w0_idempotency(&points, &IdempotencyQuadrature::default())?;
    let mut out = String::from("X,mu,nu,star_re,star_im,w0,residual,error_estimate\n");
    for r in &rows {
        let p = &r.point;
        let fields = [p.x(), p.mu(), p.nu(), r.star_value.re, r.star_value.im, r.target, r.residual, r.error_estimate];
        out.push_str(&fields.map(fmt_f64).join(","));
        out.push('\n');
    }
    emit(args.output.as_deref(), &out)?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    if worst >= args.tolerance {
        return Err(Failure::Property(format!("idempotency residual {worst:e} exceeds {:e}", args.tolerance)));
    }
    Ok(())
}

fn evolve_cmd(args: &EvolveArgs) -> Outcome {
    let s = args.grid.scheme()?;
    let a = read_operator(&args.input)?;
    let h = match &args.hamiltonian {
        Some(p) => read_operator(p)?,
        None if s.hilbert_dim() == 2 => pauli_z(),
        None => return Err(Failure::Invalid("--hamiltonian is required unless j = 1/2".into())),
    };
    for (what, m) in [("observable", &a), ("Hamiltonian", &h)] {
        if m.dim() != s.hilbert_dim() {
            return Err(Failure::Invalid(format!("{what} has dimension {}, expected {}", m.dim(), s.hilbert_dim())));
        }
    }
    let k = star_kernel_with_order(&s, KernelOrder::default());
    let f = heisenberg_evolve(&symbol_of(&a, &s)?, &symbol_of(&h, &s)?, args.time, args.steps, &k, &s)?;
    emit(args.output.as_deref(), &symbol_to_csv(&f, &s)?)?;
    if let Some(p) = &args.operator_output {
        emit(Some(p), &with_newline(operator_of(&f, &s)?.to_json()))?;
    }
    Ok(())
}

fn intertwine_cmd(args: &IntertwineArgs) -> Outcome {
    let spin = args.grid.scheme()?;
    let me = matrix_element_scheme(spin.hilbert_dim())?;
    let (source, target) = match args.direction {
        Direction::ToMatrix => (&spin, &me),
        Direction::FromMatrix => (&me, &spin),
    };
    let text = read(&args.input)?;
    let f = symbol_from_csv(&text, source).map_err(|e| Failure::Io(format!("{}: {e}", args.input.display())))?;
    let g = convert_symbol(&f, &intertwine_kernel(source, target)?)?;
    emit(args.output.as_deref(), &symbol_to_csv(&g, target)?)
}

fn verify_cmd(args: &VerifyArgs, seed: u64) -> Outcome {
    let kernel_order = if args.swap_kernel_order { KernelOrder::Swapped } else { KernelOrder::default() };
    let report = run_property_suite(&VerifyOptions { kernel_order, seed, quick: args.quick })?;
    emit(args.output.as_deref(), &report.to_text())?;
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Property(format!("failed properties: {}", names.join(", "))))
    }
}

fn run(cli: &Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Invalid("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Invalid(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Spin(SpinCommand::Tomogram(a)) => spin_tomogram_cmd(a),
        Command::Spin(SpinCommand::Reconstruct(a)) => spin_reconstruct_cmd(a),
        Command::Spin(SpinCommand::Kernel(a)) => spin_kernel_cmd(a),
        Command::Symplectic(SymplecticCommand::Tomogram(a)) => symp_tomogram_cmd(a),
        Command::Symplectic(SymplecticCommand::Reconstruct(a)) => symp_reconstruct_cmd(a),
        Command::Symplectic(SymplecticCommand::Kernel(a)) => symp_kernel_cmd(a),
        Command::Symplectic(SymplecticCommand::Idempotency(a)) => idempotency_cmd(a),
        Command::Evolve(a) => evolve_cmd(a),
        Command::Intertwine(a) => intertwine_cmd(a),
        Command::Verify(a) => verify_cmd(a, cli.seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tomo: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
