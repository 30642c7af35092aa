use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tomo_core::operator::{random_hermitian, OperatorMatrix};
use tomo_core::symplectic::{ground_state_tomogram, SymplecticPoint};

fn tomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomo")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn write_operator(&self, name: &str, a: &OperatorMatrix) -> String {
        let p = self.path(name);
        std::fs::write(&p, a.to_json()).unwrap();
        s(&p)
    }
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn csv_rows(p: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect()
}

#[test]
fn identity_tomogram_is_all_ones() {
    let w = Work::new();
    let input = w.write_operator("id.json", &OperatorMatrix::identity(3));
    let out = w.path("t.csv");
    let o = tomo(&["spin", "tomogram", "--j", "2", "-i", &input, "-o", &s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3 * 6 * 4);
    assert!(rows.iter().all(|r| (r[3] - 1.0).abs() < 1e-12));
}

#[test]
fn spin_up_projector_rows_follow_half_angle() {
    let w = Work::new();
    let input = w.write_operator("up.json", &OperatorMatrix::basis(2, 0, 0));
    let out = w.path("t.csv");
    assert_eq!(code(&tomo(&["spin", "tomogram", "--j", "1", "-i", &input, "-o", &s(&out)])), 0);
    let rows = csv_rows(&out);
    let up: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == 1.0).collect();
    assert_eq!(up.len(), 4 * 3);
    for r in up {
        assert!((r[3] - (r[2] / 2.0).cos().powi(2)).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn malformed_and_missing_input() {
    let w = Work::new();
    let bad = w.path("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"re\": [[1, 0]").unwrap();
    let o = tomo(&["spin", "tomogram", "--j", "1", "-i", &s(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("parse"), "{}", stderr(&o));
    assert_eq!(code(&tomo(&["spin", "tomogram", "--j", "1", "-i", &s(&w.path("absent.json"))])), 3);
    let wrong_dim = w.write_operator("three.json", &OperatorMatrix::identity(3));
    assert_eq!(code(&tomo(&["spin", "tomogram", "--j", "1", "-i", &wrong_dim])), 2);
    assert_eq!(code(&tomo(&["spin", "tomogram", "--j", "0", "-i", &wrong_dim])), 2);
}

#[test]
fn spin_round_trip_random_hermitian() {
    let w = Work::new();
    for twice in [1, 2, 3] {
        let a = random_hermitian(twice + 1, 40 + twice as u64);
        let input = w.write_operator("a.json", &a);
        let (t, back) = (w.path("t.csv"), w.path("back.json"));
        let j = twice.to_string();
        assert_eq!(code(&tomo(&["spin", "tomogram", "--j", &j, "-i", &input, "-o", &s(&t)])), 0);
        let o = tomo(&["spin", "reconstruct", "--j", &j, "-i", &s(&t), "-o", &s(&back)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let rec = OperatorMatrix::from_json(&std::fs::read_to_string(&back).unwrap()).unwrap();
        assert!(rec.max_abs_diff(&a) < 1e-10);
    }
}

#[test]
fn coarse_grid_reports_required_sizes() {
    let w = Work::new();
    let input = w.write_operator("id.json", &OperatorMatrix::identity(3));
    let o = tomo(&["spin", "tomogram", "--j", "2", "--n-alpha", "4", "-i", &input]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("n_alpha >= 5") && msg.contains("n_beta >= 3"), "{msg}");
}

#[test]
fn ground_state_sampled_tomogram_matches_closed_form() {
    let w = Work::new();
    let input = w.write_operator("vac.json", &OperatorMatrix::basis(64, 0, 0));
    let out = w.path("w.csv");
    let args = ["symplectic", "tomogram", "--mode", "sampled", "--n-theta", "2", "--x-max", "4", "--dx", "0.01"];
    let o = tomo(&[&args[..], &["-i", &input, "-o", &s(&out)]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2 * 801);
    for r in rows {
        let pt = SymplecticPoint::new(r[1], r[0].cos(), r[0].sin()).unwrap();
        assert!((r[2] - ground_state_tomogram(&pt)).abs() < 2e-3, "{r:?}");
        assert_eq!(r[3], 0.05);
    }
}

#[test]
fn symplectic_spectral_round_trip() {
    let w = Work::new();
    let input = w.write_operator("one.json", &OperatorMatrix::basis(64, 1, 1));
    let (t, back) = (w.path("t.json"), w.path("back.json"));
    assert_eq!(code(&tomo(&["symplectic", "tomogram", "-i", &input, "-o", &s(&t)])), 0);
    let o = tomo(&["symplectic", "reconstruct", "-i", &s(&t), "-o", &s(&back)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rec = OperatorMatrix::from_json(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert!(rec.leading_block(8).max_abs_diff(&OperatorMatrix::basis(8, 1, 1)) < 1e-3);
}

#[test]
fn nonpositive_damping_is_rejected() {
    let w = Work::new();
    let input = w.write_operator("one.json", &OperatorMatrix::basis(8, 1, 1));
    let t = w.path("t.json");
    assert_eq!(code(&tomo(&["symplectic", "tomogram", "-i", &input, "-o", &s(&t)])), 0);
    for eps in ["0", "-0.01"] {
        let o = tomo(&["symplectic", "reconstruct", "-i", &s(&t), "--epsilon", eps]);
        assert_eq!(code(&o), 2, "{}", stderr(&o));
    }
}

#[test]
fn idempotency_report() {
    let w = Work::new();
    let out = w.path("idem.csv");
    let o = tomo(&["symplectic", "idempotency", "-o", &s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[6] < 1e-3));
    let o = tomo(&["symplectic", "idempotency", "--point", "0,1,0"]);
    assert_eq!(code(&o), 2, "ν = 0 has no closed-form kernel: {}", stderr(&o));
}

#[test]
fn symplectic_kernel_report() {
    let o = tomo(&["symplectic", "kernel", "--x1", "0,1,0.5", "--x2", "0.2,-0.3,1", "--x", "0,1,1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // μ(ν1 + ν2) − ν(μ1 + μ2) = 1.5 − 0.7
    assert!((doc["delta_argument"].as_f64().unwrap() - 0.8).abs() < 1e-15);
    let z = &doc["phase_density"];
    let modulus = z["re"].as_f64().unwrap().hypot(z["im"].as_f64().unwrap());
    assert!((modulus - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
    assert_eq!(code(&tomo(&["symplectic", "kernel", "--x1", "0,1,0.5", "--x2", "0,1,1", "--x", "0,1,0"])), 2);
}

// the fault-injected build evolves backwards; the property suite reports that
#[cfg(not(feature = "swap-kernel-order"))]
#[test]
fn evolve_matches_conjugation() {
    let w = Work::new();
    let input = w.write_operator("sx.json", &tomo_core::operator::pauli_x());
    let (sym, op) = (w.path("f.csv"), w.path("a.json"));
    let t = (PI / 4.0).to_string();
    let o = tomo(&["evolve", "--j", "1", "-i", &input, "--time", &t, "-o", &s(&sym), "--operator-output", &s(&op)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // e^{iσz t} σx e^{−iσz t} = cos 2t σx − sin 2t σy, which is −σy at t = π/4
    let a = OperatorMatrix::from_json(&std::fs::read_to_string(&op).unwrap()).unwrap();
    let expected = tomo_core::operator::pauli_y().scale(num_complex::Complex64::new(-1.0, 0.0));
    assert!(a.max_abs_diff(&expected) < 1e-6);
    assert!(std::fs::read_to_string(&sym).unwrap().starts_with("index,m1_twice,alpha,beta,re,im\n"));
}

#[test]
fn intertwine_round_trip_through_cli() {
    let w = Work::new();
    let input = w.write_operator("a.json", &random_hermitian(3, 9));
    let (f, g, back) = (w.path("f.csv"), w.path("g.csv"), w.path("back.csv"));
    let o = tomo(&["evolve", "--j", "2", "-i", &input, "--hamiltonian", &input, "--time", "0", "--steps", "1", "-o", &s(&f)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&tomo(&["intertwine", "--j", "2", "-i", &s(&f), "-o", &s(&g)])), 0);
    let o = tomo(&["intertwine", "--j", "2", "--direction", "from-matrix", "-i", &s(&g), "-o", &s(&back)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (a, b) = (csv_rows(&f), csv_rows(&back));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x[4] - y[4]).abs() < 1e-10 && (x[5] - y[5]).abs() < 1e-10);
    }
    assert_eq!(code(&tomo(&["intertwine", "--j", "1", "-i", &s(&f)])), 3);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let w = Work::new();
    let input = w.write_operator("a.json", &random_hermitian(24, 5));
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let t = w.path(&format!("t{threads}.json"));
        let r = w.path(&format!("r{threads}.json"));
        assert_eq!(code(&tomo(&["--threads", threads, "symplectic", "tomogram", "-i", &input, "-o", &s(&t)])), 0);
        assert_eq!(code(&tomo(&["--threads", threads, "symplectic", "reconstruct", "-i", &s(&t), "-o", &s(&r)])), 0);
        let k = tomo(&["--threads", threads, "spin", "kernel", "--j", "2"]);
        outputs.push((std::fs::read(&t).unwrap(), std::fs::read(&r).unwrap(), k.stdout));
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn unknown_flags_are_validation_errors() {
    assert_eq!(code(&tomo(&["spin", "tomogram", "--bogus"])), 2);
    assert_eq!(code(&tomo(&["--threads", "0", "verify", "--quick"])), 2);
}

#[cfg(not(feature = "swap-kernel-order"))]
#[test]
fn verify_default_run_passes() {
    let o = tomo(&["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = report.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert!(lines.len() >= 30);
    assert!(lines.iter().all(|l| l.contains("measured") && l.contains("tolerance")));
}

#[test]
fn verify_with_swapped_kernel_fails() {
    let o = tomo(&["verify", "--quick", "--swap-kernel-order"]);
    assert_eq!(code(&o), 1);
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.lines().any(|l| l.starts_with("FAIL star equals product symbol")));
    assert!(report.lines().any(|l| l.starts_with("FAIL bracket is commutator symbol")));
}

#[cfg(feature = "swap-kernel-order")]
#[test]
fn fault_injected_build_fails_verify() {
    assert_eq!(code(&tomo(&["verify", "--quick"])), 1);
}
