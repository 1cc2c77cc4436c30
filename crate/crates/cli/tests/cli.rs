use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

use kcontact::bundles::pontryagin_chart;
use kcontact::lagrangian::LagrangianSystem;
use kcontact::models::{by_name, ModelParams};
use kcontact::symcore::{parse_poly, Poly, Symbol};
use kcontact::unified::sr_hamiltonian;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn kcontact(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_kcontact"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn k(name: &str) -> Poly {
    Poly::var(&Symbol::constant(name).unwrap())
}

fn s(name: &str) -> Poly {
    Poly::var(&Symbol::lookup(name).unwrap())
}

/// Every symbol the engine can print for `sys`.
fn printable(sys: &LagrangianSystem, pontryagin: &[Symbol]) -> Vec<Symbol> {
    let mut set: BTreeSet<Symbol> = pontryagin.iter().cloned().collect();
    set.extend(sys.lagrangian().symbols());
    set.extend(sr_hamiltonian(sys).symbols());
    let el = sys.el_residual();
    for r in el.field.iter().chain([&el.s_equation]) {
        set.extend(r.symbols());
    }
    set.into_iter().collect()
}

fn assert_reparses(text: &str, symbols: &[Symbol]) {
    let mut seen = 0;
    for line in text.lines() {
        let Some((label, rhs)) = line.split_once(" = ") else {
            continue;
        };
        let p = parse_poly(rhs, symbols).unwrap_or_else(|e| panic!("{label}: {e}"));
        assert_eq!(p.to_string(), rhs, "{label}");
        seen += 1;
    }
    assert!(seen >= 5, "{text}");
}

#[test]
fn derive_damped_string() {
    let r = kcontact(&["derive", "damped_string"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("p^t = ρ*u_t"), "{}", r.stdout);
    let line = r.stdout.lines().find(|l| l.starts_with("EL[u] = ")).unwrap();
    let m = by_name("damped_string", &ModelParams::symbolic()).unwrap();
    let syms = printable(&m.system, m.pontryagin.coordinates());
    let got = parse_poly(&line["EL[u] = ".len()..], &syms).unwrap();
    let want = k("ρ") * s("u_tt") - k("τ") * s("u_xx") + k("γ") * k("ρ") * s("u_t");
    assert_eq!(got, want);
    assert!(r.stdout.contains("residual matches: ρ u_tt - τ u_xx + γ ρ u_t"));
}

#[test]
fn derive_output_reparses() {
    for name in ["damped_string", "damped_klein_gordon", "dissipative_maxwell"] {
        let r = kcontact(&["derive", "--model", name]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let m = by_name(name, &ModelParams::symbolic()).unwrap();
        assert_reparses(&r.stdout, &printable(&m.system, m.pontryagin.coordinates()));
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "inline.cfg",
        "[model]\nn = 2\nk = 1\nconstants = κ\nlagrangian = 1/2*v_1_1^2 + 1/2*v_2_1^2 - κ*q_1*q_2 - 1/3*s_1\n",
    );
    let r = kcontact(&["derive", "--config", &cfg]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let chart = pontryagin_chart(2, 1).unwrap();
    let l = Poly::frac(1, 2) * Poly::var(chart.vel(0, 0)).pow(2) + Poly::frac(1, 2) * Poly::var(chart.vel(1, 0)).pow(2)
        - k("κ") * Poly::var(chart.base(0)) * Poly::var(chart.base(1))
        - Poly::frac(1, 3) * Poly::var(chart.diss(0));
    let sys = LagrangianSystem::new(&chart, l).unwrap();
    assert_reparses(&r.stdout, &printable(&sys, chart.coordinates()));
}

#[test]
fn derive_maxwell_names_the_field_equation() {
    let r = kcontact(&["derive", "dissipative_maxwell"]);
    assert_eq!(r.code, 0);
    assert!(
        r.stdout.contains("residual matches: -(1/μ₀)(∂_α F^{αμ} + γ_α F^{αμ})"),
        "{}",
        r.stdout
    );
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("EL[A_")).count(), 4);
}

#[test]
fn derive_zero_lagrangian() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "zero.cfg", "[model]\nn = 1\nk = 2\nlagrangian = 0\n");
    let r = kcontact(&["derive", "--config", &cfg]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for want in ["L = 0", "E_L = 0", "p_1_1 = 0", "p_1_2 = 0", "EL[q_1] = 0"] {
        assert!(r.stdout.lines().any(|l| l == want), "missing `{want}`:\n{}", r.stdout);
    }
}

#[test]
fn constraint_listings() {
    let r = kcontact(&["constraints", "damped_string"]);
    assert_eq!(r.code, 0);
    assert!(
        r.stdout
            .contains("generation 1: 2 constraints; stabilized; free parameters: 6"),
        "{}",
        r.stdout
    );

    let r = kcontact(&["constraints", "damped_klein_gordon"]);
    assert_eq!(r.code, 0);
    let last = r.stdout.lines().last().unwrap();
    assert!(last.starts_with("generation 1: 4 constraints; stabilized;"), "{last}");

    // regular, no s-dependence: only the graph of the Legendre map
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "half.cfg",
        "[model]\nn = 1\nk = 1\nlagrangian = 1/2*v_1_1^2\n",
    );
    let r = kcontact(&["constraints", "--config", &cfg]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let listed: Vec<&str> = r.stdout.lines().filter_map(|l| l.trim().strip_suffix(" = 0")).collect();
    let chart = pontryagin_chart(1, 1).unwrap();
    let sys = LagrangianSystem::new(&chart, Poly::frac(1, 2) * Poly::var(chart.vel(0, 0)).pow(2)).unwrap();
    let graph: Vec<String> = sys.legendre().graph_relations().iter().map(|p| p.to_string()).collect();
    assert_eq!(listed, graph);
}

#[test]
fn non_stabilization_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "chain.cfg",
        "[model]\nn = 2\nk = 1\nlagrangian = 1/2*v_1_1^2 + q_1*q_2\n\n[constraints]\nmax_iterations = 1\n",
    );
    let r = kcontact(&["constraints", "--config", &cfg]);
    assert_eq!(r.code, 3, "{}{}", r.stdout, r.stderr);
    assert!(r.stderr.contains("did not stabilize"));
    // the flag wins over the file
    let r = kcontact(&["constraints", "--config", &cfg, "--max-iterations", "20"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

/// Peaks of the projection onto `sin(pi x)`, and the slope of their logs.
fn decay_from_csv(csv: &str) -> f64 {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let first = header.iter().position(|h| *h == "u_0").unwrap();
    let nodes = header.len() - first;
    let dx = 1.0 / (nodes - 1) as f64;
    let mut series = Vec::new();
    for l in lines {
        let cols: Vec<f64> = l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect();
        let a: f64 = (0..nodes)
            .map(|j| cols[first + j] * (std::f64::consts::PI * j as f64 * dx).sin())
            .sum::<f64>()
            * 2.0
            * dx;
        series.push((cols[0], a));
    }
    let mut pts = Vec::new();
    for w in series.windows(3) {
        let (a, b, c) = (w[0].1.abs(), w[1].1.abs(), w[2].1.abs());
        if b > a && b >= c {
            pts.push((w[1].0, b.ln()));
        }
    }
    assert!(pts.len() >= 3, "{pts:?}");
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    -sxy / sxx
}

#[test]
fn simulate_writes_decaying_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("string.csv");
    let out_s = out.display().to_string();
    let r = kcontact(&[
        "simulate",
        "damped_string",
        "--N",
        "400",
        "--gamma",
        "0.1",
        "--T",
        "5",
        "--out",
        &out_s,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = std::fs::read_to_string(&out).unwrap();
    let decay = decay_from_csv(&csv);
    assert!((decay - 0.05).abs() / 0.05 < 0.01, "{decay}");
    assert!(dir.path().join("string.diagnostics.csv").exists());
    // residual column is filled on interior snapshots
    let filled = csv.lines().skip(1).filter(|l| l.split(',').nth(3) != Some("")).count();
    assert!(filled > 100);

    let again = dir.path().join("again.csv");
    let args = [
        "simulate",
        "damped_string",
        "--N",
        "400",
        "--gamma",
        "0.1",
        "--T",
        "5",
        "--out",
    ];
    let r2 = kcontact(&[&args[..], &[again.to_str().unwrap()]].concat());
    assert_eq!(r2.code, 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn simulate_without_out_prints_csv() {
    let r = kcontact(&["simulate", "maxwell_1d", "--N", "32", "--T", "0.5", "--gamma0", "0.2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("t,energy,accumulator,residual,u_0"));
    let again = kcontact(&["simulate", "maxwell_1d", "--N", "32", "--T", "0.5", "--gamma0", "0.2"]);
    assert_eq!(r.stdout, again.stdout);
}

#[test]
fn config_values_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sim.cfg",
        "[model]\nname = damped_klein_gordon\n\n[simulate]\nN = 50\nT = 1\nm2 = 2\n",
    );
    let out = dir.path().join("kg.csv").display().to_string();
    let r = kcontact(&["simulate", "--config", &cfg, "--out", &out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("grid: 50 cells"), "{}", r.stdout);
    let r = kcontact(&["simulate", "--config", &cfg, "--N", "60", "--out", &out]);
    assert!(r.stdout.contains("grid: 60 cells"), "{}", r.stdout);
}

#[test]
fn verify_undamped_string_conserves_energy() {
    let r = kcontact(&["verify", "damped_string", "--gamma", "0"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let drift = r.stdout.lines().find(|l| l.contains("energy drift")).unwrap();
    assert!(drift.starts_with("PASS"), "{drift}");
    assert!(!r.stdout.contains("decay rate"));
}

#[test]
fn verify_maxwell_decay() {
    let r = kcontact(&["verify", "maxwell_1d", "--gamma0", "0.2"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let decay = r.stdout.lines().find(|l| l.contains("decay rate")).unwrap();
    assert!(decay.starts_with("PASS"), "{decay}");
    assert!(r.stdout.lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn verify_failure_exits_2() {
    // a 40-cell grid misses the energy-balance tolerance
    let r = kcontact(&["verify", "damped_string", "--N", "40"]);
    assert_eq!(r.code, 2, "{}", r.stdout);
    assert!(r.stdout.lines().any(|l| l.starts_with("FAIL")));
    assert!(r.stdout.contains("summary: "));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad_poly = write(
        dir.path(),
        "bad.cfg",
        "[model]\nn = 1\nk = 1\nlagrangian =   1/2*v_1_1^2 + w\n",
    );
    let bad_syntax = write(dir.path(), "syntax.cfg", "[model]\nn 1\n");
    let inline = write(
        dir.path(),
        "inline.cfg",
        "[model]\nn = 1\nk = 1\nlagrangian = 1/2*v_1_1^2\n",
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["derive", "damped_string", "--gamma", "1"],
        vec!["derive", "no_such_model"],
        vec!["derive"],
        vec!["derive", "string", "--model", "kg"],
        vec!["derive", "--config", &bad_poly],
        vec!["derive", "--config", &bad_syntax],
        vec!["simulate", "--config", &inline],
        vec!["simulate", "damped_string", "--N", "100", "--dt", "0.1"],
    ];
    for args in &cases {
        let r = kcontact(args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty(), "{args:?}");
    }
    let r = kcontact(&["derive", "--config", &bad_poly]);
    assert!(r.stderr.contains("line 4, column 30"), "{}", r.stderr);
    let r = kcontact(&["simulate", "damped_string", "--N", "100", "--dt", "0.1"]);
    assert!(r.stderr.contains("suggested dt"), "{}", r.stderr);
    assert_eq!(kcontact(&["--help"]).code, 0);
}

#[test]
fn classify_reports_regularity() {
    let r = kcontact(&["classify", "damped_string"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("det W = -ρ*τ"), "{}", r.stdout);
    assert!(r.stdout.contains("classification: regular"));
    let r = kcontact(&["classify", "dissipative_maxwell"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("classification: singular (rank 6)"));
    assert!(r.stdout.contains("Reeb undefined; use unified formalism"));
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("derive.txt");
    let r = kcontact(&["derive", "damped_string", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        kcontact(&["derive", "damped_string"]).stdout
    );
}
