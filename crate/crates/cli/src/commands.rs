//! The five subcommands. Each returns the text it would print.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use kcontact::bundles::pontryagin_chart;
use kcontact::hamiltonian::HamiltonianSystem;
use kcontact::lagrangian::{LagrangianSystem, Regularity};
use kcontact::models::{self, ModelBundle, ModelParams};
use kcontact::pde::verify::{self as suites, Check, VerifyOptions};
use kcontact::pde::{
    fit_decay, fit_frequency, residual_check, simulate_damped_wave, simulate_maxwell_1d, simulate_telegrapher, Axes,
    Boundary, Grid1D, Init, MaxwellInit, MaxwellParams, SimConfig, SimReport, WaveParams,
};
use kcontact::symcore::{parse_poly, proportional, Rational, Symbol};
use kcontact::unified::{constraint_algorithm, sr_equations, sr_hamiltonian};
use thiserror::Error;

use crate::config::{ConfigError, InlineModel, ModelSource, Numeric};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Engine(#[from] kcontact::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification { .. } => 2,
            CliError::Engine(kcontact::Error::NonStabilization(_) | kcontact::Error::NoDynamics { .. }) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output of a command; `failed` counts failed verification checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failed: usize,
    pub total: usize,
}

impl Outcome {
    fn text(text: String) -> Outcome {
        Outcome {
            text,
            ..Outcome::default()
        }
    }
}

/// Canonical built-in name for a model or simulator alias.
pub fn canonical(name: &str) -> Option<&'static str> {
    match name {
        "damped_string" | "string" | "damped_wave" => Some("damped_string"),
        "damped_klein_gordon" | "klein_gordon" | "kg" | "telegrapher" => Some("damped_klein_gordon"),
        "dissipative_maxwell" | "maxwell" | "maxwell_1d" => Some("dissipative_maxwell"),
        _ => None,
    }
}

fn builtin(name: &str) -> CliResult<ModelBundle> {
    let canon = canonical(name).ok_or_else(|| kcontact::Error::UnknownModel(name.to_string()))?;
    Ok(models::by_name(canon, &ModelParams::symbolic())?)
}

/// The residual in words, as it is normally written for each model.
fn residual_form(name: &str) -> &'static str {
    match name {
        "damped_string" => "ρ u_tt - τ u_xx + γ ρ u_t",
        "damped_klein_gordon" => "(□ + m² - γ_0 ∂_0 + γ_1 ∂_1 + γ_2 ∂_2 + γ_3 ∂_3) φ",
        _ => "-(1/μ₀)(∂_α F^{αμ} + γ_α F^{αμ})",
    }
}

pub struct Loaded {
    pub name: String,
    pub system: LagrangianSystem,
    pub bundle: Option<ModelBundle>,
}

pub fn load(source: &ModelSource) -> CliResult<Loaded> {
    match source {
        ModelSource::Builtin(name) => {
            let bundle = builtin(name)?;
            Ok(Loaded {
                name: bundle.name.to_string(),
                system: bundle.system.clone(),
                bundle: Some(bundle),
            })
        }
        ModelSource::Inline(m) => Ok(Loaded {
            name: "inline".into(),
            system: inline_system(m)?,
            bundle: None,
        }),
    }
}

/// Parses the inline Lagrangian over `q_i`, `v_i_a`, `s_a` and the declared
/// constants.
pub fn inline_system(m: &InlineModel) -> CliResult<LagrangianSystem> {
    let chart = pontryagin_chart(m.n, m.k)?;
    let mut symbols: Vec<Symbol> = chart.bases().to_vec();
    symbols.extend(chart.velocities().cloned());
    symbols.extend(chart.dissipations().iter().cloned());
    for c in &m.constants {
        symbols.push(Symbol::constant(c)?);
    }
    let l = parse_poly(&m.lagrangian, &symbols).map_err(|e| match (e, m.position) {
        (kcontact::Error::Parse { column, message, .. }, Some((line, start))) => kcontact::Error::Parse {
            line,
            column: start + column - 1,
            message,
        },
        (e, _) => e,
    })?;
    Ok(LagrangianSystem::new(&chart, l)?)
}

pub fn derive(source: &ModelSource) -> CliResult<Outcome> {
    let m = load(source)?;
    let sys = &m.system;
    let c = sys.chart();
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", m.name);
    let names: Vec<&str> = c.coordinates().iter().map(|s| s.name()).collect();
    let _ = writeln!(out, "coordinates: {}", names.join(", "));
    let _ = writeln!(out, "L = {}", sys.lagrangian());
    let _ = writeln!(out, "E_L = {}", sys.energy());
    let _ = writeln!(out, "Legendre map:");
    let leg = sys.legendre();
    for p in leg.target.momenta() {
        let _ = writeln!(out, "{p} = {}", leg.components[p]);
    }
    let _ = writeln!(out, "𝓗 = {}", sr_hamiltonian(sys));
    let (_, etas) = sys.cartan_contact_forms();
    for (a, eta) in etas.iter().enumerate() {
        let label = c.direction_label(a);
        for s in c.coordinates() {
            let coeff = eta.get(s);
            if !coeff.is_zero() {
                let _ = writeln!(out, "η_L^{label}[d{s}] = {coeff}");
            }
        }
    }
    let el = sys.el_residual();
    let _ = writeln!(out, "Euler-Lagrange residuals:");
    for (i, r) in el.field.iter().enumerate() {
        let _ = writeln!(out, "EL[{}] = {r}", c.base(i));
    }
    let _ = writeln!(out, "EL[s] = {}", el.s_equation);
    if let Some(b) = &m.bundle {
        let matches = el.field == b.expected_residual;
        let verdict = if matches { "matches" } else { "DIFFERS FROM" };
        let _ = writeln!(out, "residual {verdict}: {}", residual_form(b.name));
    }
    Ok(Outcome::text(out))
}

pub fn classify(source: &ModelSource) -> CliResult<Outcome> {
    let m = load(source)?;
    let sys = &m.system;
    let h = sys.hessian();
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", m.name);
    let labels: Vec<&str> = h.labels.iter().map(|s| s.name()).collect();
    let _ = writeln!(out, "Hessian: {0}x{0} over {1}", h.dim(), labels.join(", "));
    let _ = writeln!(out, "det W = {}", h.det);
    let class = h.classify();
    let _ = writeln!(out, "classification: {class}");
    match class {
        Regularity::Regular => {
            let reeb = sys.reeb_lagrangian()?;
            let _ = write!(out, "Reeb fields:\n{reeb}");
            let ham = HamiltonianSystem::from_lagrangian(sys)?;
            let _ = writeln!(out, "H = {}", ham.hamiltonian());
        }
        Regularity::Singular { .. } => {
            let _ = writeln!(out, "Reeb fields: {}", kcontact::Error::ReebUndefined);
        }
    }
    Ok(Outcome::text(out))
}

pub fn constraints(source: &ModelSource, max_iterations: Option<usize>) -> CliResult<Outcome> {
    let m = load(source)?;
    let sr = sr_equations(&m.system)?;
    let fam = constraint_algorithm(&sr, max_iterations)?;
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", m.name);
    let mut summary = Vec::new();
    for g in 1..=fam.generations().max(1) {
        let polys = fam.constraints.generation(g);
        let line = match polys.len() {
            1 => format!("generation {g}: 1 constraint"),
            n => format!("generation {g}: {n} constraints"),
        };
        let _ = writeln!(out, "{line}");
        for p in &polys {
            let _ = writeln!(out, "  {p} = 0");
        }
        summary.push(line);
    }
    let _ = writeln!(out, "stabilized after {} tangency passes", fam.tangency_passes);
    let _ = writeln!(out, "canonical representative: {}", fam.canonical()?);
    let free: Vec<&str> = fam.free.iter().map(|s| s.name()).collect();
    let _ = writeln!(out, "free parameters: {} ({})", free.len(), free.join(", "));
    let _ = writeln!(
        out,
        "{}; stabilized; free parameters: {}",
        summary.join("; "),
        free.len()
    );
    Ok(Outcome::text(out))
}

fn rational(name: &str, v: f64) -> CliResult<Rational> {
    Rational::from_float(v).ok_or_else(|| CliError::Usage(format!("--{name} must be finite, got {v}")))
}

fn builtin_name(source: &ModelSource, command: &str) -> CliResult<&'static str> {
    match source {
        ModelSource::Builtin(name) => {
            canonical(name).ok_or_else(|| CliError::Engine(kcontact::Error::UnknownModel(name.clone())))
        }
        ModelSource::Inline(_) => Err(CliError::Usage(format!("{command} needs a built-in model"))),
    }
}

/// Suite defaults, overridden by whatever is set.
pub fn options(n: &Numeric) -> VerifyOptions {
    let d = VerifyOptions::default();
    VerifyOptions {
        cells: n.cells.unwrap_or(d.cells),
        dt: n.dt,
        t_end: n.t_end.unwrap_or(d.t_end),
        c2: n.c2.unwrap_or(d.c2),
        gamma: n.gamma.unwrap_or(d.gamma),
        m2: n.m2.unwrap_or(d.m2),
        gamma0: n.gamma0.unwrap_or(d.gamma0),
        mu0: n.mu0.unwrap_or(d.mu0),
        ..d
    }
}

const MAX_SNAPSHOTS: usize = 500;

fn run(name: &str, n: &Numeric) -> CliResult<SimReport> {
    let o = options(n);
    let boundary = if name == "dissipative_maxwell" {
        Boundary::Periodic
    } else {
        Boundary::FixedZero
    };
    let grid = Grid1D::new(o.cells, 1.0, boundary)?;
    let dt = o.dt.unwrap_or(o.courant * grid.dx());
    let mut cfg = SimConfig {
        dt,
        t_end: o.t_end,
        snapshot_every: 1,
    };
    let (steps, dt) = cfg.steps()?;
    cfg.snapshot_every = n.snapshot_every.unwrap_or_else(|| steps.div_ceil(MAX_SNAPSHOTS).max(1));
    let mut report = match name {
        "damped_string" => simulate_damped_wave(
            &WaveParams::damped_string(o.c2, o.gamma),
            &grid,
            &cfg,
            &Init::mode(&grid, 1),
        )?,
        "damped_klein_gordon" => simulate_telegrapher(
            &WaveParams::telegrapher(o.gamma, o.m2),
            &grid,
            &cfg,
            &Init::mode(&grid, 1),
        )?,
        _ => {
            let params = MaxwellParams {
                mu0: o.mu0,
                gamma0: o.gamma0,
            };
            simulate_maxwell_1d(&params, &grid, &cfg, &MaxwellInit::standing(&grid, &params, 1, dt))?
        }
    };
    // residual column only for the wave models
    let derived = match name {
        "damped_string" => {
            let params = ModelParams::symbolic()
                .with("ρ", Rational::from_integer(1.into()))
                .with("τ", rational("c2", o.c2)?)
                .with("γ", rational("gamma", o.gamma)?);
            Some((models::damped_string(&params)?, Axes { time: 1, space: 0 }))
        }
        "damped_klein_gordon" => {
            let params = models::telegrapher_params(rational("gamma", o.gamma)?).with("m²", rational("m2", o.m2)?);
            Some((models::damped_klein_gordon(&params)?, Axes { time: 0, space: 1 }))
        }
        _ => None,
    };
    if let Some((m, axes)) = derived {
        if report.snapshots.len() >= 3 {
            let r = &m.system.el_residual().field[0];
            let check = residual_check(&report, r, m.chart(), axes, &HashMap::new())?;
            report.attach_residuals(check.per_snapshot);
        } else {
            log::warn!("fewer than three snapshots; residual column left empty");
        }
    }
    Ok(report)
}

fn simulation_summary(name: &str, report: &SimReport) -> String {
    let d = &report.diagnostics;
    let mut out = String::new();
    let _ = writeln!(out, "model: {name}");
    let _ = writeln!(out, "grid: {} cells, dx = {:e}", report.grid.cells, report.grid.dx());
    let _ = writeln!(
        out,
        "steps: {}, dt = {:e}, T = {:e}",
        report.steps,
        report.dt,
        report.final_time()
    );
    let _ = writeln!(
        out,
        "snapshots: {} (every {} steps)",
        report.snapshots.len(),
        report.snapshot_every
    );
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.9e}"));
    let _ = writeln!(out, "fitted decay rate: {}", fmt(fit_decay(&d.t, &d.mode)));
    let _ = writeln!(out, "fitted angular frequency: {}", fmt(fit_frequency(&d.t, &d.mode)));
    let _ = writeln!(out, "energy: {:.9e} -> {:.9e}", d.energy[0], d.energy[d.len() - 1]);
    let worst = report
        .residuals
        .iter()
        .flatten()
        .copied()
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    let _ = writeln!(out, "max derived residual: {}", fmt(worst));
    out
}

/// With `out`, writes the snapshot CSV there and the per-step diagnostics
/// next to it, and returns a summary. Without, returns the snapshot CSV.
pub fn simulate(source: &ModelSource, n: &Numeric, out: Option<&Path>) -> CliResult<Outcome> {
    let name = builtin_name(source, "simulate")?;
    let report = run(name, n)?;
    match out {
        Some(path) => {
            report.write_csv(path)?;
            let diag = path.with_extension("diagnostics.csv");
            std::fs::write(&diag, report.diagnostics_csv())?;
            let mut text = simulation_summary(name, &report);
            let _ = writeln!(text, "wrote {} and {}", path.display(), diag.display());
            Ok(Outcome::text(text))
        }
        None => {
            log::info!("{}", simulation_summary(name, &report));
            Ok(Outcome::text(report.to_csv()))
        }
    }
}

/// Exact checks of the derivation against the model's hand-written objects.
fn symbolic_checks(name: &str) -> CliResult<Vec<Check>> {
    let b = builtin(name)?;
    let sys = &b.system;
    let el = sys.el_residual();
    let residual_mismatch = el
        .field
        .iter()
        .zip(&b.expected_residual)
        .filter(|(a, e)| a != e)
        .count()
        + el.field.len().abs_diff(b.expected_residual.len());
    let graph = sys.legendre().graph_relations();
    let constraint_mismatch = b
        .expected_constraints
        .iter()
        .filter(|e| !graph.iter().any(|g| proportional(g, e)))
        .count()
        + graph.len().abs_diff(b.expected_constraints.len());
    let regularity = if sys.classify() == b.expected_regularity {
        0.0
    } else {
        1.0
    };
    let mut checks = vec![
        Check::at_most("symbolic: EL residual mismatches", residual_mismatch as f64, 0.0),
        Check::at_most("symbolic: Legendre graph mismatches", constraint_mismatch as f64, 0.0),
        Check::at_most("symbolic: regularity mismatch", regularity, 0.0),
    ];
    if let Some(h) = &b.expected_hamiltonian {
        let got = HamiltonianSystem::from_lagrangian(sys)?;
        let ok = got.hamiltonian() == h;
        checks.push(Check::at_most(
            "symbolic: Hamiltonian mismatch",
            if ok { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    Ok(checks)
}

pub fn verify(source: &ModelSource, n: &Numeric) -> CliResult<Outcome> {
    let name = builtin_name(source, "verify")?;
    if n.snapshot_every.is_some() {
        return Err(CliError::Usage("snapshot_every applies to simulate only".into()));
    }
    let raw = match source {
        ModelSource::Builtin(raw) => raw.as_str(),
        ModelSource::Inline(_) => unreachable!("rejected by builtin_name"),
    };
    let mut checks = symbolic_checks(name)?;
    checks.extend(suites::verify(raw, &options(n))?);
    let mut out = String::new();
    let _ = writeln!(out, "model: {name}");
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    let _ = writeln!(out, "summary: {passed}/{} checks passed", checks.len());
    Ok(Outcome {
        text: out,
        failed: checks.len() - passed,
        total: checks.len(),
    })
}
