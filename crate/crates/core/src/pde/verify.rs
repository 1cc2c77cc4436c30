//! Numerical verification suites: each run compares a simulation against
//! its single-mode oracle and against the symbolic residual of the model.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;

use super::analysis::*;
use super::grid::{Boundary, Grid1D};
use super::maxwell::{simulate_maxwell_1d, MaxwellInit, MaxwellParams};
use super::report::SimReport;
use super::wave::{simulate_damped_wave, simulate_telegrapher, Init, SimConfig, WaveParams};
use crate::error::{Error, Result};
use crate::models::{self, ModelParams};
use crate::symcore::{Rational, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    /// True when `measured` must not exceed `threshold`, false when it must
    /// reach it.
    pub upper: bool,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            threshold,
            upper: true,
        }
    }

    pub fn at_least(name: &str, measured: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            threshold,
            upper: false,
        }
    }

    pub fn passed(&self) -> bool {
        if self.measured.is_nan() {
            return false;
        }
        if self.upper {
            self.measured <= self.threshold
        } else {
            self.measured >= self.threshold
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.upper { "<=" } else { ">=" };
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status}  {:<40} {:>14.6e} {op} {:.3e}",
            self.name, self.measured, self.threshold
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub cells: usize,
    /// `dt = courant * dx`, unless `dt` is set.
    pub courant: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub c2: f64,
    pub gamma: f64,
    pub m2: f64,
    pub gamma0: f64,
    pub mu0: f64,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            cells: 400,
            courant: 0.5,
            dt: None,
            t_end: 5.0,
            c2: 1.0,
            gamma: 0.1,
            m2: 1.0,
            gamma0: 0.2,
            mu0: 1.0,
        }
    }
}

impl VerifyOptions {
    fn config(&self, grid: &Grid1D, t_end: f64) -> SimConfig {
        SimConfig {
            dt: self.dt.unwrap_or(self.courant * grid.dx()),
            t_end,
            snapshot_every: 1,
        }
    }

    fn halved(&self) -> VerifyOptions {
        VerifyOptions {
            cells: self.cells / 2,
            dt: self.dt.map(|d| 2.0 * d),
            ..*self
        }
    }
}

fn rational(v: f64) -> Result<Rational> {
    BigRational::from_float(v).ok_or_else(|| Error::InvalidParameter(format!("{v} is not finite")))
}

fn string_run(opts: &VerifyOptions, gamma: f64, t_end: f64) -> Result<SimReport> {
    let grid = Grid1D::new(opts.cells, 1.0, Boundary::FixedZero)?;
    let params = WaveParams::damped_string(opts.c2, gamma);
    simulate_damped_wave(&params, &grid, &opts.config(&grid, t_end), &Init::mode(&grid, 1))
}

/// Residual of the damped string derived by the engine, at numeric constants.
fn string_residual(report: &SimReport, opts: &VerifyOptions) -> Result<f64> {
    let params = ModelParams::symbolic()
        .with("ρ", Rational::from_integer(1.into()))
        .with("τ", rational(opts.c2)?)
        .with("γ", rational(opts.gamma)?);
    let m = models::damped_string(&params)?;
    let residual = &m.system.el_residual().field[0];
    let axes = Axes { time: 1, space: 0 };
    Ok(residual_check(report, residual, m.chart(), axes, &HashMap::new())?.max_norm)
}

/// Single-mode oracle `e^{-gt/2} sin(pi x)(cos wt + g/(2w) sin wt)`.
pub fn string_oracle(c2: f64, gamma: f64) -> impl Fn(f64, f64) -> f64 {
    let k = std::f64::consts::PI;
    let a = 0.5 * gamma;
    let omega = (c2 * k * k - a * a).sqrt();
    move |x, t| (k * x).sin() * damped_mode(a, omega, a / omega, t)
}

pub fn verify_damped_wave(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let fine = string_run(opts, opts.gamma, opts.t_end)?;
    let coarse = string_run(&opts.halved(), opts.gamma, opts.t_end)?;
    let oracle = string_oracle(opts.c2, opts.gamma);
    let e_fine = linf_error(&fine, &oracle);
    let e_coarse = linf_error(&coarse, &oracle);
    let d = &fine.diagnostics;
    let decay = fit_decay(&d.t, &d.mode).unwrap_or(f64::NAN);
    let target = 0.5 * opts.gamma;
    let mut checks = vec![
        Check::at_most("oracle Linf error", e_fine, 1e-3),
        Check::at_least("convergence order", convergence_order(e_coarse, e_fine), 1.9),
    ];
    if opts.gamma > 0.0 {
        checks.push(Check::at_most(
            "decay rate relative error",
            (decay - target).abs() / target,
            0.01,
        ));
    }
    let b_fine = energy_balance(&fine);
    let b_coarse = energy_balance(&coarse);
    checks.push(Check::at_most("energy balance |dE/dt + loss|", b_fine, 1e-4));
    if opts.gamma > 0.0 {
        checks.push(Check::at_least(
            "energy balance order",
            convergence_order(b_coarse, b_fine),
            1.9,
        ));
    }
    checks.push(Check::at_most(
        "action audit relative error",
        action_audit(&fine)?,
        1e-10,
    ));
    let r_fine = string_residual(&fine, opts)?;
    let r_coarse = string_residual(&coarse, &opts.halved())?;
    checks.push(Check::at_least(
        "derived residual order",
        convergence_order(r_coarse, r_fine),
        1.9,
    ));
    let undamped = string_run(opts, 0.0, 10.0)?;
    checks.push(Check::at_most(
        "energy drift at gamma = 0, T = 10",
        energy_drift(&undamped),
        1e-6,
    ));
    Ok(checks)
}

fn telegrapher_run(opts: &VerifyOptions, gamma: f64, m2: f64) -> Result<SimReport> {
    let grid = Grid1D::new(opts.cells, 1.0, Boundary::FixedZero)?;
    let params = WaveParams::telegrapher(gamma, m2);
    simulate_telegrapher(&params, &grid, &opts.config(&grid, opts.t_end), &Init::mode(&grid, 1))
}

pub fn verify_telegrapher(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let report = telegrapher_run(opts, opts.gamma, opts.m2)?;
    let k = std::f64::consts::PI;
    let a = 0.5 * opts.gamma;
    let omega = (k * k + opts.m2 - a * a).sqrt();
    let d = &report.diagnostics;
    let freq = fit_frequency(&d.t, &d.mode).unwrap_or(f64::NAN);
    let mut checks = vec![Check::at_most(
        "mode frequency relative error",
        (freq - omega).abs() / omega,
        0.01,
    )];
    if opts.gamma > 0.0 {
        let decay = fit_decay(&d.t, &d.mode).unwrap_or(f64::NAN);
        checks.push(Check::at_most("decay rate relative error", (decay - a).abs() / a, 0.01));
    }
    let tele = models::telegrapher_params(rational(opts.gamma)?).with("m²", rational(opts.m2)?);
    let m = models::damped_klein_gordon(&tele)?;
    let residual = &m.system.el_residual().field[0];
    let axes = Axes { time: 0, space: 1 };
    let r_fine = residual_check(&report, residual, m.chart(), axes, &HashMap::new())?.max_norm;
    let coarse = telegrapher_run(&opts.halved(), opts.gamma, opts.m2)?;
    let r_coarse = residual_check(&coarse, residual, m.chart(), axes, &HashMap::new())?.max_norm;
    checks.push(Check::at_least(
        "derived residual order",
        convergence_order(r_coarse, r_fine),
        1.9,
    ));
    let free = telegrapher_run(opts, 0.0, 0.0)?;
    let free_coarse = telegrapher_run(&opts.halved(), 0.0, 0.0)?;
    let oracle = |x: f64, t: f64| (k * x).sin() * (k * t).cos();
    checks.push(Check::at_least(
        "undamped limit order",
        convergence_order(linf_error(&free_coarse, oracle), linf_error(&free, oracle)),
        1.9,
    ));
    Ok(checks)
}

fn maxwell_run(opts: &VerifyOptions, gamma0: f64) -> Result<SimReport> {
    let grid = Grid1D::new(opts.cells, 1.0, Boundary::Periodic)?;
    let params = MaxwellParams { mu0: opts.mu0, gamma0 };
    let cfg = opts.config(&grid, opts.t_end);
    let (_, dt) = cfg.steps()?;
    simulate_maxwell_1d(&params, &grid, &cfg, &MaxwellInit::standing(&grid, &params, 1, dt))
}

pub fn verify_maxwell(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let report = maxwell_run(opts, opts.gamma0)?;
    let d = &report.diagnostics;
    let target = 0.5 * MaxwellParams::C * opts.gamma0;
    let mut checks = Vec::new();
    if opts.gamma0 > 0.0 {
        let decay = fit_decay(&d.t, &d.mode).unwrap_or(f64::NAN);
        checks.push(Check::at_most(
            "decay rate relative error",
            (decay - target).abs() / target,
            0.01,
        ));
    }
    checks.push(Check::at_most(
        "action audit relative error",
        action_audit(&report)?,
        1e-10,
    ));
    let grid = Grid1D::new(opts.cells, 1.0, Boundary::Periodic)?;
    let coarse_grid = Grid1D::new(opts.cells / 2, 1.0, Boundary::Periodic)?;
    let params = MaxwellParams {
        mu0: opts.mu0,
        gamma0: 0.0,
    };
    let wave = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let mut errors = Vec::new();
    for g in [coarse_grid, grid] {
        let cfg = opts.config(&g, 1.0);
        let (_, dt) = cfg.steps()?;
        let r = simulate_maxwell_1d(&params, &g, &cfg, &MaxwellInit::travelling(&g, dt, wave))?;
        errors.push(linf_error(&r, |x, t| wave(x - MaxwellParams::C * t)));
    }
    checks.push(Check::at_least(
        "vacuum transport order",
        convergence_order(errors[0], errors[1]),
        1.9,
    ));
    Ok(checks)
}

/// Dispatches on a model or simulator name.
pub fn verify(name: &str, opts: &VerifyOptions) -> Result<Vec<Check>> {
    match name {
        "damped_string" | "string" | "damped_wave" => verify_damped_wave(opts),
        "damped_klein_gordon" | "klein_gordon" | "kg" | "telegrapher" => verify_telegrapher(opts),
        "dissipative_maxwell" | "maxwell" | "maxwell_1d" => verify_maxwell(opts),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

pub fn constant_map(values: &[(&str, f64)]) -> Result<HashMap<Symbol, f64>> {
    values.iter().map(|(n, v)| Ok((Symbol::constant(n)?, *v))).collect()
}
