//! Leapfrog solver for `rho u_tt - tau u_xx + gamma rho u_t + rho m^2 u = 0`
//! with `tau = rho c^2`. The damped string has `m^2 = 0`; the telegrapher
//! equation has `rho = 1`.

use super::grid::Grid1D;
use super::report::{Diagnostics, SimReport, Snapshot};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveParams {
    pub rho: f64,
    pub c2: f64,
    pub gamma: f64,
    pub m2: f64,
}

impl WaveParams {
    pub fn damped_string(c2: f64, gamma: f64) -> WaveParams {
        WaveParams {
            rho: 1.0,
            c2,
            gamma,
            m2: 0.0,
        }
    }

    pub fn telegrapher(gamma: f64, m2: f64) -> WaveParams {
        WaveParams {
            rho: 1.0,
            c2: 1.0,
            gamma,
            m2,
        }
    }

    /// Transmission line `V_xx = LC V_tt + (LG + RC) V_t + RG V`.
    pub fn transmission_line(l: f64, c: f64, r: f64, g: f64) -> Result<WaveParams> {
        let lc = l * c;
        if !(lc > 0.0) {
            return Err(Error::InvalidParameter(format!("LC must be positive, got {lc}")));
        }
        Ok(WaveParams {
            rho: 1.0,
            c2: 1.0 / lc,
            gamma: (l * g + r * c) / lc,
            m2: r * g / lc,
        })
    }

    pub fn tau(&self) -> f64 {
        self.rho * self.c2
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.rho, self.c2, self.gamma, self.m2].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite wave parameter".into()));
        }
        if self.rho <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive, got {}",
                self.rho
            )));
        }
        if self.c2 <= 0.0 {
            return Err(Error::InvalidParameter(format!("c2 must be positive, got {}", self.c2)));
        }
        if self.m2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "m2 must be non-negative, got {}",
                self.m2
            )));
        }
        Ok(())
    }

    /// Largest stable step, `dt^2 (4 c^2 / dx^2 + m^2) <= 4`, and `gamma dt < 2`.
    pub fn max_dt(&self, dx: f64) -> f64 {
        let wave = 2.0 / (4.0 * self.c2 / (dx * dx) + self.m2).sqrt();
        if self.gamma > 0.0 {
            wave.min(2.0 / self.gamma)
        } else {
            wave
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between stored snapshots.
    pub snapshot_every: usize,
}

impl SimConfig {
    /// The step is shortened so that a whole number of steps reaches `t_end`.
    pub fn steps(&self) -> Result<(usize, f64)> {
        if !(self.dt > 0.0 && self.t_end >= 0.0 && self.dt.is_finite() && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {}, T = {}", self.dt, self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter("snapshot interval must be positive".into()));
        }
        let steps = (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize;
        let dt = if steps == 0 { self.dt } else { self.t_end / steps as f64 };
        Ok((steps, dt))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Init {
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    /// Reference shape for the modal amplitude diagnostic.
    pub shape: Vec<f64>,
}

impl Init {
    /// Mode `m` of the grid at rest.
    pub fn mode(grid: &Grid1D, m: usize) -> Init {
        let shape = grid.mode(m);
        Init {
            u0: shape.clone(),
            v0: vec![0.0; grid.nodes()],
            shape,
        }
    }

    pub fn custom(grid: &Grid1D, u0: Vec<f64>, v0: Vec<f64>) -> Result<Init> {
        if u0.len() != grid.nodes() || v0.len() != grid.nodes() {
            return Err(Error::InvalidDimensions(format!(
                "initial data of length {} / {} for {} nodes",
                u0.len(),
                v0.len(),
                grid.nodes()
            )));
        }
        Ok(Init {
            shape: u0.clone(),
            u0,
            v0,
        })
    }
}

pub fn check_cfl(params: &WaveParams, grid: &Grid1D, dt: f64) -> Result<()> {
    let limit = params.max_dt(grid.dx());
    if dt > limit {
        return Err(Error::Cfl(
            format!(
                "dt = {dt} exceeds the stability limit {limit:.6e} (c dt / dx = {:.4})",
                params.c2.sqrt() * dt / grid.dx()
            ),
            0.9 * limit,
        ));
    }
    Ok(())
}

pub fn simulate_damped_wave(params: &WaveParams, grid: &Grid1D, cfg: &SimConfig, init: &Init) -> Result<SimReport> {
    simulate(params, grid, cfg, init, "damped_wave")
}

pub fn simulate_telegrapher(params: &WaveParams, grid: &Grid1D, cfg: &SimConfig, init: &Init) -> Result<SimReport> {
    simulate(params, grid, cfg, init, "telegrapher")
}

fn simulate(params: &WaveParams, grid: &Grid1D, cfg: &SimConfig, init: &Init, kind: &'static str) -> Result<SimReport> {
    params.validate()?;
    let (steps, dt) = cfg.steps()?;
    check_cfl(params, grid, dt)?;
    let n = grid.nodes();
    if init.u0.len() != n || init.v0.len() != n || init.shape.len() != n {
        return Err(Error::InvalidDimensions("initial data does not match the grid".into()));
    }
    let WaveParams { rho, c2, gamma, m2 } = *params;
    let tau = params.tau();
    let dx = grid.dx();
    let dt2 = dt * dt;
    let plus = 1.0 + 0.5 * gamma * dt;
    let minus = 1.0 - 0.5 * gamma * dt;

    let mut u = init.u0.clone();
    grid.enforce(&mut u);
    let mut lap = vec![0.0; n];
    grid.laplacian(&u, &mut lap);
    // Taylor start consistent with the centred scheme.
    let mut u_prev: Vec<f64> = (0..n)
        .map(|j| u[j] - dt * init.v0[j] + 0.5 * dt2 * (c2 * lap[j] - m2 * u[j] - gamma * init.v0[j]))
        .collect();
    grid.enforce(&mut u_prev);
    let mut u_next = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut action = 0.0;

    let mut diag = Diagnostics::default();
    let mut snapshots = Vec::new();
    for step in 0..=steps {
        grid.laplacian(&u, &mut lap);
        for j in 0..n {
            u_next[j] = (2.0 * u[j] - minus * u_prev[j] + dt2 * (c2 * lap[j] - m2 * u[j])) / plus;
        }
        grid.enforce(&mut u_next);

        let t = step as f64 * dt;
        let mut kinetic = 0.0;
        let mut rate = 0.0;
        let mut mass = 0.0;
        let mut kinetic_half = 0.0;
        let mut mass_half = 0.0;
        for j in 0..n {
            let w = grid.weight(j) * dx;
            let ut = (u_next[j] - u_prev[j]) / (2.0 * dt);
            let uh = (u_next[j] - u[j]) / dt;
            kinetic += w * 0.5 * rho * ut * ut;
            rate += w * gamma * rho * ut * ut;
            mass += w * 0.5 * rho * m2 * u[j] * u[j];
            kinetic_half += w * 0.5 * rho * uh * uh;
            mass_half += w * 0.5 * rho * m2 * u[j] * u_next[j];
        }
        let mut strain = 0.0;
        let mut strain_half = 0.0;
        for e in 0..grid.edges() {
            let g = grid.edge_gradient(&u, e);
            strain += dx * 0.5 * tau * g * g;
            strain_half += dx * 0.5 * tau * g * grid.edge_gradient(&u_next, e);
        }
        diag.t.push(t);
        diag.energy.push(kinetic + strain + mass);
        diag.energy_half.push(kinetic_half + strain_half + mass_half);
        diag.dissipation_rate.push(rate);
        diag.accumulator.push(grid.integrate(&s));
        diag.action.push(action);
        diag.mode.push(grid.project(&u, &init.shape));
        if step % cfg.snapshot_every == 0 || step == steps {
            snapshots.push(Snapshot {
                step,
                t,
                field: u.clone(),
            });
        }
        if step == steps {
            break;
        }

        // ds^t/dt = L with the midpoint rule on (t_n, t_{n+1}).
        let mut l_int = 0.0;
        for j in 0..n {
            let uh = (u_next[j] - u[j]) / dt;
            let edges = grid.node_edges(j);
            let grad: f64 = edges
                .iter()
                .map(|&e| grid.edge_gradient(&u, e) * grid.edge_gradient(&u_next, e))
                .sum::<f64>()
                / edges.len() as f64;
            let l0 = 0.5 * rho * uh * uh - 0.5 * tau * grad - 0.5 * rho * m2 * u[j] * u_next[j];
            let s_new = (s[j] * minus + dt * l0) / plus;
            let l_mid = l0 - gamma * 0.5 * (s[j] + s_new);
            l_int += grid.weight(j) * dx * l_mid;
            s[j] = s_new;
        }
        action += dt * l_int;

        std::mem::swap(&mut u_prev, &mut u);
        std::mem::swap(&mut u, &mut u_next);
    }
    Ok(SimReport {
        kind,
        grid: *grid,
        dt,
        steps,
        snapshot_every: cfg.snapshot_every,
        snapshots,
        diagnostics: diag,
        residuals: Vec::new(),
        auxiliary: None,
    })
}
