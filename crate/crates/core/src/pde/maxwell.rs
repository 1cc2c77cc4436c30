//! Yee scheme for the plane-wave reduction `E_y(x, t)`, `B_z(x, t)`:
//! `B_t = -E_x`, `E_t = -c^2 B_x - c gamma0 E`, with `c = 1` and
//! `eps0 = 1 / mu0`.

use super::grid::{Boundary, Grid1D};
use super::report::{Diagnostics, SimReport, Snapshot};
use super::wave::SimConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxwellParams {
    pub mu0: f64,
    pub gamma0: f64,
}

impl MaxwellParams {
    pub const C: f64 = 1.0;

    pub fn eps0(&self) -> f64 {
        1.0 / (self.mu0 * Self::C * Self::C)
    }

    fn validate(&self) -> Result<()> {
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu0 must be positive, got {}",
                self.mu0
            )));
        }
        if !self.gamma0.is_finite() {
            return Err(Error::InvalidParameter("gamma0 must be finite".into()));
        }
        Ok(())
    }
}

/// Initial `E` on nodes and `B` on edge midpoints at `t = dt/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellInit {
    pub e0: Vec<f64>,
    pub b_half: Vec<f64>,
    pub shape: Vec<f64>,
}

impl MaxwellInit {
    /// Standing mode `m` of `E` with `B = 0` at `t = 0`; `B` at the half step
    /// from a second-order Taylor expansion.
    pub fn standing(grid: &Grid1D, params: &MaxwellParams, m: usize, dt: f64) -> MaxwellInit {
        let e0 = grid.mode(m);
        let c = MaxwellParams::C;
        let b_half = (0..grid.edges())
            .map(|e| {
                let ex = grid.edge_gradient(&e0, e);
                -0.5 * dt * ex + dt * dt / 8.0 * c * params.gamma0 * ex
            })
            .collect();
        MaxwellInit {
            shape: e0.clone(),
            e0,
            b_half,
        }
    }

    /// Right-moving wave `E = f(x - ct)`, `B = f(x - ct) / c`.
    pub fn travelling(grid: &Grid1D, dt: f64, f: impl Fn(f64) -> f64) -> MaxwellInit {
        let c = MaxwellParams::C;
        let dx = grid.dx();
        let e0 = grid.sample(&f);
        let b_half = (0..grid.edges())
            .map(|e| f((e as f64 + 0.5) * dx - 0.5 * c * dt) / c)
            .collect();
        MaxwellInit {
            shape: e0.clone(),
            e0,
            b_half,
        }
    }
}

pub fn check_cfl(grid: &Grid1D, dt: f64) -> Result<()> {
    let limit = grid.dx() / MaxwellParams::C;
    if dt > limit {
        return Err(Error::Cfl(
            format!("dt = {dt} exceeds dx / c = {limit:.6e}"),
            0.9 * limit,
        ));
    }
    Ok(())
}

pub fn simulate_maxwell_1d(
    params: &MaxwellParams,
    grid: &Grid1D,
    cfg: &SimConfig,
    init: &MaxwellInit,
) -> Result<SimReport> {
    params.validate()?;
    if grid.boundary == Boundary::Neumann {
        return Err(Error::InvalidParameter(
            "Maxwell-1D supports periodic or fixed-zero E only".into(),
        ));
    }
    let (steps, dt) = cfg.steps()?;
    check_cfl(grid, dt)?;
    let n = grid.nodes();
    if init.e0.len() != n || init.b_half.len() != grid.edges() || init.shape.len() != n {
        return Err(Error::InvalidDimensions("initial data does not match the grid".into()));
    }
    let c = MaxwellParams::C;
    let dx = grid.dx();
    let eps0 = params.eps0();
    let mu0 = params.mu0;
    let damp = c * params.gamma0 * dt * 0.5;
    let (plus, minus) = (1.0 + damp, 1.0 - damp);

    let mut e = init.e0.clone();
    grid.enforce(&mut e);
    let mut b = init.b_half.clone();
    let mut b_prev: Vec<f64> = b.clone();
    let mut e_next = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut action = 0.0;
    let mut diag = Diagnostics::default();
    let mut snapshots = Vec::new();

    // B on the edges around node j, difference B_{j+1/2} - B_{j-1/2}.
    let curl_b = |b: &[f64], j: usize| -> Option<f64> {
        match grid.boundary {
            Boundary::Periodic => Some(b[j] - b[(j + grid.edges() - 1) % grid.edges()]),
            _ if j == 0 || j == grid.cells => None,
            _ => Some(b[j] - b[j - 1]),
        }
    };

    for step in 0..=steps {
        for j in 0..n {
            e_next[j] = match curl_b(&b, j) {
                Some(db) => (minus * e[j] - c * c * dt * db / dx) / plus,
                None => 0.0,
            };
        }
        let t = step as f64 * dt;
        // B at t_n from the two neighbouring half steps; at step 0 the
        // earlier half step is not stored, so it is reconstructed.
        if step == 0 {
            for (k, bp) in b_prev.iter_mut().enumerate() {
                *bp = b[k] + dt * grid.edge_gradient(&e, k);
            }
        }
        let mut electric = 0.0;
        let mut rate = 0.0;
        for j in 0..n {
            let w = grid.weight(j) * dx;
            electric += w * 0.5 * eps0 * e[j] * e[j];
            rate += w * c * params.gamma0 * eps0 * e[j] * e[j];
        }
        let mut magnetic = 0.0;
        let mut magnetic_half = 0.0;
        for k in 0..grid.edges() {
            let bn = 0.5 * (b[k] + b_prev[k]);
            magnetic += dx * 0.5 * bn * bn / mu0;
            magnetic_half += dx * 0.5 * b[k] * b[k] / mu0;
        }
        let mut electric_half = 0.0;
        for j in 0..n {
            electric_half += grid.weight(j) * dx * 0.5 * eps0 * e[j] * e_next[j];
        }
        diag.t.push(t);
        diag.energy.push(electric + magnetic);
        diag.energy_half.push(electric_half + magnetic_half);
        diag.dissipation_rate.push(rate);
        diag.accumulator.push(grid.integrate(&s));
        diag.action.push(action);
        diag.mode.push(grid.project(&e, &init.shape));
        if step % cfg.snapshot_every == 0 || step == steps {
            snapshots.push(Snapshot {
                step,
                t,
                field: e.clone(),
            });
        }
        if step == steps {
            break;
        }

        // B advances to t_{n+3/2} with E at t_{n+1}.
        let mut b_next = vec![0.0; grid.edges()];
        for k in 0..grid.edges() {
            b_next[k] = b[k] - dt * grid.edge_gradient(&e_next, k);
        }
        // L = (eps0 E^2 - B^2 / mu0) / 2 - gamma0 s on (t_n, t_{n+1}).
        let mut l_int = 0.0;
        for j in 0..n {
            let edges = grid.node_edges(j);
            let bb: f64 = edges.iter().map(|&k| b[k] * b[k]).sum::<f64>() / edges.len() as f64;
            let l0 = 0.5 * (eps0 * e[j] * e_next[j] - bb / mu0);
            let s_new = (s[j] * (1.0 - 0.5 * params.gamma0 * dt) + dt * l0) / (1.0 + 0.5 * params.gamma0 * dt);
            l_int += grid.weight(j) * dx * (l0 - params.gamma0 * 0.5 * (s[j] + s_new));
            s[j] = s_new;
        }
        action += dt * l_int;

        b_prev = std::mem::replace(&mut b, b_next);
        std::mem::swap(&mut e, &mut e_next);
    }
    Ok(SimReport {
        kind: "maxwell_1d",
        grid: *grid,
        dt,
        steps,
        snapshot_every: cfg.snapshot_every,
        snapshots,
        diagnostics: diag,
        residuals: Vec::new(),
        auxiliary: Some(b),
    })
}
