use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::grid::Grid1D;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub field: Vec<f64>,
}

/// Per-step diagnostics, all sampled at `t_n = n dt`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub t: Vec<f64>,
    /// Energy with centred time derivatives.
    pub energy: Vec<f64>,
    /// Energy on the half step `t_n + dt/2`, conserved exactly by the undamped scheme.
    pub energy_half: Vec<f64>,
    /// Instantaneous loss rate, `gamma rho int u_t^2` or its Maxwell analogue.
    pub dissipation_rate: Vec<f64>,
    /// `int s^t dx`.
    pub accumulator: Vec<f64>,
    /// `int_0^t int L dx dt`, accumulated with the same quadrature as `s^t`.
    pub action: Vec<f64>,
    /// Projection of the field onto the reference mode.
    pub mode: Vec<f64>,
}

impl Diagnostics {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub kind: &'static str,
    pub grid: Grid1D,
    pub dt: f64,
    pub steps: usize,
    pub snapshot_every: usize,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Diagnostics,
    /// Per-snapshot residual norm, once attached.
    pub residuals: Vec<Option<f64>>,
    /// Auxiliary staggered field (Maxwell `B`) of the last step.
    pub auxiliary: Option<Vec<f64>>,
}

impl SimReport {
    pub fn final_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("at least one snapshot")
    }

    pub fn attach_residuals(&mut self, residuals: Vec<Option<f64>>) {
        self.residuals = residuals;
    }

    /// One row per snapshot: `t, E, S, residual, u_0, ..., u_{n-1}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("t,energy,accumulator,residual");
        for j in 0..self.grid.nodes() {
            let _ = write!(out, ",u_{j}");
        }
        out.push('\n');
        for (k, snap) in self.snapshots.iter().enumerate() {
            let d = snap.step;
            let _ = write!(
                out,
                "{:.16e},{:.16e},{:.16e},",
                snap.t, self.diagnostics.energy[d], self.diagnostics.accumulator[d]
            );
            if let Some(Some(r)) = self.residuals.get(k) {
                let _ = write!(out, "{r:.16e}");
            }
            for v in &snap.field {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    /// Per-step diagnostics: `t, E, E_half, rate, S, action, mode`.
    pub fn diagnostics_csv(&self) -> String {
        let d = &self.diagnostics;
        let mut out = String::from("t,energy,energy_half,dissipation_rate,accumulator,action,mode\n");
        for n in 0..d.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                d.t[n], d.energy[n], d.energy_half[n], d.dissipation_rate[n], d.accumulator[n], d.action[n], d.mode[n]
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}
