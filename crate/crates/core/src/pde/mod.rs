//! Finite-difference checks of the derived field equations.

pub mod analysis;
pub mod grid;
pub mod maxwell;
pub mod report;
pub mod verify;
pub mod wave;

pub use analysis::{
    action_audit, convergence_order, energy_balance, energy_drift, fit_decay, fit_frequency, linf_error,
    residual_check, Axes, ResidualCheck,
};
pub use grid::{Boundary, Grid1D};
pub use maxwell::{simulate_maxwell_1d, MaxwellInit, MaxwellParams};
pub use report::{Diagnostics, SimReport, Snapshot};
pub use wave::{simulate_damped_wave, simulate_telegrapher, Init, SimConfig, WaveParams};
