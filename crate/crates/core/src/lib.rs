pub mod bundles;
pub mod error;
pub mod hamiltonian;
pub mod lagrangian;
pub mod models;
pub mod pde;
pub mod symcore;
pub mod unified;

pub use error::{Error, Result};
