//! Command-line front end for the `bosent` toolkit.
//!
//! Subcommands:
//!
//! * `fig1`: exact and approximate twin-Fock Cauchy-Schwarz ratios on an
//!   `(N, 2m)` grid;
//! * `witness`: witness report for a state described in a StateSpec file
//!   (see [`statespec`] for the grammar);
//! * `scan-separable`: random separable states checked against every bound.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 input error, 3 some witness could
//! not be evaluated, 4 a separable sample violated a bound.

pub mod app;
pub mod fig1;
pub mod manifest;
pub mod render;
pub mod scan;
pub mod statespec;
pub mod witness;

pub use app::execute;
pub use manifest::{Document, RunManifest};
pub use statespec::{SpecError, StateSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("state spec: {0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Spec(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}
