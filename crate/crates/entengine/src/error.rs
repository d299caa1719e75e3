//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by machine construction, solvers, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A feasibility search terminated with a definite negative answer
    /// where the caller required a witness.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Problem size beyond the supported desk-scale range.
    #[error("capacity exceeded: {got} sites, supported maximum is {max}")]
    Capacity { got: usize, max: usize },

    /// The steady-state space is (numerically) more than one-dimensional.
    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    /// A numerical procedure failed to meet its accuracy contract.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The heralding filter has no support on the state.
    #[error("herald never fires: projected trace {0:.3e} is below the 1e-12 floor")]
    HeraldNeverFires(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
