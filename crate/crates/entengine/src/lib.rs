//! Simulator and analysis toolkit for autonomous entanglement engines:
//! thermal machines of locally dissipating qutrits whose steady state,
//! after a local heralding filter, approximates a chosen multiqubit
//! entangled state.
//!
//! The pipeline is:
//!
//! 1. [`builder`] — turn a target qubit state into a concrete machine
//!    (level assignment, energy ladders, bath spec, interaction).
//! 2. [`dynamics`] — assemble the reset-model or Lindblad-form generator
//!    and solve for the steady state.
//! 3. [`filtering`] — apply the local heralding filter and score the
//!    heralded state against the target.
//! 4. [`bell`] — evaluate Bell expressions on heralded states.
//! 5. [`optimizer`] — sweep couplings and temperatures to trace
//!    fidelity/success-probability tradeoff fronts.
//!
//! [`qcore`] supplies the small dense/sparse complex linear-algebra layer
//! everything else is built on.

pub mod bell;
pub mod builder;
pub mod dynamics;
pub mod error;
pub mod filtering;
pub mod optimizer;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::{
    devectorize, kron, min_eigenvalue, vectorize, ComplexMatrix, DensityOperator, Liouvillian,
    SparseComplexMatrix, Tolerances, C64,
};

pub use builder::{
    BathSpec, EnergySpec, LevelAssignment, MachineSpec, TargetState, Temperature,
};
pub use dynamics::{JumpConfig, Model};
pub use filtering::FilterOutcome;
pub use optimizer::{MachineFamily, ParetoFront, SweepPoint};
