//! Spin correlations of two localized particles measured by observers in
//! Galilean motion.
//!
//! Units are natural (`ħ = 1`). Two backends evaluate the same quantities:
//! closed-form Gaussian box integrals for equal-time measurements, and a
//! spectral lattice for everything else (unequal times, identical particles)
//! and as a cross-check.

pub mod corpus;
pub mod correlation;
pub mod error;
pub mod grid;
pub mod measurement;
pub mod scenario_io;
pub mod special;
pub mod spin;
pub mod states;
pub mod validate;

pub use correlation::{
    chsh_value, correlation_distinguishable, correlation_equal_time, correlation_identical, correlation_symmetrized,
    joint_probabilities, singlet_closed_form, triplet_closed_form, Backend, BackendKind, CorrelationResult,
    Diagnostics, ObserverSpec, ResultKind, Scenario,
};
pub use error::{Error, Result};
pub use grid::{GridConfig, LatticeState, Particle};
pub use measurement::{LocalizedSpinProjector, PairObservable, Region};
pub use scenario_io::{emit_results, parse_scenario, Format, ScenarioDocument};
pub use spin::{Direction, HalfInt, SpinMatrix, SpinValue, C64};
pub use states::{make_singlet, make_triplet, GaussianPacket, Statistics, TwoParticleState};
