//! Second-moment Markov chains of PR circuit schedules.

pub mod analysis;
pub mod operator;
pub mod schedule;
pub mod spectrum;
pub mod sweep;

pub use analysis::*;
pub use operator::{
    local_layer, rbar, step_matrix, two_qubit_layer, ChainMatrix, ChainOperator, LinearMap,
    StateSpace,
};
pub use schedule::{CircuitSchedule, Gate, LocalGateSpec, Step, Topology, TwoQubitLayer};
pub use spectrum::{range_spectrum, spectrum, RangeSpectrum, SpectrumReport};
