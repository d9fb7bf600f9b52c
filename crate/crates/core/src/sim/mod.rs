//! Monte Carlo state-vector simulation of the same circuits the Markov
//! chains describe.

pub mod cross;
pub mod ensemble;
pub mod gates;
pub mod initial;
pub mod state;

pub use cross::{cross_moment_check, CrossMomentReport};
pub use ensemble::{
    is_reversal_symmetric, run_ensemble, sample_rng, EnsembleConfig, EnsembleStats, IterationStats,
    IterationUnit, RotationPolicy,
};
pub use gates::{estimate_c, sample_local, CEstimate, LocalGateDistribution};
pub use initial::{all_computational, prepare_initial, psi_root, InitialState};
pub use state::{StateVector, MAX_SIM_QUBITS};
