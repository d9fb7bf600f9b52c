use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("gate is not Clifford: image of {source_string} has {terms} nonzero Pauli terms")]
    NotClifford { source_string: String, terms: usize },
    #[error("conjugation table is not closed under the x/y merge")]
    NotClassClosed,
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("dimension {got} exceeds the limit {limit}")]
    DimensionLimit { got: usize, limit: usize },
    #[error("XY edges {0:?} and {1:?} share a qubit")]
    NonCommutingLayer((usize, usize), (usize, usize)),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("iterative eigensolver did not converge (residual {0:.3e})")]
    ConvergenceFailure(f64),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("chain oscillates with period {0}")]
    OscillationDetected(usize),
    #[error("fit is ill-conditioned: {0}")]
    FitIllConditioned(String),
    #[error("no decay window: {0}")]
    NoDecayWindow(String),
    #[error("too few samples: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("unsupported cluster kind: {0}")]
    UnsupportedKind(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotUnitary(_) => "not_unitary",
            Error::NotClifford { .. } => "not_clifford",
            Error::NotClassClosed => "not_class_closed",
            Error::NotNormalized(_) => "not_normalized",
            Error::OutOfRange { .. } => "out_of_range",
            Error::DimensionLimit { .. } => "dimension_limit",
            Error::NonCommutingLayer(..) => "non_commuting_layer",
            Error::InvalidSchedule(_) => "invalid_schedule",
            Error::ConvergenceFailure(_) => "convergence_failure",
            Error::Eigensolver(_) => "eigensolver",
            Error::OscillationDetected(_) => "oscillation_detected",
            Error::FitIllConditioned(_) => "fit_ill_conditioned",
            Error::NoDecayWindow(_) => "no_decay_window",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::UnsupportedKind(_) => "unsupported_kind",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub(crate) fn check_unit_interval(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            range: "[0, 1]",
        })
    }
}
