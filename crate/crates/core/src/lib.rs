pub mod error;
pub mod cli;
pub mod cluster;
pub mod fit;
pub mod markov;
pub mod measures;
pub mod moments;
pub mod output;
pub mod oracle;
pub mod pauli;
pub mod sim;
pub mod symmetric;
pub mod twirl;
pub mod verify;

pub use error::{Error, Result};
