//! Runs a TOML experiment config through the same path as `pr-markov run`.
//! Usage: cargo run --example run_config -- configs/gap-sweep.toml

use pr_markov::cli::config::ExperimentConfig;
use pr_markov::cli::run::run_and_write;

fn main() -> pr_markov::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/gap-sweep.toml".into());
    let cfg = ExperimentConfig::from_toml(&std::fs::read_to_string(&path)?)?;
    let w = run_and_write(&cfg)?;
    println!("wrote {} and {}", w.csv.display(), w.record.display());
    Ok(())
}
