//! Porter–Thomas distance and entanglement deviation per step for the three
//! gate families on the open chain, over every basis state.

use pr_markov::markov::{CircuitSchedule, Gate, Topology};
use pr_markov::sim::{all_computational, run_ensemble, EnsembleConfig, IterationUnit, LocalGateDistribution, RotationPolicy};

fn main() -> pr_markov::Result<()> {
    let n = 6;
    for (label, gate, dist) in [
        ("CZ+HZ", Gate::Cz, LocalGateDistribution::Hz),
        ("XY+Haar", Gate::Xy, LocalGateDistribution::HaarSu2),
        ("CZ+Haar", Gate::Cz, LocalGateDistribution::HaarSu2),
    ] {
        let s = run_ensemble(&EnsembleConfig {
            schedule: CircuitSchedule::standard(Topology::Open, gate, n, dist.c(), 1.0)?,
            dist,
            policy: RotationPolicy::Independent,
            initial: all_computational(n),
            iterations: 10,
            samples: 40,
            seed: 3,
            unit: IterationUnit::Step,
            track_pt: true,
            snapshot_at: None,
        })?;
        println!("{label}");
        for r in s.rows.iter().step_by(2) {
            println!("  step {:>2}  PT {:.4}  |<Q>-Q_R| {:.2e}", r.iteration, r.pt_distance.unwrap_or(f64::NAN), r.q_deviation);
        }
    }
    Ok(())
}
