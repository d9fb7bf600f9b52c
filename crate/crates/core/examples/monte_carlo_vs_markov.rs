//! State-vector ensemble against the exact Markov trajectory of E[Q]:
//! open chain, CZ with HZ locals, n = 8.

use pr_markov::markov::{q_trajectory, ChainOperator, CircuitSchedule, Gate, Topology};
use pr_markov::moments::MomentVector;
use pr_markov::sim::{run_ensemble, EnsembleConfig, InitialState, IterationUnit, LocalGateDistribution, RotationPolicy};

fn main() -> pr_markov::Result<()> {
    let n = 8;
    let schedule = CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 0.0, 1.0)?;
    let exact = q_trajectory(&ChainOperator::from_schedule(&schedule)?, &MomentVector::computational(n), 15);
    let sim = run_ensemble(&EnsembleConfig {
        schedule,
        dist: LocalGateDistribution::Hz,
        policy: RotationPolicy::Independent,
        initial: vec![InitialState::Computational { k: 0 }],
        iterations: 15,
        samples: 300,
        seed: 7,
        unit: IterationUnit::Period,
        track_pt: false,
        snapshot_at: None,
    })?;
    println!("  l   E[Q] Markov    <Q> sampled     SE      z");
    for (r, e) in sim.rows.iter().zip(&exact) {
        let z = (r.mean_q - e) / r.se_q.max(1e-9);
        println!("{:>3}  {:.8}   {:.8}   {:.1e}  {:+.2}", r.iteration, e, r.mean_q, r.se_q, z);
    }
    Ok(())
}
