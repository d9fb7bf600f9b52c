//! Measurement-based cost of a PR circuit: cluster-kind mapping, lattice
//! footprint and fusion attempts for two gate probabilities.

use pr_markov::cluster::{compare_scenarios, lattice_footprint, map_cluster_topology, ClusterKind, Scenario};
use pr_markov::markov::sweep::gap_at;
use pr_markov::markov::{Gate, Topology};

fn main() -> pr_markov::Result<()> {
    for k in ClusterKind::ALL {
        let s = map_cluster_topology(k, 8)?;
        println!("{:<19} -> {} steps per period", k.name(), s.steps_per_period());
    }
    println!("lattice footprint n=8, 10 iterations: {} qubits", lattice_footprint(8, 10));
    let quoted = [Scenario { p: 0.98, gamma: 0.547 }, Scenario { p: 0.705, gamma: 0.547 / 2.0 }];
    for r in compare_scenarios(&quoted, 0.5)? {
        println!("quoted   p={:<5} Γ={:.4}: {:.2} C·n attempts", r.p, r.gamma, r.attempts);
    }
    let computed: Vec<Scenario> = [0.98, 0.705]
        .iter()
        .map(|&p| Ok(Scenario { p, gamma: gap_at(Topology::Open, Gate::Cz, 8, 0.0, p)?.rate }))
        .collect::<pr_markov::Result<_>>()?;
    for r in compare_scenarios(&computed, 0.5)? {
        println!("computed p={:<5} Γ={:.4}: {:.2} C·n attempts", r.p, r.gamma, r.attempts);
    }
    Ok(())
}
