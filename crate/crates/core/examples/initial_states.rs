//! The ψ(a) family: where its entanglement equals the Haar value, and how
//! the starting entanglement shifts the exact Markov trajectory.

use pr_markov::markov::{q_trajectory, ChainOperator, CircuitSchedule, Gate, Topology};
use pr_markov::measures::q_haar;
use pr_markov::moments::moments_from_state;
use pr_markov::sim::{prepare_initial, psi_root, InitialState};

fn main() -> pr_markov::Result<()> {
    let n = 8;
    let a_star = psi_root(n, q_haar(n))?;
    println!("Q(psi(a)) = q_haar({n}) at a = {a_star:.6}");
    let op = ChainOperator::from_schedule(&CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 1.0 / 3.0, 1.0)?)?;
    for a in [0.0, a_star, 0.1, 1.0] {
        let v0 = moments_from_state(&prepare_initial(&InitialState::Psi { a }, n)?.amps)?;
        let q = q_trajectory(&op, &v0, 20);
        let dev: Vec<String> = q.iter().step_by(5).map(|v| format!("{:.1e}", (v - q_haar(n)).abs())).collect();
        println!("a = {a:.5}: |E[Q]-Q_R| at l = 0,5,10,15,20: {}", dev.join("  "));
    }
    Ok(())
}
