//! Stationary Meyer–Wallach Q of the second-moment chain: the Haar value for
//! ergodic topologies, and the parity-restricted value for the
//! deterministic closed chain.

use pr_markov::markov::{parity_analysis, stationary, ChainOperator, CircuitSchedule, Gate, Topology};
use pr_markov::measures::{q_cc, q_haar};
use pr_markov::moments::{q_from_moments, MomentVector};

fn main() -> pr_markov::Result<()> {
    let n = 6;
    let v0 = MomentVector::computational(n);
    println!("q_haar({n}) = {:.12}", q_haar(n));
    for top in Topology::ALL {
        let s = CircuitSchedule::standard(top, Gate::Cz, n, 1.0 / 3.0, 0.5)?;
        let v = stationary(&ChainOperator::from_schedule(&s)?, &v0)?;
        println!("  {:<11} c=1/3 p=0.5  Q∞ = {:.12}", top.name(), q_from_moments(&v));
    }
    let closed = CircuitSchedule::standard(Topology::Closed, Gate::Cz, 8, 0.0, 1.0)?;
    let r = parity_analysis(&closed, &MomentVector::computational(8))?;
    println!(
        "closed chain n=8 p=1: parity conserved = {}, Q∞ = {:.10} (closed form {:.10})",
        r.conserved,
        r.asymptotic_q,
        q_cc(8)
    );
    Ok(())
}
