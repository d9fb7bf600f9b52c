//! All-to-all gap scaling on the permutation-symmetric chain, far beyond
//! the qubit counts the full chain can reach.

use pr_markov::symmetric::{scaling_study, PPolicy, SymmetricTopology};

fn main() -> pr_markov::Result<()> {
    let aa = SymmetricTopology::AllToAll;
    let s = scaling_study(aa, 0.0, PPolicy::OneGatePerStep, &(8..=50).collect::<Vec<_>>())?;
    println!("p = 2/(n(n-1)): {:?}", s.fit.map(|f| f.model));
    for p in [0.2, 0.4, 0.5] {
        let s = scaling_study(aa, 0.0, PPolicy::Fixed(p), &(10..=40).collect::<Vec<_>>())?;
        println!("p = {p}: {:?}", s.fit.map(|f| f.model));
    }
    let s = scaling_study(aa, 0.0, PPolicy::OneGatePerQubit, &[20, 50, 100, 150])?;
    for pt in s.points {
        println!("p = 2/(n-1), n = {:>3}: gap {:.5}", pt.n, pt.gap);
    }
    for c in [0.0, 1.0 / 3.0] {
        let s = scaling_study(aa, c, PPolicy::Fixed(1.0), &[20, 21, 60, 61])?;
        let gaps: Vec<String> = s.points.iter().map(|q| format!("n={} {:.5}", q.n, q.gap)).collect();
        println!("p = 1, c = {c:.3}: {}", gaps.join(", "));
    }
    Ok(())
}
