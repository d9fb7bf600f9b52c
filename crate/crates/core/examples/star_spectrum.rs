//! Full eigenvalue multiset of the star chain (c = 1/3, p = 3/4), grouped.

use pr_markov::markov::{spectrum, ChainOperator, CircuitSchedule, Gate, Topology};

fn main() -> pr_markov::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let s = CircuitSchedule::standard(Topology::Star, Gate::Cz, n, 1.0 / 3.0, 0.75)?;
    let r = spectrum(&ChainOperator::from_schedule(&s)?.to_dense()?)?;
    println!("star n={n}: gap {:.10}, {} unit eigenvalues", r.gap, r.unit_count);
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for z in &r.eigenvalues {
        match groups.iter_mut().find(|g| (g.0 - z.re).abs() < 1e-6) {
            Some(g) => g.1 += 1,
            None => groups.push((z.re, 1)),
        }
    }
    for (v, m) in groups {
        let v = if v.abs() < 1e-6 { 0.0 } else { v };
        println!("  {v:>13.10}  x{m}");
    }
    let e = 2f64.powi(-(n as i32 - 1));
    println!("expected pair: {:.10}, {:.10}", (1.0 + e) / 3.0, (1.0 - e) / 3.0);
    Ok(())
}
