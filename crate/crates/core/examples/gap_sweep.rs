//! Spectral gap against the local gate parameter c for every topology at
//! p = 1, n = 6. Prints the argmax per topology and writes the CSV to stdout
//! when run with `--csv`.

use pr_markov::markov::sweep::{grid, sweep};
use pr_markov::markov::{Gate, Topology};
use pr_markov::output::{csv_string, RunHeader};

fn main() -> pr_markov::Result<()> {
    let n = 6;
    let cs = grid(0.0, 1.0, 0.05);
    let mut rows = Vec::new();
    for top in Topology::ALL {
        let t = sweep(top, Gate::Cz, n, &cs, &[1.0])?;
        let b = t.best();
        println!("{:<11} argmax c = {:.2}  gap = {:.4}", top.name(), b.c, b.gap);
        rows.extend(t.rows);
    }
    for top in [Topology::Open, Topology::Closed] {
        let b = sweep(top, Gate::Xy, n, &cs, &[1.0])?.best().clone();
        println!("{:<11} XY argmax c = {:.2}  gap = {:.4}", top.name(), b.c, b.gap);
    }
    if std::env::args().any(|a| a == "--csv") {
        print!("{}", csv_string(&RunHeader::new("gap-sweep", "example gap_sweep", 0), &rows)?);
    }
    Ok(())
}
