//! Approximate Clifford twirl on a star: gap of one application and the
//! effective gap of three.

use pr_markov::twirl::{improved_twirl_gap, twirl_dense_spectrum};

fn main() -> pr_markov::Result<()> {
    for n in [4, 8, 16, 32] {
        let r = improved_twirl_gap(n)?;
        println!(
            "n={n:>2}: gap {:.6}, effective gap after {} applications {:.6} (reference {:.6})",
            r.gap, r.applications, r.effective_gap, r.reference_gap
        );
    }
    let s = twirl_dense_spectrum(4)?;
    println!("dense n=4 check: gap {:.10}", s.gap);
    Ok(())
}
