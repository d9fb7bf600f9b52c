//! Conjugation tables of CZ and XY on two qubits, and the reduced {0, z, ξ}
//! pair maps they induce.

use pr_markov::pauli::{conjugation_table, cz_pair_table, cz_unitary, xy_pair_table, xy_unitary, ReducedPauliString};

fn main() -> pr_markov::Result<()> {
    for (name, u, reduced) in [("CZ", cz_unitary(), cz_pair_table()), ("XY", xy_unitary(), xy_pair_table())] {
        let table = conjugation_table(&u, 2)?;
        let moved = table.mapping.iter().enumerate().filter(|(i, (j, _))| i != j).count();
        println!("{name}: {moved} of 16 Pauli strings move under conjugation");
        for (src, dst) in reduced.iter().enumerate() {
            let a = ReducedPauliString::from_index(src, 2);
            let b = ReducedPauliString::from_index(*dst, 2);
            if a != b {
                println!("  {a} -> {b}");
            }
        }
    }
    Ok(())
}
