use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::measures::meyer_wallach_q;
use crate::sim::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialState {
    Computational { k: usize },
    /// 1 on |0…0⟩ and |1…1⟩, a on every other basis state, then normalized.
    Psi { a: f64 },
    Ghz,
    /// |+⟩ on every qubit, then CZ on each open-chain edge.
    ClusterChain,
}

pub fn prepare_initial(kind: &InitialState, n: usize) -> Result<StateVector> {
    let dim = 1usize << n.min(63);
    match *kind {
        InitialState::Computational { k } => {
            if k >= dim {
                return Err(Error::OutOfRange {
                    what: "basis index",
                    value: k as f64,
                    range: "[0, 2^n)",
                });
            }
            StateVector::basis(n, k)
        }
        InitialState::Psi { a } => {
            check_unit_interval("psi parameter a", a)?;
            let mut amps = vec![C64::new(a, 0.0); dim];
            amps[0] = C64::new(1.0, 0.0);
            amps[dim - 1] = C64::new(1.0, 0.0);
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|z| *z /= norm);
            StateVector::from_amps(amps)
        }
        InitialState::Ghz => prepare_initial(&InitialState::Psi { a: 0.0 }, n),
        InitialState::ClusterChain => {
            let amp = C64::new((dim as f64).sqrt().recip(), 0.0);
            let mut s = StateVector::from_amps(vec![amp; dim])?;
            for j in 0..n.saturating_sub(1) {
                s.apply_cz(j, j + 1);
            }
            Ok(s)
        }
    }
}

/// Every computational basis state of n qubits.
pub fn all_computational(n: usize) -> Vec<InitialState> {
    (0..1usize << n).map(|k| InitialState::Computational { k }).collect()
}

/// a ∈ (0, 1) with Q(ψ(a)) = target, by bisection (Q falls from 1 at a=0
/// to 0 at a=1).
pub fn psi_root(n: usize, target: f64) -> Result<f64> {
    check_unit_interval("target Q", target)?;
    let q = |a: f64| -> Result<f64> { meyer_wallach_q(&prepare_initial(&InitialState::Psi { a }, n)?.amps) };
    let (mut lo, mut hi) = (0.0, 1.0);
    if (q(lo)? - target) * (q(hi)? - target) > 0.0 {
        return Err(Error::ConvergenceFailure(f64::NAN));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
