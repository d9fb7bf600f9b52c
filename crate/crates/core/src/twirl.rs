//! Improved approximate Clifford twirl: a star-topology chain with c = 0 on
//! the central qubit, c = 1/3 on the outer qubits and p = 3/4.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::Result;
use crate::markov::schedule::{CircuitSchedule, Gate, LocalGateSpec, Topology};
use crate::markov::spectrum::{spectrum, SpectrumReport};
use crate::markov::ChainOperator;
use crate::symmetric::{symmetric_gap, SymmetricChain};

pub const TWIRL_P: f64 = 0.75;
pub const TWIRL_C_CENTRAL: f64 = 0.0;
pub const TWIRL_C_OUTER: f64 = 1.0 / 3.0;
/// Gap of the earlier three-step construction, taken from the literature.
pub const CLIFFORD_REFERENCE_GAP: f64 = 5.0 / 6.0;
pub const APPLICATIONS: u32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwirlReport {
    pub n: usize,
    pub gap: f64,
    pub applications: u32,
    /// 1 − (1 − Δ)³
    pub effective_gap: f64,
    pub reference_gap: f64,
}

pub fn effective_gap(gap: f64, applications: u32) -> f64 {
    1.0 - (1.0 - gap).powi(applications as i32)
}

pub fn twirl_chain(n: usize) -> Result<SymmetricChain> {
    SymmetricChain::star(n, TWIRL_C_CENTRAL, TWIRL_C_OUTER, TWIRL_P)
}

pub fn improved_twirl_gap(n: usize) -> Result<TwirlReport> {
    let gap = symmetric_gap(&twirl_chain(n)?)?.gap;
    Ok(TwirlReport {
        n,
        gap,
        applications: APPLICATIONS,
        effective_gap: effective_gap(gap, APPLICATIONS),
        reference_gap: CLIFFORD_REFERENCE_GAP,
    })
}

/// Full 3ⁿ schedule of the twirl (centre on qubit 0).
pub fn twirl_schedule(n: usize) -> Result<CircuitSchedule> {
    let mut cs = vec![TWIRL_C_OUTER; n];
    cs[0] = TWIRL_C_CENTRAL;
    CircuitSchedule::with_local(Topology::Star, Gate::Cz, LocalGateSpec { c_per_qubit: cs }, TWIRL_P)
}

/// Dense spectrum of the full reduced twirl chain (n ≤ 8).
pub fn twirl_dense_spectrum(n: usize) -> Result<SpectrumReport> {
    spectrum(&ChainOperator::from_schedule(&twirl_schedule(n)?)?.to_dense()?)
}

/// Number of eigenvalues within `tol` of `z`.
pub fn count_near(eigenvalues: &[C64], z: C64, tol: f64) -> usize {
    eigenvalues.iter().filter(|w| (*w - z).norm() < tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_is_one_half_for_any_n() {
        for n in [4, 6, 12] {
            let r = improved_twirl_gap(n).unwrap();
            assert!((r.gap - 0.5).abs() < 1e-10, "n = {n}: {}", r.gap);
            assert!((r.effective_gap - 7.0 / 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn effective_gap_is_monotone() {
        for g in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!(effective_gap(g, 3) >= g);
        }
    }

    #[test]
    fn dense_spectrum_pair() {
        let n = 4;
        let s = twirl_dense_spectrum(n).unwrap();
        let e = 2f64.powi(-(n as i32));
        assert!(count_near(&s.eigenvalues, C64::new(e, 0.0), 1e-9) >= 1);
        assert!(count_near(&s.eigenvalues, C64::new(-e, 0.0), 1e-9) >= 1);
        assert!((s.gap - 0.5).abs() < 1e-10);
    }
}
