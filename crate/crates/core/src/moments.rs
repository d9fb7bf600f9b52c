//! Second-moment vectors v_ν = 2ⁿ·E(c_ν²) over reduced Pauli strings.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::{pow3, Letter, ReducedPauliString};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    pub n: usize,
    pub entries: Vec<f64>,
}

impl MomentVector {
    pub fn new(n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), pow3(n), "moment vector length");
        Self { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(n, vec![0.0; pow3(n)])
    }

    pub fn entry(&self, s: &ReducedPauliString) -> f64 {
        self.entries[s.index()]
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Moments of any computational basis state: 2⁻ⁿ on every {0,z}-string.
    pub fn computational(n: usize) -> Self {
        let mut v = Self::zeros(n);
        let w = 0.5f64.powi(n as i32);
        for mask in 0..(1usize << n) {
            let idx: usize = (0..n).filter(|j| mask >> j & 1 == 1).map(pow3).sum();
            v.entries[idx] = w;
        }
        v
    }

    /// Closed-form stationary vector of a chain ergodic over nonidentity
    /// strings.
    pub fn ergodic_stationary(n: usize) -> Self {
        let mut v = Self::zeros(n);
        let two_n = 2f64.powi(n as i32);
        let four_n = two_n * two_n;
        v.entries[0] = 1.0 / two_n;
        let scale = (1.0 - 1.0 / two_n) / (four_n - 1.0);
        for idx in 1..pow3(n) {
            let xi = ReducedPauliString::from_index(idx, n).count(Letter::Xi);
            v.entries[idx] = scale * 2f64.powi(xi as i32);
        }
        v
    }
}

/// In-place Walsh–Hadamard transform (unnormalized).
fn fwht(a: &mut [C64]) {
    let len = a.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (a[i], a[i + h]);
                a[i] = x + y;
                a[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

pub(crate) fn check_norm(psi: &[C64]) -> Result<()> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

pub(crate) fn qubits_of(psi: &[C64]) -> usize {
    assert!(psi.len().is_power_of_two(), "amplitude count must be 2^n");
    psi.len().trailing_zeros() as usize
}

/// For an x-mask `a`, returns t(b) = ⟨ψ|X^a Z^b|ψ⟩ for every z-mask b.
fn xz_expectations(psi: &[C64], a: usize, buf: &mut [C64]) {
    // ⟨ψ|X^a Z^b|ψ⟩ = Σ_k ψ*_k (−1)^{b·(k⊕a)} ψ_{k⊕a}; substitute m = k⊕a
    for (m, slot) in buf.iter_mut().enumerate() {
        *slot = psi[m ^ a].conj() * psi[m];
    }
    fwht(buf);
}

/// Moment vector of a pure state. Cost O(n·4ⁿ).
pub fn moments_from_state(psi: &[C64]) -> Result<MomentVector> {
    check_norm(psi)?;
    let n = qubits_of(psi);
    let dim = psi.len();
    let mut v = MomentVector::zeros(n);
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    // class index contribution of each qubit for a given (a, b) pair
    let p3: Vec<usize> = (0..n).map(pow3).collect();
    for a in 0..dim {
        xz_expectations(psi, a, &mut buf);
        let xi_part: usize = (0..n).filter(|j| a >> j & 1 == 1).map(|j| 2 * p3[j]).sum();
        for (b, t) in buf.iter().enumerate() {
            let z_only = b & !a;
            let z_part: usize = (0..n).filter(|j| z_only >> j & 1 == 1).map(|j| p3[j]).sum();
            v.entries[xi_part + z_part] += t.norm_sqr() / dim as f64;
        }
    }
    Ok(v)
}

/// Real expansion coefficients c_P = Tr[ρP]/2ⁿ over all 4ⁿ full Pauli strings
/// (base-4 index, I=0, X=1, Y=2, Z=3, qubit 0 least significant).
pub fn pauli_coefficients(psi: &[C64]) -> Result<Vec<f64>> {
    check_norm(psi)?;
    let n = qubits_of(psi);
    let dim = psi.len();
    let mut out = vec![0.0; dim * dim];
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    for a in 0..dim {
        xz_expectations(psi, a, &mut buf);
        for (b, t) in buf.iter().enumerate() {
            // P = ⊗ i^{a_j b_j} X^{a_j} Z^{b_j}
            let ys = (a & b).count_ones();
            let phase = match ys % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            };
            let mut idx = 0;
            for j in 0..n {
                let d = match (a >> j & 1, b >> j & 1) {
                    (0, 0) => 0,
                    (1, 0) => 1,
                    (1, 1) => 2,
                    _ => 3,
                };
                idx |= d << (2 * j);
            }
            out[idx] = (phase * t).re / dim as f64;
        }
    }
    Ok(out)
}

/// E[Q] = 1 − (2ⁿ/n)·Σⱼ [v(z@j) + v(ξ@j)].
pub fn q_from_moments(v: &MomentVector) -> f64 {
    q_from_entries(v.n, &v.entries)
}

pub(crate) fn q_from_entries(n: usize, entries: &[f64]) -> f64 {
    let two_n = 2f64.powi(n as i32);
    let s: f64 = (0..n)
        .map(|j| entries[pow3(j)] + entries[2 * pow3(j)])
        .sum();
    1.0 - two_n / n as f64 * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_string_matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(letters: &[Letter]) -> usize {
        ReducedPauliString::new(letters.to_vec()).index()
    }

    fn random_state(n: usize, rng: &mut impl Rng) -> Vec<C64> {
        let mut psi: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        psi
    }

    #[test]
    fn product_zero_state() {
        let mut psi = vec![C64::new(0.0, 0.0); 4];
        psi[0] = C64::new(1.0, 0.0);
        let v = moments_from_state(&psi).unwrap();
        use Letter::*;
        for s in [[Zero, Zero], [Zero, Z], [Z, Zero], [Z, Z]] {
            assert!((v.entries[idx(&s)] - 0.25).abs() < 1e-15);
        }
        assert!((v.total() - 1.0).abs() < 1e-12);
        assert_eq!(q_from_moments(&v), 0.0);
    }

    #[test]
    fn bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = vec![
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ];
        let v = moments_from_state(&psi).unwrap();
        use Letter::*;
        assert!((v.entries[0] - 0.25).abs() < 1e-15);
        assert!((v.entries[idx(&[Z, Z])] - 0.25).abs() < 1e-15);
        assert!((v.entries[idx(&[Xi, Xi])] - 0.5).abs() < 1e-15);
        assert!((q_from_moments(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ghz_has_unit_q() {
        let n = 5;
        let mut psi = vec![C64::new(0.0, 0.0); 1 << n];
        psi[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[(1 << n) - 1] = psi[0];
        let v = moments_from_state(&psi).unwrap();
        assert!((q_from_moments(&v) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_force_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            let psi = random_state(n, &mut rng);
            let dim = 1 << n;
            let fast = pauli_coefficients(&psi).unwrap();
            let mut v = vec![0.0; pow3(n)];
            for p in 0..dim * dim {
                let m = pauli_string_matrix(p, n);
                let mut e = C64::new(0.0, 0.0);
                for r in 0..dim {
                    for c in 0..dim {
                        e += psi[r].conj() * m[r * dim + c] * psi[c];
                    }
                }
                let coeff = e.re / dim as f64;
                assert!((coeff - fast[p]).abs() < 1e-13);
                let class: usize = (0..n)
                    .map(|j| {
                        let d = (p >> (2 * j)) & 3;
                        [0, 2, 2, 1][d] * pow3(j)
                    })
                    .sum();
                v[class] += dim as f64 * coeff * coeff;
            }
            let mv = moments_from_state(&psi).unwrap();
            for (a, b) in v.iter().zip(&mv.entries) {
                assert!((a - b).abs() < 1e-13);
            }
            assert!((mv.entries[0] - 1.0 / dim as f64).abs() < 1e-14);
            assert!((mv.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let psi = vec![C64::new(1.0, 0.0); 2];
        assert!(matches!(
            moments_from_state(&psi),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn ergodic_stationary_sums_to_one() {
        for n in 1..=6 {
            let v = MomentVector::ergodic_stationary(n);
            assert!((v.total() - 1.0).abs() < 1e-12);
            let two_n = 2f64.powi(n as i32);
            let q_haar = (two_n - 2.0) / (two_n + 1.0);
            assert!((q_from_moments(&v) - q_haar).abs() < 1e-12);
        }
    }
}
