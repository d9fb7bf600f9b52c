//! Pauli-string algebra on the reduced alphabet {0, z, ξ}.
//!
//! A reduced string is indexed in base 3 with qubit 0 as the least
//! significant digit (0 ↔ 0, z ↔ 1, ξ ↔ 2). Full Pauli strings use base 4
//! with I=0, X=1, Y=2, Z=3, again qubit 0 least significant. Matrices act
//! on computational basis states whose bit j belongs to qubit j.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Zero test for Pauli coefficients and the unitarity check.
pub const ORACLE_TOL: f64 = 1e-10;

pub fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Zero = 0,
    Z = 1,
    Xi = 2,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::Zero, Letter::Z, Letter::Xi];

    pub fn from_digit(d: usize) -> Letter {
        match d {
            0 => Letter::Zero,
            1 => Letter::Z,
            2 => Letter::Xi,
            _ => panic!("reduced letter digit {d} out of range"),
        }
    }

    pub fn digit(self) -> usize {
        self as usize
    }

    /// 0 ↔ z toggle applied by a CZ partner in state ξ.
    pub fn toggled(self) -> Letter {
        match self {
            Letter::Zero => Letter::Z,
            Letter::Z => Letter::Zero,
            Letter::Xi => Letter::Xi,
        }
    }

    fn symbol(self) -> char {
        match self {
            Letter::Zero => '0',
            Letter::Z => 'z',
            Letter::Xi => 'ξ',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_digit(d: usize) -> Pauli {
        Pauli::ALL[d]
    }

    pub fn reduce(self) -> Letter {
        match self {
            Pauli::I => Letter::Zero,
            Pauli::Z => Letter::Z,
            Pauli::X | Pauli::Y => Letter::Xi,
        }
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    fn symbol(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }
}

/// Element of {0, z, ξ}ⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedPauliString {
    letters: Vec<Letter>,
}

impl ReducedPauliString {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![Letter::Zero; n],
        }
    }

    /// Weight-1 string with `letter` on qubit `j`.
    pub fn single(n: usize, j: usize, letter: Letter) -> Self {
        let mut s = Self::identity(n);
        s.letters[j] = letter;
        s
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        assert!(index < pow3(n), "index {index} out of range for n={n}");
        let mut rest = index;
        let letters = (0..n)
            .map(|_| {
                let d = rest % 3;
                rest /= 3;
                Letter::from_digit(d)
            })
            .collect();
        Self { letters }
    }

    pub fn index(&self) -> usize {
        self.letters
            .iter()
            .rev()
            .fold(0, |acc, l| acc * 3 + l.digit())
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, j: usize) -> Letter {
        self.letters[j]
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&l| l != Letter::Zero).count()
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }
}

/// Qubit 0 is printed first.
impl fmt::Display for ReducedPauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

/// Letter of qubit `j` in a reduced index.
#[inline]
pub fn digit_at(index: usize, j: usize) -> usize {
    (index / pow3(j)) % 3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    fn classify(z: C64) -> Option<Phase> {
        let close = |w: C64| (z - w).norm() < 1e-8;
        if close(C64::new(1.0, 0.0)) {
            Some(Phase::PlusOne)
        } else if close(C64::new(-1.0, 0.0)) {
            Some(Phase::MinusOne)
        } else if close(C64::new(0.0, 1.0)) {
            Some(Phase::PlusI)
        } else if close(C64::new(0.0, -1.0)) {
            Some(Phase::MinusI)
        } else {
            None
        }
    }
}

/// Clifford conjugation table on k ≤ 2 qubits.
#[derive(Clone, Debug)]
pub struct PauliPermutation {
    pub arity: usize,
    /// Full-Pauli source index → (target index, phase) with U P U† = phase · P'.
    pub mapping: Vec<(usize, Phase)>,
    /// Present iff every x/y-merged source class lands in a single class.
    pub reduced_mapping: Option<Vec<usize>>,
}

fn full_string_label(index: usize, k: usize) -> String {
    (0..k)
        .map(|j| Pauli::from_digit((index >> (2 * j)) & 3).symbol())
        .collect()
}

/// Dense 2ᵏ×2ᵏ matrix of a full Pauli string (row-major).
pub fn pauli_string_matrix(index: usize, k: usize) -> Vec<C64> {
    let dim = 1usize << k;
    let paulis: Vec<[[C64; 2]; 2]> = (0..k)
        .map(|j| Pauli::from_digit((index >> (2 * j)) & 3).matrix())
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut z = C64::new(1.0, 0.0);
            for (j, m) in paulis.iter().enumerate() {
                z *= m[(r >> j) & 1][(c >> j) & 1];
                if z == C64::new(0.0, 0.0) {
                    break;
                }
            }
            out[r * dim + c] = z;
        }
    }
    out
}

fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for l in 0..dim {
            let x = a[i * dim + l];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += x * b[l * dim + j];
            }
        }
    }
    out
}

fn dagger(a: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}

/// Brute-force Clifford conjugation table of a k-qubit gate (k ≤ 2).
pub fn conjugation_table(gate_unitary: &[C64], k: usize) -> Result<PauliPermutation> {
    if k == 0 || k > 2 {
        return Err(Error::OutOfRange {
            what: "gate arity",
            value: k as f64,
            range: "{1, 2}",
        });
    }
    let dim = 1usize << k;
    if gate_unitary.len() != dim * dim {
        return Err(Error::DimensionLimit {
            got: gate_unitary.len(),
            limit: dim * dim,
        });
    }
    let udag = dagger(gate_unitary, dim);
    let uud = matmul(gate_unitary, &udag, dim);
    let mut dev: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((uud[i * dim + j] - C64::new(want, 0.0)).norm());
        }
    }
    if dev > ORACLE_TOL {
        return Err(Error::NotUnitary(dev));
    }

    let count = 1usize << (2 * k);
    let paulis: Vec<Vec<C64>> = (0..count).map(|i| pauli_string_matrix(i, k)).collect();
    let mut mapping = Vec::with_capacity(count);
    for (src, p) in paulis.iter().enumerate() {
        let image = matmul(&matmul(gate_unitary, p, dim), &udag, dim);
        let mut found = Vec::new();
        for (tgt, q) in paulis.iter().enumerate() {
            // Tr(Q A) / 2^k; Pauli strings are Hermitian
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..dim {
                for j in 0..dim {
                    tr += q[i * dim + j] * image[j * dim + i];
                }
            }
            let coeff = tr / dim as f64;
            if coeff.norm() > ORACLE_TOL {
                found.push((tgt, coeff));
            }
        }
        let phase = match found.as_slice() {
            [(_, z)] => Phase::classify(*z),
            _ => None,
        };
        match phase {
            Some(ph) => mapping.push((found[0].0, ph)),
            None => {
                return Err(Error::NotClifford {
                    source_string: full_string_label(src, k),
                    terms: found.len(),
                })
            }
        }
    }

    let reduced_mapping = reduce_mapping(&mapping, k);
    Ok(PauliPermutation {
        arity: k,
        mapping,
        reduced_mapping,
    })
}

fn reduced_class_of_full(index: usize, k: usize) -> usize {
    (0..k)
        .map(|j| Pauli::from_digit((index >> (2 * j)) & 3).reduce().digit() * pow3(j))
        .sum()
}

fn reduce_mapping(mapping: &[(usize, Phase)], k: usize) -> Option<Vec<usize>> {
    let mut reduced: Vec<Option<usize>> = vec![None; pow3(k)];
    for (src, &(tgt, _)) in mapping.iter().enumerate() {
        let s = reduced_class_of_full(src, k);
        let t = reduced_class_of_full(tgt, k);
        match reduced[s] {
            None => reduced[s] = Some(t),
            Some(prev) if prev != t => return None,
            _ => {}
        }
    }
    reduced.into_iter().collect()
}

/// Closed form of the CZ class map: a ξ on exactly one side toggles the other
/// side 0 ↔ z.
pub fn cz_class_action(pair: (Letter, Letter)) -> (Letter, Letter) {
    match pair {
        (Letter::Xi, b) if b != Letter::Xi => (Letter::Xi, b.toggled()),
        (a, Letter::Xi) if a != Letter::Xi => (a.toggled(), Letter::Xi),
        other => other,
    }
}

pub fn cz_unitary() -> Vec<C64> {
    let mut u = vec![C64::new(0.0, 0.0); 16];
    for i in 0..4 {
        u[i * 4 + i] = C64::new(if i == 3 { -1.0 } else { 1.0 }, 0.0);
    }
    u
}

/// exp[−iπ/4 (XX + YY)]: swaps |01⟩ and |10⟩ with a factor −i.
pub fn xy_unitary() -> Vec<C64> {
    let mut u = vec![C64::new(0.0, 0.0); 16];
    u[0] = C64::new(1.0, 0.0);
    u[15] = C64::new(1.0, 0.0);
    u[4 + 2] = C64::new(0.0, -1.0);
    u[2 * 4 + 1] = C64::new(0.0, -1.0);
    u
}

/// Reduced pair tables indexed by `l0 + 3·l1`, l0 the letter of the first
/// qubit of the pair.
pub fn cz_pair_table() -> [usize; 9] {
    let mut t = [0; 9];
    for (i, slot) in t.iter_mut().enumerate() {
        let (a, b) = cz_class_action((Letter::from_digit(i % 3), Letter::from_digit(i / 3)));
        *slot = a.digit() + 3 * b.digit();
    }
    t
}

pub fn xy_pair_table() -> [usize; 9] {
    static TABLE: OnceLock<[usize; 9]> = OnceLock::new();
    *TABLE.get_or_init(|| {
        let table = conjugation_table(&xy_unitary(), 2)
            .expect("XY is Clifford")
            .reduced_mapping
            .expect("XY is class-closed");
        let mut t = [0; 9];
        t.copy_from_slice(&table);
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn full_index(ps: &[Pauli]) -> usize {
        ps.iter()
            .enumerate()
            .map(|(j, p)| (*p as usize) << (2 * j))
            .sum()
    }

    fn pair(a: Letter, b: Letter) -> usize {
        a.digit() + 3 * b.digit()
    }

    #[test]
    fn cz_maps_x_on_first_qubit_to_xz() {
        let t = conjugation_table(&cz_unitary(), 2).unwrap();
        let (tgt, ph) = t.mapping[full_index(&[Pauli::X, Pauli::I])];
        assert_eq!(tgt, full_index(&[Pauli::X, Pauli::Z]));
        assert_eq!(ph, Phase::PlusOne);
        let (tgt, _) = t.mapping[full_index(&[Pauli::Z, Pauli::Z])];
        assert_eq!(tgt, full_index(&[Pauli::Z, Pauli::Z]));
    }

    #[test]
    fn cz_closed_form_matches_oracle() {
        let oracle = conjugation_table(&cz_unitary(), 2)
            .unwrap()
            .reduced_mapping
            .unwrap();
        assert_eq!(oracle.as_slice(), &cz_pair_table());
        use Letter::*;
        assert_eq!(cz_class_action((Zero, Zero)), (Zero, Zero));
        assert_eq!(cz_class_action((Xi, Zero)), (Xi, Z));
        assert_eq!(cz_class_action((Z, Xi)), (Zero, Xi));
        assert_eq!(cz_class_action((Xi, Xi)), (Xi, Xi));
    }

    #[test]
    fn xy_is_class_closed() {
        use Letter::*;
        let t = xy_pair_table();
        assert_eq!(t[pair(Xi, Zero)], pair(Z, Xi));
        assert_eq!(t[pair(Zero, Zero)], pair(Zero, Zero));
        assert_eq!(t[pair(Z, Z)], pair(Z, Z));
        assert_eq!(t[pair(Xi, Xi)], pair(Xi, Xi));
        assert_eq!(t[pair(Z, Zero)], pair(Zero, Z));
    }

    fn expm_hermitian_times_minus_i(h: &[C64], dim: usize, scale: f64) -> Vec<C64> {
        // Taylor series of exp(-i·scale·H), independent of the closed form
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        let mut term = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            out[i * dim + i] = C64::new(1.0, 0.0);
            term[i * dim + i] = C64::new(1.0, 0.0);
        }
        let a: Vec<C64> = h.iter().map(|z| z * C64::new(0.0, -scale)).collect();
        for m in 1..60 {
            term = matmul(&term, &a, dim);
            for z in term.iter_mut() {
                *z /= m as f64;
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        out
    }

    #[test]
    fn xy_closed_form_is_the_exponential() {
        let xx = pauli_string_matrix(full_index(&[Pauli::X, Pauli::X]), 2);
        let yy = pauli_string_matrix(full_index(&[Pauli::Y, Pauli::Y]), 2);
        let h: Vec<C64> = xx.iter().zip(&yy).map(|(a, b)| a + b).collect();
        let u = expm_hermitian_times_minus_i(&h, 4, std::f64::consts::FRAC_PI_4);
        for (a, b) in u.iter().zip(xy_unitary().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn non_clifford_angle_is_rejected() {
        let zz = pauli_string_matrix(full_index(&[Pauli::Z, Pauli::Z]), 2);
        let u = expm_hermitian_times_minus_i(&zz, 4, std::f64::consts::PI / 8.0);
        assert!(matches!(
            conjugation_table(&u, 2),
            Err(Error::NotClifford { .. })
        ));
    }

    #[test]
    fn non_unitary_is_rejected() {
        let mut u = cz_unitary();
        u[0] = C64::new(2.0, 0.0);
        assert!(matches!(conjugation_table(&u, 2), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn xy_merge_consistency() {
        for u in [cz_unitary(), xy_unitary()] {
            let t = conjugation_table(&u, 2).unwrap();
            let red = t.reduced_mapping.clone().unwrap();
            for src in 0..16 {
                // flip x <-> y on each qubit in turn
                for j in 0..2 {
                    let d = (src >> (2 * j)) & 3;
                    let swapped = match d {
                        1 => 2,
                        2 => 1,
                        _ => continue,
                    };
                    let other = (src & !(3 << (2 * j))) | (swapped << (2 * j));
                    let a = reduced_class_of_full(t.mapping[src].0, 2);
                    let b = reduced_class_of_full(t.mapping[other].0, 2);
                    assert_eq!(a, b);
                    assert_eq!(red[reduced_class_of_full(src, 2)], a);
                }
            }
        }
    }

    #[test]
    fn mapping_is_bijection() {
        for u in [cz_unitary(), xy_unitary()] {
            let t = conjugation_table(&u, 2).unwrap();
            let mut seen = [false; 16];
            for &(tgt, _) in &t.mapping {
                assert!(!seen[tgt]);
                seen[tgt] = true;
            }
        }
    }

    #[test]
    fn identity_string_has_index_zero() {
        assert_eq!(ReducedPauliString::identity(5).index(), 0);
        assert_eq!(ReducedPauliString::single(3, 1, Letter::Z).index(), 3);
        assert_eq!(format!("{}", ReducedPauliString::from_index(2 + 3, 2)), "ξz");
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(n in 1usize..9, raw in any::<u64>()) {
            let idx = (raw as usize) % pow3(n);
            let s = ReducedPauliString::from_index(idx, n);
            prop_assert_eq!(s.index(), idx);
            prop_assert_eq!(s.weight(), n - s.count(Letter::Zero));
            for j in 0..n {
                prop_assert_eq!(digit_at(idx, j), s.letter(j).digit());
            }
        }
    }
}
