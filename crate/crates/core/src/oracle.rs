//! Brute-force reference chain over all 4ⁿ Pauli strings.
//!
//! Local gates are integrated by quadrature over Z(φ₂)·X(θ)·Z(φ₁) with
//! cos²θ = c, and two-qubit layers are enumerated over every activation
//! subset with explicit 2ⁿ×2ⁿ unitaries. Nothing here uses R̄(c) or the
//! class tables, so it checks both independently. Only meant for n ≤ 3.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::markov::schedule::{CircuitSchedule, Gate};
use crate::pauli::{cz_unitary, pauli_string_matrix, pow3, xy_unitary, Pauli};

pub const ORACLE_MAX_QUBITS: usize = 3;

/// Quadrature points per z-rotation angle; exact for the degree-4
/// trigonometric polynomials that appear.
const QUAD: usize = 8;

type Mat = Vec<C64>;

fn matmul(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for l in 0..d {
            let x = a[i * d + l];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[l * d + j];
            }
        }
    }
    out
}

fn dagger(a: &Mat, d: usize) -> Mat {
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j].conj();
        }
    }
    out
}

/// Squared Pauli-basis coefficients of U P_ν U†: T[μ][ν].
fn squared_transfer(u: &Mat, k: usize) -> Vec<Vec<f64>> {
    let d = 1usize << k;
    let count = d * d;
    let paulis: Vec<Mat> = (0..count).map(|i| pauli_string_matrix(i, k)).collect();
    let ud = dagger(u, d);
    let mut t = vec![vec![0.0; count]; count];
    for (nu, p) in paulis.iter().enumerate() {
        let img = matmul(&matmul(u, p, d), &ud, d);
        for (mu, q) in paulis.iter().enumerate() {
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    tr += q[i * d + j] * img[j * d + i];
                }
            }
            let coeff = tr / d as f64;
            t[mu][nu] = coeff.norm_sqr();
        }
    }
    t
}

fn z_rotation(phi: f64) -> Mat {
    vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, phi),
    ]
}

fn x_rotation(theta: f64) -> Mat {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![
        C64::new(c, 0.0),
        C64::new(0.0, -s),
        C64::new(0.0, -s),
        C64::new(c, 0.0),
    ]
}

/// Averaged 4×4 transfer matrix of the single-qubit ensemble with parameter c.
pub fn local_transfer(c: f64) -> [[f64; 4]; 4] {
    let theta = c.sqrt().acos();
    let x = x_rotation(theta);
    let mut acc = [[0.0; 4]; 4];
    let w = 1.0 / (QUAD * QUAD) as f64;
    for a in 0..QUAD {
        for b in 0..QUAD {
            let phi1 = 2.0 * std::f64::consts::PI * a as f64 / QUAD as f64;
            let phi2 = 2.0 * std::f64::consts::PI * b as f64 / QUAD as f64;
            let u = matmul(&matmul(&z_rotation(phi2), &x, 2), &z_rotation(phi1), 2);
            let t = squared_transfer(&u, 1);
            for (i, row) in acc.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += w * t[i][j];
                }
            }
        }
    }
    acc
}

fn embed_pair(gate: &Mat, n: usize, a: usize, b: usize) -> Mat {
    let d = 1usize << n;
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    let mask = (1 << a) | (1 << b);
    for r in 0..d {
        for c in 0..d {
            if r & !mask != c & !mask {
                continue;
            }
            let gi = (r >> a & 1) + 2 * (r >> b & 1);
            let gj = (c >> a & 1) + 2 * (c >> b & 1);
            out[r * d + c] = gate[gi * 4 + gj];
        }
    }
    out
}

type Dense = Vec<Vec<f64>>;

fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    let mut out = vec![vec![0.0; d]; d];
    for i in 0..d {
        for l in 0..d {
            if a[i][l] == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

/// Full 4ⁿ×4ⁿ transition matrix of one period.
pub fn full_step_matrix(schedule: &CircuitSchedule) -> Result<Dense> {
    let n = schedule.n;
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::DimensionLimit {
            got: n,
            limit: ORACLE_MAX_QUBITS,
        });
    }
    schedule.validate()?;
    let count = 1usize << (2 * n);
    let mut total: Dense = (0..count)
        .map(|i| (0..count).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for step in &schedule.period {
        let locals: Vec<[[f64; 4]; 4]> = step.local.c_per_qubit.iter().map(|&c| local_transfer(c)).collect();
        let local: Dense = (0..count)
            .map(|mu| {
                (0..count)
                    .map(|nu| {
                        (0..n)
                            .map(|j| locals[j][(mu >> (2 * j)) & 3][(nu >> (2 * j)) & 3])
                            .product()
                    })
                    .collect()
            })
            .collect();
        let gate = match step.layer.gate {
            Gate::Cz => cz_unitary(),
            Gate::Xy => xy_unitary(),
        };
        let edges = &step.layer.edges;
        let p = step.layer.p;
        let d = 1usize << n;
        let mut layer = vec![vec![0.0; count]; count];
        for subset in 0..(1usize << edges.len()) {
            let k = subset.count_ones() as i32;
            let weight = p.powi(k) * (1.0 - p).powi(edges.len() as i32 - k);
            if weight == 0.0 {
                continue;
            }
            let mut u: Mat = (0..d * d)
                .map(|i| C64::new(if i / d == i % d { 1.0 } else { 0.0 }, 0.0))
                .collect();
            for (e, &(a, b)) in edges.iter().enumerate() {
                if subset >> e & 1 == 1 {
                    u = matmul(&embed_pair(&gate, n, a, b), &u, d);
                }
            }
            let t = squared_transfer(&u, n);
            for mu in 0..count {
                for nu in 0..count {
                    layer[mu][nu] += weight * t[mu][nu];
                }
            }
        }
        total = dense_mul(&dense_mul(&layer, &local), &total);
    }
    Ok(total)
}

fn reduced_class(full: usize, n: usize) -> usize {
    (0..n)
        .map(|j| Pauli::from_digit((full >> (2 * j)) & 3).reduce().digit() * pow3(j))
        .sum()
}

/// The full chain lumped onto {0,z,ξ}ⁿ, as `M[target][source]`. Fails with
/// `NotClassClosed` if members of a source class disagree beyond 1e-12.
pub fn reduced_step_matrix(schedule: &CircuitSchedule) -> Result<Dense> {
    let n = schedule.n;
    let full = full_step_matrix(schedule)?;
    let count = full.len();
    let d = pow3(n);
    let mut out: Vec<Option<Vec<f64>>> = vec![None; d];
    for nu in 0..count {
        let src = reduced_class(nu, n);
        let mut col = vec![0.0; d];
        for (mu, row) in full.iter().enumerate() {
            col[reduced_class(mu, n)] += row[nu];
        }
        match &out[src] {
            None => out[src] = Some(col),
            Some(prev) => {
                if prev.iter().zip(&col).any(|(a, b)| (a - b).abs() > 1e-12) {
                    return Err(Error::NotClassClosed);
                }
            }
        }
    }
    let cols: Vec<Vec<f64>> = out.into_iter().map(|c| c.expect("class visited")).collect();
    Ok((0..d).map(|t| (0..d).map(|s| cols[s][t]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_transfer_reproduces_c() {
        for c in [0.0, 0.25, 1.0 / 3.0, 0.8, 1.0] {
            let t = local_transfer(c);
            // Z → Z
            assert!((t[3][3] - c).abs() < 1e-12);
            // identity fixed, columns stochastic
            assert!((t[0][0] - 1.0).abs() < 1e-12);
            for j in 0..4 {
                let s: f64 = (0..4).map(|i| t[i][j]).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        let t = local_transfer(1.0 / 3.0);
        for i in 1..4 {
            for j in 1..4 {
                assert!((t[i][j] - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    fn assert_matches_engine(schedule: &CircuitSchedule) {
        let oracle = reduced_step_matrix(schedule).unwrap();
        let engine = crate::markov::operator::step_matrix(schedule).unwrap();
        let d = oracle.len();
        for t in 0..d {
            for s in 0..d {
                let diff = (oracle[t][s] - engine.get(t, s)).abs();
                assert!(diff < 1e-12, "entry ({t},{s}) differs by {diff}");
            }
        }
    }

    #[test]
    fn cz_chains_match_engine() {
        use crate::markov::schedule::Topology;
        for top in Topology::ALL {
            for n in 2..=3 {
                for (c, p) in [(0.0, 1.0), (0.2, 0.5), (1.0 / 3.0, 0.75), (0.9, 0.1)] {
                    let s = CircuitSchedule::standard(top, Gate::Cz, n, c, p).unwrap();
                    assert_matches_engine(&s);
                }
            }
        }
    }

    #[test]
    fn xy_chains_match_engine() {
        use crate::markov::schedule::Topology;
        for (top, n) in [(Topology::Open, 2), (Topology::Open, 3), (Topology::Closed, 2)] {
            for (c, p) in [(0.0, 1.0), (0.3, 0.6)] {
                let s = CircuitSchedule::standard(top, Gate::Xy, n, c, p).unwrap();
                assert_matches_engine(&s);
            }
        }
    }

    #[test]
    fn heterogeneous_local_gates_match_engine() {
        use crate::markov::schedule::{LocalGateSpec, Topology};
        let local = LocalGateSpec {
            c_per_qubit: vec![0.1, 0.6, 1.0 / 3.0],
        };
        let s = CircuitSchedule::with_local(Topology::Star, Gate::Cz, local, 0.4).unwrap();
        assert_matches_engine(&s);
    }

    #[test]
    fn oracle_refuses_large_n() {
        let s = CircuitSchedule::standard(crate::markov::schedule::Topology::Open, Gate::Cz, 4, 0.0, 1.0).unwrap();
        assert!(matches!(full_step_matrix(&s), Err(Error::DimensionLimit { .. })));
    }
}
