//! Transition operators: a factored matrix-free form used for iteration and
//! Krylov methods, and an explicit dense form.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{check_unit_interval, Error, Result};
use crate::markov::schedule::{CircuitSchedule, Gate, LocalGateSpec, TwoQubitLayer};
use crate::pauli::{cz_pair_table, digit_at, pow3, xy_pair_table};

/// Largest qubit count for which dense 3ⁿ×3ⁿ matrices are built by default.
pub const DEFAULT_DENSE_QUBITS: usize = 8;

pub type Rbar = [[f64; 3]; 3];

/// Single-qubit transfer matrix in the order (0, z, ξ), column-stochastic.
pub fn rbar(c: f64) -> Result<Rbar> {
    check_unit_interval("local gate parameter c", c)?;
    Ok([
        [1.0, 0.0, 0.0],
        [0.0, c, (1.0 - c) / 2.0],
        [0.0, 1.0 - c, (1.0 + c) / 2.0],
    ])
}

/// Column-stochastic linear map v ↦ M v.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }
}

#[derive(Clone, Debug)]
enum Factor {
    Local(Vec<Rbar>),
    /// x ↦ p·P x + (1−p)·x with (P x)[perm[i]] = x[i].
    Mix { perm: Arc<Vec<u32>>, p: f64 },
}

/// Product of local Kronecker layers and edge mixtures, applied in order.
#[derive(Clone, Debug)]
pub struct ChainOperator {
    n: usize,
    dim: usize,
    factors: Vec<Factor>,
}

fn edge_permutation(n: usize, edge: (usize, usize), table: &[usize; 9]) -> Vec<u32> {
    let (a, b) = edge;
    let (pa, pb) = (pow3(a), pow3(b));
    (0..pow3(n))
        .map(|i| {
            let (la, lb) = (digit_at(i, a), digit_at(i, b));
            let t = table[la + 3 * lb];
            let (na, nb) = (t % 3, t / 3);
            (i + na * pa + nb * pb - la * pa - lb * pb) as u32
        })
        .collect()
}

fn pair_table(gate: Gate) -> [usize; 9] {
    match gate {
        Gate::Cz => cz_pair_table(),
        Gate::Xy => xy_pair_table(),
    }
}

impl ChainOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            dim: pow3(n),
            factors: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn push_local(&mut self, spec: &LocalGateSpec) -> Result<()> {
        if spec.n() != self.n {
            return Err(Error::InvalidSchedule("local spec size mismatch".into()));
        }
        let rs = spec
            .c_per_qubit
            .iter()
            .map(|&c| rbar(c))
            .collect::<Result<Vec<_>>>()?;
        self.factors.push(Factor::Local(rs));
        Ok(())
    }

    pub fn push_layer(&mut self, layer: &TwoQubitLayer) -> Result<()> {
        layer.validate(self.n)?;
        if layer.p == 0.0 {
            return Ok(());
        }
        let table = pair_table(layer.gate);
        for &e in &layer.edges {
            self.factors.push(Factor::Mix {
                perm: Arc::new(edge_permutation(self.n, e, &table)),
                p: layer.p,
            });
        }
        Ok(())
    }

    pub fn from_local(spec: &LocalGateSpec) -> Result<Self> {
        let mut op = Self::identity(spec.n());
        op.push_local(spec)?;
        Ok(op)
    }

    pub fn from_layer(n: usize, layer: &TwoQubitLayer) -> Result<Self> {
        let mut op = Self::identity(n);
        op.push_layer(layer)?;
        Ok(op)
    }

    /// One period: each step applies its local layer, then its two-qubit layer.
    pub fn from_schedule(schedule: &CircuitSchedule) -> Result<Self> {
        schedule.validate()?;
        let mut op = Self::identity(schedule.n);
        for step in &schedule.period {
            op.push_local(&step.local)?;
            op.push_layer(&step.layer)?;
        }
        Ok(op)
    }

    /// Operators of the individual steps of a period.
    pub fn steps_of(schedule: &CircuitSchedule) -> Result<Vec<Self>> {
        schedule.validate()?;
        schedule
            .period
            .iter()
            .map(|step| {
                let mut op = Self::identity(schedule.n);
                op.push_local(&step.local)?;
                op.push_layer(&step.layer)?;
                Ok(op)
            })
            .collect()
    }

    pub fn to_dense(&self) -> Result<ChainMatrix> {
        ChainMatrix::from_map(self, StateSpace::Reduced { n: self.n })
    }
}

fn apply_local(rs: &[Rbar], x: &mut [f64]) {
    let d = x.len();
    for (j, r) in rs.iter().enumerate() {
        if *r == [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            continue;
        }
        let s = pow3(j);
        for outer in (0..d).step_by(3 * s) {
            for i in outer..outer + s {
                let (a, b, c) = (x[i], x[i + s], x[i + 2 * s]);
                x[i] = r[0][0] * a + r[0][1] * b + r[0][2] * c;
                x[i + s] = r[1][0] * a + r[1][1] * b + r[1][2] * c;
                x[i + 2 * s] = r[2][0] * a + r[2][1] * b + r[2][2] * c;
            }
        }
    }
}

impl LinearMap for ChainOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
        let mut scratch = vec![0.0; self.dim];
        for f in &self.factors {
            match f {
                Factor::Local(rs) => apply_local(rs, y),
                Factor::Mix { perm, p } => {
                    let q = 1.0 - p;
                    for (s, v) in scratch.iter_mut().zip(y.iter()) {
                        *s = q * v;
                    }
                    for (i, &t) in perm.iter().enumerate() {
                        scratch[t as usize] += p * y[i];
                    }
                    y.copy_from_slice(&scratch);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpace {
    /// Full reduced space {0,z,ξ}ⁿ.
    Reduced { n: usize },
    SymmetricAllToAll { n: usize },
    SymmetricStar { n: usize },
    /// Quotient of another space under a partition.
    Lumped { classes: usize },
}

/// Dense column-stochastic matrix, `M[target][source]`, row-major storage.
#[derive(Clone, Debug)]
pub struct ChainMatrix {
    dim: usize,
    data: Vec<f64>,
    pub space: StateSpace,
}

impl ChainMatrix {
    pub fn from_rows(dim: usize, data: Vec<f64>, space: StateSpace) -> Self {
        assert_eq!(data.len(), dim * dim);
        Self { dim, data, space }
    }

    /// Builds the matrix column by column from a linear map.
    pub fn from_map(map: &dyn LinearMap, space: StateSpace) -> Result<Self> {
        let dim = map.dim();
        let limit = pow3(DEFAULT_DENSE_QUBITS);
        if dim > limit {
            return Err(Error::DimensionLimit { got: dim, limit });
        }
        let cols: Vec<Vec<f64>> = (0..dim)
            .into_par_iter()
            .map(|s| {
                let mut e = vec![0.0; dim];
                e[s] = 1.0;
                map.apply_vec(&e)
            })
            .collect();
        let mut data = vec![0.0; dim * dim];
        for (s, col) in cols.iter().enumerate() {
            for (t, &v) in col.iter().enumerate() {
                data[t * dim + s] = v;
            }
        }
        Ok(Self { dim, data, space })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, target: usize, source: usize) -> f64 {
        self.data[target * self.dim + source]
    }

    pub fn rows(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, source: usize) -> Vec<f64> {
        (0..self.dim).map(|t| self.get(t, source)).collect()
    }

    /// Largest deviation of a column sum from 1, and whether any entry is
    /// negative beyond roundoff.
    pub fn stochastic_deviation(&self) -> (f64, bool) {
        let mut sums = vec![0.0; self.dim];
        let mut negative = false;
        for t in 0..self.dim {
            for (s, sum) in sums.iter_mut().enumerate() {
                let v = self.get(t, s);
                negative |= v < -1e-15;
                *sum += v;
            }
        }
        let dev = sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
        (dev, negative)
    }

    pub fn is_column_stochastic(&self, tol: f64) -> bool {
        let (dev, neg) = self.stochastic_deviation();
        dev <= tol && !neg
    }

    pub fn matmul(&self, other: &ChainMatrix) -> ChainMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        out.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
            for l in 0..d {
                let a = self.data[i * d + l];
                if a == 0.0 {
                    continue;
                }
                for (j, o) in row.iter_mut().enumerate() {
                    *o += a * other.data[l * d + j];
                }
            }
        });
        ChainMatrix {
            dim: d,
            data: out,
            space: self.space.clone(),
        }
    }

    pub fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

impl LinearMap for ChainMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let d = self.dim;
        for (t, out) in y.iter_mut().enumerate() {
            let row = &self.data[t * d..(t + 1) * d];
            *out = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

fn check_dense_n(n: usize) -> Result<()> {
    if n > DEFAULT_DENSE_QUBITS {
        return Err(Error::DimensionLimit {
            got: pow3(n),
            limit: pow3(DEFAULT_DENSE_QUBITS),
        });
    }
    Ok(())
}

/// ⊗ⱼ R̄(cⱼ) in canonical index order.
pub fn local_layer(spec: &LocalGateSpec) -> Result<ChainMatrix> {
    check_dense_n(spec.n())?;
    ChainOperator::from_local(spec)?.to_dense()
}

/// ∏ₑ [p·Gₑ + (1−p)·I] over the layer's edges.
pub fn two_qubit_layer(n: usize, layer: &TwoQubitLayer) -> Result<ChainMatrix> {
    check_dense_n(n)?;
    ChainOperator::from_layer(n, layer)?.to_dense()
}

/// Product over the period of (two-qubit layer · local layer).
pub fn step_matrix(schedule: &CircuitSchedule) -> Result<ChainMatrix> {
    check_dense_n(schedule.n)?;
    ChainOperator::from_schedule(schedule)?.to_dense()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::schedule::{Step, Topology};
    use crate::pauli::{cz_class_action, Letter, ReducedPauliString};

    fn idx(ls: &[Letter]) -> usize {
        ReducedPauliString::new(ls.to_vec()).index()
    }

    #[test]
    fn rbar_values() {
        let third = 1.0 / 3.0;
        let r = rbar(third).unwrap();
        let want = [[1.0, 0.0, 0.0], [0.0, third, third], [0.0, 2.0 * third, 2.0 * third]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - want[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(
            rbar(0.0).unwrap(),
            [[1.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.0, 1.0, 0.5]]
        );
        assert_eq!(
            rbar(1.0).unwrap(),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        );
        assert!(rbar(1.1).is_err());
    }

    #[test]
    fn local_layer_is_kronecker_product() {
        let m = local_layer(&LocalGateSpec::uniform(1, 0.0)).unwrap();
        let r = rbar(0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), r[i][j]);
            }
        }
        let m = local_layer(&LocalGateSpec::uniform(2, 1.0)).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let third = 1.0 / 3.0;
        let m = local_layer(&LocalGateSpec::uniform(2, third)).unwrap();
        let zz = idx(&[Letter::Z, Letter::Z]);
        assert!((m.get(zz, zz) - third * third).abs() < 1e-16);
        // heterogeneous: kron of distinct factors
        let spec = LocalGateSpec {
            c_per_qubit: vec![0.2, 0.7],
        };
        let m = local_layer(&spec).unwrap();
        let (r0, r1) = (rbar(0.2).unwrap(), rbar(0.7).unwrap());
        for t in 0..9 {
            for s in 0..9 {
                let want = r0[t % 3][s % 3] * r1[t / 3][s / 3];
                assert!((m.get(t, s) - want).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn deterministic_cz_edge_is_class_permutation() {
        let layer = TwoQubitLayer {
            gate: Gate::Cz,
            edges: vec![(0, 1)],
            p: 1.0,
        };
        let m = two_qubit_layer(2, &layer).unwrap();
        for s in 0..9 {
            let (a, b) = (Letter::from_digit(s % 3), Letter::from_digit(s / 3));
            let (ta, tb) = cz_class_action((a, b));
            let t = ta.digit() + 3 * tb.digit();
            for r in 0..9 {
                assert_eq!(m.get(r, s), if r == t { 1.0 } else { 0.0 });
            }
        }
        let off = TwoQubitLayer { p: 0.0, ..layer.clone() };
        let m0 = two_qubit_layer(2, &off).unwrap();
        for r in 0..9 {
            for s in 0..9 {
                assert_eq!(m0.get(r, s), if r == s { 1.0 } else { 0.0 });
            }
        }
        let half = TwoQubitLayer { p: 0.5, ..layer };
        let mh = two_qubit_layer(2, &half).unwrap();
        let src = idx(&[Letter::Xi, Letter::Zero]);
        assert_eq!(mh.get(src, src), 0.5);
        assert_eq!(mh.get(idx(&[Letter::Xi, Letter::Z]), src), 0.5);
    }

    #[test]
    fn empty_layer_with_unit_c_is_identity() {
        let sched = CircuitSchedule::new(
            3,
            vec![Step {
                local: LocalGateSpec::uniform(3, 1.0),
                layer: TwoQubitLayer {
                    gate: Gate::Cz,
                    edges: vec![],
                    p: 1.0,
                },
            }],
        )
        .unwrap();
        let m = step_matrix(&sched).unwrap();
        for r in 0..27 {
            for s in 0..27 {
                assert_eq!(m.get(r, s), if r == s { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn step_is_layer_times_local() {
        let sched = CircuitSchedule::standard(Topology::Open, Gate::Cz, 3, 0.2, 0.6).unwrap();
        let step = &sched.period[0];
        let want = two_qubit_layer(3, &step.layer)
            .unwrap()
            .matmul(&local_layer(&step.local).unwrap());
        let got = step_matrix(&sched).unwrap();
        for (a, b) in got.rows().iter().zip(want.rows()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn matrices_are_stochastic_and_fix_identity() {
        for top in Topology::ALL {
            for n in 2..=5 {
                let m = step_matrix(&CircuitSchedule::standard(top, Gate::Cz, n, 0.3, 0.7).unwrap())
                    .unwrap();
                assert!(m.is_column_stochastic(1e-12));
                assert_eq!(m.get(0, 0), 1.0);
                for t in 1..m.dim() {
                    assert_eq!(m.get(t, 0), 0.0);
                    assert_eq!(m.get(0, t), 0.0);
                }
            }
        }
        for top in [Topology::Open, Topology::Closed] {
            let m = step_matrix(&CircuitSchedule::standard(top, Gate::Xy, 4, 0.4, 0.8).unwrap())
                .unwrap();
            assert!(m.is_column_stochastic(1e-12));
        }
    }

    #[test]
    fn cz_layer_order_independent() {
        let n = 4;
        let edges = Topology::AllToAll.edges(n);
        let mut rev = edges.clone();
        rev.reverse();
        let a = two_qubit_layer(n, &TwoQubitLayer { gate: Gate::Cz, edges, p: 0.37 }).unwrap();
        let b = two_qubit_layer(n, &TwoQubitLayer { gate: Gate::Cz, edges: rev, p: 0.37 }).unwrap();
        for (x, y) in a.rows().iter().zip(b.rows()) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
