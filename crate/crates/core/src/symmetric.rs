//! Permutation-symmetric chains for the all-to-all and star topologies.
//!
//! AA states are (k_z, k_ξ) counts; star states add the central letter and
//! count over the n−1 outer qubits. A CZ layer with independent edges acts
//! on a non-ξ qubit with k ξ-neighbours as a 0 ↔ z toggle with probability
//! t(k) = (1 − (1−2p)^k)/2.

use crate::error::{check_unit_interval, Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::markov::operator::{rbar, ChainMatrix, LinearMap, StateSpace};
use crate::markov::spectrum::{gap_report, mixes, SpectrumReport};
use crate::pauli::{pow3, Letter, ReducedPauliString};

/// Toggle probability of a non-ξ qubit with k ξ-neighbours.
pub fn toggle_probability(k: usize, p: f64) -> f64 {
    (1.0 - (1.0 - 2.0 * p).powi(k as i32)) / 2.0
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    // exact sum is cheap at the sizes used here and avoids a gamma dependency
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Binomial pmf over 0..=n, evaluated in log space.
pub fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    if q <= 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if q >= 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let (lq, lr) = (q.ln(), (1.0 - q).ln());
    let logs: Vec<f64> = (0..=n)
        .map(|k| ln_choose(n, k) + k as f64 * lq + (n - k) as f64 * lr)
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut v: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    // renormalize so columns built from these stay stochastic to rounding
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Number of (k_z, k_ξ) states with k_z + k_ξ ≤ n.
pub fn aa_state_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Index of (k_z, k_ξ): k_ξ-major, the identity (0,0) is 0.
pub fn aa_index(n: usize, kz: usize, kx: usize) -> usize {
    debug_assert!(kz + kx <= n);
    // Σ_{k<kx} (n−k+1) = kx(n+1) − kx(kx−1)/2
    kx * (n + 1) - kx * kx.saturating_sub(1) / 2 + kz
}

pub fn aa_states(n: usize) -> Vec<(usize, usize)> {
    (0..=n)
        .flat_map(|kx| (0..=n - kx).map(move |kz| (kz, kx)))
        .collect()
}

/// Column-compressed sparse stochastic matrix.
#[derive(Clone, Debug)]
struct Sparse {
    dim: usize,
    cols: Vec<Vec<(u32, f64)>>,
}

impl Sparse {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    fn push(&mut self, target: usize, source: usize, v: f64) {
        if v != 0.0 {
            self.cols[source].push((target as u32, v));
        }
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (s, col) in self.cols.iter().enumerate() {
            let xs = x[s];
            if xs == 0.0 {
                continue;
            }
            for &(t, v) in col {
                y[t as usize] += v * xs;
            }
        }
    }
}

/// Local layer on counts: z stays z w.p. c; ξ becomes z w.p. (1−c)/2.
fn local_counts(kz: usize, kx: usize, c: f64) -> Vec<f64> {
    convolve(&binomial_pmf(kz, c), &binomial_pmf(kx, (1.0 - c) / 2.0))
}

/// Toggling `zeros` 0-letters and `zs` z-letters independently w.p. t:
/// distribution of the new z count.
fn toggle_counts(zs: usize, zeros: usize, t: f64) -> Vec<f64> {
    convolve(&binomial_pmf(zs, 1.0 - t), &binomial_pmf(zeros, t))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymmetricKind {
    AllToAll { n: usize },
    Star { n: usize },
}

/// One period of a symmetric chain: local layer, then the CZ layer.
#[derive(Clone, Debug)]
pub struct SymmetricChain {
    pub kind: SymmetricKind,
    local: Sparse,
    cz: Sparse,
    mixing: bool,
}

impl LinearMap for SymmetricChain {
    fn dim(&self) -> usize {
        self.local.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut mid = vec![0.0; x.len()];
        self.local.apply_into(x, &mut mid);
        self.cz.apply_into(&mid, y);
    }
}

fn check_params(n: usize, cs: &[f64], p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSchedule("symmetric chains need n ≥ 2".into()));
    }
    for &c in cs {
        check_unit_interval("local gate parameter c", c)?;
    }
    check_unit_interval("gate probability p", p)
}

impl SymmetricChain {
    pub fn all_to_all(n: usize, c: f64, p: f64) -> Result<Self> {
        check_params(n, &[c], p)?;
        let d = aa_state_count(n);
        let mut local = Sparse::new(d);
        let mut cz = Sparse::new(d);
        for (kz, kx) in aa_states(n) {
            let s = aa_index(n, kz, kx);
            let w = kz + kx;
            for (nz, pr) in local_counts(kz, kx, c).into_iter().enumerate() {
                local.push(aa_index(n, nz, w - nz), s, pr);
            }
            let t = toggle_probability(kx, p);
            for (nz, pr) in toggle_counts(kz, n - w, t).into_iter().enumerate() {
                cz.push(aa_index(n, nz, kx), s, pr);
            }
        }
        Ok(Self {
            kind: SymmetricKind::AllToAll { n },
            local,
            cz,
            mixing: mixes(&[c], p),
        })
    }

    /// Star with the centre on qubit 0 and n−1 outer qubits.
    pub fn star(n: usize, c_central: f64, c_outer: f64, p: f64) -> Result<Self> {
        check_params(n, &[c_central, c_outer], p)?;
        let m = n - 1;
        let block = aa_state_count(m);
        let d = 3 * block;
        let idx = |central: usize, kz: usize, kx: usize| central * block + aa_index(m, kz, kx);
        let rc = rbar(c_central)?;
        let mut local = Sparse::new(d);
        let mut cz = Sparse::new(d);
        for central in 0..3 {
            for (kz, kx) in aa_states(m) {
                let s = idx(central, kz, kx);
                let w = kz + kx;
                let outer = local_counts(kz, kx, c_outer);
                for (nc, row) in rc.iter().enumerate() {
                    let pc = row[central];
                    if pc == 0.0 {
                        continue;
                    }
                    for (nz, pr) in outer.iter().enumerate() {
                        local.push(idx(nc, nz, w - nz), s, pc * pr);
                    }
                }
                if central == Letter::Xi.digit() {
                    for (nz, pr) in toggle_counts(kz, m - w, p).into_iter().enumerate() {
                        cz.push(idx(central, nz, kx), s, pr);
                    }
                } else {
                    let t = toggle_probability(kx, p);
                    let other = 1 - central;
                    cz.push(idx(central, kz, kx), s, 1.0 - t);
                    cz.push(idx(other, kz, kx), s, t);
                }
            }
        }
        Ok(Self {
            kind: SymmetricKind::Star { n },
            local,
            cz,
            mixing: mixes(&[c_central, c_outer], p),
        })
    }

    pub fn n(&self) -> usize {
        match self.kind {
            SymmetricKind::AllToAll { n } | SymmetricKind::Star { n } => n,
        }
    }

    fn space(&self) -> StateSpace {
        match self.kind {
            SymmetricKind::AllToAll { n } => StateSpace::SymmetricAllToAll { n },
            SymmetricKind::Star { n } => StateSpace::SymmetricStar { n },
        }
    }

    pub fn to_dense(&self) -> Result<ChainMatrix> {
        ChainMatrix::from_map(self, self.space())
    }

    /// Moments of a computational basis state in symmetric coordinates.
    pub fn computational_start(&self) -> Vec<f64> {
        let n = self.n();
        let mut v = vec![0.0; self.dim()];
        let scale = 0.5f64.powi(n as i32);
        match self.kind {
            SymmetricKind::AllToAll { .. } => {
                for kz in 0..=n {
                    v[aa_index(n, kz, 0)] = binomial_pmf(n, 0.5)[kz] * 2f64.powi(n as i32) * scale;
                }
            }
            SymmetricKind::Star { .. } => {
                let m = n - 1;
                let block = aa_state_count(m);
                let pmf = binomial_pmf(m, 0.5);
                for central in 0..2 {
                    for (kz, w) in pmf.iter().enumerate() {
                        v[central * block + aa_index(m, kz, 0)] = w * 2f64.powi(m as i32) * scale;
                    }
                }
            }
        }
        v
    }

    /// E[Q] from a symmetric moment vector.
    pub fn q(&self, v: &[f64]) -> f64 {
        let n = self.n();
        let single = match self.kind {
            SymmetricKind::AllToAll { .. } => v[aa_index(n, 1, 0)] + v[aa_index(n, 0, 1)],
            SymmetricKind::Star { .. } => {
                let m = n - 1;
                let block = aa_state_count(m);
                v[aa_index(m, 1, 0)] + v[aa_index(m, 0, 1)] + v[block] + v[2 * block]
            }
        };
        1.0 - 2f64.powi(n as i32) / n as f64 * single
    }

    /// Leading spectrum; Δ = 0 when the parameters cannot mix (see [`mixes`]).
    pub fn gap(&self) -> Result<SpectrumReport> {
        let r = gap_report(self)?;
        Ok(if self.mixing { r } else { r.non_mixing() })
    }
}

pub fn aa_symmetric_matrix(n: usize, c: f64, p: f64) -> Result<ChainMatrix> {
    SymmetricChain::all_to_all(n, c, p)?.to_dense()
}

pub fn star_symmetric_matrix(n: usize, c_central: f64, c_outer: f64, p: f64) -> Result<ChainMatrix> {
    SymmetricChain::star(n, c_central, c_outer, p)?.to_dense()
}

/// Dense solve is used up to this dimension (AA n = 52); Arnoldi beyond.
pub const SYMMETRIC_DENSE_MAX: usize = 1431;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetricTopology {
    AllToAll,
    Star,
}

/// How the CZ probability scales with n.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "p")]
pub enum PPolicy {
    Fixed(f64),
    /// p = 2/(n(n−1)): one gate per step on average.
    OneGatePerStep,
    /// p = 2/(n−1): one gate per qubit per step on average.
    OneGatePerQubit,
}

impl PPolicy {
    pub fn p(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            PPolicy::Fixed(p) => p,
            PPolicy::OneGatePerStep => 2.0 / (nf * (nf - 1.0)),
            PPolicy::OneGatePerQubit => (2.0 / (nf - 1.0)).min(1.0),
        }
    }
}

pub fn symmetric_chain(top: SymmetricTopology, n: usize, c: f64, p: f64) -> Result<SymmetricChain> {
    match top {
        SymmetricTopology::AllToAll => SymmetricChain::all_to_all(n, c, p),
        SymmetricTopology::Star => SymmetricChain::star(n, c, c, p),
    }
}

/// Gap of a symmetric chain, dense when small enough.
pub fn symmetric_gap(chain: &SymmetricChain) -> Result<SpectrumReport> {
    if chain.dim() <= SYMMETRIC_DENSE_MAX {
        let r = crate::markov::spectrum::spectrum(&chain.to_dense()?)?;
        Ok(if chain.mixing { r } else { r.non_mixing() })
    } else {
        chain.gap()
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum ScalingModel {
    /// Δ = (1−c) − e^{−(a n + a0)}
    SaturatingExponential { a: f64, a0: f64 },
    /// Δ = 1 − 2^{−(α p n + β)}; κ = α p, γ = β.
    PowerOfTwo { alpha: f64, beta: f64, kappa: f64, gamma: f64 },
    /// Δ = a / (n − b)
    Inverse { a: f64, b: f64 },
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ScalingFit {
    pub model: ScalingModel,
    pub residual_norm: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// Standard errors of the transformed slope and intercept.
    pub slope_se: f64,
    pub intercept_se: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub p: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ScalingStudy {
    pub topology: SymmetricTopology,
    pub c: f64,
    pub policy: PPolicy,
    pub points: Vec<ScalingPoint>,
    /// None for p = 2/(n−1), where the gap tends to a constant.
    pub fit: Option<ScalingFit>,
}

pub fn scaling_study(
    top: SymmetricTopology,
    c: f64,
    policy: PPolicy,
    n_range: &[usize],
) -> Result<ScalingStudy> {
    use rayon::prelude::*;
    let points = n_range
        .par_iter()
        .map(|&n| {
            let p = policy.p(n);
            let chain = symmetric_chain(top, n, c, p)?;
            Ok(ScalingPoint {
                n,
                p,
                gap: symmetric_gap(&chain)?.gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = match policy {
        PPolicy::OneGatePerQubit => None,
        PPolicy::OneGatePerStep => Some(fit_inverse(&points)?),
        PPolicy::Fixed(p) if c == 0.0 => Some(fit_power_of_two(&points, p)?),
        PPolicy::Fixed(_) => Some(fit_saturating(&points, c)?),
    };
    Ok(ScalingStudy {
        topology: top,
        c,
        policy,
        points,
        fit,
    })
}

fn span(points: &[ScalingPoint]) -> (usize, usize) {
    let lo = points.iter().map(|q| q.n).min().unwrap_or(0);
    let hi = points.iter().map(|q| q.n).max().unwrap_or(0);
    (lo, hi)
}

fn finish(model: ScalingModel, f: &LineFit, points: &[ScalingPoint]) -> ScalingFit {
    let (n_min, n_max) = span(points);
    ScalingFit {
        model,
        residual_norm: f.residual_norm,
        n_min,
        n_max,
        slope_se: f.slope_se,
        intercept_se: f.intercept_se,
    }
}

/// 1/Δ = n/a − b/a.
pub fn fit_inverse(points: &[ScalingPoint]) -> Result<ScalingFit> {
    let x: Vec<f64> = points.iter().map(|q| q.n as f64).collect();
    let y: Vec<f64> = points.iter().map(|q| 1.0 / q.gap).collect();
    let f = fit_line(&x, &y)?;
    if f.slope <= 0.0 {
        return Err(Error::FitIllConditioned("1/Δ does not grow with n".into()));
    }
    let a = 1.0 / f.slope;
    Ok(finish(ScalingModel::Inverse { a, b: -f.intercept * a }, &f, points))
}

/// log₂(1−Δ) = −(α p n + β).
pub fn fit_power_of_two(points: &[ScalingPoint], p: f64) -> Result<ScalingFit> {
    if p <= 0.0 {
        return Err(Error::FitIllConditioned("p = 0".into()));
    }
    let x: Vec<f64> = points.iter().map(|q| q.n as f64).collect();
    let y: Vec<f64> = points.iter().map(|q| (1.0 - q.gap).log2()).collect();
    let f = fit_line(&x, &y)?;
    let alpha = -f.slope / p;
    let beta = -f.intercept;
    Ok(finish(
        ScalingModel::PowerOfTwo {
            alpha,
            beta,
            kappa: alpha * p,
            gamma: beta,
        },
        &f,
        points,
    ))
}

/// ln((1−c) − Δ) = −(a n + a0); points at the rounding floor are dropped.
pub fn fit_saturating(points: &[ScalingPoint], c: f64) -> Result<ScalingFit> {
    let kept: Vec<&ScalingPoint> = points
        .iter()
        .filter(|q| (1.0 - c) - q.gap > 1e-12)
        .collect();
    if kept.len() < 2 {
        return Err(Error::NoDecayWindow(
            "gap already at 1 − c to rounding for every n".into(),
        ));
    }
    let x: Vec<f64> = kept.iter().map(|q| q.n as f64).collect();
    let y: Vec<f64> = kept.iter().map(|q| ((1.0 - c) - q.gap).ln()).collect();
    let f = fit_line(&x, &y)?;
    Ok(finish(
        ScalingModel::SaturatingExponential {
            a: -f.slope,
            a0: -f.intercept,
        },
        &f,
        points,
    ))
}

/// Reduced index → AA symmetric state.
pub fn aa_partition(n: usize) -> Vec<usize> {
    (0..pow3(n))
        .map(|i| {
            let s = ReducedPauliString::from_index(i, n);
            aa_index(n, s.count(Letter::Z), s.count(Letter::Xi))
        })
        .collect()
}

/// Reduced index → star symmetric state (centre = qubit 0).
pub fn star_partition(n: usize) -> Vec<usize> {
    let m = n - 1;
    let block = aa_state_count(m);
    (0..pow3(n))
        .map(|i| {
            let s = ReducedPauliString::from_index(i, n);
            let outer = &s.letters()[1..];
            let kz = outer.iter().filter(|&&l| l == Letter::Z).count();
            let kx = outer.iter().filter(|&&l| l == Letter::Xi).count();
            s.letter(0).digit() * block + aa_index(m, kz, kx)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::analysis::lumpability_check;
    use crate::markov::operator::ChainOperator;
    use crate::markov::schedule::{CircuitSchedule, Gate, LocalGateSpec, Topology};

    #[test]
    fn toggle_probability_values() {
        for p in [0.0, 0.3, 0.5, 0.9] {
            assert_eq!(toggle_probability(0, p), 0.0);
            assert!((toggle_probability(1, p) - p).abs() < 1e-15);
        }
        for k in 1..20 {
            assert!((toggle_probability(k, 0.5) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn toggle_probability_matches_edge_enumeration() {
        // odd number of activated edges out of k
        for k in 0..8 {
            for p in [0.2f64, 0.7] {
                let direct: f64 = (0..=k)
                    .filter(|j| j % 2 == 1)
                    .map(|j| {
                        let c = ln_choose(k, j).exp();
                        c * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32)
                    })
                    .sum();
                assert!((direct - toggle_probability(k, p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indexing_is_consistent() {
        for n in 1..12 {
            let states = aa_states(n);
            assert_eq!(states.len(), aa_state_count(n));
            for (i, &(kz, kx)) in states.iter().enumerate() {
                assert_eq!(aa_index(n, kz, kx), i);
            }
        }
    }

    #[test]
    fn binomial_pmf_sums_to_one_at_large_n() {
        let v = binomial_pmf(300, 0.37);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
    }

    #[test]
    fn aa_is_lumping_of_dense_chain() {
        for (n, c, p) in [(3, 0.0, 0.5), (4, 0.2, 0.7), (5, 1.0 / 3.0, 1.0)] {
            let op = ChainOperator::from_schedule(
                &CircuitSchedule::standard(Topology::AllToAll, Gate::Cz, n, c, p).unwrap(),
            )
            .unwrap();
            let l = lumpability_check(&op, &aa_partition(n));
            assert!(l.lumpable);
            let reduced = l.reduced.unwrap();
            let sym = aa_symmetric_matrix(n, c, p).unwrap();
            for (a, b) in reduced.rows().iter().zip(sym.rows()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn star_is_lumping_of_dense_chain() {
        for (n, cc, co, p) in [(3, 0.0, 1.0 / 3.0, 0.75), (4, 0.1, 0.4, 0.6), (5, 1.0 / 3.0, 1.0 / 3.0, 0.75)] {
            let mut cs = vec![co; n];
            cs[0] = cc;
            let op = ChainOperator::from_schedule(
                &CircuitSchedule::with_local(Topology::Star, Gate::Cz, LocalGateSpec { c_per_qubit: cs }, p)
                    .unwrap(),
            )
            .unwrap();
            let l = lumpability_check(&op, &star_partition(n));
            assert!(l.lumpable);
            let reduced = l.reduced.unwrap();
            let sym = star_symmetric_matrix(n, cc, co, p).unwrap();
            for (a, b) in reduced.rows().iter().zip(sym.rows()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn open_chain_is_not_aa_lumpable() {
        let op = ChainOperator::from_schedule(
            &CircuitSchedule::standard(Topology::Open, Gate::Cz, 4, 0.0, 1.0).unwrap(),
        )
        .unwrap();
        let l = lumpability_check(&op, &aa_partition(4));
        assert!(!l.lumpable);
        assert!(l.witness.is_some());
    }

    #[test]
    fn symmetric_chains_are_column_stochastic() {
        for (c, p) in [(0.0, 0.0), (0.3, 0.5), (1.0, 1.0), (1.0 / 3.0, 0.75)] {
            assert!(aa_symmetric_matrix(7, c, p).unwrap().is_column_stochastic(1e-12));
            assert!(star_symmetric_matrix(7, c, 0.5, p).unwrap().is_column_stochastic(1e-12));
        }
    }

    #[test]
    fn symmetric_q_matches_dense_q() {
        let n = 5;
        let sym = SymmetricChain::all_to_all(n, 0.0, 1.0).unwrap();
        let mut v = sym.computational_start();
        let mut next = vec![0.0; v.len()];
        let op = ChainOperator::from_schedule(
            &CircuitSchedule::standard(Topology::AllToAll, Gate::Cz, n, 0.0, 1.0).unwrap(),
        )
        .unwrap();
        let mut full = crate::moments::MomentVector::computational(n);
        for _ in 0..6 {
            assert!((sym.q(&v) - crate::moments::q_from_moments(&full)).abs() < 1e-13);
            sym.apply(&v, &mut next);
            std::mem::swap(&mut v, &mut next);
            full.entries = op.apply_vec(&full.entries);
        }
    }

    #[test]
    fn symmetric_spectrum_is_contained_in_dense() {
        use crate::markov::analysis::eigenvalues_contained;
        use crate::markov::spectrum::spectrum;
        for (c, p) in [(0.0, 0.5), (0.25, 0.8)] {
            let n = 5;
            let dense = CircuitSchedule::standard(Topology::AllToAll, Gate::Cz, n, c, p).unwrap();
            let full = spectrum(&ChainOperator::from_schedule(&dense).unwrap().to_dense().unwrap()).unwrap();
            let sym = spectrum(&aa_symmetric_matrix(n, c, p).unwrap()).unwrap();
            assert!(eigenvalues_contained(&sym.eigenvalues, &full.eigenvalues, 1e-7));
            assert!((sym.gap - full.gap).abs() < 1e-9);
        }
        let mut cs = vec![1.0 / 3.0; 5];
        cs[0] = 0.0;
        let star = CircuitSchedule::with_local(Topology::Star, Gate::Cz, LocalGateSpec { c_per_qubit: cs }, 0.75).unwrap();
        let full = spectrum(&ChainOperator::from_schedule(&star).unwrap().to_dense().unwrap()).unwrap();
        let sym = spectrum(&star_symmetric_matrix(5, 0.0, 1.0 / 3.0, 0.75).unwrap()).unwrap();
        assert!(eigenvalues_contained(&sym.eigenvalues, &full.eigenvalues, 1e-7));
        assert!((sym.gap - full.gap).abs() < 1e-9);
    }

    #[test]
    fn star_gaps_at_ten_qubits() {
        let g = symmetric_gap(&SymmetricChain::star(10, 1.0 / 3.0, 1.0 / 3.0, 0.75).unwrap()).unwrap();
        assert!((g.gap - 1.0 / 3.0).abs() < 1e-10);
        let g = symmetric_gap(&SymmetricChain::star(10, 0.0, 1.0 / 3.0, 0.75).unwrap()).unwrap();
        assert!((g.gap - 0.5).abs() < 1e-10);
    }

    #[test]
    fn p_policies() {
        assert!((PPolicy::OneGatePerStep.p(8) - 2.0 / 56.0).abs() < 1e-15);
        assert!((PPolicy::OneGatePerQubit.p(5) - 0.5).abs() < 1e-15);
        assert_eq!(PPolicy::OneGatePerQubit.p(2), 1.0);
        assert_eq!(PPolicy::Fixed(0.3).p(40), 0.3);
    }

    #[test]
    fn saturating_fit_approaches_one_minus_c() {
        let s = scaling_study(SymmetricTopology::AllToAll, 0.1, PPolicy::Fixed(0.5), &[6, 8, 10, 12, 14]).unwrap();
        for w in s.points.windows(2) {
            assert!(w[1].gap > w[0].gap && w[1].gap < 0.9);
        }
        match s.fit.unwrap().model {
            ScalingModel::SaturatingExponential { a, .. } => assert!(a > 0.0),
            m => panic!("unexpected model {m:?}"),
        }
    }

    #[test]
    fn fits_recover_synthetic_models() {
        let pts: Vec<ScalingPoint> = (8..20)
            .map(|n| ScalingPoint { n, p: 0.0, gap: 1.3 / (n as f64 - 1.5) })
            .collect();
        match fit_inverse(&pts).unwrap().model {
            ScalingModel::Inverse { a, b } => assert!((a - 1.3).abs() < 1e-10 && (b - 1.5).abs() < 1e-9),
            m => panic!("{m:?}"),
        }
        let pts: Vec<ScalingPoint> = (8..20)
            .map(|n| ScalingPoint { n, p: 0.4, gap: 1.0 - 2f64.powf(-(0.9 * 0.4 * n as f64 + 0.2)) })
            .collect();
        match fit_power_of_two(&pts, 0.4).unwrap().model {
            ScalingModel::PowerOfTwo { alpha, beta, .. } => {
                assert!((alpha - 0.9).abs() < 1e-9 && (beta - 0.2).abs() < 1e-9)
            }
            m => panic!("{m:?}"),
        }
    }

    proptest::proptest! {
        #[test]
        fn toggle_probability_bounded_and_monotone(p in 0.0f64..0.5, k in 0usize..60) {
            let a = toggle_probability(k, p);
            let b = toggle_probability(k + 1, p);
            proptest::prop_assert!((0.0..=0.5).contains(&a));
            proptest::prop_assert!(b >= a - 1e-15);
        }

        #[test]
        fn aa_columns_stochastic(n in 2usize..30, c in 0.0f64..=1.0, p in 0.0f64..=1.0) {
            let ch = SymmetricChain::all_to_all(n, c, p).unwrap();
            let mut e = vec![0.0; ch.dim()];
            for s in 0..ch.dim() {
                e[s] = 1.0;
                let col = ch.apply_vec(&e);
                e[s] = 0.0;
                proptest::prop_assert!((col.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                proptest::prop_assert!(col.iter().all(|v| *v >= 0.0));
            }
        }
    }
}
