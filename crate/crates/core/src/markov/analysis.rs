//! Stationary behaviour, trajectories, effective decay, parity sectors and
//! lumpability.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::markov::operator::{ChainMatrix, ChainOperator, LinearMap, StateSpace};
use crate::markov::schedule::CircuitSchedule;
use crate::markov::spectrum::{ritz_pairs, Krylov, UNIT_TOL};
use crate::moments::{q_from_entries, MomentVector};
use crate::pauli::{pow3, ReducedPauliString};

const STATIONARY_TOL: f64 = 1e-13;
const STATIONARY_MAX_ITERS: usize = 1_000_000;
const MAX_PERIOD: usize = 16;

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Limit of Mᵗ v0 by power iteration until ‖Δv‖∞ < 1e-13·‖v0‖∞.
pub fn stationary_vec(op: &dyn LinearMap, v0: &[f64]) -> Result<Vec<f64>> {
    let tol = STATIONARY_TOL * v0.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut history: Vec<Vec<f64>> = vec![v0.to_vec()];
    let mut v = v0.to_vec();
    let mut next = vec![0.0; v.len()];
    for it in 1..=STATIONARY_MAX_ITERS {
        op.apply(&v, &mut next);
        let step = max_abs_diff(&v, &next);
        std::mem::swap(&mut v, &mut next);
        if step < tol {
            return Ok(v);
        }
        history.push(v.clone());
        if history.len() > MAX_PERIOD + 1 {
            history.remove(0);
        }
        if it % 512 == 0 {
            for k in 2..=MAX_PERIOD.min(history.len() - 1) {
                let back = &history[history.len() - 1 - k];
                if max_abs_diff(&v, back) < tol {
                    return Err(Error::OscillationDetected(k));
                }
            }
        }
    }
    Err(Error::ConvergenceFailure(f64::NAN))
}

pub fn stationary(op: &dyn LinearMap, v0: &MomentVector) -> Result<MomentVector> {
    Ok(MomentVector::new(v0.n, stationary_vec(op, &v0.entries)?))
}

/// E[Q](ℓ) for ℓ = 0..=L.
pub fn q_trajectory(op: &dyn LinearMap, v0: &MomentVector, iterations: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(iterations + 1);
    let mut v = v0.entries.clone();
    let mut next = vec![0.0; v.len()];
    out.push(q_from_entries(v0.n, &v));
    for _ in 0..iterations {
        op.apply(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
        out.push(q_from_entries(v0.n, &v));
    }
    out
}

/// E[Q] after every single step of the schedule, cycling through the period.
pub fn q_trajectory_steps(
    schedule: &CircuitSchedule,
    v0: &MomentVector,
    steps: usize,
) -> Result<Vec<f64>> {
    let ops = ChainOperator::steps_of(schedule)?;
    let mut out = Vec::with_capacity(steps + 1);
    let mut v = v0.entries.clone();
    let mut next = vec![0.0; v.len()];
    out.push(q_from_entries(v0.n, &v));
    for l in 0..steps {
        ops[l % ops.len()].apply(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
        out.push(q_from_entries(v0.n, &v));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayMethod {
    /// Krylov expansion of v0 in eigenvectors.
    Eigen,
    /// Ratio of successive ‖Mᵗv0 − v∞‖ over the tail.
    DecayFit,
}

#[derive(Clone, Debug)]
pub struct EffectiveDecay {
    pub lambda: C64,
    pub gap: f64,
    pub gamma: f64,
    pub method: DecayMethod,
}

impl EffectiveDecay {
    fn new(lambda: C64, method: DecayMethod) -> Self {
        Self {
            lambda,
            gap: 1.0 - lambda.norm(),
            gamma: -lambda.norm().ln(),
            method,
        }
    }
}

/// Component threshold: eigen-directions carrying less than this fraction of
/// ‖v0‖ are ignored.
const COMPONENT_TOL: f64 = 1e-9;

/// Largest-modulus non-unit eigenvalue with a non-negligible component in v0.
pub fn effective_decay_rate(op: &dyn LinearMap, v0: &[f64]) -> Result<EffectiveDecay> {
    let v0n = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut kry = Krylov::new(v0);
    let max_dim = 300.min(op.dim());
    let mut prev: Option<C64> = None;
    loop {
        let target = (kry.m() + 10).min(max_dim);
        while kry.m() < target && kry.extend(op, 1e-13) {}
        if kry.m() == 0 {
            return Ok(EffectiveDecay::new(C64::new(0.0, 0.0), DecayMethod::Eigen));
        }
        let cand = leading_component(&kry, v0n)?;
        let exhausted = kry.breakdown || kry.m() >= max_dim;
        match cand {
            None if exhausted => {
                return Ok(EffectiveDecay::new(C64::new(0.0, 0.0), DecayMethod::Eigen))
            }
            Some((z, res)) => {
                let stable = prev.map(|p| (p - z).norm() < 1e-10).unwrap_or(false);
                if kry.breakdown || (res < 1e-9 && stable) {
                    return Ok(EffectiveDecay::new(z, DecayMethod::Eigen));
                }
                prev = Some(z);
            }
            None => prev = None,
        }
        if exhausted {
            break;
        }
    }
    decay_fit(op, v0)
}

/// (value, residual) of the largest-modulus non-unit Ritz value whose
/// component in the start vector is non-negligible.
fn leading_component(kry: &Krylov, v0n: f64) -> Result<Option<(C64, f64)>> {
    let m = kry.m();
    let (vals, res, vecs) = ritz_pairs(kry)?;
    // start vector = ‖v0‖ V e₁ = V Y α  ⇒  Y α = ‖v0‖ e₁
    let mut rhs = faer::Mat::<C64>::zeros(m, 1);
    rhs[(0, 0)] = C64::new(kry.start_norm, 0.0);
    let lu = vecs.full_piv_lu();
    use faer::linalg::solvers::Solve;
    let alpha = lu.solve(&rhs);
    let mut best: Option<(C64, f64)> = None;
    for j in 0..m {
        let z = vals[j];
        if (z - C64::new(1.0, 0.0)).norm() < UNIT_TOL {
            continue;
        }
        if alpha[(j, 0)].norm() <= COMPONENT_TOL * v0n {
            continue;
        }
        if best.map(|(b, _)| z.norm() > b.norm() + 1e-14).unwrap_or(true) {
            best = Some((z, res[j]));
        }
    }
    Ok(best)
}

fn decay_fit(op: &dyn LinearMap, v0: &[f64]) -> Result<EffectiveDecay> {
    let vinf = stationary_vec(op, v0)?;
    let mut w: Vec<f64> = v0.iter().zip(&vinf).map(|(a, b)| a - b).collect();
    let mut norms = Vec::new();
    let mut next = vec![0.0; w.len()];
    for _ in 0..400 {
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            break;
        }
        norms.push(nrm);
        op.apply(&w, &mut next);
        std::mem::swap(&mut w, &mut next);
    }
    if norms.len() < 3 {
        return Ok(EffectiveDecay::new(C64::new(0.0, 0.0), DecayMethod::DecayFit));
    }
    let tail = &norms[norms.len() / 2..];
    let ratio = (tail[tail.len() - 1] / tail[0]).powf(1.0 / (tail.len() - 1) as f64);
    Ok(EffectiveDecay::new(C64::new(ratio, 0.0), DecayMethod::DecayFit))
}

fn parity_of(index: usize, n: usize) -> usize {
    ReducedPauliString::from_index(index, n).weight() % 2
}

#[derive(Clone, Debug)]
pub struct ParityReport {
    pub conserved: bool,
    /// Probability mass leaking between sectors from a positive test vector.
    pub leakage: f64,
    /// Weights of v0 on the even and odd sectors.
    pub sector_weights: [f64; 2],
    /// Each sector's contribution (2ⁿ/n)·Σⱼ[π(z@j)+π(ξ@j)] to 1 − Q∞.
    pub sector_q_deficit: [f64; 2],
    pub asymptotic_q: f64,
}

/// Detects conservation of weight parity and reports sector-wise asymptotics.
pub fn parity_analysis(schedule: &CircuitSchedule, v0: &MomentVector) -> Result<ParityReport> {
    let op = ChainOperator::from_schedule(schedule)?;
    parity_analysis_op(&op, schedule.n, v0)
}

pub fn parity_analysis_op(op: &dyn LinearMap, n: usize, v0: &MomentVector) -> Result<ParityReport> {
    let d = pow3(n);
    let parity: Vec<usize> = (0..d).map(|i| parity_of(i, n)).collect();
    // strictly positive vectors on one sector; nonnegative entries cannot cancel
    let mut leakage: f64 = 0.0;
    for sector in 0..2 {
        let x: Vec<f64> = parity
            .iter()
            .map(|&p| if p == sector { 1.0 } else { 0.0 })
            .collect();
        let y = op.apply_vec(&x);
        let leak: f64 = y
            .iter()
            .zip(&parity)
            .filter(|(_, &p)| p != sector)
            .map(|(v, _)| v.abs())
            .sum();
        leakage = leakage.max(leak);
    }
    let conserved = leakage < 1e-12;
    let mut weights = [0.0; 2];
    for (v, &p) in v0.entries.iter().zip(&parity) {
        weights[p] += v;
    }
    let two_n = 2f64.powi(n as i32);
    let mut deficit = [0.0; 2];
    if conserved {
        for sector in 0..2 {
            if weights[sector] == 0.0 {
                continue;
            }
            let part: Vec<f64> = v0
                .entries
                .iter()
                .zip(&parity)
                .map(|(v, &p)| if p == sector { *v } else { 0.0 })
                .collect();
            let pi = stationary_vec(op, &part)?;
            deficit[sector] = two_n / n as f64
                * (0..n).map(|j| pi[pow3(j)] + pi[2 * pow3(j)]).sum::<f64>();
        }
    } else {
        let pi = stationary_vec(op, &v0.entries)?;
        deficit[0] = 1.0 - q_from_entries(n, &pi);
    }
    Ok(ParityReport {
        conserved,
        leakage,
        sector_weights: weights,
        sector_q_deficit: deficit,
        asymptotic_q: 1.0 - deficit[0] - deficit[1],
    })
}

#[derive(Clone, Debug)]
pub struct Lumpability {
    pub lumpable: bool,
    pub reduced: Option<ChainMatrix>,
    /// (source a, source b, target class) with differing class sums.
    pub witness: Option<(usize, usize, usize)>,
    pub max_discrepancy: f64,
}

const LUMP_TOL: f64 = 1e-12;

/// Strong lumpability: within each source class, the mass sent into every
/// target class must not depend on the source.
pub fn lumpability_check(m: &dyn LinearMap, partition: &[usize]) -> Lumpability {
    let d = m.dim();
    assert_eq!(partition.len(), d, "partition must cover every state");
    let k = partition.iter().copied().max().map(|x| x + 1).unwrap_or(0);
    let sums: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|s| {
            let mut e = vec![0.0; d];
            e[s] = 1.0;
            let col = m.apply_vec(&e);
            let mut agg = vec![0.0; k];
            for (t, v) in col.iter().enumerate() {
                agg[partition[t]] += v;
            }
            agg
        })
        .collect();
    let mut rep: Vec<Option<usize>> = vec![None; k];
    let mut witness = None;
    let mut worst: f64 = 0.0;
    for s in 0..d {
        let c = partition[s];
        match rep[c] {
            None => rep[c] = Some(s),
            Some(r) => {
                for t in 0..k {
                    let diff = (sums[s][t] - sums[r][t]).abs();
                    if diff > worst {
                        worst = diff;
                        if diff > LUMP_TOL && witness.is_none() {
                            witness = Some((r, s, t));
                        }
                    }
                }
            }
        }
    }
    if witness.is_some() || rep.iter().any(|r| r.is_none()) {
        return Lumpability {
            lumpable: false,
            reduced: None,
            witness,
            max_discrepancy: worst,
        };
    }
    let mut data = vec![0.0; k * k];
    for (dcls, r) in rep.iter().enumerate() {
        let r = r.expect("every class has a member");
        for t in 0..k {
            data[t * k + dcls] = sums[r][t];
        }
    }
    Lumpability {
        lumpable: true,
        reduced: Some(ChainMatrix::from_rows(k, data, StateSpace::Lumped { classes: k })),
        witness: None,
        max_discrepancy: worst,
    }
}

/// Each multiset element of `sub` has a match in `sup` within `tol`
/// (greedy matching by distance).
pub fn eigenvalues_contained(sub: &[C64], sup: &[C64], tol: f64) -> bool {
    let mut used = vec![false; sup.len()];
    for z in sub {
        let best = sup
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, w)| (i, (w - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) if d < tol => used[i] = true,
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::operator::step_matrix;
    use crate::markov::schedule::{Gate, Topology};
    use crate::markov::spectrum::spectrum;
    use crate::moments::q_from_moments;

    fn q_haar(n: usize) -> f64 {
        let t = 2f64.powi(n as i32);
        (t - 2.0) / (t + 1.0)
    }

    #[test]
    fn open_chain_reaches_closed_form_stationary() {
        let n = 4;
        let s = CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 0.0, 1.0).unwrap();
        let op = ChainOperator::from_schedule(&s).unwrap();
        let pi = stationary(&op, &MomentVector::computational(n)).unwrap();
        let want = MomentVector::ergodic_stationary(n);
        assert!(max_abs_diff(&pi.entries, &want.entries) < 1e-12);
        assert!((q_from_moments(&pi) - 14.0 / 17.0).abs() < 1e-12);
        let again = stationary(&op, &pi).unwrap();
        assert!(max_abs_diff(&again.entries, &pi.entries) < 1e-13);
    }

    #[test]
    fn trajectory_cutoff_on_open_chain() {
        let n = 6;
        let s = CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 0.0, 1.0).unwrap();
        let op = ChainOperator::from_schedule(&s).unwrap();
        let q = q_trajectory(&op, &MomentVector::computational(n), 200);
        assert_eq!(q[0], 0.0);
        for l in 1..=n / 2 {
            assert!((q[l] - 1.0).abs() < 1e-10, "ℓ={l}: {}", q[l]);
        }
        assert!((q[200] - q_haar(n)).abs() < 1e-10);
    }

    #[test]
    fn permutation_chain_oscillates() {
        // c = 1 and p = 1: a deterministic permutation of classes
        let s = CircuitSchedule::standard(Topology::Open, Gate::Cz, 3, 1.0, 1.0).unwrap();
        let op = ChainOperator::from_schedule(&s).unwrap();
        let mut v0 = vec![0.0; 27];
        v0[2] = 1.0; // ξ on qubit 0
        assert!(matches!(
            stationary_vec(&op, &v0),
            Err(Error::OscillationDetected(_))
        ));
    }

    #[test]
    fn closed_chain_parity() {
        let n = 6;
        let s = CircuitSchedule::standard(Topology::Closed, Gate::Cz, n, 0.0, 1.0).unwrap();
        let r = parity_analysis(&s, &MomentVector::computational(n)).unwrap();
        assert!(r.conserved);
        let s = CircuitSchedule::standard(Topology::Closed, Gate::Cz, n, 0.0, 0.9).unwrap();
        assert!(!parity_analysis(&s, &MomentVector::computational(n)).unwrap().conserved);
        let s = CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 0.0, 1.0).unwrap();
        let r = parity_analysis(&s, &MomentVector::computational(n)).unwrap();
        assert!(!r.conserved);
        assert!((r.asymptotic_q - q_haar(n)).abs() < 1e-10);
    }

    #[test]
    fn odd_all_to_all_conserves_parity() {
        let s = CircuitSchedule::standard(Topology::AllToAll, Gate::Cz, 5, 0.0, 1.0).unwrap();
        assert!(parity_analysis(&s, &MomentVector::computational(5)).unwrap().conserved);
        let s = CircuitSchedule::standard(Topology::AllToAll, Gate::Cz, 4, 0.0, 1.0).unwrap();
        assert!(!parity_analysis(&s, &MomentVector::computational(4)).unwrap().conserved);
    }

    #[test]
    fn singleton_partition_is_lumpable() {
        let s = CircuitSchedule::standard(Topology::Open, Gate::Cz, 3, 0.2, 0.5).unwrap();
        let m = step_matrix(&s).unwrap();
        let part: Vec<usize> = (0..27).collect();
        let l = lumpability_check(&m, &part);
        assert!(l.lumpable);
        let r = l.reduced.unwrap();
        for (a, b) in r.rows().iter().zip(m.rows()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn effective_decay_of_stationary_is_zero() {
        let n = 4;
        let s = CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 0.0, 1.0).unwrap();
        let op = ChainOperator::from_schedule(&s).unwrap();
        let pi = MomentVector::ergodic_stationary(n);
        let e = effective_decay_rate(&op, &pi.entries).unwrap();
        assert_eq!(e.lambda, C64::new(0.0, 0.0));
    }

    #[test]
    fn effective_decay_of_generic_start_is_lambda1() {
        let n = 4;
        let s = CircuitSchedule::standard(Topology::Closed, Gate::Cz, n, 0.1, 0.7).unwrap();
        let op = ChainOperator::from_schedule(&s).unwrap();
        let m = step_matrix(&s).unwrap();
        let sp = spectrum(&m).unwrap();
        let v0: Vec<f64> = (0..81).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        let e = effective_decay_rate(&op, &v0).unwrap();
        assert!((e.lambda.norm() - sp.lambda1.norm()).abs() < 1e-9);
    }
}
