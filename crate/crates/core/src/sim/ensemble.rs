use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::schedule::{CircuitSchedule, Gate};
use crate::measures::{q_haar, PTHistogram, PT_MIN_SAMPLES};
use crate::sim::gates::{sample_local, LocalGateDistribution};
use crate::sim::initial::{prepare_initial, InitialState};
use crate::sim::state::{Gate1, StateVector, MAX_SIM_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationPolicy {
    /// One gate per qubit per step.
    Independent,
    /// One gate applied to every qubit.
    Collective,
    /// One gate for even qubits, another for odd ones.
    OddEven,
}

/// Whether statistics are recorded after every step or every full period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterationUnit {
    Period,
    Step,
}

#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub schedule: CircuitSchedule,
    pub dist: LocalGateDistribution,
    pub policy: RotationPolicy,
    pub initial: Vec<InitialState>,
    pub iterations: usize,
    pub samples: usize,
    pub seed: u64,
    pub unit: IterationUnit,
    /// Pool |amplitude|² into a Porter–Thomas histogram each iteration.
    pub track_pt: bool,
    /// Keep every final state at this iteration (for cross moments).
    pub snapshot_at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub mean_q: f64,
    /// Standard error over circuit samples (initial states averaged within
    /// each sample first, since they share a circuit).
    pub se_q: f64,
    pub min_q: f64,
    pub max_q: f64,
    pub q_deviation: f64,
    pub pt_distance: Option<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<IterationStats>,
    pub snapshots: Vec<Vec<C64>>,
    /// Per-sample Q trace (averaged over initial states), indexed
    /// [sample][iteration]; used for resampling errors.
    pub sample_q: Vec<Vec<f64>>,
}

struct SampleOutcome {
    mean_q: Vec<f64>,
    min_q: Vec<f64>,
    max_q: Vec<f64>,
    pt: Vec<PTHistogram>,
    snapshots: Vec<Vec<C64>>,
}

/// Per-sample RNG: one ChaCha8 stream per sample index.
pub fn sample_rng(seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    rng
}

fn draw_locals(
    n: usize,
    dist: &LocalGateDistribution,
    policy: RotationPolicy,
    rng: &mut ChaCha8Rng,
) -> Vec<Gate1> {
    match policy {
        RotationPolicy::Independent => (0..n).map(|_| sample_local(dist, rng)).collect(),
        RotationPolicy::Collective => vec![sample_local(dist, rng); n],
        RotationPolicy::OddEven => {
            let even = sample_local(dist, rng);
            let odd = sample_local(dist, rng);
            (0..n).map(|j| if j % 2 == 0 { even } else { odd }).collect()
        }
    }
}

/// The gates of one step for one circuit sample.
struct StepDraw {
    locals: Vec<Gate1>,
    active: Vec<(usize, usize)>,
    gate: Gate,
}

fn draw_step(cfg: &EnsembleConfig, step: usize, rng: &mut ChaCha8Rng) -> StepDraw {
    let s = &cfg.schedule.period[step % cfg.schedule.period.len()];
    let locals = draw_locals(cfg.schedule.n, &cfg.dist, cfg.policy, rng);
    let active = s
        .layer
        .edges
        .iter()
        .copied()
        .filter(|_| rng.gen::<f64>() < s.layer.p)
        .collect();
    StepDraw {
        locals,
        active,
        gate: s.layer.gate,
    }
}

fn apply_step(state: &mut StateVector, d: &StepDraw) {
    for (j, u) in d.locals.iter().enumerate() {
        state.apply_1q(j, u);
    }
    for &(a, b) in &d.active {
        match d.gate {
            Gate::Cz => state.apply_cz(a, b),
            Gate::Xy => state.apply_xy(a, b),
        }
    }
}

fn run_sample(cfg: &EnsembleConfig, starts: &[StateVector], sample: usize) -> Result<SampleOutcome> {
    let mut rng = sample_rng(cfg.seed, sample);
    let mut states = starts.to_vec();
    let per = match cfg.unit {
        IterationUnit::Period => cfg.schedule.period.len(),
        IterationUnit::Step => 1,
    };
    let mut out = SampleOutcome {
        mean_q: Vec::with_capacity(cfg.iterations + 1),
        min_q: Vec::with_capacity(cfg.iterations + 1),
        max_q: Vec::with_capacity(cfg.iterations + 1),
        pt: Vec::new(),
        snapshots: Vec::new(),
    };
    let mut step = 0;
    for it in 0..=cfg.iterations {
        if it > 0 {
            for _ in 0..per {
                let d = draw_step(cfg, step, &mut rng);
                for s in states.iter_mut() {
                    apply_step(s, &d);
                }
                step += 1;
            }
        }
        let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
        let mut h = PTHistogram::default();
        for s in &states {
            let q = s.q()?;
            sum += q;
            lo = lo.min(q);
            hi = hi.max(q);
            if cfg.track_pt {
                h.add_state(&s.amps);
            }
        }
        out.mean_q.push(sum / states.len() as f64);
        out.min_q.push(lo);
        out.max_q.push(hi);
        if cfg.track_pt {
            out.pt.push(h);
        }
        if cfg.snapshot_at == Some(it) {
            out.snapshots = states.iter().map(|s| s.amps.clone()).collect();
        }
    }
    Ok(out)
}

/// Monte Carlo ensemble of circuit realizations. Each sample draws one
/// circuit and applies it to every initial state. Output depends only on
/// the config, not on the worker count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleStats> {
    let n = cfg.schedule.n;
    if n > MAX_SIM_QUBITS {
        return Err(Error::DimensionLimit {
            got: n,
            limit: MAX_SIM_QUBITS,
        });
    }
    cfg.schedule.validate()?;
    if cfg.samples == 0 || cfg.initial.is_empty() {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let starts = cfg
        .initial
        .iter()
        .map(|k| prepare_initial(k, n))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = (0..cfg.samples)
        .into_par_iter()
        .map(|s| run_sample(cfg, &starts, s))
        .collect::<Result<Vec<_>>>()?;

    let reference = q_haar(n);
    let k = cfg.samples as f64;
    let mut rows = Vec::with_capacity(cfg.iterations + 1);
    for it in 0..=cfg.iterations {
        let mean = outcomes.iter().map(|o| o.mean_q[it]).sum::<f64>() / k;
        let var = if cfg.samples > 1 {
            outcomes.iter().map(|o| (o.mean_q[it] - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        let pt_distance = if cfg.track_pt {
            let mut h = PTHistogram::default();
            for o in &outcomes {
                h.merge(&o.pt[it]);
            }
            (h.total as usize >= PT_MIN_SAMPLES).then(|| h.distance()).transpose()?
        } else {
            None
        };
        rows.push(IterationStats {
            iteration: it,
            mean_q: mean,
            se_q: (var / k).sqrt(),
            min_q: outcomes.iter().map(|o| o.min_q[it]).fold(f64::INFINITY, f64::min),
            max_q: outcomes.iter().map(|o| o.max_q[it]).fold(f64::NEG_INFINITY, f64::max),
            q_deviation: (mean - reference).abs(),
            pt_distance,
            samples: cfg.samples,
        });
    }
    let mut snapshots = Vec::new();
    let mut sample_q = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        snapshots.extend(o.snapshots);
        sample_q.push(o.mean_q);
    }
    Ok(EnsembleStats {
        n,
        seed: cfg.seed,
        rows,
        snapshots,
        sample_q,
    })
}

/// True when reversing the qubit order maps every step's edge set onto
/// itself. With collective rotations this makes each realization
/// reversal-symmetric.
pub fn is_reversal_symmetric(schedule: &CircuitSchedule) -> bool {
    let n = schedule.n;
    let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    schedule.period.iter().all(|s| {
        let mut e: Vec<_> = s.layer.edges.iter().map(|&x| norm(x)).collect();
        let mut r: Vec<_> = s.layer.edges.iter().map(|&(a, b)| norm((n - 1 - a, n - 1 - b))).collect();
        e.sort_unstable();
        r.sort_unstable();
        e == r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::schedule::Topology;

    fn cfg(n: usize, samples: usize, seed: u64) -> EnsembleConfig {
        EnsembleConfig {
            schedule: CircuitSchedule::standard(Topology::Open, Gate::Cz, n, 0.0, 1.0).unwrap(),
            dist: LocalGateDistribution::Hz,
            policy: RotationPolicy::Independent,
            initial: vec![InitialState::Computational { k: 0 }],
            iterations: 6,
            samples,
            seed,
            unit: IterationUnit::Period,
            track_pt: true,
            snapshot_at: None,
        }
    }

    #[test]
    fn zero_iterations_reports_initial_state() {
        let mut c = cfg(4, 3, 1);
        c.iterations = 0;
        let s = run_ensemble(&c).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].mean_q, 0.0);
        assert_eq!(s.rows[0].max_q, 0.0);
    }

    #[test]
    fn same_seed_same_stats() {
        let a = run_ensemble(&cfg(5, 40, 9)).unwrap();
        let b = run_ensemble(&cfg(5, 40, 9)).unwrap();
        assert_eq!(a, b);
        let c = run_ensemble(&cfg(5, 40, 10)).unwrap();
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn norm_preserved_over_long_runs() {
        let c = cfg(10, 1, 4);
        let mut rng = sample_rng(4, 0);
        let mut s = prepare_initial(&InitialState::Computational { k: 5 }, 10).unwrap();
        let haar = EnsembleConfig {
            dist: LocalGateDistribution::HaarSu2,
            ..c
        };
        for step in 0..100 {
            let d = draw_step(&haar, step, &mut rng);
            apply_step(&mut s, &d);
        }
        assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn collective_open_chain_is_reversal_symmetric() {
        for gate in [Gate::Cz, Gate::Xy] {
            let s = CircuitSchedule::standard(Topology::Open, gate, 8, 0.0, 1.0).unwrap();
            assert!(is_reversal_symmetric(&s));
        }
        let star = CircuitSchedule::standard(Topology::Star, Gate::Cz, 5, 0.0, 1.0).unwrap();
        assert!(!is_reversal_symmetric(&star));
    }

    #[test]
    fn collective_policy_shares_one_gate() {
        let mut rng = sample_rng(1, 0);
        let g = draw_locals(4, &LocalGateDistribution::HaarSu2, RotationPolicy::Collective, &mut rng);
        assert!(g.iter().all(|u| u == &g[0]));
        let g = draw_locals(4, &LocalGateDistribution::HaarSu2, RotationPolicy::OddEven, &mut rng);
        assert_eq!(g[0], g[2]);
        assert_eq!(g[1], g[3]);
        assert_ne!(g[0], g[1]);
    }
}
