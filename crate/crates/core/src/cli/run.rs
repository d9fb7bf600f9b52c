//! Executes one resolved config: CSV rows, an optional plot and a JSON run
//! record that embeds the config.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::config::{Experiment, ExperimentConfig, PolicyKind};
use crate::cli::svg::{render, Plot, Series};
use crate::cluster::{compare_scenarios, map_cluster_topology, Scenario};
use crate::error::{Error, Result};
use crate::markov::sweep::{gap_at, sweep, SweepRow};
use crate::markov::{q_trajectory, spectrum, ChainOperator, CircuitSchedule, Gate, Topology};
use crate::measures::q_haar;
use crate::moments::{moments_from_state, MomentVector};
use crate::output::{csv_string, RunHeader, VERSION};
use crate::sim::{all_computational, prepare_initial, run_ensemble, EnsembleConfig, InitialState};
use crate::symmetric::{scaling_study, PPolicy};
use crate::twirl::improved_twirl_gap;

pub struct RunOutput {
    pub csv: String,
    pub plot: Option<Plot>,
    /// Experiment-specific results for the run record (fits, argmax).
    pub extra: Value,
}

#[derive(Debug)]
pub struct WrittenRun {
    pub csv: PathBuf,
    pub record: PathBuf,
    pub svg: Option<PathBuf>,
}

#[derive(Serialize)]
struct SpectrumRow {
    topology: Topology,
    gate: Gate,
    n: usize,
    c: f64,
    p: f64,
    index: usize,
    re: f64,
    im: f64,
    modulus: f64,
}

#[derive(Serialize)]
struct TrajectoryRow {
    topology: Topology,
    gate: Gate,
    n: usize,
    c: f64,
    p: f64,
    iteration: usize,
    expected_q: f64,
    q_deviation: f64,
}

#[derive(Serialize)]
struct EnsembleRow {
    topology: &'static str,
    gate: Gate,
    n: usize,
    p: f64,
    dist: String,
    c: f64,
    iteration: usize,
    mean_q: f64,
    se_q: f64,
    min_q: f64,
    max_q: f64,
    q_deviation: f64,
    pt_distance: Option<f64>,
    samples: usize,
}

#[derive(Serialize)]
struct ScalingRow {
    topology: &'static str,
    c: f64,
    policy: &'static str,
    n: usize,
    p: f64,
    gap: f64,
    one_minus_gap: f64,
}

#[derive(Serialize)]
struct CostRow {
    p: f64,
    gamma: f64,
    p_fusion: f64,
    iterations_per_c: f64,
    attempts_per_cn: f64,
    rank: usize,
}

fn fmt_p(p: f64) -> String {
    format!("{p}")
}

pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let header = RunHeader::new(cfg.experiment.name(), &cfg.resolved(), cfg.seed);
    match cfg.experiment {
        Experiment::GapSweep => gap_sweep(cfg, &header),
        Experiment::Spectrum => spectra(cfg, &header),
        Experiment::Trajectory => trajectory(cfg, &header),
        Experiment::Ensemble => ensemble(cfg, &header),
        Experiment::Scaling => scaling(cfg, &header),
        Experiment::Twirl => twirl(cfg, &header),
        Experiment::ClusterCost => cluster_cost(cfg, &header),
    }
}

fn gap_sweep(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let (cs, ps) = (cfg.c.values()?, cfg.p.values()?);
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut best = Vec::new();
    let mut series = Vec::new();
    for &top in &cfg.topologies {
        for &n in &cfg.n {
            let t = sweep(top, cfg.gate, n, &cs, &ps)?;
            let b = t.best();
            best.push(json!({"topology": top, "n": n, "c": b.c, "p": b.p, "gap": b.gap}));
            for &p in &ps {
                series.push(Series {
                    name: format!("{} n={n} p={}", top.name(), fmt_p(p)),
                    points: t.rows.iter().filter(|r| r.p == p).map(|r| (r.c, r.gap)).collect(),
                });
            }
            rows.extend(t.rows);
        }
    }
    Ok(RunOutput {
        csv: csv_string(header, &rows)?,
        plot: Some(Plot {
            title: format!("spectral gap vs c ({})", cfg.gate.name()),
            x_label: "c".into(),
            y_label: "gap".into(),
            log_y: false,
            series,
        }),
        extra: json!({ "argmax": best }),
    })
}

fn spectra(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for &top in &cfg.topologies {
        for &n in &cfg.n {
            for p in cfg.p.values()? {
                for c in cfg.c.values()? {
                    let s = CircuitSchedule::standard(top, cfg.gate, n, c, p)?;
                    let r = spectrum(&ChainOperator::from_schedule(&s)?.to_dense()?)?;
                    gaps.push(json!({"topology": top, "n": n, "c": c, "p": p, "gap": r.gap, "unit_count": r.unit_count}));
                    rows.extend(r.eigenvalues.iter().enumerate().map(|(index, z)| SpectrumRow {
                        topology: top,
                        gate: cfg.gate,
                        n,
                        c,
                        p,
                        index,
                        re: z.re,
                        im: z.im,
                        modulus: z.norm(),
                    }));
                }
            }
        }
    }
    Ok(RunOutput { csv: csv_string(header, &rows)?, plot: None, extra: json!({ "gaps": gaps }) })
}

fn initial_set(cfg: &ExperimentConfig, n: usize) -> Vec<InitialState> {
    if cfg.all_computational {
        all_computational(n)
    } else {
        cfg.initial.clone()
    }
}

/// Average moment vector of the initial set; E[Q] is linear in it.
fn initial_moments(cfg: &ExperimentConfig, n: usize) -> Result<MomentVector> {
    let set = initial_set(cfg, n);
    if cfg.all_computational {
        return Ok(MomentVector::computational(n));
    }
    let mut acc = MomentVector::zeros(n);
    for s in &set {
        let v = moments_from_state(&prepare_initial(s, n)?.amps)?;
        for (a, b) in acc.entries.iter_mut().zip(&v.entries) {
            *a += b / set.len() as f64;
        }
    }
    Ok(acc)
}

fn trajectory(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &top in &cfg.topologies {
        for &n in &cfg.n {
            let v0 = initial_moments(cfg, n)?;
            for p in cfg.p.values()? {
                for c in cfg.c.values()? {
                    let op = ChainOperator::from_schedule(&CircuitSchedule::standard(top, cfg.gate, n, c, p)?)?;
                    let q = q_trajectory(&op, &v0, cfg.iterations);
                    series.push(Series {
                        name: format!("{} n={n} c={c:.3} p={}", top.name(), fmt_p(p)),
                        points: q.iter().enumerate().map(|(l, v)| (l as f64, (v - q_haar(n)).abs())).collect(),
                    });
                    rows.extend(q.iter().enumerate().map(|(iteration, &expected_q)| TrajectoryRow {
                        topology: top,
                        gate: cfg.gate,
                        n,
                        c,
                        p,
                        iteration,
                        expected_q,
                        q_deviation: (expected_q - q_haar(n)).abs(),
                    }));
                }
            }
        }
    }
    Ok(RunOutput {
        csv: csv_string(header, &rows)?,
        plot: Some(Plot {
            title: "Markov E[Q] distance from the Haar value".into(),
            x_label: "iteration".into(),
            y_label: "|E[Q] - Q_R|".into(),
            log_y: true,
            series,
        }),
        extra: Value::Null,
    })
}

fn ensemble(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let mut rows = Vec::new();
    let mut q_series = Vec::new();
    let c = cfg.dist.c();
    let targets: Vec<(&'static str, Option<Topology>)> = match cfg.cluster {
        Some(k) => vec![(k.name(), None)],
        None => cfg.topologies.iter().map(|t| (t.name(), Some(*t))).collect(),
    };
    for &(name, top) in &targets {
        for &n in &cfg.n {
            for p in cfg.p.values()? {
                let schedule = match (top, cfg.cluster) {
                    (Some(t), _) => CircuitSchedule::standard(t, cfg.gate, n, c, p)?,
                    (None, Some(k)) => map_cluster_topology(k, n)?,
                    (None, None) => unreachable!(),
                };
                let stats = run_ensemble(&EnsembleConfig {
                    schedule,
                    dist: cfg.dist,
                    policy: cfg.policy,
                    initial: initial_set(cfg, n),
                    iterations: cfg.iterations,
                    samples: cfg.samples,
                    seed: cfg.seed,
                    unit: cfg.unit,
                    track_pt: cfg.track_pt,
                    snapshot_at: None,
                })?;
                q_series.push(Series {
                    name: format!("{name} n={n} p={}", fmt_p(p)),
                    points: stats.rows.iter().map(|r| (r.iteration as f64, r.q_deviation)).collect(),
                });
                rows.extend(stats.rows.into_iter().map(|r| EnsembleRow {
                    topology: name,
                    gate: cfg.gate,
                    n,
                    p,
                    dist: cfg.dist.name(),
                    c,
                    iteration: r.iteration,
                    mean_q: r.mean_q,
                    se_q: r.se_q,
                    min_q: r.min_q,
                    max_q: r.max_q,
                    q_deviation: r.q_deviation,
                    pt_distance: r.pt_distance,
                    samples: r.samples,
                }));
            }
        }
    }
    Ok(RunOutput {
        csv: csv_string(header, &rows)?,
        plot: Some(Plot {
            title: format!("ensemble <Q> distance from the Haar value ({})", cfg.dist.name()),
            x_label: "iteration".into(),
            y_label: "|<Q> - Q_R|".into(),
            log_y: true,
            series: q_series,
        }),
        extra: Value::Null,
    })
}

fn scaling(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let policies: Vec<PPolicy> = match cfg.p_policy {
        PolicyKind::Fixed => cfg.p.values()?.into_iter().map(PPolicy::Fixed).collect(),
        PolicyKind::OneGatePerStep => vec![PPolicy::OneGatePerStep],
        PolicyKind::OneGatePerQubit => vec![PPolicy::OneGatePerQubit],
    };
    let policy_name = match cfg.p_policy {
        PolicyKind::Fixed => "fixed",
        PolicyKind::OneGatePerStep => "one-gate-per-step",
        PolicyKind::OneGatePerQubit => "one-gate-per-qubit",
    };
    let top_name = match cfg.scaling_topology {
        crate::symmetric::SymmetricTopology::AllToAll => "all-to-all",
        crate::symmetric::SymmetricTopology::Star => "star",
    };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut series = Vec::new();
    for c in cfg.c.values()? {
        for &policy in &policies {
            let s = scaling_study(cfg.scaling_topology, c, policy, &cfg.n)?;
            fits.push(json!({"c": c, "policy": policy, "fit": s.fit}));
            series.push(Series {
                name: match policy {
                    PPolicy::Fixed(p) => format!("c={c} p={p}"),
                    _ => format!("c={c} {policy_name}"),
                },
                points: s.points.iter().map(|q| (q.n as f64, 1.0 - q.gap)).collect(),
            });
            rows.extend(s.points.iter().map(|q| ScalingRow {
                topology: top_name,
                c,
                policy: policy_name,
                n: q.n,
                p: q.p,
                gap: q.gap,
                one_minus_gap: 1.0 - q.gap,
            }));
        }
    }
    Ok(RunOutput {
        csv: csv_string(header, &rows)?,
        plot: Some(Plot {
            title: format!("{top_name} symmetric chain: 1 - gap vs n"),
            x_label: "n".into(),
            y_label: "1 - gap".into(),
            log_y: true,
            series,
        }),
        extra: json!({ "fits": fits }),
    })
}

fn twirl(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let rows = cfg.n.iter().map(|&n| improved_twirl_gap(n)).collect::<Result<Vec<_>>>()?;
    Ok(RunOutput { csv: csv_string(header, &rows)?, plot: None, extra: Value::Null })
}

fn cluster_cost(cfg: &ExperimentConfig, header: &RunHeader) -> Result<RunOutput> {
    let scenarios = if cfg.scenarios.is_empty() {
        let n = *cfg.n.first().ok_or_else(|| Error::Config("n is empty".into()))?;
        cfg.p
            .values()?
            .into_iter()
            .map(|p| Ok(Scenario { p, gamma: gap_at(Topology::Open, Gate::Cz, n, 0.0, p)?.rate }))
            .collect::<Result<Vec<_>>>()?
    } else {
        cfg.scenarios.clone()
    };
    let ranked = compare_scenarios(&scenarios, cfg.p_fusion)?;
    let rows: Vec<CostRow> = ranked
        .iter()
        .enumerate()
        .map(|(i, r)| CostRow {
            p: r.p,
            gamma: r.gamma,
            p_fusion: cfg.p_fusion,
            iterations_per_c: r.iterations,
            attempts_per_cn: r.attempts,
            rank: i + 1,
        })
        .collect();
    Ok(RunOutput { csv: csv_string(header, &rows)?, plot: None, extra: Value::Null })
}

/// Runs and writes `<stem>.csv`, `<stem>.json` and optionally `<stem>.svg`.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<WrittenRun> {
    let out = execute(cfg)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    let stem = cfg.stem();
    let csv = dir.join(format!("{stem}.csv"));
    fs::write(&csv, &out.csv)?;
    let svg = match (&out.plot, cfg.output.svg) {
        (Some(plot), true) => {
            let path = dir.join(format!("{stem}.svg"));
            fs::write(&path, render(plot)?)?;
            Some(path)
        }
        _ => None,
    };
    let header = RunHeader::new(cfg.experiment.name(), &cfg.resolved(), cfg.seed);
    let record = json!({
        "artifact": "pr-markov",
        "version": VERSION,
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "config_sha256": header.config_sha256,
        "config": serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?,
        "csv": csv.file_name().map(|s| s.to_string_lossy().to_string()),
        "svg": svg.as_ref().and_then(|p| p.file_name()).map(|s| s.to_string_lossy().to_string()),
        "results": out.extra,
    });
    let path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(&record).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(WrittenRun { csv, record: path, svg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Grid;

    fn small(experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            n: vec![3],
            c: Grid::Values(vec![0.0, 0.5]),
            p: Grid::Values(vec![1.0]),
            iterations: 4,
            samples: 10,
            ..Default::default()
        }
    }

    #[test]
    fn every_experiment_produces_a_header_and_rows() {
        for e in [
            Experiment::GapSweep,
            Experiment::Spectrum,
            Experiment::Trajectory,
            Experiment::Ensemble,
            Experiment::Twirl,
            Experiment::ClusterCost,
        ] {
            let out = execute(&small(e)).unwrap();
            let lines: Vec<&str> = out.csv.lines().collect();
            assert!(lines[0].starts_with("# pr-markov"), "{e:?}");
            assert!(lines.len() > 2, "{e:?}");
        }
        let mut s = small(Experiment::Scaling);
        s.n = vec![4, 5, 6];
        s.c = Grid::Values(vec![0.0]);
        s.p = Grid::Values(vec![0.4]);
        assert_eq!(execute(&s).unwrap().csv.lines().count(), 2 + 3);
    }

    #[test]
    fn gap_sweep_columns() {
        let out = execute(&small(Experiment::GapSweep)).unwrap();
        assert_eq!(out.csv.lines().nth(1), Some("topology,gate,n,c,p,gap,rate"));
    }

    #[test]
    fn trajectory_from_state_list_matches_computational() {
        let mut a = small(Experiment::Trajectory);
        a.all_computational = true;
        let mut b = small(Experiment::Trajectory);
        b.initial = (0..8).map(|k| InitialState::Computational { k }).collect();
        let qa: Vec<String> = execute(&a).unwrap().csv.lines().skip(2).map(String::from).collect();
        let qb: Vec<String> = execute(&b).unwrap().csv.lines().skip(2).map(String::from).collect();
        assert_eq!(qa.len(), qb.len());
        for (x, y) in qa.iter().zip(&qb) {
            let fx: f64 = x.split(',').nth(6).unwrap().parse().unwrap();
            let fy: f64 = y.split(',').nth(6).unwrap().parse().unwrap();
            assert!((fx - fy).abs() < 1e-12);
        }
    }
}
