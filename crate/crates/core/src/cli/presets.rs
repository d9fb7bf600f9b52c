//! Named experiment bundles. A preset expands to one or more configs, each
//! written under its own label.

use crate::cli::config::{Experiment, ExperimentConfig, Grid, OutputConfig, PolicyKind};
use crate::cluster::{ClusterKind, Scenario};
use crate::markov::{Gate, Topology};
use crate::sim::{InitialState, IterationUnit, LocalGateDistribution, RotationPolicy};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub configs: Vec<ExperimentConfig>,
}

fn labelled(label: String, cfg: ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig { label: Some(label), ..cfg }
}

fn values(v: &[f64]) -> Grid {
    Grid::Values(v.to_vec())
}

fn range(from: f64, to: f64, step: f64) -> Grid {
    Grid::Range { from, to, step }
}

fn ensemble_base() -> ExperimentConfig {
    ExperimentConfig {
        experiment: Experiment::Ensemble,
        n: vec![8],
        p: values(&[1.0]),
        iterations: 30,
        samples: 100,
        all_computational: true,
        track_pt: true,
        ..Default::default()
    }
}

fn probabilistic_sweep(top: Topology, name: &str) -> Vec<ExperimentConfig> {
    vec![labelled(
        format!("{name}-gap-vs-c-p"),
        ExperimentConfig {
            experiment: Experiment::GapSweep,
            topologies: vec![top],
            n: vec![8],
            c: range(0.0, 1.0, 0.02),
            p: values(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.89, 0.9, 0.95, 0.98, 1.0]),
            ..Default::default()
        },
    )]
}

pub fn presets() -> Vec<Preset> {
    let gate_pairs = [
        ("cz-hz", Gate::Cz, LocalGateDistribution::Hz),
        ("xy-haar", Gate::Xy, LocalGateDistribution::HaarSu2),
        ("cz-haar", Gate::Cz, LocalGateDistribution::HaarSu2),
    ];
    vec![
        Preset {
            name: "gate-comparison",
            description: "open chain n=8: CZ+HZ, XY+Haar and CZ+Haar ensembles over all basis states, per step",
            configs: gate_pairs
                .iter()
                .map(|&(label, gate, dist)| {
                    labelled(
                        format!("gate-comparison-{label}"),
                        ExperimentConfig { gate, dist, unit: IterationUnit::Step, iterations: 40, ..ensemble_base() },
                    )
                })
                .collect(),
        },
        Preset {
            name: "gap-vs-c",
            description: "gap vs c at p=1 for every CZ topology and the XY chains, n=6 and 8",
            configs: vec![
                labelled(
                    "gap-vs-c-cz".into(),
                    ExperimentConfig {
                        topologies: Topology::ALL.to_vec(),
                        n: vec![6, 8],
                        c: range(0.0, 1.0, 0.01),
                        ..Default::default()
                    },
                ),
                labelled(
                    "gap-vs-c-xy".into(),
                    ExperimentConfig {
                        topologies: vec![Topology::Open, Topology::Closed],
                        gate: Gate::Xy,
                        n: vec![6, 8],
                        c: range(0.0, 1.0, 0.01),
                        ..Default::default()
                    },
                ),
            ],
        },
        Preset {
            name: "topology-ensembles",
            description: "ensembles for every topology: CZ+Haar, CZ+HZ, and XY+Haar on the chains",
            configs: [
                ("cz-haar", Gate::Cz, LocalGateDistribution::HaarSu2, Topology::ALL.to_vec()),
                ("cz-hz", Gate::Cz, LocalGateDistribution::Hz, Topology::ALL.to_vec()),
                ("xy-haar", Gate::Xy, LocalGateDistribution::HaarSu2, vec![Topology::Open, Topology::Closed]),
            ]
            .into_iter()
            .map(|(label, gate, dist, topologies)| {
                labelled(
                    format!("topology-ensembles-{label}"),
                    ExperimentConfig { gate, dist, topologies, ..ensemble_base() },
                )
            })
            .collect(),
        },
        Preset {
            name: "open-chain-p",
            description: "open chain n=8: gap over (c, p)",
            configs: probabilistic_sweep(Topology::Open, "open-chain"),
        },
        Preset {
            name: "closed-chain-p",
            description: "closed chain n=8: gap over (c, p)",
            configs: probabilistic_sweep(Topology::Closed, "closed-chain"),
        },
        Preset {
            name: "star-p",
            description: "star n=8: gap over (c, p)",
            configs: probabilistic_sweep(Topology::Star, "star"),
        },
        Preset {
            name: "all-to-all-p",
            description: "all-to-all n=8: gap over (c, p)",
            configs: probabilistic_sweep(Topology::AllToAll, "all-to-all"),
        },
        Preset {
            name: "aa-scaling",
            description: "all-to-all symmetric chain: 1-gap vs n at fixed p, and the deterministic p=1 saturation",
            configs: vec![
                labelled(
                    "aa-scaling-fixed-p".into(),
                    ExperimentConfig {
                        experiment: Experiment::Scaling,
                        n: (4..=40).collect(),
                        c: values(&[0.0, 0.01, 0.1]),
                        p: values(&[0.2, 0.25, 0.35, 0.4, 0.45, 0.5]),
                        ..Default::default()
                    },
                ),
                labelled(
                    "aa-scaling-deterministic".into(),
                    ExperimentConfig {
                        experiment: Experiment::Scaling,
                        n: (4..=81).collect(),
                        c: values(&[0.0, 1.0 / 3.0]),
                        p: values(&[1.0]),
                        ..Default::default()
                    },
                ),
            ],
        },
        Preset {
            name: "aa-sparse-gates",
            description: "all-to-all symmetric chain with p=2/(n(n-1)) and p=2/(n-1)",
            configs: vec![
                labelled(
                    "aa-one-gate-per-step".into(),
                    ExperimentConfig {
                        experiment: Experiment::Scaling,
                        n: (8..=50).collect(),
                        c: values(&[0.0]),
                        p_policy: PolicyKind::OneGatePerStep,
                        ..Default::default()
                    },
                ),
                labelled(
                    "aa-one-gate-per-qubit".into(),
                    ExperimentConfig {
                        experiment: Experiment::Scaling,
                        n: (4..=150).step_by(2).collect(),
                        c: values(&[0.0]),
                        p_policy: PolicyKind::OneGatePerQubit,
                        ..Default::default()
                    },
                ),
            ],
        },
        Preset {
            name: "star-spectrum",
            description: "dense spectra of the star (c=1/3, p=3/4) and all-to-all (c=0, p=1/2) chains",
            configs: vec![
                labelled(
                    "star-spectrum".into(),
                    ExperimentConfig {
                        experiment: Experiment::Spectrum,
                        topologies: vec![Topology::Star],
                        n: vec![4, 5, 6],
                        c: values(&[1.0 / 3.0]),
                        p: values(&[0.75]),
                        ..Default::default()
                    },
                ),
                labelled(
                    "aa-spectrum".into(),
                    ExperimentConfig {
                        experiment: Experiment::Spectrum,
                        topologies: vec![Topology::AllToAll],
                        n: vec![4, 6],
                        c: values(&[0.0]),
                        p: values(&[0.5]),
                        ..Default::default()
                    },
                ),
            ],
        },
        Preset {
            name: "twirl",
            description: "improved approximate Clifford twirl gap and effective gap, n=4..12",
            configs: vec![labelled(
                "twirl".into(),
                ExperimentConfig { experiment: Experiment::Twirl, n: (4..=12).collect(), ..Default::default() },
            )],
        },
        Preset {
            name: "fusion-cost",
            description: "fusion attempts for the p=.98 and p=.705 scenarios (quoted rates, then computed ones)",
            configs: vec![
                labelled(
                    "fusion-cost-quoted".into(),
                    ExperimentConfig {
                        experiment: Experiment::ClusterCost,
                        scenarios: vec![
                            Scenario { p: 0.98, gamma: 0.547 },
                            Scenario { p: 0.705, gamma: 0.547 / 2.0 },
                        ],
                        p_fusion: 0.5,
                        ..Default::default()
                    },
                ),
                labelled(
                    "fusion-cost-computed".into(),
                    ExperimentConfig {
                        experiment: Experiment::ClusterCost,
                        n: vec![8],
                        p: values(&[0.705, 0.98]),
                        p_fusion: 0.5,
                        ..Default::default()
                    },
                ),
            ],
        },
        Preset {
            name: "initial-states",
            description: "open chain CZ+Haar n=8 from psi(a) for a in {0, 0.02337, 0.1, 1}",
            configs: [0.0, 0.02337, 0.1, 1.0]
                .into_iter()
                .map(|a| {
                    labelled(
                        format!("initial-states-a{a}"),
                        ExperimentConfig {
                            initial: vec![InitialState::Psi { a }],
                            all_computational: false,
                            samples: 500,
                            iterations: 40,
                            ..ensemble_base()
                        },
                    )
                })
                .collect(),
        },
        Preset {
            name: "collective-rotations",
            description: "open chain CZ n=8 from |0...0> with independent, collective and odd/even rotations (Haar and HZ)",
            configs: [RotationPolicy::Independent, RotationPolicy::Collective, RotationPolicy::OddEven]
                .into_iter()
                .flat_map(|policy| {
                    [("haar", LocalGateDistribution::HaarSu2), ("hz", LocalGateDistribution::Hz)].map(|(d, dist)| {
                        labelled(
                            format!("collective-{}-{d}", format!("{policy:?}").to_lowercase()),
                            ExperimentConfig {
                                policy,
                                dist,
                                initial: vec![InitialState::Computational { k: 0 }],
                                all_computational: false,
                                samples: 1000,
                                iterations: 40,
                                ..ensemble_base()
                            },
                        )
                    })
                })
                .collect(),
        },
        Preset {
            name: "cluster-topologies",
            description: "ensembles of the circuits equivalent to each cluster-state kind, from |0...0>",
            configs: ClusterKind::ALL
                .into_iter()
                .map(|k| {
                    labelled(
                        format!("cluster-{}", k.name()),
                        ExperimentConfig {
                            cluster: Some(k),
                            dist: LocalGateDistribution::Hz,
                            all_computational: false,
                            samples: 500,
                            ..ensemble_base()
                        },
                    )
                })
                .collect(),
        },
        Preset {
            name: "markov-trajectory",
            description: "exact E[Q] trajectories from the computational basis for every topology, c=0 and 1/3",
            configs: vec![labelled(
                "markov-trajectory".into(),
                ExperimentConfig {
                    experiment: Experiment::Trajectory,
                    topologies: Topology::ALL.to_vec(),
                    n: vec![8],
                    c: values(&[0.0, 1.0 / 3.0]),
                    all_computational: true,
                    iterations: 40,
                    ..Default::default()
                },
            )],
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

/// Output directory default for presets: `out/<preset>`.
pub fn with_preset_dir(mut cfg: ExperimentConfig, preset: &str) -> ExperimentConfig {
    if cfg.output == OutputConfig::default() {
        cfg.output.dir = cfg.output.dir.join(preset);
    }
    cfg
}
