//! Experiment configuration. Read from TOML, then overridden by flags.
//!
//! ```toml
//! experiment = "gap-sweep"
//! topologies = ["open", "closed"]
//! gate = "cz"
//! n = [6, 8]
//! c = { from = 0.0, to = 1.0, step = 0.01 }
//! p = [1.0]
//! [output]
//! dir = "out"
//! svg = true
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterKind, Scenario};
use crate::error::{Error, Result};
use crate::markov::sweep::grid;
use crate::markov::{Gate, Topology};
use crate::sim::{InitialState, IterationUnit, LocalGateDistribution, RotationPolicy};
use crate::symmetric::SymmetricTopology;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GapSweep,
    Spectrum,
    Trajectory,
    Ensemble,
    Scaling,
    Twirl,
    ClusterCost,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::GapSweep => "gap-sweep",
            Experiment::Spectrum => "spectrum",
            Experiment::Trajectory => "trajectory",
            Experiment::Ensemble => "ensemble",
            Experiment::Scaling => "scaling",
            Experiment::Twirl => "twirl",
            Experiment::ClusterCost => "cluster-cost",
        }
    }
}

/// Either explicit values or an inclusive range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { from: f64, to: f64, step: f64 },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::Values(v) if v.is_empty() => Err(Error::Config("empty grid".into())),
            Grid::Values(v) => Ok(v.clone()),
            Grid::Range { from, to, step } => {
                if !(*step > 0.0) || to < from {
                    return Err(Error::Config(format!("bad range {from}..{to} step {step}")));
                }
                Ok(grid(*from, *to, *step))
            }
        }
    }

    /// `0.1,0.5,1` or `0:1:0.01`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse grid '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok(Grid::Range { from: num(parts[0])?, to: num(parts[1])?, step: num(parts[2])? })
        } else {
            Ok(Grid::Values(s.split(',').map(num).collect::<Result<_>>()?))
        }
    }
}

/// How the CZ probability of a scaling study depends on n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Every value of the p grid.
    Fixed,
    OneGatePerStep,
    OneGatePerQubit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem; defaults to the label or the experiment name.
    pub stem: Option<String>,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), stem: None, svg: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub label: Option<String>,
    pub topologies: Vec<Topology>,
    pub gate: Gate,
    /// Replaces `topologies` for ensembles of mapped cluster states.
    pub cluster: Option<ClusterKind>,
    pub n: Vec<usize>,
    pub c: Grid,
    pub p: Grid,
    pub iterations: usize,
    pub samples: usize,
    pub seed: u64,
    pub dist: LocalGateDistribution,
    pub policy: RotationPolicy,
    pub initial: Vec<InitialState>,
    /// Use every computational basis state as the initial set.
    pub all_computational: bool,
    pub unit: IterationUnit,
    pub track_pt: bool,
    pub scaling_topology: SymmetricTopology,
    pub p_policy: PolicyKind,
    /// Quoted (p, Γ) pairs; when empty, Γ is computed on the open chain.
    pub scenarios: Vec<Scenario>,
    pub p_fusion: f64,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::GapSweep,
            label: None,
            topologies: vec![Topology::Open],
            gate: Gate::Cz,
            cluster: None,
            n: vec![6],
            c: Grid::Values(vec![1.0 / 3.0]),
            p: Grid::Values(vec![1.0]),
            iterations: 30,
            samples: 100,
            seed: 1,
            dist: LocalGateDistribution::HaarSu2,
            policy: RotationPolicy::Independent,
            initial: vec![InitialState::Computational { k: 0 }],
            all_computational: false,
            unit: IterationUnit::Period,
            track_pt: false,
            scaling_topology: SymmetricTopology::AllToAll,
            p_policy: PolicyKind::Fixed,
            scenarios: Vec::new(),
            p_fusion: 0.5,
            output: OutputConfig::default(),
        }
    }
}

/// Flag values that win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<Vec<usize>>,
    pub c: Option<Grid>,
    pub p: Option<Grid>,
    pub iterations: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.n {
            self.n = v.clone();
        }
        if let Some(v) = &o.c {
            self.c = v.clone();
        }
        if let Some(v) = &o.p {
            self.p = v.clone();
        }
        if let Some(v) = o.iterations {
            self.iterations = v;
        }
        if let Some(v) = o.samples {
            self.samples = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.out_dir {
            self.output.dir = v.clone();
        }
        self.output.svg |= o.svg;
    }

    pub fn validate(&self) -> Result<()> {
        let e = |m: &str| Err(Error::Config(m.to_string()));
        if self.n.is_empty() && !matches!(self.experiment, Experiment::ClusterCost) {
            return e("n is empty");
        }
        if self.topologies.is_empty() && self.cluster.is_none() {
            return e("topologies is empty");
        }
        for v in self.c.values()?.into_iter().chain(self.p.values()?) {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("grid value {v} outside [0, 1]")));
            }
        }
        if !(self.p_fusion > 0.0 && self.p_fusion <= 1.0) {
            return e("p_fusion must lie in (0, 1]");
        }
        if matches!(self.experiment, Experiment::Ensemble)
            && self.initial.is_empty()
            && !self.all_computational
        {
            return e("ensemble needs initial states");
        }
        Ok(())
    }

    pub fn stem(&self) -> String {
        self.output
            .stem
            .clone()
            .or_else(|| self.label.clone())
            .unwrap_or_else(|| self.experiment.name().to_string())
    }

    /// Canonical text of the experiment, hashed into output headers. The
    /// `[output]` section is left out so the hash does not depend on where
    /// files are written.
    pub fn resolved(&self) -> String {
        let experiment = ExperimentConfig { output: OutputConfig::default(), ..self.clone() };
        serde_json::to_string(&experiment).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_overrides() {
        let mut cfg = ExperimentConfig::from_toml(
            r#"
            experiment = "ensemble"
            topologies = ["open", "all-to-all"]
            n = [4]
            p = { from = 0.5, to = 1.0, step = 0.25 }
            dist = { kind = "zxz", theta = 0.3 }
            initial = [{ kind = "psi", a = 0.1 }, { kind = "ghz" }]
            [output]
            svg = true
            "#,
        )
        .unwrap();
        assert_eq!(cfg.p.values().unwrap(), vec![0.5, 0.75, 1.0]);
        assert_eq!(cfg.topologies, vec![Topology::Open, Topology::AllToAll]);
        assert_eq!(cfg.dist, LocalGateDistribution::Zxz { theta: 0.3 });
        cfg.apply(&Overrides { n: Some(vec![5]), seed: Some(9), ..Default::default() });
        assert_eq!((cfg.n.clone(), cfg.seed), (vec![5], 9));
        assert!(cfg.output.svg);
        let again: ExperimentConfig = serde_json::from_str(&cfg.resolved()).unwrap();
        assert_eq!(again, ExperimentConfig { output: OutputConfig::default(), ..cfg.clone() });
        let moved = ExperimentConfig {
            output: OutputConfig { dir: "elsewhere".into(), ..cfg.output.clone() },
            ..cfg.clone()
        };
        assert_eq!(moved.resolved(), cfg.resolved());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::from_toml("colour = 3").is_err());
        assert!(ExperimentConfig::from_toml("c = [1.5]").is_err());
        assert!(ExperimentConfig::from_toml("p = { from = 1.0, to = 0.0, step = 0.1 }").is_err());
    }

    #[test]
    fn grid_flags() {
        assert_eq!(Grid::parse("0:1:0.5").unwrap().values().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Grid::parse("0.2, 0.4").unwrap().values().unwrap(), vec![0.2, 0.4]);
        assert!(Grid::parse("0:1").is_err());
        assert!(Grid::parse("x").is_err());
    }
}
