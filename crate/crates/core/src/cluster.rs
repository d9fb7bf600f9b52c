//! Cluster-state PR circuits through their circuit-model equivalents, and
//! fusion-cost arithmetic.
//!
//! The two star variants (central qubit measured first or last) both map to
//! the circuit star schedule; how the measurement order would change the
//! circuit is not resolved here.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::schedule::{CircuitSchedule, Gate, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterKind {
    Lattice2d,
    Cylinder,
    StarCentralFirst,
    StarCentralLast,
    AllToAll,
}

impl ClusterKind {
    pub const ALL: [ClusterKind; 5] = [
        ClusterKind::Lattice2d,
        ClusterKind::Cylinder,
        ClusterKind::StarCentralFirst,
        ClusterKind::StarCentralLast,
        ClusterKind::AllToAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClusterKind::Lattice2d => "lattice2d",
            ClusterKind::Cylinder => "cylinder",
            ClusterKind::StarCentralFirst => "star-central-first",
            ClusterKind::StarCentralLast => "star-central-last",
            ClusterKind::AllToAll => "all-to-all",
        }
    }

    pub fn topology(self) -> Topology {
        match self {
            ClusterKind::Lattice2d => Topology::Open,
            ClusterKind::Cylinder => Topology::Closed,
            ClusterKind::StarCentralFirst | ClusterKind::StarCentralLast => Topology::Star,
            ClusterKind::AllToAll => Topology::AllToAll,
        }
    }
}

impl FromStr for ClusterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        ClusterKind::ALL
            .into_iter()
            .find(|k| k.name() == key || (key == "lattice-2d" && *k == ClusterKind::Lattice2d))
            .ok_or_else(|| Error::UnsupportedKind(s.to_string()))
    }
}

/// Circuit schedule equivalent to the cluster: HZ locals (c = 0), CZ, p = 1.
pub fn map_cluster_topology(kind: ClusterKind, n: usize) -> Result<CircuitSchedule> {
    CircuitSchedule::standard(kind.topology(), Gate::Cz, n, 0.0, 1.0)
}

/// Qubits of the sparse lattice for ℓ iterations on n logical qubits.
pub fn lattice_footprint(n: usize, iterations: usize) -> usize {
    n * (3 * iterations + 1)
}

fn check_probability(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: v,
            range: "(0, 1]",
        })
    }
}

/// Expected fusion attempts C·p·n/p′.
pub fn fusion_cost(iterations: f64, n: usize, p: f64, p_fusion: f64) -> Result<f64> {
    check_probability("gate probability p", p)?;
    check_probability("fusion success probability p'", p_fusion)?;
    Ok(iterations * p * n as f64 / p_fusion)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub p: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedScenario {
    pub p: f64,
    pub gamma: f64,
    /// Iterations in units of C, where C reaches the target at the first
    /// scenario's rate.
    pub iterations: f64,
    /// Attempts in units of C·n.
    pub attempts: f64,
}

/// Ranks scenarios by attempts to reach a common distance target. The
/// iteration count scales as 1/Γ and is given in units of C, the count
/// needed by the fastest-converging scenario. Ties keep ascending p.
pub fn compare_scenarios(scenarios: &[Scenario], p_fusion: f64) -> Result<Vec<RankedScenario>> {
    let fastest = scenarios.iter().map(|s| s.gamma).fold(f64::NEG_INFINITY, f64::max);
    let mut out = scenarios
        .iter()
        .map(|s| {
            if s.gamma <= 0.0 {
                return Err(Error::OutOfRange {
                    what: "convergence rate",
                    value: s.gamma,
                    range: "(0, inf)",
                });
            }
            let iterations = fastest / s.gamma;
            Ok(RankedScenario {
                p: s.p,
                gamma: s.gamma,
                iterations,
                attempts: fusion_cost(iterations, 1, s.p, p_fusion)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.attempts.total_cmp(&b.attempts).then(a.p.total_cmp(&b.p)));
    Ok(out)
}
