use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Open,
    Closed,
    Star,
    AllToAll,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::Open,
        Topology::Closed,
        Topology::Star,
        Topology::AllToAll,
    ];

    /// Full edge set. The star centre is qubit 0.
    pub fn edges(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Topology::Open => (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect(),
            Topology::Closed => {
                let mut e: Vec<_> = (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect();
                if n > 2 {
                    e.push((n - 1, 0));
                }
                e
            }
            Topology::Star => (1..n).map(|j| (0, j)).collect(),
            Topology::AllToAll => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Open => "open",
            Topology::Closed => "closed",
            Topology::Star => "star",
            Topology::AllToAll => "all-to-all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    Cz,
    Xy,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::Cz => "cz",
            Gate::Xy => "xy",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalGateSpec {
    pub c_per_qubit: Vec<f64>,
}

impl LocalGateSpec {
    pub fn uniform(n: usize, c: f64) -> Self {
        Self {
            c_per_qubit: vec![c; n],
        }
    }

    pub fn n(&self) -> usize {
        self.c_per_qubit.len()
    }

    pub fn validate(&self) -> Result<()> {
        for &c in &self.c_per_qubit {
            check_unit_interval("local gate parameter c", c)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitLayer {
    pub gate: Gate,
    pub edges: Vec<(usize, usize)>,
    pub p: f64,
}

impl TwoQubitLayer {
    pub fn validate(&self, n: usize) -> Result<()> {
        check_unit_interval("gate probability p", self.p)?;
        for &(a, b) in &self.edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidSchedule(format!(
                    "edge ({a}, {b}) invalid for n = {n}"
                )));
            }
        }
        if self.gate == Gate::Xy {
            for (i, &e) in self.edges.iter().enumerate() {
                for &f in &self.edges[i + 1..] {
                    if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
                        return Err(Error::NonCommutingLayer(e, f));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub local: LocalGateSpec,
    pub layer: TwoQubitLayer,
}

/// One period is one iteration for gap purposes.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSchedule {
    pub n: usize,
    pub period: Vec<Step>,
}

impl CircuitSchedule {
    pub fn new(n: usize, period: Vec<Step>) -> Result<Self> {
        let s = Self { n, period };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.period.is_empty() {
            return Err(Error::InvalidSchedule("empty period".into()));
        }
        for step in &self.period {
            if step.local.n() != self.n {
                return Err(Error::InvalidSchedule(format!(
                    "local spec has {} qubits, schedule has {}",
                    step.local.n(),
                    self.n
                )));
            }
            step.local.validate()?;
            step.layer.validate(self.n)?;
        }
        Ok(())
    }

    /// Homogeneous schedule. CZ uses one step with every edge; XY alternates
    /// the two halves of the nearest-neighbour edges over a two-step period.
    pub fn standard(topology: Topology, gate: Gate, n: usize, c: f64, p: f64) -> Result<Self> {
        Self::with_local(topology, gate, LocalGateSpec::uniform(n, c), p)
    }

    pub fn with_local(
        topology: Topology,
        gate: Gate,
        local: LocalGateSpec,
        p: f64,
    ) -> Result<Self> {
        let n = local.n();
        if n < 2 {
            return Err(Error::InvalidSchedule("need at least 2 qubits".into()));
        }
        let period = match gate {
            Gate::Cz => vec![Step {
                local,
                layer: TwoQubitLayer {
                    gate,
                    edges: topology.edges(n),
                    p,
                },
            }],
            Gate::Xy => {
                let (e1, e2) = xy_edge_halves(topology, n)?;
                vec![
                    Step {
                        local: local.clone(),
                        layer: TwoQubitLayer { gate, edges: e1, p },
                    },
                    Step {
                        local,
                        layer: TwoQubitLayer { gate, edges: e2, p },
                    },
                ]
            }
        };
        Self::new(n, period)
    }

    pub fn steps_per_period(&self) -> usize {
        self.period.len()
    }
}

/// (0,1),(2,3),… then (1,2),(3,4),…; the closed chain adds (n−1, 0) to the
/// second half.
pub fn xy_edge_halves(
    topology: Topology,
    n: usize,
) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let e1: Vec<_> = (0..n.saturating_sub(1))
        .step_by(2)
        .map(|j| (j, j + 1))
        .collect();
    let mut e2: Vec<_> = (1..n.saturating_sub(1))
        .step_by(2)
        .map(|j| (j, j + 1))
        .collect();
    match topology {
        Topology::Open => {}
        Topology::Closed => {
            if n % 2 == 1 {
                return Err(Error::InvalidSchedule(
                    "XY on a closed chain needs an even number of qubits".into(),
                ));
            }
            e2.push((n - 1, 0));
        }
        _ => {
            return Err(Error::InvalidSchedule(format!(
                "XY gates are only scheduled on chains, not {}",
                topology.name()
            )))
        }
    }
    Ok((e1, e2))
}
