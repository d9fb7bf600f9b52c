use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::operator::ChainOperator;
use crate::markov::schedule::{CircuitSchedule, Gate, Topology};
use crate::markov::spectrum::{gap_report, mixes};

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub topology: Topology,
    pub gate: Gate,
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub gap: f64,
    pub rate: f64,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    /// p-major, c-minor order.
    pub rows: Vec<SweepRow>,
    pub argmax: usize,
}

impl SweepTable {
    pub fn best(&self) -> &SweepRow {
        &self.rows[self.argmax]
    }
}

pub fn gap_at(topology: Topology, gate: Gate, n: usize, c: f64, p: f64) -> Result<SweepRow> {
    let s = CircuitSchedule::standard(topology, gate, n, c, p)?;
    let op = ChainOperator::from_schedule(&s)?;
    let mut r = gap_report(&op)?;
    if !mixes(&[c], p) {
        r = r.non_mixing();
    }
    Ok(SweepRow {
        topology,
        gate,
        n,
        c,
        p,
        gap: r.gap,
        rate: r.rate,
    })
}

/// Gap over a (c, p) grid; the argmax is the first maximal row.
pub fn sweep(
    topology: Topology,
    gate: Gate,
    n: usize,
    c_grid: &[f64],
    p_grid: &[f64],
) -> Result<SweepTable> {
    if c_grid.is_empty() || p_grid.is_empty() {
        return Err(Error::InvalidSchedule("empty sweep grid".into()));
    }
    let points: Vec<(f64, f64)> = p_grid
        .iter()
        .flat_map(|&p| c_grid.iter().map(move |&c| (c, p)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(c, p)| gap_at(topology, gate, n, c, p))
        .collect::<Result<Vec<_>>>()?;
    let mut argmax = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.gap > rows[argmax].gap {
            argmax = i;
        }
    }
    Ok(SweepTable { rows, argmax })
}

/// `count` evenly spaced points from `lo` to `hi` inclusive, rounded to
/// suppress accumulation error.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((lo + i as f64 * step) * 1e10).round() / 1e10)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_local_layer_does_not_mix() {
        use crate::markov::{spectrum, ChainMatrix, StateSpace};
        let n = 4;
        for top in [Topology::Open, Topology::Star] {
            let s = CircuitSchedule::standard(top, Gate::Cz, n, 1.0, 0.5).unwrap();
            let op = ChainOperator::from_schedule(&s).unwrap();
            let r = spectrum(&ChainMatrix::from_map(&op, StateSpace::Reduced { n }).unwrap()).unwrap();
            assert!(r.unit_count >= 1 << n, "{top:?}: {}", r.unit_count);
            assert!(r.gap > 0.9);
            assert_eq!(gap_at(top, Gate::Cz, n, 1.0, 0.5).unwrap().gap, 0.0);
            assert!(gap_at(top, Gate::Cz, n, 0.99, 0.5).unwrap().gap < 0.05);
        }
        assert_eq!(gap_at(Topology::Open, Gate::Cz, n, 0.3, 0.0).unwrap().gap, 0.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.0, 1.0, 0.01);
        assert_eq!(g.len(), 101);
        assert_eq!(g[100], 1.0);
        assert_eq!(g[18], 0.18);
    }

    #[test]
    fn sweep_reports_argmax() {
        let t = sweep(Topology::Open, Gate::Cz, 4, &[0.0, 0.5, 1.0], &[1.0]).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| r.gap <= t.best().gap));
        // c = 1 with p = 1 is a permutation chain: no decay
        assert!(t.rows[2].gap.abs() < 1e-9);
    }
}
