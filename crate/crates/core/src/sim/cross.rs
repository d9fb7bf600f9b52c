use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::pauli_coefficients;

pub const CROSS_SIGMA: f64 = 4.0;

/// Resolution of a coefficient product in double precision. Pairs that are
/// zero in exact arithmetic come out as ~1e-17 with a consistent sign and
/// an even smaller spread, so the standard error is floored here.
pub const CROSS_RESOLUTION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossMomentReport {
    pub pairs: usize,
    pub samples: usize,
    /// Pair (ν, μ) with the largest |Ê|/SE, base-4 Pauli indices.
    pub worst_pair: (usize, usize),
    pub worst_estimate: f64,
    pub worst_se: f64,
    pub max_z: f64,
    pub max_abs: f64,
    /// Pairs beyond `CROSS_SIGMA` standard errors.
    pub exceedances: usize,
    pub consistent: bool,
}

/// Ê(c_ν c_μ) over ν < μ for every pair of full Pauli strings, estimated
/// from the final states of independent realizations.
pub fn cross_moment_check(states: &[Vec<C64>]) -> Result<CrossMomentReport> {
    if states.len() < 2 {
        return Err(Error::TooFewSamples {
            got: states.len(),
            need: 2,
        });
    }
    let coeffs = states
        .iter()
        .map(|s| pauli_coefficients(s))
        .collect::<Result<Vec<_>>>()?;
    let m = coeffs[0].len();
    let k = coeffs.len() as f64;
    let mut report = CrossMomentReport {
        pairs: m * (m - 1) / 2,
        samples: states.len(),
        worst_pair: (0, 0),
        worst_estimate: 0.0,
        worst_se: 0.0,
        max_z: 0.0,
        max_abs: 0.0,
        exceedances: 0,
        consistent: true,
    };
    let mut s1 = vec![0.0; m];
    let mut s2 = vec![0.0; m];
    for nu in 0..m {
        s1.iter_mut().for_each(|v| *v = 0.0);
        s2.iter_mut().for_each(|v| *v = 0.0);
        for c in &coeffs {
            let a = c[nu];
            for mu in nu + 1..m {
                let x = a * c[mu];
                s1[mu] += x;
                s2[mu] += x * x;
            }
        }
        for mu in nu + 1..m {
            let mean = s1[mu] / k;
            let var = ((s2[mu] / k - mean * mean) * k / (k - 1.0)).max(0.0);
            let se = (var / k).sqrt();
            let z = mean.abs() / se.hypot(CROSS_RESOLUTION);
            report.max_abs = report.max_abs.max(mean.abs());
            if z > CROSS_SIGMA {
                report.exceedances += 1;
            }
            if z > report.max_z || report.worst_pair == (0, 0) {
                report.max_z = z;
                report.worst_pair = (nu, mu);
                report.worst_estimate = mean;
                report.worst_se = se;
            }
        }
    }
    report.consistent = report.max_z <= CROSS_SIGMA;
    Ok(report)
}
