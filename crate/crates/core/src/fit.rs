//! Ordinary least squares on a straight line.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    /// Root of the summed squared residuals.
    pub residual_norm: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    assert_eq!(x.len(), y.len());
    let k = x.len();
    if k < 2 {
        return Err(Error::FitIllConditioned(format!("{k} points")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::FitIllConditioned("non-finite input".into()));
    }
    let kf = k as f64;
    let mx = x.iter().sum::<f64>() / kf;
    let my = y.iter().sum::<f64>() / kf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 1e-14 * (1.0 + mx * mx) * kf {
        return Err(Error::FitIllConditioned("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let sigma2 = if k > 2 { ss / (kf - 2.0) } else { 0.0 };
    Ok(LineFit {
        slope,
        intercept,
        slope_se: (sigma2 / sxx).sqrt(),
        intercept_se: (sigma2 * (1.0 / kf + mx * mx / sxx)).sqrt(),
        residual_norm: ss.sqrt(),
    })
}
