//! Meyer–Wallach Q, Haar and closed-chain reference values, Porter–Thomas
//! distance and exponential rate fits.
//!
//! The Porter–Thomas histogram uses a fixed binning (width 0.1 on [0, 12]
//! plus one overflow bin). Distances are only comparable between runs that
//! use this estimator; absolute values from other estimators differ.

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::moments::{check_norm, qubits_of};

pub fn meyer_wallach_q(psi: &[C64]) -> Result<f64> {
    check_norm(psi)?;
    let n = qubits_of(psi);
    if n == 0 {
        return Ok(0.0);
    }
    let mut purity = 0.0;
    for j in 0..n {
        let bit = 1usize << j;
        let (mut p0, mut p1) = (0.0, 0.0);
        let mut off = C64::new(0.0, 0.0);
        for i in 0..psi.len() {
            if i & bit == 0 {
                p0 += psi[i].norm_sqr();
                off += psi[i] * psi[i | bit].conj();
            } else {
                p1 += psi[i].norm_sqr();
            }
        }
        purity += p0 * p0 + p1 * p1 + 2.0 * off.norm_sqr();
    }
    Ok((2.0 - 2.0 / n as f64 * purity).clamp(0.0, 1.0))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// (2ⁿ − 2)/(2ⁿ + 1), exactly.
pub fn q_haar_exact(n: usize) -> BigRational {
    let two_n = BigInt::one() << n;
    BigRational::new(&two_n - 2, &two_n + 1)
}

/// 1 − 3·Σ_{k odd} C(n,k) / Σ_{k odd} 3ᵏ C(n,k), exactly.
pub fn q_cc_exact(n: usize) -> BigRational {
    let (mut num, mut den) = (BigInt::zero(), BigInt::zero());
    for k in (1..=n).step_by(2) {
        let c = binomial(n, k);
        num += &c;
        den += c * BigInt::from(3).pow(k as u32);
    }
    BigRational::one() - BigRational::new(num * 3, den)
}

pub fn q_haar(n: usize) -> f64 {
    q_haar_exact(n).to_f64().expect("finite rational")
}

pub fn q_cc(n: usize) -> f64 {
    q_cc_exact(n).to_f64().expect("finite rational")
}

pub const PT_BIN_WIDTH: f64 = 0.1;
pub const PT_RANGE: f64 = 12.0;
pub const PT_BINS: usize = 120;
pub const PT_MIN_SAMPLES: usize = 1000;

/// Counts of y = N·η in 0.1-wide bins over [0, 12), last slot is overflow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PTHistogram {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Default for PTHistogram {
    fn default() -> Self {
        Self {
            counts: vec![0; PT_BINS + 1],
            total: 0,
        }
    }
}

impl PTHistogram {
    pub fn bin_of(y: f64) -> usize {
        if y >= PT_RANGE {
            PT_BINS
        } else {
            ((y / PT_BIN_WIDTH) as usize).min(PT_BINS - 1)
        }
    }

    pub fn add(&mut self, y: f64) {
        self.counts[Self::bin_of(y)] += 1;
        self.total += 1;
    }

    /// Adds every |ψ_i|² of a state, rescaled by its dimension.
    pub fn add_state(&mut self, psi: &[C64]) {
        let dim = psi.len() as f64;
        for a in psi {
            self.add(dim * a.norm_sqr());
        }
    }

    pub fn merge(&mut self, other: &PTHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn masses(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    /// l₂ distance to the exact exponential bin masses.
    pub fn distance(&self) -> Result<f64> {
        if (self.total as usize) < PT_MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                got: self.total as usize,
                need: PT_MIN_SAMPLES,
            });
        }
        let reference = pt_reference_masses();
        Ok(self
            .masses()
            .iter()
            .zip(&reference)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt())
    }
}

/// ∫ e^{−y} dy over each bin, overflow last.
pub fn pt_reference_masses() -> Vec<f64> {
    let mut out: Vec<f64> = (0..PT_BINS)
        .map(|i| {
            let a = i as f64 * PT_BIN_WIDTH;
            (-a).exp() * -(-PT_BIN_WIDTH).exp_m1()
        })
        .collect();
    out.push((-PT_RANGE).exp());
    out
}

/// Porter–Thomas distance of pooled y-values.
pub fn pt_distance(ys: &[f64]) -> Result<f64> {
    let mut h = PTHistogram::default();
    for &y in ys {
        h.add(y);
    }
    h.distance()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    /// 95% half-width of the slope.
    pub ci: f64,
    /// Inclusive (ℓ_first, ℓ_last) of the fitted window.
    pub window: (f64, f64),
    pub points: usize,
}

pub const MIN_RATE_POINTS: usize = 5;

/// Fits d(ℓ) ∼ e^{−Γℓ} on the tail window: points are used up to the first
/// one at or below `floor`, and the window is the later half of those
/// (at least 5 points).
pub fn fit_rate(series: &[(f64, f64)], floor: f64) -> Result<RateFit> {
    let valid: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .take_while(|&(_, d)| d > floor && d > 0.0)
        .collect();
    if valid.len() < MIN_RATE_POINTS {
        return Err(Error::NoDecayWindow(format!(
            "{} points above the floor {floor:e}",
            valid.len()
        )));
    }
    let start = (valid.len() / 2).min(valid.len() - MIN_RATE_POINTS);
    let window = &valid[start..];
    let x: Vec<f64> = window.iter().map(|p| p.0).collect();
    let y: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
    let f = fit_line(&x, &y)?;
    let ci = 1.96 * f.slope_se;
    if -f.slope <= ci.max(1e-12) {
        return Err(Error::NoDecayWindow("series does not decay".into()));
    }
    Ok(RateFit {
        rate: -f.slope,
        ci,
        window: (x[0], x[x.len() - 1]),
        points: window.len(),
    })
}

/// Bootstrap resamples used by [`fit_rate_resampled`].
pub const RATE_BOOTSTRAP: usize = 400;

/// [`fit_rate`] on the deviation of the mean of per-sample `traces` from
/// `reference`, with the 95% half-width taken from a bootstrap over samples
/// (window held fixed). Every point of a trace comes from the same circuits,
/// so the residual-based slope error of a single fit is too small.
pub fn fit_rate_resampled(traces: &[Vec<f64>], reference: f64, floor: f64, seed: u64) -> Result<RateFit> {
    if traces.len() < 2 {
        return Err(Error::TooFewSamples { got: traces.len(), need: 2 });
    }
    let len = traces[0].len();
    let deviation = |idx: &mut dyn Iterator<Item = usize>| {
        let mut sum = vec![0.0; len];
        let mut k = 0.0;
        for i in idx {
            for (s, q) in sum.iter_mut().zip(&traces[i]) {
                *s += q;
            }
            k += 1.0;
        }
        sum.into_iter().map(|s| (s / k - reference).abs()).collect::<Vec<f64>>()
    };
    let full = deviation(&mut (0..traces.len()));
    let series: Vec<(f64, f64)> = full.iter().enumerate().map(|(l, &d)| (l as f64, d)).collect();
    let mut fit = fit_rate(&series, floor)?;
    let (lo, hi) = (fit.window.0 as usize, fit.window.1 as usize);
    let x: Vec<f64> = (lo..=hi).map(|l| l as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rates = Vec::with_capacity(RATE_BOOTSTRAP);
    for _ in 0..RATE_BOOTSTRAP {
        let picks: Vec<usize> = (0..traces.len()).map(|_| rng.gen_range(0..traces.len())).collect();
        let d = deviation(&mut picks.into_iter());
        let y: Vec<f64> = d[lo..=hi].iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
        rates.push(-fit_line(&x, &y)?.slope);
    }
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rates.len() - 1) as f64;
    fit.ci = 1.96 * var.sqrt();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moments_from_state, q_from_moments};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        let mut v: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        v
    }

    #[test]
    fn q_of_simple_states() {
        let mut zero = vec![C64::new(0.0, 0.0); 8];
        zero[0] = C64::new(1.0, 0.0);
        assert!(meyer_wallach_q(&zero).unwrap().abs() < 1e-15);
        let mut ghz = vec![C64::new(0.0, 0.0); 8];
        ghz[0] = C64::new(0.5f64.sqrt(), 0.0);
        ghz[7] = C64::new(0.5f64.sqrt(), 0.0);
        assert!((meyer_wallach_q(&ghz).unwrap() - 1.0).abs() < 1e-15);
        let bad = vec![C64::new(1.0, 0.0); 4];
        assert!(matches!(meyer_wallach_q(&bad), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn q_agrees_with_moment_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..1000 {
            let psi = random_state(1 + i % 5, &mut rng);
            let a = meyer_wallach_q(&psi).unwrap();
            let b = q_from_moments(&moments_from_state(&psi).unwrap());
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn reference_values() {
        assert_eq!(q_haar_exact(8), BigRational::new(254.into(), 257.into()));
        assert!((q_haar(8) - 0.988327).abs() < 5e-7);
        assert_eq!(q_haar_exact(2), BigRational::new(2.into(), 5.into()));
        assert!((q_cc(8) - 0.988235).abs() < 5e-7);
        for n in (4..=12).step_by(2) {
            assert!(q_cc(n) < q_haar(n), "n = {n}");
        }
    }

    #[test]
    fn reference_masses_sum_to_one() {
        let m = pt_reference_masses();
        assert_eq!(m.len(), PT_BINS + 1);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_superposition_distance() {
        let ys = vec![1.0; 4096];
        let q = pt_reference_masses();
        let hit = PTHistogram::bin_of(1.0);
        let expected = ((1.0 - q[hit]).powi(2)
            + q.iter().enumerate().filter(|(i, _)| *i != hit).map(|(_, v)| v * v).sum::<f64>())
        .sqrt();
        assert!((pt_distance(&ys).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn exponential_samples_are_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ys: Vec<f64> = (0..1_000_000).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        assert!(pt_distance(&ys).unwrap() < 5e-3);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            pt_distance(&[1.0; 999]),
            Err(Error::TooFewSamples { got: 999, need: 1000 })
        ));
    }

    #[test]
    fn exact_exponential_rate() {
        let s: Vec<(f64, f64)> = (0..30).map(|l| (l as f64, (-0.5 * l as f64).exp())).collect();
        let f = fit_rate(&s, 0.0).unwrap();
        assert!((f.rate - 0.5).abs() < 1e-12);
        assert!(f.ci < 1e-12);
    }

    #[test]
    fn flat_series_has_no_window() {
        let s: Vec<(f64, f64)> = (0..30).map(|l| (l as f64, 0.3)).collect();
        assert!(matches!(fit_rate(&s, 0.0), Err(Error::NoDecayWindow(_))));
        let short: Vec<(f64, f64)> = (0..4).map(|l| (l as f64, 1.0 / (1.0 + l as f64))).collect();
        assert!(matches!(fit_rate(&short, 0.0), Err(Error::NoDecayWindow(_))));
    }

    proptest::proptest! {
        #[test]
        fn distance_bounded_and_permutation_invariant(
            mut ys in proptest::collection::vec(0.0f64..20.0, 1000..1500),
            seed in 0u64..1000,
        ) {
            let d = pt_distance(&ys).unwrap();
            proptest::prop_assert!((0.0..=2f64.sqrt()).contains(&d));
            use rand::seq::SliceRandom;
            ys.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            proptest::prop_assert_eq!(d, pt_distance(&ys).unwrap());
        }
    }
}
