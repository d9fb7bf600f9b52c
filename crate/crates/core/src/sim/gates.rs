use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::sim::state::Gate1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LocalGateDistribution {
    HaarSu2,
    /// Hadamard, then a uniform z-rotation.
    Hz,
    /// Z(φ₂)·X(θ)·Z(φ₁) with uniform φ₁, φ₂; realizes c = cos²θ.
    Zxz { theta: f64 },
}

impl LocalGateDistribution {
    /// Local gate parameter c this distribution realizes.
    pub fn c(&self) -> f64 {
        match self {
            Self::HaarSu2 => 1.0 / 3.0,
            Self::Hz => 0.0,
            Self::Zxz { theta } => theta.cos().powi(2),
        }
    }

    /// ZXZ member with the given c.
    pub fn with_c(c: f64) -> Self {
        Self::Zxz {
            theta: c.clamp(0.0, 1.0).sqrt().acos(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::HaarSu2 => "haar".into(),
            Self::Hz => "hz".into(),
            Self::Zxz { theta } => format!("zxz({theta})"),
        }
    }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn z_rotation(phi: f64) -> Gate1 {
    [[C64::new(1.0, 0.0), zero()], [zero(), C64::from_polar(1.0, phi)]]
}

fn x_rotation(theta: f64) -> Gate1 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

pub fn mul(a: &Gate1, b: &Gate1) -> Gate1 {
    let mut out = [[zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn sample_local<R: Rng + ?Sized>(dist: &LocalGateDistribution, rng: &mut R) -> Gate1 {
    match *dist {
        LocalGateDistribution::HaarSu2 => {
            let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let a = C64::new(x[0], x[3]) / norm;
            let b = C64::new(x[2], x[1]) / norm;
            [[a, -b.conj()], [b, a.conj()]]
        }
        LocalGateDistribution::Hz => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let had = [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]];
            mul(&z_rotation(rng.gen_range(0.0..2.0 * PI)), &had)
        }
        LocalGateDistribution::Zxz { theta } => {
            let phi1 = rng.gen_range(0.0..2.0 * PI);
            let phi2 = rng.gen_range(0.0..2.0 * PI);
            mul(&mul(&z_rotation(phi2), &x_rotation(theta)), &z_rotation(phi1))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CEstimate {
    pub mean: f64,
    pub se: f64,
    pub samples: usize,
}

/// Monte Carlo E[R_zz²], R_zz = 2|u₀₀|² − 1 the z→z entry of the induced
/// rotation.
pub fn estimate_c<R: Rng + ?Sized>(dist: &LocalGateDistribution, samples: usize, rng: &mut R) -> CEstimate {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let u = sample_local(dist, rng);
        let r = 2.0 * u[0][0].norm_sqr() - 1.0;
        let v = r * r;
        s += v;
        s2 += v * v;
    }
    let k = samples.max(1) as f64;
    let mean = s / k;
    let var = (s2 / k - mean * mean).max(0.0) * k / (k - 1.0).max(1.0);
    CEstimate {
        mean,
        se: (var / k).sqrt(),
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unitarity_error(u: &Gate1) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    #[test]
    fn samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dist in [LocalGateDistribution::HaarSu2, LocalGateDistribution::Hz, LocalGateDistribution::Zxz { theta: 0.7 }] {
            for _ in 0..1000 {
                assert!(unitarity_error(&sample_local(&dist, &mut rng)) < 1e-12);
            }
        }
    }

    #[test]
    fn zxz_zero_is_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = sample_local(&LocalGateDistribution::Zxz { theta: 0.0 }, &mut rng);
        assert!(u[0][1].norm() < 1e-15 && u[1][0].norm() < 1e-15);
    }

    #[test]
    fn estimated_c_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = estimate_c(&LocalGateDistribution::Zxz { theta: PI / 2.0 }, 10_000, &mut rng);
        assert!(e.mean < 1e-12);
        let e = estimate_c(&LocalGateDistribution::Zxz { theta: PI / 4.0 }, 10_000, &mut rng);
        assert!((e.mean - 0.5).abs() < 1e-12);
        let e = estimate_c(&LocalGateDistribution::Hz, 10_000, &mut rng);
        assert!(e.mean < 1e-12);
        let e = estimate_c(&LocalGateDistribution::HaarSu2, 1_000_000, &mut rng);
        assert!((e.mean - 1.0 / 3.0).abs() < 0.002, "{e:?}");
        assert!((LocalGateDistribution::with_c(0.2).c() - 0.2).abs() < 1e-12);
    }
}
