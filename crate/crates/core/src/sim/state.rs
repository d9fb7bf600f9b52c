use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::measures::meyer_wallach_q;

pub const MAX_SIM_QUBITS: usize = 14;

pub type Gate1 = [[C64; 2]; 2];

/// Amplitudes over 2ⁿ basis states; bit j of the index is qubit j.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidSchedule(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_size(n)?;
        Ok(Self { n, amps })
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_1q(&mut self, j: usize, u: &Gate1) {
        let bit = 1usize << j;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[i | bit] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, z) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *z = -*z;
            }
        }
    }

    /// |01⟩ ↔ |10⟩ with a factor −i; |00⟩, |11⟩ unchanged.
    pub fn apply_xy(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        let minus_i = C64::new(0.0, -1.0);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                let j = i ^ ba ^ bb;
                let (x, y) = (self.amps[i], self.amps[j]);
                self.amps[i] = minus_i * y;
                self.amps[j] = minus_i * x;
            }
        }
    }

    pub fn q(&self) -> Result<f64> {
        meyer_wallach_q(&self.amps)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SIM_QUBITS {
        Err(Error::DimensionLimit {
            got: n,
            limit: MAX_SIM_QUBITS,
        })
    } else {
        Ok(())
    }
}
