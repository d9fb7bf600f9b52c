//! Eigenvalues of chain matrices: full dense multisets and the leading
//! part of the spectrum via Arnoldi on a matrix-free operator.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::markov::operator::{ChainMatrix, LinearMap, StateSpace};

/// Eigenvalues within this distance of 1 count as invariant.
pub const UNIT_TOL: f64 = 1e-9;
/// Eigenvalues within this distance of 1 but not unit are flagged.
pub const NEAR_UNIT_TOL: f64 = 1e-6;
/// Full dense eigensolve up to this dimension (3⁸).
pub const DENSE_SPECTRUM_MAX: usize = 6561;
/// Gap queries switch to Arnoldi above this dimension.
pub const DENSE_GAP_MAX: usize = 729;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumMethod {
    Dense,
    Arnoldi,
    /// Dense on the range of Mᵏ, zeros for the nilpotent part.
    Range,
}

/// Whether a chain with local parameters `cs` and gate probability `p` can
/// mix. At c = 1 the local layer is the identity on {0, z, ξ}, so every
/// string over {0, z} is fixed (≥ 2ⁿ unit eigenvalues); at p = 0 no weight
/// ever spreads. Excluding the unit eigenvalues would then leave a
/// meaningless "gap" (1 at c = 1, p = 1/2).
pub fn mixes(cs: &[f64], p: f64) -> bool {
    p > 0.0 && cs.iter().all(|&c| c < 1.0)
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Full multiset (dense) or converged leading Ritz values (Arnoldi),
    /// sorted by decreasing modulus.
    pub eigenvalues: Vec<C64>,
    pub lambda1: C64,
    pub gap: f64,
    pub rate: f64,
    pub unit_count: usize,
    /// Decaying eigenvalues within `NEAR_UNIT_TOL` of 1.
    pub near_unit: Vec<C64>,
    pub method: SpectrumMethod,
    /// Largest Ritz residual among the reported values (0 for dense).
    pub residual: f64,
}

impl SpectrumReport {
    pub fn from_eigenvalues(mut eigenvalues: Vec<C64>, method: SpectrumMethod, residual: f64) -> Self {
        eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
        let is_unit = |z: &C64| (z - C64::new(1.0, 0.0)).norm() < UNIT_TOL;
        let unit_count = eigenvalues.iter().filter(|z| is_unit(z)).count();
        let lambda1 = eigenvalues
            .iter()
            .find(|z| !is_unit(z))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0));
        let near_unit = eigenvalues
            .iter()
            .filter(|z| !is_unit(z) && (*z - C64::new(1.0, 0.0)).norm() < NEAR_UNIT_TOL)
            .copied()
            .collect();
        let gap = 1.0 - lambda1.norm();
        Self {
            eigenvalues,
            lambda1,
            gap,
            rate: -lambda1.norm().ln(),
            unit_count,
            near_unit,
            method,
            residual,
        }
    }

    /// Report for a chain that never reaches the Haar moments: Δ = 0.
    pub fn non_mixing(mut self) -> Self {
        self.lambda1 = C64::new(1.0, 0.0);
        self.gap = 0.0;
        self.rate = 0.0;
        self
    }

    /// Number of reported eigenvalues within `tol` of `z`.
    pub fn multiplicity(&self, z: C64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|w| (*w - z).norm() < tol).count()
    }
}

pub fn dense_eigenvalues(m: &ChainMatrix) -> Result<Vec<C64>> {
    m.to_faer()
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// All eigenvalues when the dimension allows, otherwise the leading part.
pub fn spectrum(m: &ChainMatrix) -> Result<SpectrumReport> {
    if m.dim() <= DENSE_SPECTRUM_MAX {
        Ok(SpectrumReport::from_eigenvalues(
            dense_eigenvalues(m)?,
            SpectrumMethod::Dense,
            0.0,
        ))
    } else {
        arnoldi_spectrum(m, &ArnoldiOptions::default())
    }
}

/// Relative singular-value cut for the numerical rank of M·V.
pub const RANGE_RANK_TOL: f64 = 1e-9;
/// Powers tried before the probe width is doubled.
pub const RANGE_MAX_POWER: usize = 64;

#[derive(Clone, Debug)]
pub struct RangeSpectrum {
    pub report: SpectrumReport,
    /// Smallest k with rank Mᵏ = rank Mᵏ⁺¹.
    pub power: usize,
    /// Algebraic multiplicity of 0 (dimension minus the stable rank).
    pub zero_count: usize,
}

fn orthonormal_range(w: &faer::Mat<f64>) -> Result<(faer::Mat<f64>, usize)> {
    let svd = w.thin_svd().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let top = (0..s.nrows()).map(|i| s[i]).fold(0.0, f64::max);
    let r = (0..s.nrows()).filter(|&i| s[i] > RANGE_RANK_TOL * top).count();
    let u = svd.U();
    Ok((faer::Mat::from_fn(w.nrows(), r, |i, j| u[(i, j)]), r))
}

fn apply_columns(op: &dyn LinearMap, v: &faer::Mat<f64>) -> faer::Mat<f64> {
    use rayon::prelude::*;
    let d = op.dim();
    let cols: Vec<Vec<f64>> = (0..v.ncols())
        .into_par_iter()
        .map(|j| {
            let x: Vec<f64> = (0..d).map(|i| v[(i, j)]).collect();
            op.apply_vec(&x)
        })
        .collect();
    faer::Mat::from_fn(d, cols.len(), |i, j| cols[j][i])
}

/// Full eigenvalue multiset for chains whose spectrum is mostly a
/// nilpotent zero block. Mᵏ applied to random vectors spans range(Mᵏ); once
/// the rank stops dropping that range is invariant and holds every nonzero
/// eigenvalue, which is then read off the compressed r×r matrix. The other
/// dim − r eigenvalues are exactly zero.
pub fn range_spectrum(op: &dyn LinearMap, seed: u64) -> Result<RangeSpectrum> {
    use rand_distr::StandardNormal;
    let d = op.dim();
    let mut m = 64.min(d);
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = faer::Mat::from_fn(d, m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let (mut v, mut r) = orthonormal_range(&start)?;
        for power in 0..RANGE_MAX_POWER {
            let w = apply_columns(op, &v);
            let (next, r_next) = orthonormal_range(&w)?;
            if r_next == r && (r < m || m == d) {
                let b = v.transpose() * &w;
                let mut eig = b.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
                let zero_count = d - r;
                eig.extend(std::iter::repeat_n(C64::new(0.0, 0.0), zero_count));
                return Ok(RangeSpectrum {
                    report: SpectrumReport::from_eigenvalues(eig, SpectrumMethod::Range, 0.0),
                    power,
                    zero_count,
                });
            }
            (v, r) = (next, r_next);
        }
        if m == d {
            return Err(Error::ConvergenceFailure(f64::NAN));
        }
        m = (2 * m).min(d);
    }
}

/// Gap of a matrix-free operator: dense for small dimensions, Arnoldi above.
pub fn gap_report(op: &dyn LinearMap) -> Result<SpectrumReport> {
    if op.dim() <= DENSE_GAP_MAX {
        let m = ChainMatrix::from_map(op, StateSpace::Lumped { classes: op.dim() })?;
        spectrum(&m)
    } else {
        arnoldi_spectrum(op, &ArnoldiOptions::default())
    }
}

#[derive(Clone, Debug)]
pub struct ArnoldiOptions {
    /// Maximum Krylov dimension.
    pub max_dim: usize,
    /// Krylov dimension between convergence checks.
    pub check_every: usize,
    /// Required Ritz residual for the leading values.
    pub tol: f64,
    /// Residual accepted at `max_dim` when the strict target is missed
    /// (defective leading eigenvalues converge slowly).
    pub fallback_tol: f64,
    pub seed: u64,
    /// State index known to be invariant (identity string), excluded from
    /// the start vector.
    pub skip_index: Option<usize>,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        Self {
            max_dim: 400,
            check_every: 20,
            tol: 1e-10,
            fallback_tol: 1e-7,
            seed: 0x5eed,
            skip_index: Some(0),
        }
    }
}

/// Krylov basis and Hessenberg matrix built from a start vector.
pub(crate) struct Krylov {
    pub basis: Vec<Vec<f64>>,
    /// (m+1)×m upper Hessenberg, row-major with m columns.
    pub h: Vec<Vec<f64>>,
    pub breakdown: bool,
    pub start_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Krylov {
    pub fn new(start: &[f64]) -> Self {
        let nrm = norm(start);
        let basis = if nrm > 0.0 {
            vec![start.iter().map(|x| x / nrm).collect()]
        } else {
            Vec::new()
        };
        Self {
            basis,
            h: Vec::new(),
            breakdown: nrm == 0.0,
            start_norm: nrm,
        }
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    /// Extends the factorization by one column. Returns false on breakdown.
    pub fn extend(&mut self, op: &dyn LinearMap, breakdown_tol: f64) -> bool {
        if self.breakdown {
            return false;
        }
        let m = self.h.len();
        let mut w = op.apply_vec(&self.basis[m]);
        let wnorm0 = norm(&w);
        let mut col = vec![0.0; m + 2];
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for (i, q) in self.basis.iter().enumerate() {
                let c = dot(q, &w);
                col[i] += c;
                for (x, y) in w.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let beta = norm(&w);
        col[m + 1] = beta;
        self.h.push(col);
        if beta <= breakdown_tol * wnorm0.max(1e-300) || beta < 1e-300 {
            self.breakdown = true;
            return false;
        }
        self.basis.push(w.iter().map(|x| x / beta).collect());
        true
    }

    /// Square m×m Hessenberg block.
    pub fn h_square(&self) -> faer::Mat<f64> {
        let m = self.m();
        faer::Mat::from_fn(m, m, |i, j| self.h[j].get(i).copied().unwrap_or(0.0))
    }

    pub fn last_subdiag(&self) -> f64 {
        let m = self.m();
        if m == 0 || self.breakdown {
            0.0
        } else {
            self.h[m - 1][m]
        }
    }
}

/// Ritz values with residual estimates |h_{m+1,m}|·|e_mᵀ y|/‖y‖.
pub(crate) fn ritz_pairs(k: &Krylov) -> Result<(Vec<C64>, Vec<f64>, faer::Mat<C64>)> {
    let m = k.m();
    let h = k.h_square();
    let eig = h
        .eigen()
        .map_err(|e| Error::Eigensolver(format!("Hessenberg: {e:?}")))?;
    let s: Vec<C64> = eig.S().column_vector().iter().copied().collect();
    let u = eig.U();
    let beta = k.last_subdiag();
    let mut res = Vec::with_capacity(m);
    let mut vecs = faer::Mat::<C64>::zeros(m, m);
    for j in 0..m {
        let col_norm = (0..m).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..m {
            vecs[(i, j)] = u[(i, j)] / col_norm;
        }
        res.push(beta * (u[(m - 1, j)].norm() / col_norm));
    }
    Ok((s, res, vecs))
}

fn random_start(dim: usize, opts: &ArnoldiOptions) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 0.5).collect();
    if let Some(i) = opts.skip_index {
        if i < dim {
            x[i] = 0.0;
        }
    }
    // no component along the all-ones left eigenvector
    let cnt = x.iter().filter(|v| **v != 0.0).count() as f64;
    let mean = x.iter().sum::<f64>() / cnt;
    for v in x.iter_mut() {
        if *v != 0.0 {
            *v -= mean;
        }
    }
    x
}

/// Leading spectrum of a stochastic operator: unit Ritz values plus the
/// largest-modulus decaying one, each converged to `tol`.
pub fn arnoldi_spectrum(op: &dyn LinearMap, opts: &ArnoldiOptions) -> Result<SpectrumReport> {
    let dim = op.dim();
    let max_dim = opts.max_dim.min(dim);
    let mut kry = Krylov::new(&random_start(dim, opts));
    loop {
        let target = (kry.m() + opts.check_every).min(max_dim);
        while kry.m() < target && kry.extend(op, 1e-14) {}
        let (vals, res, _) = ritz_pairs(&kry)?;
        let (leading, worst) = leading_converged(&vals, &res);
        let done = worst < opts.tol
            || kry.breakdown
            || (kry.m() >= max_dim && worst < opts.fallback_tol);
        if done {
            return Ok(SpectrumReport::from_eigenvalues(leading, SpectrumMethod::Arnoldi, worst));
        }
        if kry.m() >= max_dim {
            return Err(Error::ConvergenceFailure(worst));
        }
    }
}

/// Ritz values at least as large in modulus as the leading decaying one,
/// and the largest residual among them.
fn leading_converged(vals: &[C64], res: &[f64]) -> (Vec<C64>, f64) {
    let is_unit = |z: &C64| (z - C64::new(1.0, 0.0)).norm() < UNIT_TOL;
    let lead = vals
        .iter()
        .filter(|z| !is_unit(z))
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let cut = lead * (1.0 - 1e-8) - 1e-12;
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for (z, r) in vals.iter().zip(res) {
        if z.norm() >= cut {
            out.push(*z);
            worst = worst.max(*r);
        }
    }
    (out, worst)
}
