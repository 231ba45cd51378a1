//! Exact-law sampling of fractional Brownian motion and the measure-
//! preserving path shift.
//!
//! A fractional Brownian motion with Hurst parameter `H` is the centered
//! Gaussian process with covariance
//!
//! ```text
//! R_H(s, t) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
//! ```
//!
//! Paths are drawn by Cholesky-factoring the node covariance matrix, which
//! reproduces the law exactly on the grid at `O(n^3)` setup cost. The factor
//! is cached in [`FbmSampler`] so Monte Carlo sweeps pay it once per
//! `(hurst, grid)` pair.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::chol::{cholesky_default, CholeskyFactor};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Largest step count for which the dense factorization is attempted.
pub const MAX_CHOLESKY_STEPS: usize = 4096;

/// Hurst parameter in `(0, 1)`. Values above `1/2` are required once Young
/// integration enters; that restriction is enforced at the solver level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::invalid("hurst", format!("must lie in (0, 1), got {h}")));
        }
        Ok(Hurst(h))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// One scalar driver realization on a grid starting at 0, with `omega(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: Grid,
    values: Vec<f64>,
    seed: u64,
    hurst: Hurst,
}

impl SamplePath {
    /// Wrap explicit node values (first value must be exactly zero).
    pub fn from_values(grid: Grid, values: Vec<f64>, seed: u64, hurst: Hurst) -> Result<Self> {
        if grid.t0() != 0.0 {
            return Err(Error::invalid("grid", "driver paths start at t0 = 0"));
        }
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                message: format!("{} values for {} nodes", values.len(), grid.len()),
            });
        }
        if values[0] != 0.0 {
            return Err(Error::invalid("values", "omega(0) must be exactly zero"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "all path values must be finite"));
        }
        Ok(SamplePath { grid, values, seed, hurst })
    }

    /// The zero path; a convenient driver for noiseless systems.
    pub fn zero(grid: Grid, hurst: Hurst) -> Result<Self> {
        let n = grid.len();
        SamplePath::from_values(grid, vec![0.0; n], 0, hurst)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn hurst(&self) -> Hurst {
        self.hurst
    }

    /// Piecewise-linear evaluation between nodes.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let f = self.as_grid_function();
        Ok(f.value_at(t)?[0])
    }

    pub fn as_grid_function(&self) -> GridFunction {
        GridFunction::scalar(self.grid, self.values.clone())
            .expect("path values validated at construction")
    }

    /// Node-wise difference of two paths on the same grid.
    pub fn sub(&self, other: &SamplePath) -> Result<SamplePath> {
        if self.grid != *other.grid() {
            return Err(Error::GridMismatch { message: "path difference requires equal grids".into() });
        }
        let values = self.values.iter().zip(other.values()).map(|(a, b)| a - b).collect();
        SamplePath::from_values(self.grid, values, self.seed, self.hurst)
    }
}

/// Covariance function of fractional Brownian motion.
pub fn covariance(s: f64, t: f64, hurst: Hurst) -> Result<f64> {
    if s < 0.0 || t < 0.0 {
        return Err(Error::invalid("time", format!("covariance needs s, t >= 0, got ({s}, {t})")));
    }
    Ok(covariance_unchecked(s, t, hurst.get()))
}

#[inline]
fn covariance_unchecked(s: f64, t: f64, h: f64) -> f64 {
    let two_h = 2.0 * h;
    0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h))
}

/// Cached exact sampler: one covariance factorization per `(hurst, grid)`.
pub struct FbmSampler {
    hurst: Hurst,
    grid: Grid,
    factor: CholeskyFactor,
}

impl FbmSampler {
    pub fn new(hurst: Hurst, grid: Grid) -> Result<Self> {
        if grid.t0() != 0.0 {
            return Err(Error::invalid("grid", "driver paths start at t0 = 0"));
        }
        let n = grid.steps();
        if n > MAX_CHOLESKY_STEPS {
            return Err(Error::CovarianceTooLarge { steps: n, max: MAX_CHOLESKY_STEPS });
        }
        // Covariance of (omega(t_1), ..., omega(t_n)); node 0 is pinned to 0.
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            let ti = grid.node(i + 1);
            for j in 0..=i {
                let tj = grid.node(j + 1);
                a[i * n + j] = covariance_unchecked(tj, ti, hurst.get());
            }
        }
        let factor = cholesky_default(a, n).map_err(|pivot| Error::CovarianceFactorization {
            n,
            hurst: hurst.get(),
            pivot,
        })?;
        Ok(FbmSampler { hurst, grid, factor })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hurst(&self) -> Hurst {
        self.hurst
    }

    /// Draw the path for `seed`; identical seeds give bitwise-identical paths.
    pub fn sample(&self, seed: u64) -> SamplePath {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let z: Vec<f64> = (0..self.grid.steps())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let mut values = Vec::with_capacity(self.grid.len());
        values.push(0.0);
        values.extend(self.factor.multiply(&z));
        SamplePath { grid: self.grid, values, seed, hurst: self.hurst }
    }
}

/// One-shot draw; prefer [`FbmSampler`] when sweeping seeds.
pub fn sample_fbm(hurst: Hurst, grid: Grid, seed: u64) -> Result<SamplePath> {
    Ok(FbmSampler::new(hurst, grid)?.sample(seed))
}

/// The path shift `(theta_c omega)(s) = omega(c + s) - omega(c)` for a
/// grid-aligned offset `c >= 0`; the result covers `[0, T - c]`.
pub fn wiener_shift(omega: &SamplePath, c: f64) -> Result<SamplePath> {
    let grid = omega.grid();
    let k = grid.aligned_offset(c)?;
    if k >= grid.steps() {
        return Err(Error::OutOfDomain { t: c, lo: 0.0, hi: grid.end() });
    }
    if k == 0 {
        return Ok(omega.clone());
    }
    let base = omega.value(k);
    let values: Vec<f64> = (k..grid.len()).map(|j| omega.value(j) - base).collect();
    let shifted = Grid::new(0.0, grid.h(), grid.steps() - k)?;
    SamplePath::from_values(shifted, values, omega.seed(), omega.hurst())
}
