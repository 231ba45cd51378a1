//! Uniform time grids and vector-valued functions sampled on them.
//!
//! Every quantity in this crate lives on a uniform grid with nodes
//! `t0 + k*h`, `k = 0..=n`. Between nodes, functions are understood as
//! piecewise linear; off-node evaluation interpolates accordingly.

use crate::error::{Error, Result};

/// Relative slack used when matching a time against a grid node.
const ALIGN_TOL: f64 = 1e-9;

/// A uniform grid: `n` steps of width `h` starting at `t0` (so `n + 1` nodes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    t0: f64,
    h: f64,
    n: usize,
}

impl Grid {
    pub fn new(t0: f64, h: f64, n: usize) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::invalid("h", format!("step must be positive and finite, got {h}")));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("t0", format!("grid start must be finite, got {t0}")));
        }
        if n == 0 {
            return Err(Error::invalid("n", "grid needs at least one step"));
        }
        Ok(Grid { t0, h, n })
    }

    /// Grid over `[0, horizon]` with `n` steps.
    pub fn over_horizon(horizon: f64, n: usize) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::invalid("horizon", format!("must be positive, got {horizon}")));
        }
        Grid::new(0.0, horizon / n as f64, n)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of steps (nodes minus one).
    pub fn steps(&self) -> usize {
        self.n
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }

    pub fn end(&self) -> f64 {
        self.node(self.n)
    }

    pub fn span(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// Index of the node at time `t`, rejecting misaligned or out-of-range times.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let rel = (t - self.t0) / self.h;
        let k = rel.round();
        if (rel - k).abs() > ALIGN_TOL * (1.0 + rel.abs()) {
            return Err(Error::Misaligned { t, t0: self.t0, h: self.h });
        }
        if k < 0.0 || k > self.n as f64 {
            return Err(Error::OutOfDomain { t, lo: self.t0, hi: self.end() });
        }
        Ok(k as usize)
    }

    /// Whether `dt` is a nonnegative integer multiple of the step.
    pub fn aligned_offset(&self, dt: f64) -> Result<usize> {
        let rel = dt / self.h;
        let k = rel.round();
        if k < 0.0 || (rel - k).abs() > ALIGN_TOL * (1.0 + rel.abs()) {
            return Err(Error::Misaligned { t: dt, t0: 0.0, h: self.h });
        }
        Ok(k as usize)
    }

    pub fn same_step(&self, other: &Grid) -> bool {
        (self.h - other.h).abs() <= ALIGN_TOL * self.h
    }

    /// Sub-grid spanning nodes `lo..=hi`, re-based at node `lo`.
    pub fn section(&self, lo: usize, hi: usize) -> Result<Grid> {
        if lo >= hi || hi > self.n {
            return Err(Error::GridMismatch {
                message: format!("invalid section {lo}..={hi} of a grid with {} steps", self.n),
            });
        }
        Grid::new(self.node(lo), self.h, hi - lo)
    }
}

/// A function `[t0, t0 + n h] -> R^d` stored node-major: value of component
/// `c` at node `k` sits at `data[k * dim + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    dim: usize,
    data: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        if data.len() != grid.len() * dim {
            return Err(Error::GridMismatch {
                message: format!(
                    "value buffer has {} entries, grid with {} nodes and dim {} needs {}",
                    data.len(),
                    grid.len(),
                    dim,
                    grid.len() * dim
                ),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "all components must be finite"));
        }
        Ok(GridFunction { grid, dim, data })
    }

    /// Scalar function from node values.
    pub fn scalar(grid: Grid, values: Vec<f64>) -> Result<Self> {
        GridFunction::new(grid, 1, values)
    }

    /// Sample a closure at the grid nodes.
    pub fn from_fn(grid: Grid, dim: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len() * dim);
        for k in 0..grid.len() {
            let v = f(grid.node(k));
            assert_eq!(v.len(), dim, "closure returned a vector of the wrong dimension");
            data.extend_from_slice(&v);
        }
        GridFunction::new(grid, dim, data)
    }

    /// Sample a scalar closure at the grid nodes.
    pub fn from_scalar_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.node(k))).collect();
        GridFunction::scalar(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn node_value(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    /// Euclidean norm of the value at node `k`.
    pub fn node_norm(&self, k: usize) -> f64 {
        self.node_value(k).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Piecewise-linear evaluation at an arbitrary time inside the domain.
    pub fn value_at(&self, t: f64) -> Result<Vec<f64>> {
        let rel = (t - self.grid.t0()) / self.grid.h();
        if rel < -ALIGN_TOL || rel > self.grid.steps() as f64 + ALIGN_TOL {
            return Err(Error::OutOfDomain { t, lo: self.grid.t0(), hi: self.grid.end() });
        }
        let rel = rel.clamp(0.0, self.grid.steps() as f64);
        let k = (rel.floor() as usize).min(self.grid.steps() - 1);
        let w = rel - k as f64;
        let lo = self.node_value(k);
        let hi = self.node_value(k + 1);
        Ok(lo.iter().zip(hi).map(|(a, b)| a + w * (b - a)).collect())
    }

    /// Restriction to nodes `lo..=hi` (keeps absolute times).
    pub fn section(&self, lo: usize, hi: usize) -> Result<GridFunction> {
        let grid = self.grid.section(lo, hi)?;
        let data = self.data[lo * self.dim..(hi + 1) * self.dim].to_vec();
        GridFunction::new(grid, self.dim, data)
    }

    /// Same values on a re-based grid starting at `t0` (used for segment views).
    pub fn rebase(&self, t0: f64) -> Result<GridFunction> {
        let grid = Grid::new(t0, self.grid.h(), self.grid.steps())?;
        GridFunction::new(grid, self.dim, self.data.clone())
    }

    /// Node-wise difference of two functions on identical grids.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::GridMismatch {
                message: "difference requires identical grids and dimensions".into(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        GridFunction::new(self.grid, self.dim, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_of_accepts_nodes_and_rejects_midpoints() {
        let g = Grid::new(-1.0, 0.25, 8).unwrap();
        assert_eq!(g.index_of(-1.0).unwrap(), 0);
        assert_eq!(g.index_of(0.0).unwrap(), 4);
        assert_eq!(g.index_of(1.0).unwrap(), 8);
        assert!(matches!(g.index_of(0.1), Err(Error::Misaligned { .. })));
        assert!(matches!(g.index_of(1.25), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn piecewise_linear_evaluation() {
        let g = Grid::new(0.0, 0.5, 2).unwrap();
        let f = GridFunction::scalar(g, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.value_at(0.25).unwrap(), vec![0.5]);
        assert_eq!(f.value_at(0.75).unwrap(), vec![0.5]);
        assert_eq!(f.value_at(1.0).unwrap(), vec![0.0]);
        assert!(f.value_at(1.5).is_err());
    }

    #[test]
    fn section_keeps_times() {
        let g = Grid::new(0.0, 0.5, 4).unwrap();
        let f = GridFunction::scalar(g, vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = f.section(1, 3).unwrap();
        assert_eq!(s.grid().t0(), 0.5);
        assert_eq!(s.data(), &[1.0, 2.0, 3.0]);
    }
}
