//! Hölder norms on grid functions: the classical seminorm, its windowed
//! variant, a numerical little-Hölder membership diagnostic, the
//! exponentially weighted equivalent norm, and path concatenation.
//!
//! All suprema range over grid-node pairs. For the piecewise-linear
//! representatives used throughout the crate this is the intended reading
//! of the continuum definitions; the pair scans are exact `O(N^2)` loops
//! (optionally strided, which yields a certified lower bound).

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{Grid, GridFunction};

/// Hölder exponent in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderExponent(f64);

impl HolderExponent {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::invalid("beta", format!("must lie in (0, 1], got {beta}")));
        }
        Ok(HolderExponent(beta))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Euclidean distance between the values at two nodes.
#[inline]
fn node_diff_norm(f: &GridFunction, i: usize, j: usize) -> f64 {
    let a = f.node_value(i);
    let b = f.node_value(j);
    let mut s = 0.0;
    for c in 0..a.len() {
        let d = b[c] - a[c];
        s += d * d;
    }
    s.sqrt()
}

/// Shared pair-scan kernel: sup over node pairs `i < j` with
/// `1 <= j - i <= max_gap` and `stride | i`, `stride | j`, of
/// `weight[j] * |f(t_j) - f(t_i)| / (j - i)^beta h^beta`.
fn sup_pair_ratio(
    f: &GridFunction,
    beta: f64,
    max_gap: usize,
    stride: usize,
    weight: Option<&[f64]>,
) -> f64 {
    let n = f.grid().steps();
    if max_gap == 0 {
        return 0.0;
    }
    let h = f.grid().h();
    let gap_cap = max_gap.min(n);
    let pow: Vec<f64> = (0..=gap_cap).map(|g| (g as f64 * h).powf(beta)).collect();
    let starts = n / stride + 1;
    let best = exec::sup_indexed(starts, |si| {
        let i = si * stride;
        let mut local: f64 = 0.0;
        let mut j = i + stride;
        while j <= n && j - i <= gap_cap {
            let mut r = node_diff_norm(f, i, j) / pow[j - i];
            if let Some(w) = weight {
                r *= w[j];
            }
            local = local.max(r);
            j += stride;
        }
        local
    });
    best.max(0.0)
}

/// Maximum Euclidean node value (uniform norm of the piecewise-linear path).
pub fn sup_norm(f: &GridFunction) -> f64 {
    (0..f.grid().len()).map(|k| f.node_norm(k)).fold(0.0, f64::max)
}

/// Hölder seminorm: `sup_{s < t} |f(t) - f(s)| / (t - s)^beta` over node pairs.
pub fn holder_seminorm(f: &GridFunction, beta: HolderExponent) -> f64 {
    sup_pair_ratio(f, beta.get(), f.grid().steps(), 1, None)
}

/// Strided variant scanning pairs `(i k, j k)` only; a certified lower bound.
pub fn holder_seminorm_strided(f: &GridFunction, beta: HolderExponent, stride: usize) -> f64 {
    let stride = stride.max(1);
    sup_pair_ratio(f, beta.get(), f.grid().steps(), stride, None)
}

/// Full Hölder norm: uniform norm plus seminorm.
pub fn holder_norm(f: &GridFunction, beta: HolderExponent) -> f64 {
    sup_norm(f) + holder_seminorm(f, beta)
}

/// Windowed seminorm value together with a resolution flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedSeminorm {
    pub value: f64,
    /// Set when the window does not exceed the grid step, so no pair
    /// qualifies and the reported zero carries no information.
    pub below_resolution: bool,
}

/// Largest node gap (in steps) with `gap * h < delta`, i.e. strictly inside
/// the window. An exactly representable `delta = m h` admits gaps up to `m - 1`.
fn max_gap_steps(delta: f64, h: f64) -> usize {
    if !(delta > 0.0) {
        return 0;
    }
    let q = delta / h;
    let r = q.round();
    let g = if (q - r).abs() <= 1e-9 * (1.0 + q.abs()) { r - 1.0 } else { q.floor() };
    if g < 0.0 {
        0
    } else {
        g as usize
    }
}

/// Seminorm restricted to node pairs with `0 < t - s < delta`.
pub fn windowed_seminorm(f: &GridFunction, beta: HolderExponent, delta: f64) -> WindowedSeminorm {
    windowed_seminorm_strided(f, beta, delta, 1)
}

/// Windowed seminorm over the strided pair subset; a certified lower bound.
pub fn windowed_seminorm_strided(
    f: &GridFunction,
    beta: HolderExponent,
    delta: f64,
    stride: usize,
) -> WindowedSeminorm {
    let gap = max_gap_steps(delta, f.grid().h());
    if gap == 0 {
        return WindowedSeminorm { value: 0.0, below_resolution: true };
    }
    WindowedSeminorm {
        value: sup_pair_ratio(f, beta.get(), gap, stride.max(1), None),
        below_resolution: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LittleHolderStatus {
    /// Windowed seminorms decay as the window shrinks.
    Consistent,
    /// Windowed seminorms stay flat (or grow): the vanishing-oscillation
    /// condition fails on this grid.
    NotConsistent,
    /// Not enough usable window sizes to judge.
    Inconclusive,
}

/// Outcome of the vanishing-oscillation diagnostic; never a membership proof.
#[derive(Debug, Clone)]
pub struct LittleHolderReport {
    /// Window sizes actually used (input deltas above grid resolution).
    pub deltas: Vec<f64>,
    /// Windowed seminorm at each used delta.
    pub values: Vec<f64>,
    /// Least-squares slope of `log value` against `log delta` (positive
    /// slope means decay as the window shrinks); `None` without enough
    /// positive values.
    pub slope: Option<f64>,
    pub nonincreasing: bool,
    pub status: LittleHolderStatus,
}

pub const LITTLE_HOLDER_SLOPE_THRESHOLD: f64 = 0.05;

/// Probe the little-Hölder condition `lim_{delta -> 0} |f|_{beta,delta} = 0`
/// by fitting the decay rate of windowed seminorms over a decreasing list of
/// window sizes. Purely diagnostic.
pub fn little_holder_diagnostic(
    f: &GridFunction,
    beta: HolderExponent,
    delta_list: &[f64],
    slope_threshold: f64,
) -> Result<LittleHolderReport> {
    for w in delta_list.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::invalid("delta_list", "window sizes must be strictly decreasing"));
        }
    }
    let h = f.grid().h();
    let mut deltas = Vec::new();
    let mut values = Vec::new();
    for &d in delta_list {
        if max_gap_steps(d, h) == 0 {
            continue;
        }
        deltas.push(d);
        values.push(windowed_seminorm(f, beta, d).value);
    }

    if deltas.len() < 3 {
        return Ok(LittleHolderReport {
            deltas,
            values,
            slope: None,
            nonincreasing: false,
            status: LittleHolderStatus::Inconclusive,
        });
    }

    // Deltas are decreasing, so nonincreasing oscillation means each value
    // is at most its predecessor (up to roundoff).
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);

    if values.iter().all(|&v| v == 0.0) {
        return Ok(LittleHolderReport {
            deltas,
            values,
            slope: Some(0.0),
            nonincreasing: true,
            status: LittleHolderStatus::Consistent,
        });
    }

    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(d, v)| (d.ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return Ok(LittleHolderReport {
            deltas,
            values,
            slope: None,
            nonincreasing,
            status: LittleHolderStatus::Inconclusive,
        });
    }
    let slope = least_squares_slope(&pts);
    let status = if slope >= slope_threshold && nonincreasing {
        LittleHolderStatus::Consistent
    } else {
        LittleHolderStatus::NotConsistent
    };
    Ok(LittleHolderReport { deltas, values, slope: Some(slope), nonincreasing, status })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Exponentially weighted Hölder norm
/// `sup_t e^{-lambda t} |f(t)| + sup_{s<t} e^{-lambda t} |f(t)-f(s)|/(t-s)^beta`.
///
/// Equivalent to the plain norm for every fixed `lambda >= 0`; large `lambda`
/// turns the fixed-point map of the solver into a contraction.
pub fn lambda_norm(f: &GridFunction, beta: HolderExponent, lambda: f64) -> Result<f64> {
    lambda_norm_strided(f, beta, lambda, 1)
}

/// Weighted norm over the strided pair subset; a certified lower bound (the
/// unweighted sup part still scans every node).
pub fn lambda_norm_strided(
    f: &GridFunction,
    beta: HolderExponent,
    lambda: f64,
    stride: usize,
) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda", format!("weight must be >= 0, got {lambda}")));
    }
    let grid = f.grid();
    let weights: Vec<f64> = (0..grid.len()).map(|k| (-lambda * grid.node(k)).exp()).collect();
    let sup = (0..grid.len())
        .map(|k| weights[k] * f.node_norm(k))
        .fold(0.0, f64::max);
    let semi = sup_pair_ratio(f, beta.get(), grid.steps(), stride.max(1), Some(&weights));
    Ok(sup + semi)
}

/// Concatenate a history segment ending at time 0 with a forward path
/// starting at 0. The junction values must agree exactly; the result covers
/// the union of both domains and satisfies, window by window,
/// `|xi|_{beta,delta} <= |eta|_{beta,delta} + |mu|_{beta,delta}`.
pub fn concatenate(eta: &GridFunction, mu: &GridFunction) -> Result<GridFunction> {
    if eta.dim() != mu.dim() {
        return Err(Error::GridMismatch { message: "concatenation needs equal dimensions".into() });
    }
    if !eta.grid().same_step(mu.grid()) {
        return Err(Error::GridMismatch { message: "concatenation needs a shared grid step".into() });
    }
    if eta.grid().end().abs() > 1e-9 * (1.0 + eta.grid().span())
        || mu.grid().t0().abs() > 1e-9 * (1.0 + mu.grid().span())
    {
        return Err(Error::GridMismatch {
            message: "history must end at 0 and the forward path must start at 0".into(),
        });
    }
    let left = eta.node_value(eta.grid().steps());
    let right = mu.node_value(0);
    if left != right {
        return Err(Error::EndpointMismatch { left: left.to_vec(), right: right.to_vec() });
    }
    let grid = Grid::new(eta.grid().t0(), eta.grid().h(), eta.grid().steps() + mu.grid().steps())?;
    let mut data = Vec::with_capacity(grid.len() * eta.dim());
    data.extend_from_slice(eta.data());
    data.extend_from_slice(&mu.data()[mu.dim()..]);
    GridFunction::new(grid, eta.dim(), data)
}
