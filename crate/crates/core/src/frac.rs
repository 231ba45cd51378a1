//! Fractional derivatives, the pathwise integral, and the Weyl-type norms.
//!
//! For `alpha` in `(0, 1/2)` the one-sided derivatives of a function `f`
//! and a driver path `omega` are
//!
//! ```text
//! D^alpha_{a+} f(s)      = ( f(s)/(s-a)^alpha
//!                          + alpha Int_a^s (f(s)-f(u))/(s-u)^{1+alpha} du ) / Gamma(1-alpha)
//! D^{1-alpha}_{t-} w(s)  = ( w_{t-}(s)/(t-s)^{1-alpha}
//!                          + (1-alpha) Int_s^t (w(s)-w(u))/(u-s)^{2-alpha} du ) / Gamma(alpha)
//! ```
//!
//! with `w_{t-}(s) = w(s) - w(t)`, all in the real-valued convention. The
//! pathwise integral is evaluated two independent ways:
//!
//! * `FractionalFormula`: `-Int_a^b D^alpha_{a+} f(s) D^{1-alpha}_{b-} w_{b-}(s) ds`,
//!   the integration-by-parts form. The overall sign is pinned by the
//!   requirement that `f == 1` integrates to `w(b) - w(a)`.
//! * `YoungSums`: left-endpoint Riemann-Stieltjes sums on the grid, the
//!   solver's stepping rule.
//!
//! Singular kernels are never sampled: on every grid cell the difference
//! terms are replaced by their piecewise-linear interpolant and the power
//! kernel is integrated against it in closed form (product integration).
//! Only the outer `ds` integral of the formula route uses a midpoint rule,
//! on a refined sub-grid, with an exact power weight on the cell carrying
//! the `(s-a)^{-alpha}` singularity.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exec;
use crate::fbm::{wiener_shift, Hurst, SamplePath};
use crate::grid::{Grid, GridFunction};

/// Fractional order `alpha` in `(0, 1/2)`; Young integration against a
/// driver of Hurst index `H` additionally needs `alpha > 1 - H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1/2), got {alpha}")));
        }
        Ok(FractionalOrder(alpha))
    }

    /// Enforce the joint admissibility condition `alpha in (1-H, 1/2)`.
    pub fn admissible_for(self, hurst: Hurst) -> Result<Self> {
        if self.0 <= 1.0 - hurst.get() {
            return Err(Error::invalid(
                "alpha",
                format!("must exceed 1 - H = {} for H = {}, got {}", 1.0 - hurst.get(), hurst.get(), self.0),
            ));
        }
        Ok(self)
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Evaluation route for the pathwise integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    /// Fractional integration-by-parts formula.
    FractionalFormula,
    /// Left-endpoint Riemann-Stieltjes sums.
    YoungSums,
}

/// Pair-scan execution policy for the norm suprema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairScanPolicy {
    /// All node pairs; rejected above [`EXACT_PAIR_CAP`] steps.
    Exact,
    /// Left index restricted to multiples of the stride; the result is a
    /// certified lower bound for the full supremum.
    Strided(usize),
}

/// Largest step count the exact pair scans accept.
pub const EXACT_PAIR_CAP: usize = 1024;

/// Sub-sampling factor of the outer midpoint rule in the formula route.
const OUTER_REFINE: usize = 8;

/// Driver-side norms controlling the integral bound.
#[derive(Debug, Clone, Copy)]
pub struct NormReport {
    /// `|f|_{alpha,1}` of the integrand.
    pub w_alpha1: f64,
    /// `|w|_{1-alpha,infty,T}` of the driver.
    pub w_1ma_inf: f64,
    /// `Lambda_alpha(w)`, the sup of the right-sided derivative.
    pub lambda_alpha: f64,
}

fn locate(grid: &Grid, s: f64) -> Result<(usize, f64)> {
    let rel = (s - grid.t0()) / grid.h();
    if rel < -1e-9 || rel > grid.steps() as f64 + 1e-9 {
        return Err(Error::OutOfDomain { t: s, lo: grid.t0(), hi: grid.end() });
    }
    let rel = rel.clamp(0.0, grid.steps() as f64);
    let r = rel.round();
    if (rel - r).abs() <= 1e-9 * (1.0 + rel.abs()) {
        // exactly on a node: treat as right endpoint of the previous cell
        let idx = r as usize;
        if idx == 0 {
            return Ok((0, 0.0));
        }
        return Ok((idx - 1, 1.0));
    }
    let cell = rel.floor() as usize;
    Ok((cell, rel - cell as f64))
}

/// `D^alpha_{a+} f(s)` by product integration, one value per component.
///
/// `a` must be a grid node and `a < s <= end`; `s` may sit anywhere in the
/// domain (the path is piecewise linear between nodes).
pub fn frac_deriv_left(f: &GridFunction, alpha: FractionalOrder, a: f64, s: f64) -> Result<Vec<f64>> {
    let grid = f.grid();
    let a_idx = grid.index_of(a)?;
    let (cell, frac) = locate(grid, s)?;
    if s <= a || (cell == a_idx && frac == 0.0) || cell < a_idx {
        return Err(Error::invalid("s", format!("needs a < s, got a = {a}, s = {s}")));
    }
    let al = alpha.get();
    let h = grid.h();
    let inv_g = 1.0 / gamma(1.0 - al);
    let dim = f.dim();
    let mut out = Vec::with_capacity(dim);
    for c in 0..dim {
        let comp: Vec<f64> = (a_idx..grid.len()).map(|k| f.node_value(k)[c]).collect();
        let v = dplus_scalar(&comp, h, cell - a_idx, frac, al) * inv_g;
        if !v.is_finite() {
            return Err(Error::invalid(
                "f",
                "singular-quotient integral is not finite; integrand too rough for this order",
            ));
        }
        out.push(v);
    }
    Ok(out)
}

/// Unnormalized `f(s)(s-a)^{-alpha} + alpha * Int_a^s (f(s)-f(u))(s-u)^{-1-alpha} du`
/// for node values `vals[0..]` starting at `a`; `s` sits in cell `cell` at
/// fraction `frac` (both relative to `a`).
fn dplus_scalar(vals: &[f64], h: f64, cell: usize, frac: f64, alpha: f64) -> f64 {
    let s_val = if frac == 1.0 {
        vals[cell + 1]
    } else {
        vals[cell] + frac * (vals[cell + 1] - vals[cell])
    };
    let mut acc = 0.0;
    for k in 0..cell {
        let g0 = s_val - vals[k]; // value at v_hi = s - u_k
        let g1 = s_val - vals[k + 1]; // value at v_lo
        let v_hi = ((cell - k) as f64 + frac) * h;
        let v_lo = v_hi - h;
        let c1 = (g0 - g1) / h;
        let c0 = g0 - c1 * v_hi;
        acc += c0 * (v_lo.powf(-alpha) - v_hi.powf(-alpha)) / alpha
            + c1 * (v_hi.powf(1.0 - alpha) - v_lo.powf(1.0 - alpha)) / (1.0 - alpha);
    }
    // cell adjacent to s: the difference vanishes linearly at u = s
    let v0 = frac * h;
    if v0 > 0.0 {
        acc += (s_val - vals[cell]) * v0.powf(-alpha) / (1.0 - alpha);
    }
    let s_minus_a = (cell as f64 + frac) * h;
    s_val * s_minus_a.powf(-alpha) + alpha * acc
}

/// `D^{1-alpha}_{t-} w_{t-}(s)` (real-valued convention) by product
/// integration; `t` must be a grid node and `s < t`.
pub fn frac_deriv_right(omega: &SamplePath, alpha: FractionalOrder, t: f64, s: f64) -> Result<f64> {
    let grid = omega.grid();
    let t_idx = grid.index_of(t)?;
    let (cell, frac) = locate(grid, s)?;
    let (cell, frac) = if frac == 1.0 { (cell + 1, 0.0) } else { (cell, frac) };
    if cell >= t_idx {
        return Err(Error::invalid("s", format!("needs s < t, got s = {s}, t = {t}")));
    }
    let v = dminus_scalar(omega.values(), grid.h(), cell, frac, t_idx, alpha.get())
        / gamma(alpha.get());
    if !v.is_finite() {
        return Err(Error::invalid("omega", "right-sided derivative is not finite"));
    }
    Ok(v)
}

/// Unnormalized `w_{t-}(s)(t-s)^{alpha-1} + (1-alpha) Int_s^t (w(s)-w(u))(u-s)^{alpha-2} du`;
/// `s` sits in cell `cell` at fraction `frac in [0, 1)`, `t` is node `t_idx`.
fn dminus_scalar(vals: &[f64], h: f64, cell: usize, frac: f64, t_idx: usize, alpha: f64) -> f64 {
    let s_val = vals[cell] + frac * (vals[cell + 1] - vals[cell]);
    // piece adjacent to s: w(s) - w(u) vanishes linearly at u = s
    let w1 = (1.0 - frac) * h;
    let mut acc = (s_val - vals[cell + 1]) * w1.powf(alpha - 1.0) / alpha;
    for k in cell + 1..t_idx {
        let p0 = s_val - vals[k]; // at w_lo = u_k - s
        let p1 = s_val - vals[k + 1]; // at w_hi
        let w_lo = ((k - cell) as f64 - frac) * h;
        let w_hi = w_lo + h;
        let d1 = (p1 - p0) / h;
        let d0 = p0 - d1 * w_lo;
        acc += d0 * (w_lo.powf(alpha - 1.0) - w_hi.powf(alpha - 1.0)) / (1.0 - alpha)
            + d1 * (w_hi.powf(alpha) - w_lo.powf(alpha)) / alpha;
    }
    let t_minus_s = ((t_idx - cell) as f64 - frac) * h;
    (s_val - vals[t_idx]) * t_minus_s.powf(alpha - 1.0) + (1.0 - alpha) * acc
}

/// Shared-node bookkeeping for an integrand/driver pair over `[a, b]`.
struct CommonRange {
    f_start: usize,
    o_start: usize,
    cells: usize,
}

fn common_range(f: &GridFunction, omega: &SamplePath, a: f64, b: f64) -> Result<CommonRange> {
    if !(a < b) {
        return Err(Error::invalid("bounds", format!("needs a < b, got [{a}, {b}]")));
    }
    if !f.grid().same_step(omega.grid()) {
        return Err(Error::GridMismatch {
            message: "integrand and driver must share the grid step".into(),
        });
    }
    let f_start = f.grid().index_of(a)?;
    let f_end = f.grid().index_of(b)?;
    let o_start = omega.grid().index_of(a)?;
    let o_end = omega.grid().index_of(b)?;
    if f_end - f_start != o_end - o_start {
        return Err(Error::GridMismatch { message: "inconsistent node ranges over [a, b]".into() });
    }
    Ok(CommonRange { f_start, o_start, cells: f_end - f_start })
}

/// Pathwise integral `Int_a^b f dw`, one value per component of `f`.
pub fn young_integral(
    f: &GridFunction,
    omega: &SamplePath,
    a: f64,
    b: f64,
    alpha: FractionalOrder,
    method: IntegralMethod,
) -> Result<Vec<f64>> {
    let range = common_range(f, omega, a, b)?;
    match method {
        IntegralMethod::YoungSums => Ok(young_sums(f, omega, &range)),
        IntegralMethod::FractionalFormula => Ok(fractional_formula(f, omega, &range, alpha.get())),
    }
}

/// Evaluate both routes and reject results that disagree beyond `tolerance`
/// (component-wise, relative to the larger magnitude).
pub fn young_integral_cross_validated(
    f: &GridFunction,
    omega: &SamplePath,
    a: f64,
    b: f64,
    alpha: FractionalOrder,
    tolerance: f64,
) -> Result<Vec<f64>> {
    let formula = young_integral(f, omega, a, b, alpha, IntegralMethod::FractionalFormula)?;
    let sums = young_integral(f, omega, a, b, alpha, IntegralMethod::YoungSums)?;
    for (&x, &y) in formula.iter().zip(&sums) {
        let scale = x.abs().max(y.abs()).max(1e-12);
        if (x - y).abs() > tolerance * scale {
            return Err(Error::MethodDisagreement { formula: x, sums: y, tolerance });
        }
    }
    Ok(formula)
}

fn young_sums(f: &GridFunction, omega: &SamplePath, range: &CommonRange) -> Vec<f64> {
    let dim = f.dim();
    let mut acc = vec![0.0; dim];
    for i in 0..range.cells {
        let dw = omega.value(range.o_start + i + 1) - omega.value(range.o_start + i);
        let fv = f.node_value(range.f_start + i);
        for c in 0..dim {
            acc[c] += fv[c] * dw;
        }
    }
    acc
}

/// Cumulative trapezoid Riemann-Stieltjes sums: the exact pathwise integral
/// of the piecewise-linear pair, at every node of `[a, b]`.
fn rs_trapezoid_cumulative(
    f: &GridFunction,
    omega: &SamplePath,
    range: &CommonRange,
) -> Vec<Vec<f64>> {
    let dim = f.dim();
    let mut out = Vec::with_capacity(range.cells + 1);
    let mut acc = vec![0.0; dim];
    out.push(acc.clone());
    for i in 0..range.cells {
        let dw = omega.value(range.o_start + i + 1) - omega.value(range.o_start + i);
        let f0 = f.node_value(range.f_start + i);
        let f1 = f.node_value(range.f_start + i + 1);
        for c in 0..dim {
            acc[c] += 0.5 * (f0[c] + f1[c]) * dw;
        }
        out.push(acc.clone());
    }
    out
}

fn fractional_formula(f: &GridFunction, omega: &SamplePath, range: &CommonRange, alpha: f64) -> Vec<f64> {
    let n = range.cells;
    let h = f.grid().h();
    let dim = f.dim();
    let inv_g1ma = 1.0 / gamma(1.0 - alpha);
    let inv_ga = 1.0 / gamma(alpha);

    // component slices of f and the driver over [a, b]
    let comps: Vec<Vec<f64>> = (0..dim)
        .map(|c| (range.f_start..range.f_start + n + 1).map(|k| f.node_value(k)[c]).collect())
        .collect();
    let w: Vec<f64> =
        omega.values()[range.o_start..range.o_start + n + 1].to_vec();

    let mut acc = vec![0.0; dim];
    for j in 0..OUTER_REFINE {
        let frac = (2 * j + 1) as f64 / (2 * OUTER_REFINE) as f64;
        // power tables on the two shifted lattices
        let tp_ma: Vec<f64> = (0..=n).map(|m| ((m as f64 + frac) * h).powf(-alpha)).collect();
        let tp_1ma: Vec<f64> = (0..=n).map(|m| ((m as f64 + frac) * h).powf(1.0 - alpha)).collect();
        let tm_am1: Vec<f64> =
            (0..=n).map(|m| if m == 0 { 0.0 } else { ((m as f64 - frac) * h).powf(alpha - 1.0) }).collect();
        let tm_a: Vec<f64> =
            (0..=n).map(|m| if m == 0 { 0.0 } else { ((m as f64 - frac) * h).powf(alpha) }).collect();

        // Exact power weight for the cell carrying the (s-a)^{-alpha}
        // singularity: integrate the kernel over the sub-cell and divide by
        // its midpoint value.
        let sub = h / OUTER_REFINE as f64;
        let jf = j as f64;
        let first_cell_weight = sub * (jf + 0.5).powf(alpha)
            * ((jf + 1.0).powf(1.0 - alpha) - jf.powf(1.0 - alpha))
            / (1.0 - alpha);

        let contributions = exec::map_indexed(n, |cell| {
            let dm = dminus_tab(&w, h, cell, frac, n, alpha, &tm_am1, &tm_a) * inv_ga;
            let weight = if cell == 0 { first_cell_weight } else { sub };
            let mut local = vec![0.0; dim];
            for c in 0..dim {
                let dp = dplus_tab(&comps[c], h, cell, frac, alpha, &tp_ma, &tp_1ma) * inv_g1ma;
                local[c] = weight * dp * dm;
            }
            local
        });
        for local in contributions {
            for c in 0..dim {
                acc[c] += local[c];
            }
        }
    }
    // sign fixed by the f == 1 anchor
    acc.iter().map(|v| -v).collect()
}

fn dplus_tab(
    vals: &[f64],
    h: f64,
    cell: usize,
    frac: f64,
    alpha: f64,
    tp_ma: &[f64],
    tp_1ma: &[f64],
) -> f64 {
    let s_val = vals[cell] + frac * (vals[cell + 1] - vals[cell]);
    let mut acc = 0.0;
    for k in 0..cell {
        let m = cell - k;
        let g0 = s_val - vals[k];
        let g1 = s_val - vals[k + 1];
        let v_hi = (m as f64 + frac) * h;
        let c1 = (g0 - g1) / h;
        let c0 = g0 - c1 * v_hi;
        acc += c0 * (tp_ma[m - 1] - tp_ma[m]) / alpha
            + c1 * (tp_1ma[m] - tp_1ma[m - 1]) / (1.0 - alpha);
    }
    acc += (s_val - vals[cell]) * tp_ma[0] / (1.0 - alpha);
    s_val * tp_ma[cell] + alpha * acc
}

fn dminus_tab(
    vals: &[f64],
    h: f64,
    cell: usize,
    frac: f64,
    t_idx: usize,
    alpha: f64,
    tm_am1: &[f64],
    tm_a: &[f64],
) -> f64 {
    let s_val = vals[cell] + frac * (vals[cell + 1] - vals[cell]);
    let mut acc = (s_val - vals[cell + 1]) * tm_am1[1] / alpha;
    for k in cell + 1..t_idx {
        let m = k - cell;
        let p0 = s_val - vals[k];
        let p1 = s_val - vals[k + 1];
        let w_lo = (m as f64 - frac) * h;
        let d1 = (p1 - p0) / h;
        let d0 = p0 - d1 * w_lo;
        acc += d0 * (tm_am1[m] - tm_am1[m + 1]) / (1.0 - alpha)
            + d1 * (tm_a[m + 1] - tm_a[m]) / alpha;
    }
    (s_val - vals[t_idx]) * tm_am1[t_idx - cell] + (1.0 - alpha) * acc
}

fn check_policy(steps: usize, policy: PairScanPolicy) -> Result<usize> {
    match policy {
        PairScanPolicy::Exact => {
            if steps > EXACT_PAIR_CAP {
                Err(Error::PairBudgetExceeded { nodes: steps + 1, max: EXACT_PAIR_CAP + 1 })
            } else {
                Ok(1)
            }
        }
        PairScanPolicy::Strided(k) => Ok(k.max(1)),
    }
}

/// `Lambda_alpha(w) = sup_{s<t} |D^{1-alpha}_{t-} w_{t-}(s)| / Gamma(1-alpha)`
/// over node pairs. With a strided policy the left index is restricted to
/// multiples of the stride (the right index still runs over all nodes), so
/// the result is a lower bound for the full scan.
pub fn lambda_alpha(omega: &SamplePath, alpha: FractionalOrder, policy: PairScanPolicy) -> Result<f64> {
    let n = omega.grid().steps();
    let stride = check_policy(n, policy)?;
    let al = alpha.get();
    let h = omega.grid().h();
    let inv_ga = 1.0 / gamma(al);
    let t_am1: Vec<f64> = (0..=n).map(|m| if m == 0 { 0.0 } else { (m as f64 * h).powf(al - 1.0) }).collect();
    let t_a: Vec<f64> = (0..=n).map(|m| (m as f64 * h).powf(al)).collect();
    let vals = omega.values();

    let starts = (n - 1) / stride + 1;
    let sup = exec::sup_indexed(starts, |si| {
        let s = si * stride;
        sweep_dminus_sup(vals, s, n, al, h, &t_am1, &t_a) * inv_ga
    });
    Ok(sup.max(0.0) / gamma(1.0 - al))
}

/// For fixed node `s`, sweep `t = s+1..=n` accumulating the singular
/// integral cell by cell; returns `sup_t |unnormalized D(s, t)|`.
fn sweep_dminus_sup(
    vals: &[f64],
    s: usize,
    n: usize,
    alpha: f64,
    h: f64,
    t_am1: &[f64],
    t_a: &[f64],
) -> f64 {
    let ws = vals[s];
    let mut integral = (ws - vals[s + 1]) * t_am1[1] / alpha;
    let mut best = ((ws - vals[s + 1]) * t_am1[1] + (1.0 - alpha) * integral).abs();
    for t in s + 2..=n {
        // fold in cell [t-1, t]
        let m = t - 1 - s;
        let p0 = ws - vals[t - 1];
        let p1 = ws - vals[t];
        let w_lo = m as f64 * h;
        let d1 = (p1 - p0) / h;
        let d0 = p0 - d1 * w_lo;
        integral += d0 * (t_am1[m] - t_am1[m + 1]) / (1.0 - alpha)
            + d1 * (t_a[m + 1] - t_a[m]) / alpha;
        let expr = (ws - vals[t]) * t_am1[t - s] + (1.0 - alpha) * integral;
        best = best.max(expr.abs());
    }
    best
}

/// `|f|_{alpha,1} = Int_0^T ( |f(s)|/s^alpha + Int_0^s |f(s)-f(u)|/(s-u)^{1+alpha} du ) ds`
/// by nested product integration. `f` must live on a grid starting at 0.
/// Norm differences are chord-interpolated between nodes, which slightly
/// over-estimates and keeps the integral bound one-sided.
pub fn w_alpha1_norm(f: &GridFunction, alpha: FractionalOrder) -> Result<f64> {
    if f.grid().t0().abs() > 1e-9 * (1.0 + f.grid().span()) {
        return Err(Error::invalid("f", "the integrand norm is defined on grids starting at 0"));
    }
    let n = f.grid().steps();
    let h = f.grid().h();
    let al = alpha.get();

    let pow_ma: Vec<f64> = (0..=n).map(|m| (m as f64 * h).powf(-al)).collect();
    let pow_1ma: Vec<f64> = (0..=n).map(|m| (m as f64 * h).powf(1.0 - al)).collect();
    let pow_2ma: Vec<f64> = (0..=n).map(|m| (m as f64 * h).powf(2.0 - al)).collect();

    // chi(s_j) = Int_0^{s_j} |f(s_j) - f(u)| (s_j - u)^{-1-alpha} du
    let chi = exec::map_indexed(n + 1, |j| {
        if j == 0 {
            return 0.0;
        }
        let fj = f.node_value(j);
        let mut acc = 0.0;
        for k in 0..j - 1 {
            let m = j - k; // v_hi = m h at u_k
            let g0 = diff_norm(fj, f.node_value(k));
            let g1 = diff_norm(fj, f.node_value(k + 1));
            let c1 = (g0 - g1) / h;
            let c0 = g0 - c1 * (m as f64 * h);
            acc += c0 * (pow_ma[m - 1] - pow_ma[m]) / al
                + c1 * (pow_1ma[m] - pow_1ma[m - 1]) / (1.0 - al);
        }
        // cell adjacent to s_j: |f(s_j) - f(u)| vanishes (chord) at u = s_j
        acc += diff_norm(fj, f.node_value(j - 1)) * pow_ma[1] / (1.0 - al);
        acc
    });

    // Int_0^T |f(s)| s^{-alpha} ds with |f| chord-interpolated per cell
    let mut first = 0.0;
    for k in 0..n {
        let a0 = f.node_norm(k);
        let a1 = f.node_norm(k + 1);
        let c1 = (a1 - a0) / h;
        let c0 = a0 - c1 * (k as f64 * h);
        first += c0 * (pow_1ma[k + 1] - pow_1ma[k]) / (1.0 - al)
            + c1 * (pow_2ma[k + 1] - pow_2ma[k]) / (2.0 - al);
    }

    // trapezoid over the continuous outer factor chi
    let mut second = 0.0;
    for k in 0..n {
        second += 0.5 * h * (chi[k] + chi[k + 1]);
    }
    let value = first + second;
    if !value.is_finite() {
        return Err(Error::invalid("f", "integrand norm diverged"));
    }
    Ok(value)
}

/// Refinement surrogate for the divergence flag: compares the norm on the
/// full grid against the norm on the 4x-coarsened sub-grid. Growth well
/// beyond the convergent regime marks the quotient integral as suspect.
pub fn w_alpha1_refinement_diagnostic(f: &GridFunction, alpha: FractionalOrder) -> Result<(f64, f64, bool)> {
    let fine = w_alpha1_norm(f, alpha)?;
    let n = f.grid().steps();
    if n < 8 || n % 4 != 0 {
        return Ok((fine, fine, false));
    }
    let coarse_grid = Grid::new(f.grid().t0(), 4.0 * f.grid().h(), n / 4)?;
    let mut data = Vec::with_capacity((n / 4 + 1) * f.dim());
    for k in (0..=n).step_by(4) {
        data.extend_from_slice(f.node_value(k));
    }
    let coarse_f = GridFunction::new(coarse_grid, f.dim(), data)?;
    let coarse = w_alpha1_norm(&coarse_f, alpha)?;
    Ok((fine, coarse, fine > 1.25 * coarse))
}

#[inline]
fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for c in 0..a.len() {
        let d = a[c] - b[c];
        s += d * d;
    }
    s.sqrt()
}

/// `|g|_{1-alpha,infty,T}`: sup over node pairs `s < t` of
/// `|g(t)-g(s)|/(t-s)^{1-alpha} + Int_s^t |g(u)-g(s)|/(u-s)^{2-alpha} du`.
pub fn w_1malpha_inf_norm(g: &GridFunction, alpha: FractionalOrder, policy: PairScanPolicy) -> Result<f64> {
    let n = g.grid().steps();
    let stride = check_policy(n, policy)?;
    let al = alpha.get();
    let h = g.grid().h();
    let t_am1: Vec<f64> = (0..=n).map(|m| if m == 0 { 0.0 } else { (m as f64 * h).powf(al - 1.0) }).collect();
    let t_a: Vec<f64> = (0..=n).map(|m| (m as f64 * h).powf(al)).collect();

    let starts = (n - 1) / stride + 1;
    let sup = exec::sup_indexed(starts, |si| {
        let s = si * stride;
        let gs = g.node_value(s).to_vec();
        let mut integral = diff_norm(&gs, g.node_value(s + 1)) * t_am1[1] / al;
        let mut best = diff_norm(&gs, g.node_value(s + 1)) * t_am1[1] + integral;
        for t in s + 2..=n {
            let m = t - 1 - s;
            let p0 = diff_norm(&gs, g.node_value(t - 1));
            let p1 = diff_norm(&gs, g.node_value(t));
            let w_lo = m as f64 * h;
            let d1 = (p1 - p0) / h;
            let d0 = p0 - d1 * w_lo;
            integral += d0 * (t_am1[m] - t_am1[m + 1]) / (1.0 - al)
                + d1 * (t_a[m + 1] - t_a[m]) / al;
            let expr = diff_norm(&gs, g.node_value(t)) * t_am1[t - s] + integral;
            best = best.max(expr);
        }
        best
    });
    Ok(sup.max(0.0))
}

/// All three driver/integrand norms at once.
pub fn norm_report(
    f: &GridFunction,
    omega: &SamplePath,
    alpha: FractionalOrder,
    policy: PairScanPolicy,
) -> Result<NormReport> {
    Ok(NormReport {
        w_alpha1: w_alpha1_norm(f, alpha)?,
        w_1ma_inf: w_1malpha_inf_norm(&omega.as_grid_function(), alpha, policy)?,
        lambda_alpha: lambda_alpha(omega, alpha, policy)?,
    })
}

/// Outcome of the two-sided integral estimate
/// `|Int_0^t f dw| <= Lambda_alpha(w) |f|_{alpha,1} <= |w|_{1-alpha,infty,T} |f|_{alpha,1} / (Gamma(1-alpha) Gamma(alpha))`.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    /// `max_t |Int_0^t f dw|` (exact pathwise integral of the
    /// piecewise-linear pair, i.e. cumulative trapezoid sums).
    pub integral_sup: f64,
    pub lambda_bound: f64,
    pub weyl_bound: f64,
    pub first_slack: f64,
    pub second_slack: f64,
    pub first_holds: bool,
    pub second_holds: bool,
}

/// Evaluate the integral estimate chain; violations are reported, not raised.
pub fn integral_bound_check(
    f: &GridFunction,
    omega: &SamplePath,
    alpha: FractionalOrder,
    policy: PairScanPolicy,
) -> Result<BoundReport> {
    let a = f.grid().t0().max(omega.grid().t0());
    let b = f.grid().end().min(omega.grid().end());
    let range = common_range(f, omega, a, b)?;
    let cum = rs_trapezoid_cumulative(f, omega, &range);
    let integral_sup = cum
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let norms = norm_report(f, omega, alpha, policy)?;
    let lambda_bound = norms.lambda_alpha * norms.w_alpha1;
    let weyl_bound =
        norms.w_1ma_inf * norms.w_alpha1 / (gamma(1.0 - alpha.get()) * gamma(alpha.get()));
    let first_slack = lambda_bound - integral_sup;
    let second_slack = weyl_bound - lambda_bound;
    Ok(BoundReport {
        integral_sup,
        lambda_bound,
        weyl_bound,
        first_slack,
        second_slack,
        first_holds: first_slack >= -1e-12 * (1.0 + lambda_bound.abs()),
        second_holds: second_slack >= -1e-12 * (1.0 + weyl_bound.abs()),
    })
}

/// Residual of the shift identity
/// `Int_a^b f dw = Int_{a-c}^{b-c} f(.+c) d(theta_c w)`, both sides evaluated
/// with left-endpoint sums. With grid-aligned data the right side is a
/// re-indexing of the left, so the residual is pure rounding.
pub fn shift_integral_residual(
    f: &GridFunction,
    omega: &SamplePath,
    a: f64,
    b: f64,
    c: f64,
) -> Result<f64> {
    let range = common_range(f, omega, a, b)?;
    let lhs = young_sums(f, omega, &range);

    let shifted = wiener_shift(omega, c)?;
    let k = f.grid().aligned_offset(c)?;
    let f_lo = f.grid().index_of(a)?;
    if f_lo < k {
        return Err(Error::OutOfDomain { t: a - c, lo: f.grid().t0(), hi: f.grid().end() });
    }
    // f(. + c) on the shifted clock: drop the first k nodes and re-base
    let hi = f.grid().steps();
    let translated = f.section(k, hi)?.rebase(f.grid().node(k) - c)?;
    let range_shifted = common_range(&translated, &shifted, a - c, b - c)?;
    let rhs = young_sums(&translated, &shifted, &range_shifted);

    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}
