//! The solution cocycle: evaluation, the cocycle identity, a time-continuity
//! modulus estimate, and the rough-history counterexample.
//!
//! For a solved system the map `phi(t, w, eta) = X_t(., w, eta)` sends an
//! initial segment to the history window at time `t`. On exact arithmetic it
//! satisfies `phi(t + tau, w, eta) = phi(t, theta_tau w, phi(tau, w, eta))`;
//! numerically the identity holds up to discretization error, which the
//! residual report quantifies. The counterexample pits a rough initial
//! history (`|s|^{1-alpha}`, which is Hölder but loses no oscillation as the
//! window shrinks) against a Lipschitz one: the first keeps its modulus of
//! continuity in `t` bounded away from zero while the second decays.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fbm::{wiener_shift, Hurst, SamplePath};
use crate::frac::FractionalOrder;
use crate::grid::{Grid, GridFunction};
use crate::holder::{holder_norm, windowed_seminorm, HolderExponent};
use crate::sdde::{segment_at, solve, DelaySystem, Segment, Solution, SolverConfig};

/// Cocycle-identity residual at one `(t, tau)` pair.
#[derive(Debug, Clone, Copy)]
pub struct CocycleReport {
    pub t: f64,
    pub tau: f64,
    pub h: f64,
    /// `|phi(t+tau, w, eta) - phi(t, theta_tau w, phi(tau, w, eta))|_{1-alpha}`
    pub residual: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

/// Two sides of the time-continuity estimate.
#[derive(Debug, Clone, Copy)]
pub struct ContinuityReport {
    pub t: f64,
    pub tau: f64,
    /// `|phi(t) - phi(tau)|_{1-alpha}`
    pub lhs: f64,
    /// `2 |X|_{1-alpha, sqrt|t-tau|} + (2 |t-tau|^{(1-alpha)/2} + |t-tau|^{1-alpha}) |X|_{1-alpha}`
    pub rhs: f64,
    pub holds: bool,
}

/// Moduli of the rough-vs-smooth history dichotomy.
#[derive(Debug, Clone, Copy)]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub t: f64,
    pub tau: f64,
    /// Modulus for the history `|s|^{1-alpha}`; stays `>= 1` however close
    /// `t` and `tau` get.
    pub rough_modulus: f64,
    /// Modulus for the Lipschitz history `s -> s`; decays with `|t - tau|`.
    pub smooth_modulus: f64,
    /// Full Hölder norm of the rough history (analytically 2).
    pub rough_history_norm: f64,
    pub rough_exceeds_one: bool,
}

type CacheKey = (u64, u64, usize);

/// Evaluates `phi(t, w, eta)` through the fixed-point solver, caching one
/// solution per `(driver, history, horizon)` triple. Re-solving identical
/// inputs reproduces cached entries bitwise, so concurrent readers and the
/// guarded writer see one consistent value per key.
pub struct CocycleEvaluator {
    sys: DelaySystem,
    cfg: SolverConfig,
    cache: Mutex<HashMap<CacheKey, Arc<Solution>>>,
}

fn fnv_bits(values: &[f64], mut acc: u64) -> u64 {
    for v in values {
        acc ^= v.to_bits();
        acc = acc.wrapping_mul(0x100_0000_01b3);
    }
    acc
}

impl CocycleEvaluator {
    pub fn new(sys: DelaySystem, cfg: SolverConfig) -> Self {
        CocycleEvaluator { sys, cfg, cache: Mutex::new(HashMap::new()) }
    }

    pub fn system(&self) -> &DelaySystem {
        &self.sys
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn beta(&self) -> HolderExponent {
        HolderExponent::new(1.0 - self.cfg.alpha.get()).expect("1 - alpha lies in (1/2, 1)")
    }

    /// Solve on `[0, node(horizon)]`, reusing the cache.
    fn solve_to(&self, horizon: usize, omega: &SamplePath, eta: &GridFunction) -> Result<Arc<Solution>> {
        let key = (
            fnv_bits(omega.values(), omega.seed() ^ 0xcbf2_9ce4_8422_2325),
            fnv_bits(eta.data(), 0xcbf2_9ce4_8422_2325),
            horizon,
        );
        if let Some(hit) = self.cache.lock().unwrap().get(&key).cloned() {
            return Ok(hit);
        }
        let restricted = SamplePath::from_values(
            Grid::new(0.0, omega.grid().h(), horizon)?,
            omega.values()[..=horizon].to_vec(),
            omega.seed(),
            omega.hurst(),
        )?;
        let sol = Arc::new(solve(&self.sys, eta, &restricted, &self.cfg)?);
        self.cache.lock().unwrap().insert(key, Arc::clone(&sol));
        Ok(sol)
    }

    /// `phi(t, w, eta)`: the history window of the solution at time `t`.
    pub fn evaluate(&self, t: f64, omega: &SamplePath, eta: &GridFunction) -> Result<Segment> {
        let idx = omega.grid().index_of(t)?;
        if idx == 0 {
            return Ok(segment_at(&crate::sdde::constant_extension(eta, omega)?, 0.0)?);
        }
        let sol = self.solve_to(idx, omega, eta)?;
        segment_at(&sol.path, t)
    }

    /// Residual of the cocycle identity at `(t, tau)`: the left side solves
    /// over `[0, t+tau]`; the right side solves over `[0, t]` driven by the
    /// shifted path from the initial segment `phi(tau, w, eta)`, reused
    /// without re-interpolation.
    pub fn residual(&self, t: f64, tau: f64, omega: &SamplePath, eta: &GridFunction) -> Result<CocycleReport> {
        let grid = omega.grid();
        grid.index_of(t)?;
        grid.index_of(tau)?;
        let lhs = self.evaluate(t + tau, omega, eta)?;

        let at_tau = self.evaluate(tau, omega, eta)?;
        let shifted = if tau == 0.0 { omega.clone() } else { wiener_shift(omega, tau)? };
        let rhs = self.evaluate(t, &shifted, at_tau.values())?;

        let beta = self.beta();
        let diff = lhs.values().sub(rhs.values())?;
        Ok(CocycleReport {
            t,
            tau,
            h: grid.h(),
            residual: holder_norm(&diff, beta),
            lhs_norm: holder_norm(lhs.values(), beta),
            rhs_norm: holder_norm(rhs.values(), beta),
        })
    }

    /// Evaluate both sides of the time-continuity estimate on one solved
    /// path over the full driver horizon.
    pub fn continuity_check(
        &self,
        t: f64,
        tau: f64,
        omega: &SamplePath,
        eta: &GridFunction,
    ) -> Result<ContinuityReport> {
        let n = omega.grid().steps();
        let sol = self.solve_to(n, omega, eta)?;
        let seg_t = segment_at(&sol.path, t)?;
        let seg_tau = segment_at(&sol.path, tau)?;
        let beta = self.beta();
        let lhs = holder_norm(&seg_t.values().sub(seg_tau.values())?, beta);

        let gap = (t - tau).abs();
        let x_norm = holder_norm(&sol.path, beta);
        let windowed = windowed_seminorm(&sol.path, beta, gap.sqrt()).value;
        let b = beta.get();
        let rhs = 2.0 * windowed + (2.0 * gap.powf(0.5 * b) + gap.powf(b)) * x_norm;
        Ok(ContinuityReport { t, tau, lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) })
    }
}

/// Rough-vs-smooth history dichotomy for the trivial system `dX = 0` with
/// delay 1: the history `|s|^{1-alpha}` keeps the segment modulus at 1 for
/// every `0 < tau < t <= 1`, while a Lipschitz history loses it as
/// `t -> tau`. The grid must contain `t`, `tau` (hence the extremal pair
/// `(-t, -tau)` and `t - tau`) as nodes.
pub fn modulus_counterexample(
    alpha: FractionalOrder,
    t: f64,
    tau: f64,
    steps_per_unit: usize,
) -> Result<CounterexampleReport> {
    if !(0.0 < tau && tau < t && t <= 1.0) {
        return Err(Error::invalid("times", format!("need 0 < tau < t <= 1, got t={t}, tau={tau}")));
    }
    let n = steps_per_unit;
    let grid = Grid::over_horizon(1.0, n)?;
    grid.index_of(t)?;
    grid.index_of(tau)?;

    // noiseless driver; the Hurst index only has to keep alpha admissible
    let hurst = Hurst::new(1.0 - 0.5 * alpha.get())?;
    let omega = SamplePath::zero(grid, hurst)?;
    let history_grid = Grid::new(-1.0, grid.h(), n)?;
    let beta = HolderExponent::new(1.0 - alpha.get())?;

    let sys = DelaySystem::zero(1.0, 1)?;
    let cfg = SolverConfig::with_defaults(alpha, grid.h());
    let evaluator = CocycleEvaluator::new(sys, cfg);

    let rough_eta =
        GridFunction::from_scalar_fn(history_grid, |s| s.abs().powf(1.0 - alpha.get()))?;
    let rough_history_norm = holder_norm(&rough_eta, beta);
    let seg_t = evaluator.evaluate(t, &omega, &rough_eta)?;
    let seg_tau = evaluator.evaluate(tau, &omega, &rough_eta)?;
    let rough_modulus = holder_norm(&seg_t.values().sub(seg_tau.values())?, beta);

    let smooth_eta = GridFunction::from_scalar_fn(history_grid, |s| s)?;
    let seg_t = evaluator.evaluate(t, &omega, &smooth_eta)?;
    let seg_tau = evaluator.evaluate(tau, &omega, &smooth_eta)?;
    let smooth_modulus = holder_norm(&seg_t.values().sub(seg_tau.values())?, beta);

    Ok(CounterexampleReport {
        alpha: alpha.get(),
        t,
        tau,
        rough_modulus,
        smooth_modulus,
        rough_history_norm,
        rough_exceeds_one: rough_modulus >= 1.0 - 1e-10,
    })
}
