//! Restarted preconditioned conjugate gradient acceleration.
//!
//! Each restart freezes the operator at the current iterate `y` and runs
//! `k_max - 1` PCG steps on `L(y) u = 0` with preconditioner `D(y)`:
//!
//! ```text
//! r = W y - D y
//! for k = 1 .. k_max-1:
//!     s = D^-1 r;  gamma = s.r
//!     p = s                          (k = 1)
//!     p = s + (gamma / gamma_old) p  (k > 1)
//!     q = D p - W p;  alpha = gamma / p.q
//!     y += alpha p;  r -= alpha q
//! ```
//!
//! A restart costs `k_max` basic-filter calls: one for the residual and one
//! per `q`.

use crate::error::{Error, Result};
use crate::operator::{BoundFilter, Filter};
use crate::signal::{dot_unchecked, Signal};

use super::{ensure_finite, DenoiseReport, Tracker};

pub const DEFAULT_GAMMA_TOL: f64 = 1e-14;
pub const DEFAULT_CURVATURE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgConfig {
    /// Restart length in basic-filter calls. At least 2.
    pub k_max: usize,
    /// Number of restarts.
    pub l_max: usize,
    /// Stop a restart when `gamma <= gamma_tol * gamma_first`, where
    /// `gamma_first` is the first `gamma` of the whole run.
    pub gamma_tol: f64,
    /// Stop a restart when `p.q <= curvature_tol * |p|^2`.
    pub curvature_tol: f64,
}

impl PcgConfig {
    pub fn new(k_max: usize, l_max: usize) -> Self {
        Self {
            k_max,
            l_max,
            gamma_tol: DEFAULT_GAMMA_TOL,
            curvature_tol: DEFAULT_CURVATURE_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 2 {
            return Err(Error::param(
                "k_max",
                format!("PCG restart length must be at least 2, got {}", self.k_max),
            ));
        }
        if self.l_max == 0 {
            return Err(Error::param("l_max", "must be at least 1"));
        }
        if !(self.gamma_tol >= 0.0 && self.curvature_tol >= 0.0) {
            return Err(Error::param(
                "tolerance",
                "breakdown tolerances must be >= 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleStop {
    /// All `k_max - 1` steps ran.
    Completed,
    /// `gamma` fell to the breakdown threshold (includes a zero residual).
    Gamma,
    /// `p.q` was not safely positive.
    Curvature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleOutcome {
    /// Basic-filter calls made in this restart.
    pub calls: usize,
    /// Steps that updated the iterate.
    pub updates: usize,
    /// `|r|` after the residual evaluation and after every update.
    pub residual_norms: Vec<f64>,
    /// First `gamma` computed in this restart.
    pub first_gamma: Option<f64>,
    pub stop: CycleStop,
}

/// One PCG restart with the operator frozen.
///
/// `gamma_ref` scales the `gamma` breakdown test; when `None` the first
/// `gamma` of this cycle is used. `on_call` runs after every basic-filter call
/// with the iterate as it stands after that call.
pub fn pcg_cycle(
    op: &dyn BoundFilter,
    y: &mut [f64],
    config: &PcgConfig,
    gamma_ref: Option<f64>,
    mut on_call: impl FnMut(&[f64]),
) -> Result<CycleOutcome> {
    assert_eq!(y.len(), op.len());
    let n = y.len();
    let d = op.degree();

    let wy = op.apply_w(y);
    let mut r: Vec<f64> = wy
        .iter()
        .zip(d)
        .zip(y.iter())
        .map(|((w, d), y)| w - d * y)
        .collect();
    let mut calls = 1;
    on_call(y);

    let mut outcome = CycleOutcome {
        calls,
        updates: 0,
        residual_norms: vec![dot_unchecked(&r, &r).sqrt()],
        first_gamma: None,
        stop: CycleStop::Completed,
    };

    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut wp = vec![0.0; n];
    let mut gamma_old = 0.0;
    for k in 1..config.k_max {
        for ((s, r), d) in s.iter_mut().zip(&r).zip(d) {
            *s = r / d;
        }
        let gamma = dot_unchecked(&s, &r);
        if outcome.first_gamma.is_none() {
            outcome.first_gamma = Some(gamma);
        }
        let threshold = config.gamma_tol * gamma_ref.or(outcome.first_gamma).unwrap_or(0.0);
        if gamma.is_nan() || gamma <= 0.0 || gamma <= threshold {
            outcome.stop = CycleStop::Gamma;
            break;
        }

        if k == 1 {
            p.copy_from_slice(&s);
        } else {
            let beta = gamma / gamma_old;
            for (p, s) in p.iter_mut().zip(&s) {
                *p = s + beta * *p;
            }
        }

        op.apply_w_into(&p, &mut wp);
        calls += 1;
        // q = D p - W p, stored in wp
        for ((q, d), p) in wp.iter_mut().zip(d).zip(&p) {
            *q = d * p - *q;
        }
        let curvature = dot_unchecked(&p, &wp);
        if curvature.is_nan() || curvature <= config.curvature_tol * dot_unchecked(&p, &p) {
            on_call(y);
            outcome.stop = CycleStop::Curvature;
            break;
        }

        let alpha = gamma / curvature;
        for ((y, r), (p, q)) in y.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&wp)) {
            *y += alpha * p;
            *r -= alpha * q;
        }
        on_call(y);
        ensure_finite(y, "pcg", || format!("step {k}"))?;
        outcome.updates += 1;
        outcome.residual_norms.push(dot_unchecked(&r, &r).sqrt());
        gamma_old = gamma;
    }
    outcome.calls = calls;
    Ok(outcome)
}

/// Restarted PCG acceleration of the self-guided filter.
///
/// The guidance is re-evaluated at the head of every restart, so the
/// residual always comes from the current iterate. A breakdown ends the
/// current restart early; later restarts still run.
pub fn run_pcg(
    filter: &dyn Filter,
    x0: &Signal,
    config: &PcgConfig,
    reference: Option<&Signal>,
) -> Result<DenoiseReport> {
    config.validate()?;
    let mut tracker = Tracker::new(x0, reference)?;
    let mut y = x0.values().to_vec();
    let mut gamma_ref = None;
    for l in 1..=config.l_max {
        let guidance = x0.with_values(y.clone())?;
        let bound = filter.bind(&guidance)?;
        let outcome = pcg_cycle(bound.as_ref(), &mut y, config, gamma_ref, |cur| {
            tracker.call(cur)
        })
        .map_err(|e| match e {
            Error::Numeric { driver, location } => Error::Numeric {
                driver,
                location: format!("restart {l}, {location}"),
            },
            other => other,
        })?;
        gamma_ref = gamma_ref.or(outcome.first_gamma);
    }
    Ok(tracker.finish(x0.with_values(y)?))
}
