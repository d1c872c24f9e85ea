use crate::error::{Error, Result};
use crate::operator::Filter;
use crate::signal::Signal;

use super::{ensure_finite, DenoiseReport, Tracker};

/// `(k - 1) / (k + 2)` for the 1-based step `k`.
pub fn nesterov_momentum(k: usize) -> f64 {
    (k as f64 - 1.0) / (k as f64 + 2.0)
}

/// Nesterov-accelerated self-guided filtering.
///
/// Each step extrapolates `t = y + beta_k (y - y_old)` and then applies the
/// filter guided by `t` itself: `y <- D(t)^-1 W(t) t`.
pub fn run_nesterov(
    filter: &dyn Filter,
    x0: &Signal,
    k_max: usize,
    reference: Option<&Signal>,
) -> Result<DenoiseReport> {
    run_nesterov_with(filter, x0, k_max, nesterov_momentum, reference)
}

/// [`run_nesterov`] with a caller-supplied momentum schedule `beta(k)`.
pub fn run_nesterov_with(
    filter: &dyn Filter,
    x0: &Signal,
    k_max: usize,
    momentum: impl Fn(usize) -> f64,
    reference: Option<&Signal>,
) -> Result<DenoiseReport> {
    if k_max == 0 {
        return Err(Error::param("k_max", "must be at least 1"));
    }
    let mut tracker = Tracker::new(x0, reference)?;
    let mut y = x0.clone();
    let mut y_old = x0.values().to_vec();
    for k in 1..=k_max {
        let beta = momentum(k);
        let t: Vec<f64> = y
            .values()
            .iter()
            .zip(&y_old)
            .map(|(cur, old)| cur + beta * (cur - old))
            .collect();
        ensure_finite(&t, "nesterov", || format!("extrapolation at step {k}"))?;
        let t = y.with_values(t)?;
        let bound = filter.bind(&t)?;
        let next = bound.smooth(t.values());
        tracker.call(&next);
        ensure_finite(&next, "nesterov", || format!("step {k}"))?;
        y_old = std::mem::replace(&mut y, t.with_values(next)?).into_values();
    }
    Ok(tracker.finish(y))
}
