use crate::error::Result;
use crate::operator::Filter;
use crate::signal::Signal;

use super::{ensure_finite, DenoiseReport, Tracker};

/// Applies the self-guided filter `k_max` times: `x <- D(x)^-1 W(x) x`.
pub fn run_repeated(
    filter: &dyn Filter,
    x0: &Signal,
    k_max: usize,
    reference: Option<&Signal>,
) -> Result<DenoiseReport> {
    if k_max == 0 {
        return Err(crate::Error::param("k_max", "must be at least 1"));
    }
    let mut tracker = Tracker::new(x0, reference)?;
    let mut x = x0.clone();
    for k in 1..=k_max {
        let bound = filter.bind(&x)?;
        let next = bound.smooth(x.values());
        tracker.call(&next);
        ensure_finite(&next, "repeated", || format!("iteration {k}"))?;
        x = x.with_values(next)?;
    }
    Ok(tracker.finish(x))
}
