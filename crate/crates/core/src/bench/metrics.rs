//! Error metrics on `[0, 1]` intensities.

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Mean squared error over all samples.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::param("signal", "cannot compare empty signals"));
    }
    Ok(mse_unchecked(a, b))
}

fn mse_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc / a.len() as f64
}

/// Peak signal-to-noise ratio `10 log10(peak^2 / mse)` in dB.
///
/// Identical inputs give `f64::INFINITY`.
pub fn psnr(a: &[f64], b: &[f64], peak: f64) -> Result<f64> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::param("peak", format!("must be > 0, got {peak}")));
    }
    mse(a, b)?;
    Ok(psnr_unchecked(a, b, peak))
}

pub(crate) fn psnr_unchecked(a: &[f64], b: &[f64], peak: f64) -> f64 {
    let m = mse_unchecked(a, b);
    if m == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / m).log10()
    }
}

pub fn psnr_signals(a: &Signal, b: &Signal, peak: f64) -> Result<f64> {
    a.ensure_same_topology(b)?;
    psnr(a.values(), b.values(), peak)
}

/// First call count in a PSNR trace at which `target` is reached.
pub fn calls_to_reach(trace: &[(usize, f64)], target: f64) -> Option<usize> {
    trace.iter().find(|&&(_, p)| p >= target).map(|&(c, _)| c)
}

/// Highest PSNR in a trace and the call count where it occurs.
pub fn best_in_trace(trace: &[(usize, f64)]) -> Option<(usize, f64)> {
    trace.iter().copied().fold(None, |best, (c, p)| match best {
        Some((_, bp)) if bp >= p => best,
        _ => Some((c, p)),
    })
}
