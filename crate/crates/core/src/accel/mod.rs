//! Iteration drivers for self-guided filters.
//!
//! All drivers count work in basic-filter calls: one call is one
//! application of `W(g)` for some guidance `g`, whether as a full smoothing
//! step or as an operator product inside PCG.

mod nesterov;
mod pcg;
mod repeated;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use nesterov::{nesterov_momentum, run_nesterov, run_nesterov_with};
pub use pcg::{pcg_cycle, run_pcg, CycleOutcome, CycleStop, PcgConfig};
pub use repeated::run_repeated;

use crate::bench::metrics::psnr_unchecked;
use crate::error::{Error, Result};
use crate::operator::Filter;
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccelKind {
    Repeated,
    Pcg,
    Nesterov,
}

impl AccelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AccelKind::Repeated => "repeated",
            AccelKind::Pcg => "pcg",
            AccelKind::Nesterov => "nesterov",
        }
    }
}

impl std::str::FromStr for AccelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repeated" => Ok(AccelKind::Repeated),
            "pcg" => Ok(AccelKind::Pcg),
            "nesterov" => Ok(AccelKind::Nesterov),
            other => Err(Error::param("accel", format!("unknown driver `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelConfig {
    pub kind: AccelKind,
    /// Iterations for repeated/Nesterov; restart length for PCG.
    pub k_max: usize,
    /// Number of PCG restarts. Ignored by the other drivers.
    pub l_max: usize,
    pub gamma_tol: f64,
    pub curvature_tol: f64,
}

impl AccelConfig {
    pub fn repeated(iterations: usize) -> Self {
        Self {
            kind: AccelKind::Repeated,
            k_max: iterations,
            l_max: 1,
            gamma_tol: pcg::DEFAULT_GAMMA_TOL,
            curvature_tol: pcg::DEFAULT_CURVATURE_TOL,
        }
    }

    pub fn nesterov(iterations: usize) -> Self {
        Self {
            kind: AccelKind::Nesterov,
            ..Self::repeated(iterations)
        }
    }

    pub fn pcg(k_max: usize, l_max: usize) -> Self {
        Self {
            kind: AccelKind::Pcg,
            k_max,
            l_max,
            ..Self::repeated(k_max)
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            AccelKind::Repeated | AccelKind::Nesterov if self.k_max == 0 => {
                Err(Error::param("k_max", "must be at least 1"))
            }
            AccelKind::Pcg => self.pcg_config().validate(),
            _ => Ok(()),
        }
    }

    /// Basic-filter calls the run makes when no early exit happens.
    pub fn nominal_calls(&self) -> usize {
        match self.kind {
            AccelKind::Pcg => self.k_max * self.l_max,
            _ => self.k_max,
        }
    }

    pub fn pcg_config(&self) -> PcgConfig {
        PcgConfig {
            k_max: self.k_max,
            l_max: self.l_max,
            gamma_tol: self.gamma_tol,
            curvature_tol: self.curvature_tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseReport {
    pub output: Signal,
    pub basic_filter_calls: usize,
    /// `(calls, psnr)` after every basic-filter call, when a clean reference
    /// was supplied.
    pub psnr_trace: Option<Vec<(usize, f64)>>,
    pub elapsed: Duration,
}

impl DenoiseReport {
    pub fn final_psnr(&self) -> Option<f64> {
        self.psnr_trace
            .as_ref()
            .and_then(|t| t.last().map(|&(_, p)| p))
    }
}

/// Runs the configured driver.
pub fn run(
    filter: &dyn Filter,
    x0: &Signal,
    config: &AccelConfig,
    reference: Option<&Signal>,
) -> Result<DenoiseReport> {
    config.validate()?;
    match config.kind {
        AccelKind::Repeated => run_repeated(filter, x0, config.k_max, reference),
        AccelKind::Nesterov => run_nesterov(filter, x0, config.k_max, reference),
        AccelKind::Pcg => run_pcg(filter, x0, &config.pcg_config(), reference),
    }
}

/// PSNR bookkeeping shared by the drivers.
pub(crate) struct Tracker<'a> {
    reference: Option<&'a Signal>,
    trace: Vec<(usize, f64)>,
    calls: usize,
    start: Instant,
}

impl<'a> Tracker<'a> {
    pub(crate) fn new(x0: &Signal, reference: Option<&'a Signal>) -> Result<Self> {
        if let Some(r) = reference {
            x0.ensure_same_topology(r)?;
        }
        Ok(Self {
            reference,
            trace: Vec::new(),
            calls: 0,
            start: Instant::now(),
        })
    }

    /// Counts one basic-filter call and records the PSNR of the current
    /// iterate.
    pub(crate) fn call(&mut self, current: &[f64]) {
        self.calls += 1;
        if let Some(r) = self.reference {
            self.trace
                .push((self.calls, psnr_unchecked(r.values(), current, 1.0)));
        }
    }

    pub(crate) fn finish(self, output: Signal) -> DenoiseReport {
        DenoiseReport {
            output,
            basic_filter_calls: self.calls,
            psnr_trace: self.reference.map(|_| self.trace),
            elapsed: self.start.elapsed(),
        }
    }
}

pub(crate) fn ensure_finite(
    values: &[f64],
    driver: &'static str,
    location: impl FnOnce() -> String,
) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric {
            driver,
            location: location(),
        })
    }
}
