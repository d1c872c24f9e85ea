//! The three self-guided smoothing filters.

mod bilateral;
mod guided;
mod tv;

use serde::{Deserialize, Serialize};

pub use bilateral::{bilateral_weight, Bilateral, BilateralParams};
pub use guided::{mean_filter, mean_filter_with, BoundaryMode, Guided, GuidedParams};
pub use tv::{tv_coefficients, TotalVariation, TvParams};

use crate::error::Result;
use crate::operator::Filter;

/// Serializable filter selection with defaults matching the reference
/// experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FilterSpec {
    Bilateral {
        #[serde(default = "default_window")]
        window: usize,
        #[serde(default = "default_sigma_d")]
        sigma_d: f64,
        #[serde(default = "default_sigma_r")]
        sigma_r: f64,
    },
    Guided {
        #[serde(default = "default_window")]
        window: usize,
        #[serde(default = "default_guided_eps")]
        epsilon: f64,
        #[serde(default)]
        boundary: BoundaryMode,
    },
    Tv {
        #[serde(default = "default_tv_eps")]
        epsilon: f64,
    },
}

fn default_window() -> usize {
    5
}
fn default_sigma_d() -> f64 {
    1.0
}
fn default_sigma_r() -> f64 {
    0.2
}
fn default_guided_eps() -> f64 {
    1e-4
}
fn default_tv_eps() -> f64 {
    1e-3
}

impl FilterSpec {
    pub fn bilateral() -> Self {
        FilterSpec::Bilateral {
            window: default_window(),
            sigma_d: default_sigma_d(),
            sigma_r: default_sigma_r(),
        }
    }

    pub fn guided() -> Self {
        FilterSpec::Guided {
            window: default_window(),
            epsilon: default_guided_eps(),
            boundary: BoundaryMode::default(),
        }
    }

    pub fn tv() -> Self {
        FilterSpec::Tv {
            epsilon: default_tv_eps(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Filter + Send + Sync>> {
        Ok(match *self {
            FilterSpec::Bilateral {
                window,
                sigma_d,
                sigma_r,
            } => Box::new(Bilateral::new(BilateralParams {
                window_width: window,
                sigma_d,
                sigma_r,
            })?),
            FilterSpec::Guided {
                window,
                epsilon,
                boundary,
            } => Box::new(Guided::new(GuidedParams {
                window_width: window,
                epsilon,
                boundary,
            })?),
            FilterSpec::Tv { epsilon } => Box::new(TotalVariation::new(TvParams { epsilon })?),
        })
    }
}
