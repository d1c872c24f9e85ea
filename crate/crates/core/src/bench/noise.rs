//! Seeded additive Gaussian noise.
//!
//! Samples come from ChaCha20 seeded with `seed_from_u64(seed)` and are
//! turned into normal variates by the Ziggurat method of `rand_distr`, one
//! per pixel in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub mean: f64,
    pub variance: f64,
    #[serde(default)]
    pub seed: u64,
    /// Clamp the result to `[0, 1]`.
    #[serde(default = "default_clip")]
    pub clip: bool,
}

fn default_clip() -> bool {
    true
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            mean: 0.0,
            variance: 0.01,
            seed: 0,
            clip: true,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::param("mean", "must be finite"));
        }
        if !(self.variance.is_finite() && self.variance >= 0.0) {
            return Err(Error::param(
                "variance",
                format!("must be >= 0, got {}", self.variance),
            ));
        }
        Ok(())
    }
}

pub fn add_noise(x: &Signal, spec: &NoiseSpec) -> Result<Signal> {
    spec.validate()?;
    let mut values = x.values().to_vec();
    if spec.variance > 0.0 {
        let normal = Normal::new(spec.mean, spec.variance.sqrt())
            .map_err(|e| Error::param("variance", e.to_string()))?;
        let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
        for v in &mut values {
            *v += normal.sample(&mut rng);
        }
    } else {
        for v in &mut values {
            *v += spec.mean;
        }
    }
    if spec.clip {
        for v in &mut values {
            *v = v.clamp(0.0, 1.0);
        }
    }
    x.with_values(values)
}
