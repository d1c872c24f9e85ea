//! Guided image filter on grids.
//!
//! For a fixed guidance `g` the filter is linear in its input, so it is used
//! directly as `W(g)` with `D = I`. Whether that `W` is symmetric depends on
//! how the mean filter treats the image border:
//!
//! * [`BoundaryMode::Symmetric`] extends the image by half-sample mirror
//!   reflection and always divides by the full window area. The resulting
//!   mean-filter matrix is symmetric and doubly stochastic for odd widths,
//!   which makes `W(g)` symmetric and `I - W(g)` positive semidefinite.
//! * [`BoundaryMode::Truncated`] averages only the in-image pixels. Near the
//!   border the mean filter is not symmetric, and neither is `W(g)`.
//!
//! Even window widths follow the usual convention of one more tap after the
//! center than before it; such windows are off-center and never symmetric.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{BoundFilter, Filter};
use crate::signal::{Grid2D, Signal, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Average over the in-image part of the window.
    Truncated,
    /// Half-sample mirror padding, divide by the full window area.
    #[default]
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedParams {
    pub window_width: usize,
    pub epsilon: f64,
    pub boundary: BoundaryMode,
}

impl Default for GuidedParams {
    fn default() -> Self {
        Self {
            window_width: 5,
            epsilon: 1e-4,
            boundary: BoundaryMode::Symmetric,
        }
    }
}

impl GuidedParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_width == 0 {
            return Err(Error::param("window_width", "must be positive"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::param(
                "epsilon",
                format!("must be > 0, got {}", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// Separable box mean over a `rows x cols` grid.
#[derive(Debug, Clone)]
struct BoxMean {
    grid: Grid2D,
    before: usize,
    after: usize,
    mode: BoundaryMode,
    scale: Vec<f64>,
}

#[inline]
fn reflect(k: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = k.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

impl BoxMean {
    fn new(grid: Grid2D, width: usize, mode: BoundaryMode) -> Self {
        let before = (width - 1) / 2;
        let after = width / 2;
        let scale = match mode {
            BoundaryMode::Symmetric => vec![1.0 / (width * width) as f64; grid.len()],
            BoundaryMode::Truncated => {
                let count = |i: usize, n: usize| {
                    let lo = i.saturating_sub(before);
                    let hi = (i + after).min(n - 1);
                    (hi - lo + 1) as f64
                };
                let mut s = Vec::with_capacity(grid.len());
                for r in 0..grid.rows() {
                    let cr = count(r, grid.rows());
                    for c in 0..grid.cols() {
                        s.push(1.0 / (cr * count(c, grid.cols())));
                    }
                }
                s
            }
        };
        Self {
            grid,
            before,
            after,
            mode,
            scale,
        }
    }

    /// Window sum of `line[i - before ..= i + after]` under the boundary rule.
    #[inline]
    fn line_sum<F: Fn(usize) -> f64>(&self, i: usize, n: usize, at: F) -> f64 {
        let lo = i as isize - self.before as isize;
        let hi = i as isize + self.after as isize;
        let mut acc = 0.0;
        match self.mode {
            BoundaryMode::Truncated => {
                for k in lo.max(0)..=hi.min(n as isize - 1) {
                    acc += at(k as usize);
                }
            }
            BoundaryMode::Symmetric => {
                for k in lo..=hi {
                    acc += at(reflect(k, n));
                }
            }
        }
        acc
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (rows, cols) = (self.grid.rows(), self.grid.cols());
        let mut tmp = vec![0.0; x.len()];
        for r in 0..rows {
            let line = &x[r * cols..(r + 1) * cols];
            for c in 0..cols {
                tmp[r * cols + c] = self.line_sum(c, cols, |k| line[k]);
            }
        }
        for c in 0..cols {
            for r in 0..rows {
                out[r * cols + c] = self.line_sum(r, rows, |k| tmp[k * cols + c]);
            }
        }
        for (o, s) in out.iter_mut().zip(&self.scale) {
            *o *= s;
        }
    }

    fn mean(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.apply(x, &mut out);
        out
    }
}

fn grid_of(signal: &Signal) -> Result<Grid2D> {
    signal
        .topology()
        .as_grid()
        .copied()
        .ok_or_else(|| Error::Unsupported("guided filter requires a grid topology".into()))
}

/// Mean over the `width x width` window around each pixel, averaging only
/// the pixels inside the image.
pub fn mean_filter(x: &Signal, width: usize) -> Result<Signal> {
    mean_filter_with(x, width, BoundaryMode::Truncated)
}

pub fn mean_filter_with(x: &Signal, width: usize, mode: BoundaryMode) -> Result<Signal> {
    let grid = grid_of(x)?;
    if width == 0 {
        return Err(Error::param("window_width", "must be positive"));
    }
    x.with_values(BoxMean::new(grid, width, mode).mean(x.values()))
}

#[derive(Debug, Clone)]
pub struct Guided {
    params: GuidedParams,
}

impl Guided {
    pub fn new(params: GuidedParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &GuidedParams {
        &self.params
    }
}

impl Filter for Guided {
    fn name(&self) -> &'static str {
        "guided"
    }

    fn bind<'a>(&'a self, guidance: &Signal) -> Result<Box<dyn BoundFilter + 'a>> {
        let grid = grid_of(guidance)?;
        let mean = BoxMean::new(grid, self.params.window_width, self.params.boundary);
        let g = guidance.values().to_vec();
        let mean_g = mean.mean(&g);
        let sq: Vec<f64> = g.iter().map(|v| v * v).collect();
        let corr_g = mean.mean(&sq);
        let denom = corr_g
            .iter()
            .zip(&mean_g)
            .map(|(c, m)| c - m * m + self.params.epsilon)
            .collect();
        Ok(Box::new(BoundGuided {
            topology: Arc::clone(guidance.topology()),
            mean,
            g,
            mean_g,
            denom,
            ones: vec![1.0; grid.len()],
        }))
    }
}

struct BoundGuided {
    topology: Arc<Topology>,
    mean: BoxMean,
    g: Vec<f64>,
    mean_g: Vec<f64>,
    /// `var_g + epsilon`
    denom: Vec<f64>,
    ones: Vec<f64>,
}

impl BoundFilter for BoundGuided {
    fn len(&self) -> usize {
        self.topology.len()
    }

    fn apply_w_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.len());
        assert_eq!(out.len(), self.len());
        let n = x.len();
        let mean_x = self.mean.mean(x);
        let gx: Vec<f64> = self.g.iter().zip(x).map(|(g, v)| g * v).collect();
        let corr_gx = self.mean.mean(&gx);

        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for i in 0..n {
            let cov = corr_gx[i] - self.mean_g[i] * mean_x[i];
            a[i] = cov / self.denom[i];
            b[i] = mean_x[i] - a[i] * self.mean_g[i];
        }
        let mean_a = self.mean.mean(&a);
        self.mean.apply(&b, out);
        for i in 0..n {
            out[i] += mean_a[i] * self.g[i];
        }
    }

    fn degree(&self) -> &[f64] {
        &self.ones
    }

    fn smooth(&self, x: &[f64]) -> Vec<f64> {
        self.apply_w(x)
    }
}
