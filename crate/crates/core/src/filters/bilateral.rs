//! Bilateral filter with direct windowed evaluation.
//!
//! The weight between nodes `i` and `j` is a spatial Gaussian in their
//! distance times a range Gaussian in the guidance difference. Every node is
//! its own neighbor with weight 1, so degrees are at least 1.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operator::{BoundFilter, Filter};
use crate::signal::{GraphTopology, Grid2D, Signal, Topology};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilateralParams {
    /// Side of the square window on grids. Odd.
    pub window_width: usize,
    pub sigma_d: f64,
    pub sigma_r: f64,
}

impl Default for BilateralParams {
    fn default() -> Self {
        Self {
            window_width: 5,
            sigma_d: 1.0,
            sigma_r: 0.2,
        }
    }
}

impl BilateralParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_width == 0 || self.window_width.is_multiple_of(2) {
            return Err(Error::param(
                "window_width",
                format!("must be odd and positive, got {}", self.window_width),
            ));
        }
        if !(self.sigma_d.is_finite() && self.sigma_d > 0.0) {
            return Err(Error::param(
                "sigma_d",
                format!("must be > 0, got {}", self.sigma_d),
            ));
        }
        if !(self.sigma_r.is_finite() && self.sigma_r > 0.0) {
            return Err(Error::param(
                "sigma_r",
                format!("must be > 0, got {}", self.sigma_r),
            ));
        }
        Ok(())
    }
}

/// `exp(-dist^2 / 2 sigma_d^2) * exp(-dg^2 / 2 sigma_r^2)`.
pub fn bilateral_weight(dist: f64, dg: f64, params: &BilateralParams) -> f64 {
    spatial_weight(dist, params.sigma_d) * range_weight(dg, params.sigma_r)
}

#[inline]
fn spatial_weight(dist: f64, sigma_d: f64) -> f64 {
    (-(dist * dist) / (2.0 * sigma_d * sigma_d)).exp()
}

#[inline]
fn range_weight(dg: f64, sigma_r: f64) -> f64 {
    (-(dg * dg) / (2.0 * sigma_r * sigma_r)).exp()
}

#[derive(Debug, Clone)]
pub struct Bilateral {
    params: BilateralParams,
}

impl Bilateral {
    pub fn new(params: BilateralParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &BilateralParams {
        &self.params
    }
}

impl Filter for Bilateral {
    fn name(&self) -> &'static str {
        "bilateral"
    }

    fn bind<'a>(&'a self, guidance: &Signal) -> Result<Box<dyn BoundFilter + 'a>> {
        let g = guidance.values();
        match guidance.topology().as_ref() {
            Topology::Grid(grid) => Ok(Box::new(GridBilateral::new(*grid, g, &self.params))),
            Topology::Graph(_) => Ok(Box::new(GraphBilateral::new(
                guidance.topology().clone(),
                g,
                &self.params,
            ))),
        }
    }
}

/// Weights stored per pixel for every window offset; offsets that fall
/// outside the image carry weight zero.
struct GridBilateral {
    grid: Grid2D,
    radius: isize,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

impl GridBilateral {
    fn new(grid: Grid2D, g: &[f64], params: &BilateralParams) -> Self {
        let radius = (params.window_width / 2) as isize;
        let side = params.window_width;
        let taps = side * side;
        let spatial: Vec<f64> = (-radius..=radius)
            .flat_map(|dr| (-radius..=radius).map(move |dc| (dr, dc)))
            .map(|(dr, dc)| spatial_weight(((dr * dr + dc * dc) as f64).sqrt(), params.sigma_d))
            .collect();

        let (rows, cols) = (grid.rows() as isize, grid.cols() as isize);
        let mut weights = vec![0.0; grid.len() * taps];
        let mut degree = vec![0.0; grid.len()];
        for r in 0..rows {
            for c in 0..cols {
                let i = grid.index(r as usize, c as usize);
                let row = &mut weights[i * taps..(i + 1) * taps];
                let mut sum = 0.0;
                for (t, (dr, dc)) in (-radius..=radius)
                    .flat_map(|dr| (-radius..=radius).map(move |dc| (dr, dc)))
                    .enumerate()
                {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr < 0 || rr >= rows || cc < 0 || cc >= cols {
                        continue;
                    }
                    let j = grid.index(rr as usize, cc as usize);
                    let w = spatial[t] * range_weight(g[i] - g[j], params.sigma_r);
                    row[t] = w;
                    sum += w;
                }
                degree[i] = sum;
            }
        }
        Self {
            grid,
            radius,
            weights,
            degree,
        }
    }
}

impl BoundFilter for GridBilateral {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn apply_w_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.len());
        assert_eq!(out.len(), self.len());
        let side = (2 * self.radius + 1) as usize;
        let taps = side * side;
        let (rows, cols) = (self.grid.rows() as isize, self.grid.cols() as isize);
        for r in 0..rows {
            for c in 0..cols {
                let i = self.grid.index(r as usize, c as usize);
                let row = &self.weights[i * taps..(i + 1) * taps];
                let mut acc = 0.0;
                for dr in -self.radius..=self.radius {
                    let rr = r + dr;
                    if rr < 0 || rr >= rows {
                        continue;
                    }
                    let base = ((dr + self.radius) as usize) * side;
                    for dc in -self.radius..=self.radius {
                        let cc = c + dc;
                        if cc < 0 || cc >= cols {
                            continue;
                        }
                        let w = row[base + (dc + self.radius) as usize];
                        acc += w * v[self.grid.index(rr as usize, cc as usize)];
                    }
                }
                out[i] = acc;
            }
        }
    }

    fn degree(&self) -> &[f64] {
        &self.degree
    }
}

/// Edge weights stored alongside the adjacency list; the self weight is 1.
struct GraphBilateral {
    topology: Arc<Topology>,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

impl GraphBilateral {
    fn new(topology: Arc<Topology>, g: &[f64], params: &BilateralParams) -> Self {
        let graph = graph_of(&topology);
        let mut weights = Vec::with_capacity(2 * graph.edges().len());
        let mut degree = vec![0.0; graph.len()];
        for (i, d) in degree.iter_mut().enumerate() {
            let mut sum = bilateral_weight(0.0, 0.0, params);
            for nb in graph.neighbors(i) {
                let w = bilateral_weight(nb.distance, g[i] - g[nb.node], params);
                weights.push(w);
                sum += w;
            }
            *d = sum;
        }
        Self {
            topology,
            weights,
            degree,
        }
    }
}

fn graph_of(topology: &Topology) -> &GraphTopology {
    topology.as_graph().expect("graph topology")
}

impl BoundFilter for GraphBilateral {
    fn len(&self) -> usize {
        self.topology.len()
    }

    fn apply_w_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.len());
        assert_eq!(out.len(), self.len());
        let graph = graph_of(&self.topology);
        let mut k = 0;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = v[i];
            for nb in graph.neighbors(i) {
                acc += self.weights[k] * v[nb.node];
                k += 1;
            }
            *o = acc;
        }
    }

    fn degree(&self) -> &[f64] {
        &self.degree
    }
}
