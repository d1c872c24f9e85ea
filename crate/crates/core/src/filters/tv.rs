//! Total-variation filter in graph-Laplacian form.
//!
//! With a forward-difference gradient `G` (last row zero) and a diffusion
//! coefficient field `C(g)` the Laplacian is `L(g) = G^T diag(C) G`,
//! `D = I` and `W = I - L`.
//!
//! On grids the coefficient is `s * eps / (eps + |grad g|)` with `s = 1/4`
//! for 1D signals (a singleton grid dimension) and `s = 1/8` for images, where
//! the gradient magnitude is the isotropic `sqrt(gy^2 + gx^2)`. Those scalings
//! bound the diagonal of `L` by 1/2, so `W` is nonnegative and row-stochastic.
//!
//! On general graphs each edge `e = (i, j)` is a 1D gradient
//! `(v_j - v_i) / d_e` with coefficient `s * eps / (eps + |g_j - g_i| / d_e)`.
//! The scale `s = 1/4 * min(1, 2 / max_i sum_{e at i} 1/d_e^2)` reduces to
//! 1/4 on unit-distance paths and 1/8 on a unit 4-neighbor grid, and keeps
//! the diagonal of `L` at most 1/2 on any graph.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operator::{BoundFilter, Filter};
use crate::signal::{GraphTopology, Grid2D, Signal, Topology};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvParams {
    pub epsilon: f64,
}

impl Default for TvParams {
    fn default() -> Self {
        Self { epsilon: 1e-3 }
    }
}

impl TvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::param(
                "epsilon",
                format!("must be > 0, got {}", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// Forward differences `(g[r+1,c] - g[r,c], g[r,c+1] - g[r,c])`, zero on the
/// last row and column respectively.
#[inline]
fn grid_gradient(grid: &Grid2D, v: &[f64], r: usize, c: usize) -> (f64, f64) {
    let i = grid.index(r, c);
    let dy = if r + 1 < grid.rows() {
        v[i + grid.cols()] - v[i]
    } else {
        0.0
    };
    let dx = if c + 1 < grid.cols() {
        v[i + 1] - v[i]
    } else {
        0.0
    };
    (dy, dx)
}

fn grid_scale(grid: &Grid2D) -> f64 {
    if grid.is_1d() {
        0.25
    } else {
        0.125
    }
}

fn graph_scale(graph: &GraphTopology) -> f64 {
    let worst = (0..graph.len())
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .map(|nb| 1.0 / (nb.distance * nb.distance))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    if worst > 2.0 {
        0.25 * 2.0 / worst
    } else {
        0.25
    }
}

/// Diffusion coefficients for guidance `g`: one per pixel on grids, one per
/// edge (in [`GraphTopology::edges`] order) on graphs.
pub fn tv_coefficients(g: &Signal, params: &TvParams) -> Result<Vec<f64>> {
    params.validate()?;
    let eps = params.epsilon;
    let values = g.values();
    match g.topology().as_ref() {
        Topology::Grid(grid) => {
            let scale = grid_scale(grid);
            let mut coeff = Vec::with_capacity(grid.len());
            for r in 0..grid.rows() {
                for c in 0..grid.cols() {
                    let (dy, dx) = grid_gradient(grid, values, r, c);
                    coeff.push(scale * (eps / (eps + (dy * dy + dx * dx).sqrt())));
                }
            }
            Ok(coeff)
        }
        Topology::Graph(graph) => {
            if let Some(k) = graph.edges().iter().position(|e| e.distance <= 0.0) {
                return Err(Error::InvalidTopology(format!(
                    "TV filter needs positive edge distances, edge {k} has 0"
                )));
            }
            let scale = graph_scale(graph);
            Ok(graph
                .edges()
                .iter()
                .map(|e| {
                    let grad = (values[e.j] - values[e.i]).abs() / e.distance;
                    scale * (eps / (eps + grad))
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone)]
pub struct TotalVariation {
    params: TvParams,
}

impl TotalVariation {
    pub fn new(params: TvParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &TvParams {
        &self.params
    }
}

impl Filter for TotalVariation {
    fn name(&self) -> &'static str {
        "tv"
    }

    fn bind<'a>(&'a self, guidance: &Signal) -> Result<Box<dyn BoundFilter + 'a>> {
        let coeff = tv_coefficients(guidance, &self.params)?;
        let topology = Arc::clone(guidance.topology());
        let ones = vec![1.0; topology.len()];
        Ok(Box::new(BoundTv {
            topology,
            coeff,
            ones,
        }))
    }
}

struct BoundTv {
    topology: Arc<Topology>,
    coeff: Vec<f64>,
    ones: Vec<f64>,
}

impl BoundTv {
    fn laplacian_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        match self.topology.as_ref() {
            Topology::Grid(grid) => {
                let cols = grid.cols();
                for r in 0..grid.rows() {
                    for c in 0..cols {
                        let i = grid.index(r, c);
                        let (dy, dx) = grid_gradient(grid, v, r, c);
                        let (fy, fx) = (self.coeff[i] * dy, self.coeff[i] * dx);
                        // G^T applied to the weighted fluxes
                        if r + 1 < grid.rows() {
                            out[i] -= fy;
                            out[i + cols] += fy;
                        }
                        if c + 1 < cols {
                            out[i] -= fx;
                            out[i + 1] += fx;
                        }
                    }
                }
            }
            Topology::Graph(graph) => {
                for (e, c) in graph.edges().iter().zip(&self.coeff) {
                    let flux = c * (v[e.j] - v[e.i]) / (e.distance * e.distance);
                    out[e.i] -= flux;
                    out[e.j] += flux;
                }
            }
        }
    }
}

impl BoundFilter for BoundTv {
    fn len(&self) -> usize {
        self.topology.len()
    }

    fn apply_w_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.len());
        assert_eq!(out.len(), self.len());
        self.laplacian_into(v, out);
        for (o, x) in out.iter_mut().zip(v) {
            *o = x - *o;
        }
    }

    fn degree(&self) -> &[f64] {
        &self.ones
    }

    fn smooth(&self, x: &[f64]) -> Vec<f64> {
        self.apply_w(x)
    }

    fn apply_l(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.laplacian_into(v, &mut out);
        out
    }
}
