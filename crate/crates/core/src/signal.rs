//! Signals and the topologies they live on.
//!
//! A [`Signal`] is a flat vector of `f64` intensities attached to a shared
//! [`Topology`]. Grids are stored row-major: pixel `(r, c)` is index
//! `r * cols + c`.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A `rows x cols` pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    rows: usize,
    cols: usize,
}

impl Grid2D {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidTopology(format!(
                "grid must be at least 1x1, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// A grid with a singleton dimension is a 1D signal.
    pub fn is_1d(&self) -> bool {
        self.rows == 1 || self.cols == 1
    }

    #[inline]
    pub fn index(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }
}

/// An undirected edge `i < j` with a spatial distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

/// One entry of a node's adjacency list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub node: usize,
    pub distance: f64,
    /// Position of the edge in [`GraphTopology::edges`].
    pub edge: usize,
}

/// A general weighted graph with optional node coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphTopology {
    nodes: usize,
    dim: usize,
    positions: Option<Vec<Vec<f64>>>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
}

impl GraphTopology {
    /// Builds a graph, normalizing every edge to `i < j`.
    ///
    /// Rejects self-loops, duplicate edges, out-of-range indices, negative or
    /// non-finite distances and positions whose dimension disagrees with `dim`.
    pub fn new(
        nodes: usize,
        dim: usize,
        positions: Option<Vec<Vec<f64>>>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::InvalidTopology("graph has no nodes".into()));
        }
        if let Some(pos) = &positions {
            if pos.len() != nodes {
                return Err(Error::InvalidTopology(format!(
                    "{} positions for {nodes} nodes",
                    pos.len()
                )));
            }
            if let Some(k) = pos.iter().position(|p| p.len() != dim) {
                return Err(Error::InvalidTopology(format!(
                    "node {k} has {} coordinates, expected {dim}",
                    pos[k].len()
                )));
            }
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (k, e) in edges.into_iter().enumerate() {
            let (i, j) = (e.i.min(e.j), e.i.max(e.j));
            if i == j {
                return Err(Error::InvalidTopology(format!(
                    "edge {k} is a self-loop on {i}"
                )));
            }
            if j >= nodes {
                return Err(Error::InvalidTopology(format!(
                    "edge {k} references node {j}, graph has {nodes}"
                )));
            }
            if !(e.distance.is_finite() && e.distance >= 0.0) {
                return Err(Error::InvalidTopology(format!(
                    "edge {k} has invalid distance {}",
                    e.distance
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidTopology(format!("duplicate edge ({i}, {j})")));
            }
            normalized.push(Edge {
                i,
                j,
                distance: e.distance,
            });
        }

        let mut degree = vec![0usize; nodes];
        for e in &normalized {
            degree[e.i] += 1;
            degree[e.j] += 1;
        }
        let mut offsets = Vec::with_capacity(nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let placeholder = Neighbor {
            node: 0,
            distance: 0.0,
            edge: 0,
        };
        let mut adjacency = vec![placeholder; offsets[nodes]];
        for (k, e) in normalized.iter().enumerate() {
            adjacency[fill[e.i]] = Neighbor {
                node: e.j,
                distance: e.distance,
                edge: k,
            };
            fill[e.i] += 1;
            adjacency[fill[e.j]] = Neighbor {
                node: e.i,
                distance: e.distance,
                edge: k,
            };
            fill[e.j] += 1;
        }

        Ok(Self {
            nodes,
            dim,
            positions,
            edges: normalized,
            offsets,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn positions(&self) -> Option<&[Vec<f64>]> {
        self.positions.as_deref()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[Neighbor] {
        &self.adjacency[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.nodes).map(|k| self.degree(k)).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Grid(Grid2D),
    Graph(GraphTopology),
}

impl Topology {
    pub fn grid(rows: usize, cols: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Topology::Grid(Grid2D::new(rows, cols)?)))
    }

    pub fn len(&self) -> usize {
        match self {
            Topology::Grid(g) => g.len(),
            Topology::Graph(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_grid(&self) -> Option<&Grid2D> {
        match self {
            Topology::Grid(g) => Some(g),
            Topology::Graph(_) => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphTopology> {
        match self {
            Topology::Graph(g) => Some(g),
            Topology::Grid(_) => None,
        }
    }
}

/// Intensities attached to a topology. Values are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
    topology: Arc<Topology>,
}

impl Signal {
    pub fn new(topology: Arc<Topology>, values: Vec<f64>) -> Result<Self> {
        if values.len() != topology.len() {
            return Err(Error::LengthMismatch {
                expected: topology.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values, topology })
    }

    pub fn constant(topology: Arc<Topology>, value: f64) -> Result<Self> {
        let n = topology.len();
        Self::new(topology, vec![value; n])
    }

    /// New values on the same topology.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(Arc::clone(&self.topology), values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_topology(&self, other: &Signal) -> bool {
        Arc::ptr_eq(&self.topology, &other.topology) || self.topology == other.topology
    }

    pub fn ensure_same_topology(&self, other: &Signal) -> Result<()> {
        if self.same_topology(other) {
            Ok(())
        } else {
            Err(Error::TopologyMismatch)
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Inner product summed sequentially in index order, so the result is
/// reproducible bit for bit.
pub fn dot(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(dot_unchecked(u, v))
}

#[inline]
pub(crate) fn dot_unchecked(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in u.iter().zip(v) {
        acc += a * b;
    }
    acc
}
