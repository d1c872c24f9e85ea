//! The filter-operator contract.
//!
//! A smoothing filter is `y = D(g)^-1 W(g) x` for a guidance signal `g`. The
//! weight matrix `W(g)` is never assembled: a [`Filter`] binds a guidance
//! signal and returns a [`BoundFilter`] that applies `W(g)` to arbitrary
//! vectors and exposes the diagonal of `D(g)`. The graph Laplacian is
//! `L(g) = D(g) - W(g)`.

use crate::error::Result;
use crate::signal::Signal;

/// A filter with its guidance fixed.
pub trait BoundFilter {
    /// Number of nodes the operator acts on.
    fn len(&self) -> usize;

    /// Computes `out = W v`. Both slices must have length [`len`](Self::len).
    fn apply_w_into(&self, v: &[f64], out: &mut [f64]);

    /// Diagonal of `D`; every entry is strictly positive.
    fn degree(&self) -> &[f64];

    fn apply_w(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.apply_w_into(v, &mut out);
        out
    }

    /// `D^-1 W x`, one application of the basic filter.
    fn smooth(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.apply_w(x);
        for (o, d) in out.iter_mut().zip(self.degree()) {
            *o /= d;
        }
        out
    }

    /// `L v = D v - W v`.
    fn apply_l(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.apply_w(v);
        for ((o, d), x) in out.iter_mut().zip(self.degree()).zip(v) {
            *o = d * x - *o;
        }
        out
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A guidance-dependent smoothing filter.
pub trait Filter {
    /// Short name used in reports.
    fn name(&self) -> &'static str;

    /// Fixes the guidance signal, precomputing whatever `W(g)` and `D(g)` need.
    fn bind<'a>(&'a self, guidance: &Signal) -> Result<Box<dyn BoundFilter + 'a>>;

    fn apply_w(&self, guidance: &Signal, v: &Signal) -> Result<Signal> {
        guidance.ensure_same_topology(v)?;
        let bound = self.bind(guidance)?;
        v.with_values(bound.apply_w(v.values()))
    }

    fn degree(&self, guidance: &Signal) -> Result<Signal> {
        let bound = self.bind(guidance)?;
        guidance.with_values(bound.degree().to_vec())
    }

    fn smooth(&self, guidance: &Signal, x: &Signal) -> Result<Signal> {
        guidance.ensure_same_topology(x)?;
        let bound = self.bind(guidance)?;
        x.with_values(bound.smooth(x.values()))
    }

    fn apply_l(&self, guidance: &Signal, v: &Signal) -> Result<Signal> {
        guidance.ensure_same_topology(v)?;
        let bound = self.bind(guidance)?;
        v.with_values(bound.apply_l(v.values()))
    }
}
