//! Independent dense oracles shared by the integration tests.
//!
//! Everything here rebuilds the filter matrices from their defining formulas
//! with plain nested loops and dense linear algebra. Nothing calls into the
//! operator code except `assemble`, which probes a bound operator with basis
//! vectors so the two can be compared.

#![allow(dead_code)]

use std::cell::Cell;
use std::rc::Rc;
use std::sync::Arc;

use graph_smooth::filters::{
    Bilateral, BilateralParams, BoundaryMode, Guided, GuidedParams, TotalVariation, TvParams,
};
use graph_smooth::{BoundFilter, Edge, Filter, GraphTopology, Result, Signal, Topology};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Mat = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn zeros(n: usize) -> Mat {
    vec![vec![0.0; n]; n]
}

pub fn matvec(a: &Mat, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..m {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
    }
    c
}

pub fn diag_left(d: &[f64], a: &Mat) -> Mat {
    a.iter()
        .zip(d)
        .map(|(row, s)| row.iter().map(|x| s * x).collect())
        .collect()
}

pub fn diag_right(a: &Mat, d: &[f64]) -> Mat {
    a.iter()
        .map(|row| row.iter().zip(d).map(|(x, s)| x * s).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn naive_dot(u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..u.len() {
        s += u[i] * v[i];
    }
    s
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn mat_max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| max_abs_diff(x, y))
        .fold(0.0, f64::max)
}

/// Dense `W` probed column by column through `apply_w_into`.
pub fn assemble(op: &dyn BoundFilter) -> Mat {
    let n = op.len();
    let mut w = zeros(n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_w_into(&e, &mut col);
        for i in 0..n {
            w[i][j] = col[i];
        }
        e[j] = 0.0;
    }
    w
}

// ---------------------------------------------------------------- signals

pub fn grid_signal(rows: usize, cols: usize, values: Vec<f64>) -> Signal {
    Signal::new(Topology::grid(rows, cols).unwrap(), values).unwrap()
}

/// Piecewise-constant guidance plus small texture, so that edges are present.
pub fn random_grid_signal(rng: &mut StdRng, rows: usize, cols: usize) -> Signal {
    let levels = [rng.random::<f64>(), rng.random::<f64>()];
    let split = rng.random_range(0..=cols);
    let values = (0..rows * cols)
        .map(|i| {
            let base = if i % cols < split {
                levels[0]
            } else {
                levels[1]
            };
            base + 0.05 * (rng.random::<f64>() - 0.5)
        })
        .collect();
    grid_signal(rows, cols, values)
}

pub fn random_graph(rng: &mut StdRng, n: usize) -> Arc<Topology> {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for j in 1..n {
        let i = rng.random_range(0..j);
        seen.insert((i, j));
        edges.push(Edge {
            i,
            j,
            distance: rng.random_range(0.5..2.0),
        });
    }
    for _ in 0..n {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let (i, j) = (a.min(b), a.max(b));
        if i != j && seen.insert((i, j)) {
            edges.push(Edge {
                i,
                j,
                distance: rng.random_range(0.5..2.0),
            });
        }
    }
    Arc::new(Topology::Graph(
        GraphTopology::new(n, 0, None, edges).unwrap(),
    ))
}

pub fn random_graph_signal(rng: &mut StdRng, n: usize) -> Signal {
    let t = random_graph(rng, n);
    let values = (0..n).map(|_| rng.random::<f64>()).collect();
    Signal::new(t, values).unwrap()
}

pub fn random_vector(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn graph_edges(s: &Signal) -> (usize, Vec<Edge>) {
    let g = s.topology().as_graph().unwrap();
    (g.len(), g.edges().to_vec())
}

fn grid_dims(s: &Signal) -> (usize, usize) {
    let g = s.topology().as_grid().unwrap();
    (g.rows(), g.cols())
}

// ---------------------------------------------------------------- oracles

/// Dense `(W, D)` for any filter under test.
pub struct Dense {
    pub w: Mat,
    pub d: Vec<f64>,
}

impl Dense {
    pub fn laplacian(&self) -> Mat {
        let mut l: Mat = self
            .w
            .iter()
            .map(|r| r.iter().map(|x| -x).collect())
            .collect();
        for (i, d) in self.d.iter().enumerate() {
            l[i][i] += d;
        }
        l
    }
}

fn gauss(x: f64, sigma: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp()
}

pub fn bilateral_oracle(g: &Signal, p: &BilateralParams) -> Dense {
    let n = g.len();
    let v = g.values();
    let mut w = zeros(n);
    if g.topology().as_grid().is_some() {
        let (rows, cols) = grid_dims(g);
        let half = (p.window_width / 2) as i64;
        for r in 0..rows as i64 {
            for c in 0..cols as i64 {
                for rr in 0..rows as i64 {
                    for cc in 0..cols as i64 {
                        if (rr - r).abs() <= half && (cc - c).abs() <= half {
                            let i = (r * cols as i64 + c) as usize;
                            let j = (rr * cols as i64 + cc) as usize;
                            let dist = (((rr - r).pow(2) + (cc - c).pow(2)) as f64).sqrt();
                            w[i][j] = gauss(dist, p.sigma_d) * gauss(v[i] - v[j], p.sigma_r);
                        }
                    }
                }
            }
        }
    } else {
        let (_, edges) = graph_edges(g);
        for i in 0..n {
            w[i][i] = 1.0;
        }
        for e in edges {
            let x = gauss(e.distance, p.sigma_d) * gauss(v[e.i] - v[e.j], p.sigma_r);
            w[e.i][e.j] = x;
            w[e.j][e.i] = x;
        }
    }
    let d = w.iter().map(|r| r.iter().sum()).collect();
    Dense { w, d }
}

/// Folds an out-of-range index back by repeated half-sample mirroring.
fn mirror(mut k: i64, n: i64) -> usize {
    loop {
        if k < 0 {
            k = -k - 1;
        } else if k >= n {
            k = 2 * n - 1 - k;
        } else {
            return k as usize;
        }
    }
}

/// Dense one-dimensional box-mean matrix.
fn box_1d(n: usize, width: usize, mode: BoundaryMode) -> Mat {
    let before = (width as i64 - 1) / 2;
    let after = width as i64 / 2;
    let mut m = zeros(n);
    for i in 0..n as i64 {
        let taps: Vec<i64> = (i - before..=i + after).collect();
        match mode {
            BoundaryMode::Symmetric => {
                for k in taps {
                    m[i as usize][mirror(k, n as i64)] += 1.0 / width as f64;
                }
            }
            BoundaryMode::Truncated => {
                let inside: Vec<i64> = taps
                    .into_iter()
                    .filter(|k| (0..n as i64).contains(k))
                    .collect();
                let share = 1.0 / inside.len() as f64;
                for k in inside {
                    m[i as usize][k as usize] += share;
                }
            }
        }
    }
    m
}

/// Dense two-dimensional box-mean matrix (Kronecker product of 1D factors).
pub fn mean_oracle(rows: usize, cols: usize, width: usize, mode: BoundaryMode) -> Mat {
    let mr = box_1d(rows, width, mode);
    let mc = box_1d(cols, width, mode);
    let n = rows * cols;
    let mut m = zeros(n);
    for r in 0..rows {
        for c in 0..cols {
            for rr in 0..rows {
                for cc in 0..cols {
                    m[r * cols + c][rr * cols + cc] = mr[r][rr] * mc[c][cc];
                }
            }
        }
    }
    m
}

/// `W = M M + diag(g) M A - M diag(mu) A`, with
/// `A = diag(1/(var + eps)) (M diag(g) - diag(mu) M)`.
pub fn guided_oracle(g: &Signal, p: &GuidedParams) -> Dense {
    let (rows, cols) = grid_dims(g);
    let v = g.values();
    let m = mean_oracle(rows, cols, p.window_width, p.boundary);
    let mu = matvec(&m, v);
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let corr = matvec(&m, &sq);
    let inv: Vec<f64> = corr
        .iter()
        .zip(&mu)
        .map(|(c, u)| 1.0 / (c - u * u + p.epsilon))
        .collect();
    let a = diag_left(&inv, &sub(&diag_right(&m, v), &diag_left(&mu, &m)));
    let w = add(
        &matmul(&m, &m),
        &sub(
            &diag_left(v, &matmul(&m, &a)),
            &matmul(&diag_right(&m, &mu), &a),
        ),
    );
    Dense {
        w,
        d: vec![1.0; v.len()],
    }
}

pub fn tv_oracle(g: &Signal, p: &TvParams) -> Dense {
    let n = g.len();
    let v = g.values();
    let eps = p.epsilon;
    let mut l = zeros(n);
    if g.topology().as_grid().is_some() {
        let (rows, cols) = grid_dims(g);
        let scale = if rows == 1 || cols == 1 { 0.25 } else { 0.125 };
        // forward-difference operators, zero rows on the far border
        let mut gy = zeros(n);
        let mut gx = zeros(n);
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if r + 1 < rows {
                    gy[i][i] = -1.0;
                    gy[i][i + cols] = 1.0;
                }
                if c + 1 < cols {
                    gx[i][i] = -1.0;
                    gx[i][i + 1] = 1.0;
                }
            }
        }
        let dy = matvec(&gy, v);
        let dx = matvec(&gx, v);
        let coeff: Vec<f64> = (0..n)
            .map(|i| scale * eps / (eps + (dy[i] * dy[i] + dx[i] * dx[i]).sqrt()))
            .collect();
        for op in [&gy, &gx] {
            // G^T diag(C) G
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += op[k][i] * coeff[k] * op[k][j];
                    }
                    l[i][j] += s;
                }
            }
        }
    } else {
        let (_, edges) = graph_edges(g);
        let mut load = vec![0.0; n];
        for e in &edges {
            load[e.i] += 1.0 / (e.distance * e.distance);
            load[e.j] += 1.0 / (e.distance * e.distance);
        }
        let worst = load.iter().cloned().fold(0.0, f64::max);
        let scale = 0.25 * f64::min(1.0, 2.0 / worst);
        for e in &edges {
            let grad = (v[e.j] - v[e.i]).abs() / e.distance;
            let k = scale * eps / (eps + grad) / (e.distance * e.distance);
            l[e.i][e.i] += k;
            l[e.j][e.j] += k;
            l[e.i][e.j] -= k;
            l[e.j][e.i] -= k;
        }
    }
    let mut w: Mat = l.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    for i in 0..n {
        w[i][i] += 1.0;
    }
    Dense { w, d: vec![1.0; n] }
}

// ---------------------------------------------------------------- filter cases

pub enum Case {
    Bilateral(BilateralParams),
    Guided(GuidedParams),
    Tv(TvParams),
}

impl Case {
    pub fn filter(&self) -> Box<dyn Filter> {
        match self {
            Case::Bilateral(p) => Box::new(Bilateral::new(*p).unwrap()),
            Case::Guided(p) => Box::new(Guided::new(*p).unwrap()),
            Case::Tv(p) => Box::new(TotalVariation::new(*p).unwrap()),
        }
    }

    pub fn oracle(&self, g: &Signal) -> Dense {
        match self {
            Case::Bilateral(p) => bilateral_oracle(g, p),
            Case::Guided(p) => guided_oracle(g, p),
            Case::Tv(p) => tv_oracle(g, p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Case::Bilateral(p) => format!(
                "bilateral(w={}, sd={:.3}, sr={:.3})",
                p.window_width, p.sigma_d, p.sigma_r
            ),
            Case::Guided(p) => format!(
                "guided(w={}, eps={:.4}, {:?})",
                p.window_width, p.epsilon, p.boundary
            ),
            Case::Tv(p) => format!("tv(eps={:.4})", p.epsilon),
        }
    }

    /// Bilateral and TV have nonnegative, normalized rows.
    pub fn has_max_principle(&self) -> bool {
        !matches!(self, Case::Guided(_))
    }

    /// Whether `W` is symmetric everywhere (not only away from the border).
    pub fn fully_symmetric(&self) -> bool {
        match self {
            Case::Guided(p) => p.boundary == BoundaryMode::Symmetric && p.window_width % 2 == 1,
            _ => true,
        }
    }

    pub fn random_bilateral(rng: &mut StdRng) -> Self {
        Case::Bilateral(BilateralParams {
            window_width: [1, 3, 5][rng.random_range(0..3)],
            sigma_d: rng.random_range(0.5..2.0),
            sigma_r: rng.random_range(0.05..0.5),
        })
    }

    pub fn random_guided(rng: &mut StdRng, boundary: BoundaryMode, odd: bool) -> Self {
        let widths: &[usize] = if odd { &[1, 3, 5] } else { &[1, 2, 3, 4, 5] };
        Case::Guided(GuidedParams {
            window_width: widths[rng.random_range(0..widths.len())],
            epsilon: 10f64.powf(rng.random_range(-3.0..-1.0)),
            boundary,
        })
    }

    pub fn random_tv(rng: &mut StdRng) -> Self {
        Case::Tv(TvParams {
            epsilon: 10f64.powf(rng.random_range(-3.0..-1.0)),
        })
    }
}

// ---------------------------------------------------------------- operator suite

/// Worst-case figures over a batch of operator checks.
#[derive(Debug, Default, Clone)]
pub struct OperatorStats {
    pub cases: usize,
    /// `max |W_op - W_oracle|` and `max |D_op - D_oracle|`.
    pub dense_err: f64,
    /// `max |W v - W_dense v|` for `apply_w`, `apply_l`, `smooth`.
    pub apply_err: f64,
    pub symmetry_err: f64,
    /// `min v^T L v / |v|^2` over the sampled vectors.
    pub min_rayleigh: f64,
    pub constant_err: f64,
    /// Largest excursion outside `[min x, max x]`.
    pub max_principle_excess: f64,
    pub failures: Vec<String>,
}

impl OperatorStats {
    fn note(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

pub const OP_TOL: f64 = 1e-10;
pub const PSD_VECTORS: usize = 100;

/// Runs every operator property for one filter/guidance pair.
pub fn check_operator(case: &Case, g: &Signal, rng: &mut StdRng, stats: &mut OperatorStats) {
    let filter = case.filter();
    let bound = filter.bind(g).unwrap();
    let n = g.len();
    let label = || format!("{} on n={}", case.label(), n);
    stats.cases += 1;

    let oracle = case.oracle(g);
    let w = assemble(bound.as_ref());
    let dense_err = mat_max_abs_diff(&w, &oracle.w).max(max_abs_diff(bound.degree(), &oracle.d));
    stats.dense_err = stats.dense_err.max(dense_err);
    stats.note(dense_err <= OP_TOL, || {
        format!("{}: dense mismatch {dense_err:e}", label())
    });

    let v = random_vector(rng, n);
    let wv = matvec(&oracle.w, &v);
    let lv = matvec(&oracle.laplacian(), &v);
    let sv: Vec<f64> = wv.iter().zip(&oracle.d).map(|(x, d)| x / d).collect();
    let apply_err = max_abs_diff(&bound.apply_w(&v), &wv)
        .max(max_abs_diff(&bound.apply_l(&v), &lv))
        .max(max_abs_diff(&bound.smooth(&v), &sv));
    stats.apply_err = stats.apply_err.max(apply_err);
    stats.note(apply_err <= OP_TOL, || {
        format!("{}: apply mismatch {apply_err:e}", label())
    });

    // symmetry: everywhere, or for guided-truncated between pixels whose
    // windows never touch the border
    let interior = interior_mask(case, g);
    let mut sym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if interior[i] && interior[j] {
                sym = sym.max((w[i][j] - w[j][i]).abs());
            }
        }
    }
    stats.symmetry_err = stats.symmetry_err.max(sym);
    stats.note(sym <= OP_TOL, || format!("{}: asymmetry {sym:e}", label()));

    if case.fully_symmetric() {
        for _ in 0..PSD_VECTORS {
            let v = random_vector(rng, n);
            let lv = bound.apply_l(&v);
            let q = naive_dot(&v, &lv) / naive_dot(&v, &v).max(f64::MIN_POSITIVE);
            stats.min_rayleigh = stats.min_rayleigh.min(q);
            stats.note(q >= -1e-12, || {
                format!("{}: v^T L v / |v|^2 = {q:e}", label())
            });
        }
    }

    let c = rng.random_range(-1.0..2.0);
    let constant = vec![c; n];
    let y = bound.smooth(&constant);
    let ce = max_abs_diff(&y, &constant);
    stats.constant_err = stats.constant_err.max(ce);
    stats.note(ce <= OP_TOL, || {
        format!("{}: constant moved by {ce:e}", label())
    });

    if case.has_max_principle() {
        for x in [g.values().to_vec(), random_vector(rng, n)] {
            let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let y = bound.smooth(&x);
            let excess = y.iter().map(|v| (lo - v).max(v - hi)).fold(0.0, f64::max);
            stats.max_principle_excess = stats.max_principle_excess.max(excess);
            stats.note(excess <= 1e-12, || {
                format!("{}: maximum principle off by {excess:e}", label())
            });
        }
    }
}

fn interior_mask(case: &Case, g: &Signal) -> Vec<bool> {
    match case {
        // off-center windows: no symmetry anywhere
        Case::Guided(p) if p.window_width % 2 == 0 => vec![false; g.len()],
        Case::Guided(p) if !case.fully_symmetric() => {
            let (rows, cols) = grid_dims(g);
            let margin = p.window_width;
            (0..rows * cols)
                .map(|i| {
                    let (r, c) = (i / cols, i % cols);
                    r >= margin && c >= margin && r + margin < rows && c + margin < cols
                })
                .collect()
        }
        _ => vec![true; g.len()],
    }
}

/// Random batch over all filters: grids up to 8x8 and graphs up to 16 nodes.
pub fn operator_suite(seed: u64, per_filter: usize) -> OperatorStats {
    let mut rng = rng(seed);
    let mut stats = OperatorStats::default();
    for _ in 0..per_filter {
        let (rows, cols) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let g = random_grid_signal(&mut rng, rows, cols);
        let cases = [
            Case::random_bilateral(&mut rng),
            Case::random_guided(&mut rng, BoundaryMode::Symmetric, true),
            Case::random_guided(&mut rng, BoundaryMode::Symmetric, false),
            Case::random_guided(&mut rng, BoundaryMode::Truncated, false),
            Case::random_tv(&mut rng),
        ];
        for case in &cases {
            check_operator(case, &g, &mut rng, &mut stats);
        }

        let n = rng.random_range(1..=16);
        let g = random_graph_signal(&mut rng, n);
        for case in [Case::random_bilateral(&mut rng), Case::random_tv(&mut rng)] {
            check_operator(&case, &g, &mut rng, &mut stats);
        }
    }
    stats
}

// ---------------------------------------------------------------- drivers

/// Textbook PCG on `L u = 0` with diagonal preconditioner `D`, starting at
/// `y`. Returns the residual norm after the first evaluation and after each
/// update.
pub fn dense_pcg(l: &Mat, d: &[f64], y: &mut [f64], steps: usize) -> Vec<f64> {
    let n = y.len();
    let norm = |v: &[f64]| naive_dot(v, v).sqrt();
    let mut r: Vec<f64> = matvec(l, y).iter().map(|x| -x).collect();
    let mut norms = vec![norm(&r)];
    let mut p = vec![0.0; n];
    let mut gamma_old = 0.0;
    let mut gamma_first = None;
    for k in 0..steps {
        let z: Vec<f64> = r.iter().zip(d).map(|(r, d)| r / d).collect();
        let gamma = naive_dot(&z, &r);
        let first = *gamma_first.get_or_insert(gamma);
        if !(gamma > 1e-14 * first) {
            break;
        }
        for i in 0..n {
            p[i] = if k == 0 {
                z[i]
            } else {
                z[i] + gamma / gamma_old * p[i]
            };
        }
        let q = matvec(l, &p);
        let alpha = gamma / naive_dot(&p, &q);
        for i in 0..n {
            y[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        norms.push(norm(&r));
        gamma_old = gamma;
    }
    norms
}

/// Wraps a filter and counts every `W` product made through it.
pub struct Counting<F> {
    pub inner: F,
    pub calls: Rc<Cell<usize>>,
}

impl<F: Filter> Counting<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            calls: Rc::new(Cell::new(0)),
        }
    }

    pub fn count(&self) -> usize {
        self.calls.get()
    }
}

struct CountingBound<'a> {
    inner: Box<dyn BoundFilter + 'a>,
    calls: Rc<Cell<usize>>,
}

impl BoundFilter for CountingBound<'_> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn apply_w_into(&self, v: &[f64], out: &mut [f64]) {
        self.calls.set(self.calls.get() + 1);
        self.inner.apply_w_into(v, out);
    }

    fn degree(&self) -> &[f64] {
        self.inner.degree()
    }
}

impl<F: Filter> Filter for Counting<F> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn bind<'a>(&'a self, guidance: &Signal) -> Result<Box<dyn BoundFilter + 'a>> {
        Ok(Box::new(CountingBound {
            inner: self.inner.bind(guidance)?,
            calls: Rc::clone(&self.calls),
        }))
    }
}

// ---------------------------------------------------------------- driver suite

#[derive(Debug, Default, Clone)]
pub struct DriverStats {
    pub pcg_cases: usize,
    /// Largest relative gap between operator PCG and dense PCG residuals.
    pub pcg_residual_rel: f64,
    pub pcg_iterate_err: f64,
    pub nesterov_cases: usize,
    pub accounting_cases: usize,
    pub failures: Vec<String>,
}

pub const PCG_REL_TOL: f64 = 1e-8;

/// Residual norms below this fraction of the initial one, or of the signal
/// norm, are roundoff and are not compared.
const PCG_FLOOR: f64 = 1e-7;
const PCG_ABS_FLOOR: f64 = 1e-12;

/// Frozen-guidance PCG against [`dense_pcg`] on one case.
pub fn check_frozen_pcg(case: &Case, g: &Signal, k_max: usize, stats: &mut DriverStats) {
    use graph_smooth::accel::{pcg_cycle, PcgConfig};

    let filter = case.filter();
    let bound = filter.bind(g).unwrap();
    let oracle = case.oracle(g);
    let l = oracle.laplacian();

    let mut y = g.values().to_vec();
    let out = pcg_cycle(
        bound.as_ref(),
        &mut y,
        &PcgConfig::new(k_max, 1),
        None,
        |_| {},
    )
    .unwrap();
    let mut y_ref = g.values().to_vec();
    let expected = dense_pcg(&l, &oracle.d, &mut y_ref, k_max - 1);
    stats.pcg_cases += 1;

    let label = format!("{} n={} k_max={k_max}", case.label(), g.len());
    let r0 = expected[0];
    let floor = (PCG_FLOOR * r0).max(PCG_ABS_FLOOR * naive_dot(g.values(), g.values()).sqrt());
    let mut compared = 0;
    for (a, b) in out.residual_norms.iter().zip(&expected) {
        if *b < floor {
            break;
        }
        let rel = (a - b).abs() / b;
        stats.pcg_residual_rel = stats.pcg_residual_rel.max(rel);
        if rel > PCG_REL_TOL {
            stats
                .failures
                .push(format!("{label}: residual {a} vs dense {b} (rel {rel:e})"));
        }
        compared += 1;
    }
    if compared == expected.len() && out.residual_norms.len() != expected.len() {
        stats.failures.push(format!(
            "{label}: {} residuals vs {} from dense PCG",
            out.residual_norms.len(),
            expected.len()
        ));
    }
    if compared == expected.len() {
        let scale = y_ref.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let err = max_abs_diff(&y, &y_ref) / scale;
        stats.pcg_iterate_err = stats.pcg_iterate_err.max(err);
        if err > PCG_REL_TOL {
            stats
                .failures
                .push(format!("{label}: iterate differs by {err:e}"));
        }
    }
}

/// Nesterov with zero momentum must reproduce repeated application bit for bit.
pub fn check_zero_momentum(
    case: &Case,
    x0: &Signal,
    reference: &Signal,
    k: usize,
    stats: &mut DriverStats,
) {
    use graph_smooth::accel::{run_nesterov_with, run_repeated};

    let filter = case.filter();
    let a = run_repeated(filter.as_ref(), x0, k, Some(reference)).unwrap();
    let b = run_nesterov_with(filter.as_ref(), x0, k, |_| 0.0, Some(reference)).unwrap();
    stats.nesterov_cases += 1;
    let bits = |s: &Signal| s.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    if bits(&a.output) != bits(&b.output) || a.psnr_trace != b.psnr_trace {
        stats.failures.push(format!(
            "{} k={k}: zero-momentum Nesterov differs from repeated",
            case.label()
        ));
    }
}

/// Counts real `W` products and compares with the reported budget.
pub fn check_accounting(case: Case, x0: &Signal, stats: &mut DriverStats) {
    use graph_smooth::accel::{run, AccelConfig};

    let configs = [
        AccelConfig::repeated(4),
        AccelConfig::nesterov(5),
        AccelConfig::pcg(3, 4),
        AccelConfig::pcg(2, 3),
    ];
    for cfg in configs {
        let counting = Counting::new(BoxedFilter(case.filter()));
        let report = run(&counting, x0, &cfg, None).unwrap();
        stats.accounting_cases += 1;
        let expected = cfg.nominal_calls();
        if counting.count() != expected || report.basic_filter_calls != expected {
            stats.failures.push(format!(
                "{} {:?}: counted {} products, reported {}, expected {expected}",
                case.label(),
                cfg.kind,
                counting.count(),
                report.basic_filter_calls
            ));
        }
    }
}

pub struct BoxedFilter(pub Box<dyn Filter>);

impl Filter for BoxedFilter {
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn bind<'a>(&'a self, guidance: &Signal) -> Result<Box<dyn BoundFilter + 'a>> {
        self.0.bind(guidance)
    }
}

pub fn driver_suite(seed: u64, cases: usize) -> DriverStats {
    let mut rng = rng(seed);
    let mut stats = DriverStats::default();
    for _ in 0..cases {
        let (rows, cols) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let g = random_grid_signal(&mut rng, rows, cols);
        let grid_cases = [
            Case::random_bilateral(&mut rng),
            Case::random_guided(&mut rng, BoundaryMode::Symmetric, true),
            Case::random_tv(&mut rng),
        ];
        for case in &grid_cases {
            let k = rng.random_range(2..=8);
            check_frozen_pcg(case, &g, k, &mut stats);
        }
        let n = rng.random_range(1..=16);
        let gg = random_graph_signal(&mut rng, n);
        for case in [Case::random_bilateral(&mut rng), Case::random_tv(&mut rng)] {
            let k = rng.random_range(2..=8);
            check_frozen_pcg(&case, &gg, k, &mut stats);
        }

        let reference = random_grid_signal(&mut rng, rows, cols);
        let all = [
            Case::random_bilateral(&mut rng),
            Case::random_guided(&mut rng, BoundaryMode::Truncated, false),
            Case::random_tv(&mut rng),
        ];
        for case in &all {
            let k = rng.random_range(1..=6);
            check_zero_momentum(case, &g, &reference, k, &mut stats);
        }
    }

    // accounting on inputs large enough that no restart breaks down early
    let g = random_grid_signal(&mut rng, 8, 8);
    let noisy = g
        .with_values(
            g.values()
                .iter()
                .map(|v| v + 0.1 * rng.random::<f64>())
                .collect(),
        )
        .unwrap();
    check_accounting(
        Case::Bilateral(BilateralParams::default()),
        &noisy,
        &mut stats,
    );
    check_accounting(
        Case::Guided(GuidedParams {
            window_width: 3,
            epsilon: 1e-2,
            boundary: BoundaryMode::Symmetric,
        }),
        &noisy,
        &mut stats,
    );
    check_accounting(Case::Tv(TvParams { epsilon: 1e-2 }), &noisy, &mut stats);
    stats
}
