//! Plain-text graph signals.
//!
//! ```text
//! GSIG 1 <N> <E> <dim>
//! <id> <value> [<coord> x dim]      N node lines, ids 0..N-1 in any order
//! <i> <j> <distance>                E edge lines
//! ```
//!
//! Blank lines are ignored. Floats are written in Rust's shortest
//! round-trip form, so write -> read -> write reproduces the text exactly.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signal::{Edge, GraphTopology, Signal, Topology};

const MAGIC: &str = "GSIG";
const VERSION: &str = "1";

pub fn decode_graph_signal(text: &str, path: &Path) -> Result<Signal> {
    let fail = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| {
        fail(
            1,
            "empty file, expected `GSIG 1 <N> <E> <dim>` header".into(),
        )
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != MAGIC {
        return Err(fail(
            hline,
            format!("expected `GSIG 1 <N> <E> <dim>`, found `{header}`"),
        ));
    }
    if fields[1] != VERSION {
        return Err(fail(hline, format!("unsupported version `{}`", fields[1])));
    }
    let count = |k: usize, what: &str| {
        fields[k]
            .parse::<usize>()
            .map_err(|_| fail(hline, format!("invalid {what} `{}`", fields[k])))
    };
    let nodes = count(2, "node count")?;
    let edges = count(3, "edge count")?;
    let dim = count(4, "dimension")?;
    if nodes == 0 {
        return Err(fail(hline, "graph must have at least one node".into()));
    }

    let float = |line: usize, tok: &str, what: &str| -> Result<f64> {
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(fail(line, format!("invalid {what} `{tok}`"))),
        }
    };
    let index = |line: usize, tok: &str, what: &str| -> Result<usize> {
        let id = tok
            .parse::<usize>()
            .map_err(|_| fail(line, format!("invalid {what} `{tok}`")))?;
        if id >= nodes {
            return Err(fail(
                line,
                format!("{what} {id} out of range, graph has {nodes} nodes"),
            ));
        }
        Ok(id)
    };

    let mut values: Vec<Option<f64>> = vec![None; nodes];
    let mut positions = vec![Vec::new(); if dim > 0 { nodes } else { 0 }];
    for k in 0..nodes {
        let (ln, l) = lines.next().ok_or_else(|| {
            fail(
                text.lines().count() + 1,
                format!("expected {nodes} node lines, found {k}"),
            )
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 + dim {
            return Err(fail(
                ln,
                format!(
                    "node line needs {} fields (id value + {dim} coords), found {}",
                    2 + dim,
                    toks.len()
                ),
            ));
        }
        let id = index(ln, toks[0], "node id")?;
        if values[id].is_some() {
            return Err(fail(ln, format!("duplicate node id {id}")));
        }
        values[id] = Some(float(ln, toks[1], "value")?);
        if dim > 0 {
            positions[id] = toks[2..]
                .iter()
                .map(|t| float(ln, t, "coordinate"))
                .collect::<Result<_>>()?;
        }
    }

    let mut edge_list = Vec::with_capacity(edges);
    let mut seen = std::collections::HashSet::with_capacity(edges);
    for k in 0..edges {
        let (ln, l) = lines.next().ok_or_else(|| {
            fail(
                text.lines().count() + 1,
                format!("expected {edges} edge lines, found {k}"),
            )
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(fail(
                ln,
                format!(
                    "edge line needs 3 fields (i j distance), found {}",
                    toks.len()
                ),
            ));
        }
        let i = index(ln, toks[0], "edge endpoint")?;
        let j = index(ln, toks[1], "edge endpoint")?;
        if i == j {
            return Err(fail(ln, format!("self-loop on node {i}")));
        }
        let distance = float(ln, toks[2], "distance")?;
        if distance < 0.0 {
            return Err(fail(ln, format!("negative distance {distance}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(fail(ln, format!("duplicate edge ({i}, {j})")));
        }
        edge_list.push(Edge { i, j, distance });
    }
    if let Some((ln, _)) = lines.next() {
        return Err(fail(
            ln,
            "unexpected content after the last edge line".into(),
        ));
    }

    let values: Vec<f64> = values
        .into_iter()
        .map(|v| v.expect("every id filled"))
        .collect();
    let graph = GraphTopology::new(nodes, dim, (dim > 0).then_some(positions), edge_list)?;
    Signal::new(Arc::new(Topology::Graph(graph)), values)
}

pub fn encode_graph_signal(signal: &Signal) -> Result<String> {
    let graph = signal
        .topology()
        .as_graph()
        .ok_or_else(|| Error::Unsupported("graph signal output needs a graph topology".into()))?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {}",
        graph.len(),
        graph.edges().len(),
        graph.dim()
    );
    for (id, v) in signal.values().iter().enumerate() {
        let _ = write!(out, "{id} {v}");
        if let Some(pos) = graph.positions() {
            for c in &pos[id] {
                let _ = write!(out, " {c}");
            }
        }
        out.push('\n');
    }
    for e in graph.edges() {
        let _ = writeln!(out, "{} {} {}", e.i, e.j, e.distance);
    }
    Ok(out)
}

pub fn read_graph_signal(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_graph_signal(&text, path)
}

pub fn write_graph_signal(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let path = path.as_ref();
    let text = encode_graph_signal(signal)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
