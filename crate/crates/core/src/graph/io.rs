use std::fmt::Write;

use rustc_hash::FxHashSet;

use super::{GraphError, GraphStore};

fn load_err(line: usize, reason: impl Into<String>) -> GraphError {
    GraphError::Load {
        line,
        reason: reason.into(),
    }
}

fn parse_pair(line_no: usize, line: &str) -> Result<(u64, u64), GraphError> {
    let mut parts = line.split_whitespace();
    let mut next = |what: &str| -> Result<u64, GraphError> {
        let tok = parts
            .next()
            .ok_or_else(|| load_err(line_no, format!("missing {what}")))?;
        tok.parse::<u64>()
            .map_err(|_| load_err(line_no, format!("{what} is not a non-negative integer: {tok:?}")))
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if parts.next().is_some() {
        return Err(load_err(line_no, "expected exactly two fields"));
    }
    Ok((a, b))
}

/// Parses the graph text format: a header line `n d`, then one `u v` edge per
/// line with `1 <= u < v <= n`. Blank lines and lines starting with `#` are skipped.
pub fn load_graph(text: &str) -> Result<GraphStore, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut seen: FxHashSet<(u32, u32)> = FxHashSet::default();
    let mut degree: Vec<usize> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = parse_pair(line_no, line)?;
        let Some((n, d)) = header else {
            let n = usize::try_from(a)
                .ok()
                .filter(|&n| n <= u32::MAX as usize)
                .ok_or_else(|| load_err(line_no, "vertex count too large"))?;
            header = Some((n, b as usize));
            degree = vec![0; n];
            continue;
        };
        if a == b {
            return Err(load_err(line_no, format!("self-loop at vertex {a}")));
        }
        for x in [a, b] {
            if x == 0 || x > n as u64 {
                return Err(load_err(line_no, format!("vertex {x} out of range 1..={n}")));
            }
        }
        if a > b {
            return Err(load_err(line_no, format!("edge endpoints must satisfy u < v, got {a} {b}")));
        }
        let (u, v) = (a as u32, b as u32);
        if !seen.insert((u, v)) {
            return Err(load_err(line_no, format!("duplicate edge {u} {v}")));
        }
        for x in [u, v] {
            degree[x as usize - 1] += 1;
            if degree[x as usize - 1] > d {
                return Err(load_err(
                    line_no,
                    format!("vertex {x} exceeds the degree bound {d}"),
                ));
            }
        }
        edges.push((u, v));
    }
    let (n, d) = header.ok_or_else(|| load_err(1, "missing header line `n d`"))?;
    GraphStore::from_edges(n, d, edges)
}

pub(super) fn to_text(g: &GraphStore) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.d()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {}", e.lo(), e.hi()).unwrap();
    }
    out
}
