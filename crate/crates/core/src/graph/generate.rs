use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GraphError, GraphStore};

/// Graph families understood by [`gen_graph`].
///
/// The textual form is `kind:key=value,...`, e.g. `gnp:n=500,p=0.01,d=8`,
/// `regular:n=100,d=4`, `grid:rows=3,cols=4`, `cycle:n=4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenKind {
    /// Erdős–Rényi G(n,p); vertices above degree `d` lose random incident edges.
    GnpCapped { n: usize, p: f64, d: usize },
    RandomRegular { n: usize, d: usize },
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    /// Star on `n` vertices with vertex 1 as the center.
    Star { n: usize },
    Complete { n: usize },
}

fn gen_err(msg: impl Into<String>) -> GraphError {
    GraphError::Generator(msg.into())
}

impl FromStr for GenKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut n = None;
        let mut d = None;
        let mut p = None;
        let mut rows = None;
        let mut cols = None;
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| gen_err(format!("expected key=value, got {kv:?}")))?;
            let int = || v.parse::<usize>().map_err(|_| gen_err(format!("{k}: bad integer {v:?}")));
            match k {
                "n" => n = Some(int()?),
                "d" => d = Some(int()?),
                "rows" => rows = Some(int()?),
                "cols" => cols = Some(int()?),
                "p" => p = Some(v.parse::<f64>().map_err(|_| gen_err(format!("p: bad number {v:?}")))?),
                _ => return Err(gen_err(format!("unknown parameter {k:?}"))),
            }
        }
        let need = |x: Option<usize>, name: &str| x.ok_or_else(|| gen_err(format!("{kind} needs {name}")));
        Ok(match kind {
            "gnp" | "gnp-capped" => {
                let n = need(n, "n")?;
                GenKind::GnpCapped {
                    n,
                    p: p.ok_or_else(|| gen_err("gnp needs p"))?,
                    d: d.unwrap_or(n.saturating_sub(1)),
                }
            }
            "regular" | "random-regular" => GenKind::RandomRegular {
                n: need(n, "n")?,
                d: need(d, "d")?,
            },
            "path" => GenKind::Path { n: need(n, "n")? },
            "cycle" => GenKind::Cycle { n: need(n, "n")? },
            "grid" => GenKind::Grid {
                rows: need(rows, "rows")?,
                cols: need(cols, "cols")?,
            },
            "star" => GenKind::Star { n: need(n, "n")? },
            "complete" => GenKind::Complete { n: need(n, "n")? },
            other => return Err(gen_err(format!("unknown graph kind {other:?}"))),
        })
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::GnpCapped { n, p, d } => write!(f, "gnp:n={n},p={p},d={d}"),
            GenKind::RandomRegular { n, d } => write!(f, "regular:n={n},d={d}"),
            GenKind::Path { n } => write!(f, "path:n={n}"),
            GenKind::Cycle { n } => write!(f, "cycle:n={n}"),
            GenKind::Grid { rows, cols } => write!(f, "grid:rows={rows},cols={cols}"),
            GenKind::Star { n } => write!(f, "star:n={n}"),
            GenKind::Complete { n } => write!(f, "complete:n={n}"),
        }
    }
}

/// Generates a graph; random families are deterministic in `gen_seed`.
pub fn gen_graph(kind: &GenKind, gen_seed: u64) -> Result<GraphStore, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(gen_seed);
    match *kind {
        GenKind::GnpCapped { n, p, d } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(gen_err(format!("p must lie in [0,1], got {p}")));
            }
            gnp_capped(n, p, d, &mut rng)
        }
        GenKind::RandomRegular { n, d } => random_regular(n, d, &mut rng),
        GenKind::Path { n } => {
            GraphStore::from_edges(n, 2, (1..n as u32).map(|v| (v, v + 1)))
        }
        GenKind::Cycle { n } => {
            if n < 3 {
                return Err(gen_err("a cycle needs at least 3 vertices"));
            }
            let edges = (1..n as u32).map(|v| (v, v + 1)).chain([(1, n as u32)]);
            GraphStore::from_edges(n, 2, edges)
        }
        GenKind::Grid { rows, cols } => {
            let id = |r: usize, c: usize| (r * cols + c + 1) as u32;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            GraphStore::from_edges(rows * cols, 4, edges)
        }
        GenKind::Star { n } => {
            GraphStore::from_edges(n, n.saturating_sub(1), (2..=n as u32).map(|v| (1, v)))
        }
        GenKind::Complete { n } => {
            let n32 = n as u32;
            let edges = (1..=n32).flat_map(|u| (u + 1..=n32).map(move |v| (u, v)));
            GraphStore::from_edges(n, n.saturating_sub(1), edges)
        }
    }
}

fn remove_from(list: &mut Vec<u32>, x: u32) {
    let pos = list.iter().position(|&y| y == x).expect("symmetric adjacency");
    list.swap_remove(pos);
}

fn gnp_capped(n: usize, p: f64, d: usize, rng: &mut ChaCha8Rng) -> Result<GraphStore, GraphError> {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
    }
    for v in 0..n {
        adj[v].sort_unstable();
        while adj[v].len() > d {
            let victim = adj[v][rng.gen_range(0..adj[v].len())];
            remove_from(&mut adj[v], victim);
            remove_from(&mut adj[victim as usize], v as u32);
            adj[v].sort_unstable();
        }
    }
    let edges = adj.iter().enumerate().flat_map(|(u, list)| {
        list.iter()
            .filter(move |&&v| v as usize > u)
            .map(move |&v| (u as u32 + 1, v + 1))
    });
    GraphStore::from_edges(n, d, edges)
}

/// Random `d`-regular graph by randomized stub pairing with restarts.
fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<GraphStore, GraphError> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(gen_err(format!("no simple {d}-regular graph on {n} vertices")));
    }
    'restart: for _ in 0..1000 {
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(d); n];
        while !stubs.is_empty() {
            let mut paired = false;
            for _ in 0..(stubs.len() * 4).max(16) {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                let (a, b) = (stubs[i], stubs[j]);
                if i == j || a == b || adj[a as usize].contains(&b) {
                    continue;
                }
                adj[a as usize].push(b);
                adj[b as usize].push(a);
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                paired = true;
                break;
            }
            if !paired {
                continue 'restart;
            }
        }
        let edges = adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as u32 + 1, v + 1))
        });
        return GraphStore::from_edges(n, d, edges);
    }
    Err(gen_err("random regular pairing did not converge"))
}
