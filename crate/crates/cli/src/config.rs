//! Serializable description of one harness run.

use std::fs;
use std::path::PathBuf;

use lca_core::graph::{gen_graph, load_graph, GenKind, GraphStore};
use lca_core::pseudorandom::{MasterSeed, SeedBundle};
use lca_core::weak_mis::DEFAULT_C1;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest phase count the harness accepts for approximate matching.
pub const MAX_CLI_K: u32 = 4;
pub const DEFAULT_C2: f64 = 4.0;
pub const DEFAULT_QUERY_SAMPLE: u64 = 64;
pub const DEFAULT_R_SAMPLES: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Mis,
    MisSweep,
    Mm,
    Amis,
    Amm,
    RDist,
    ComponentStats,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mis => "mis",
            Command::MisSweep => "mis-sweep",
            Command::Mm => "mm",
            Command::Amis => "amis",
            Command::Amm => "amm",
            Command::RDist => "r-dist",
            Command::ComponentStats => "component-stats",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSource {
    File(PathBuf),
    /// Generator spec such as `gnp:n=500,p=0.01,d=8`.
    Gen(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MmMethod {
    #[default]
    LineGraph,
    IsraeliItai,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AnswerKind {
    Mis,
    Matching,
}

/// Everything that determines a run's output. Serializing it and running it
/// again reproduces the output byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub graph: GraphSource,
    pub seed: MasterSeed,
    /// Degree bounds to run with; empty means the graph's own bound.
    pub d: Vec<usize>,
    pub eps: Option<f64>,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub ell: Option<u64>,
    pub k: Option<u32>,
    pub reps: u32,
    pub method: MmMethod,
    /// Samples for `r-dist`.
    pub samples: u64,
    /// Vertices or edges whose per-query cost is measured in isolation.
    pub query_sample: u64,
    /// Emit one row per vertex or edge instead of one summary row per repetition.
    pub emit_answers: bool,
    pub answers: Option<PathBuf>,
    pub kind: Option<AnswerKind>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, graph: GraphSource) -> Self {
        RunConfig {
            command,
            graph,
            seed: MasterSeed::default(),
            d: Vec::new(),
            eps: None,
            delta: lca_core::greedy::DEFAULT_DELTA,
            c1: DEFAULT_C1,
            c2: DEFAULT_C2,
            ell: None,
            k: None,
            reps: 1,
            method: MmMethod::default(),
            samples: DEFAULT_R_SAMPLES,
            query_sample: DEFAULT_QUERY_SAMPLE,
            emit_answers: false,
            answers: None,
            kind: None,
            format: Format::default(),
        }
    }

    pub fn schema(&self) -> String {
        let suffix = if self.emit_answers { "-answers" } else { "" };
        format!("lca.{}{suffix}/v1", self.command.name())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, reason: String| Err(CliError::validation(field, reason));
        if self.reps == 0 {
            return bad("reps", "must be at least 1".into());
        }
        if self.command != Command::MisSweep && self.d.len() > 1 {
            return bad("d", format!("{} takes a single degree bound", self.command.name()));
        }
        if let GraphSource::Gen(spec) = &self.graph {
            spec.parse::<GenKind>()
                .map_err(|e| CliError::validation("gen", e.to_string()))?;
        }
        if matches!(self.command, Command::Amis | Command::Amm) {
            match self.eps {
                None => return bad("eps", format!("{} needs --eps", self.command.name())),
                Some(e) if !(e > 0.0 && e <= 1.0) => return bad("eps", format!("must lie in (0, 1], got {e}")),
                _ => {}
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta", format!("must lie in (0, 1), got {}", self.delta));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return bad("c1", format!("must be positive, got {}", self.c1));
        }
        if !(self.c2 > 0.0 && self.c2.is_finite()) {
            return bad("c2", format!("must be positive, got {}", self.c2));
        }
        if let Some(k) = self.k {
            if k == 0 || k > MAX_CLI_K {
                return bad(
                    "k",
                    format!("must lie in 1..={MAX_CLI_K}; larger phase counts are beyond desk scale"),
                );
            }
        }
        if self.command == Command::Amm && self.k.is_none() {
            let implied = (2.0 / self.eps.unwrap_or(1.0) - 1e-9).ceil() as u32;
            if implied > MAX_CLI_K {
                return bad(
                    "eps",
                    format!("implies k = {implied} phases (limit {MAX_CLI_K}); raise --eps or pass --k"),
                );
            }
        }
        if self.samples == 0 {
            return bad("samples", "must be at least 1".into());
        }
        if self.command == Command::Verify {
            if self.answers.is_none() {
                return bad("answers", "verify needs --answers".into());
            }
            if self.kind.is_none() {
                return bad("kind", "verify needs --kind".into());
            }
        }
        Ok(())
    }

    /// Seed bundle of repetition `rep`.
    pub fn rep_seed(&self, rep: u32) -> SeedBundle {
        SeedBundle::new(self.seed).child(&format!("rep:{rep}"))
    }

    /// The input graph for one repetition, with the degree bound replaced by `d` if given.
    pub fn load_graph(&self, rep_seed: &SeedBundle, d: Option<usize>) -> Result<GraphStore, CliError> {
        let g = match &self.graph {
            GraphSource::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::validation("graph", format!("{}: {e}", path.display())))?;
                load_graph(&text).map_err(|e| CliError::validation("graph", e.to_string()))?
            }
            GraphSource::Gen(spec) => {
                let mut kind: GenKind = spec
                    .parse()
                    .map_err(|e: lca_core::GraphError| CliError::validation("gen", e.to_string()))?;
                if let Some(bound) = d {
                    match &mut kind {
                        GenKind::GnpCapped { d, .. } | GenKind::RandomRegular { d, .. } => *d = bound,
                        _ => {}
                    }
                }
                gen_graph(&kind, rep_seed.graph_seed()).map_err(|e| CliError::validation("gen", e.to_string()))?
            }
        };
        match d {
            Some(bound) if bound != g.d() => GraphStore::from_edges(g.n(), bound, g.edges().map(|e| (e.lo().get(), e.hi().get())))
                .map_err(|e| CliError::validation("d", e.to_string())),
            _ => Ok(g),
        }
    }
}
