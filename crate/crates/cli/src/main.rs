use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lca_cli::config::{DEFAULT_QUERY_SAMPLE, DEFAULT_R_SAMPLES};
use lca_cli::error::EXIT_CHECK_FAILED;
use lca_cli::{run, run_to_file, AnswerKind, CliError, Command, Format, GraphSource, Manifest, MmMethod, RunConfig};
use lca_core::MasterSeed;

#[derive(Parser)]
#[command(name = "lca", version, about = "Local computation algorithms for MIS and matching")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Two-phase MIS LCA on one graph.
    Mis(RunArgs),
    /// MIS LCA over a list of degree bounds (`--d 4,8,16`).
    MisSweep(RunArgs),
    /// Maximal matching LCA.
    Mm(RunArgs),
    /// Approximate MIS through a truncated greedy simulation.
    Amis(RunArgs),
    /// Approximate maximum matching through augmenting-path phases.
    Amm(RunArgs),
    /// Distribution of the greedy simulation cost over random orderings.
    RDist(RunArgs),
    /// Residual component sizes after Phase 1 of the MIS LCA.
    ComponentStats(RunArgs),
    /// Checks a saved answers CSV.
    Verify(RunArgs),
    /// Reruns a saved manifest.
    Repro {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Graph file: header `n d`, then one `u v` per line.
    #[arg(long, required_unless_present = "gen", conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generated graph, e.g. `gnp:n=2000,p=0.004,d=8` or `regular:n=100,d=4`.
    #[arg(long)]
    gen: Option<String>,
    /// Master seed, up to 64 hex digits.
    #[arg(long, default_value = "0")]
    seed: String,
    /// Degree bound(s); a comma-separated list for `mis-sweep`.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Fixed call budget; skips the ordering search.
    #[arg(long)]
    ell: Option<u64>,
    /// Phase count for `amm` (at most 4).
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 1)]
    reps: u32,
    #[arg(long, value_enum, default_value_t = MmMethod::LineGraph)]
    method: MmMethod,
    /// Samples for `r-dist`.
    #[arg(long, default_value_t = DEFAULT_R_SAMPLES)]
    samples: u64,
    /// Queries measured in isolation for the cost columns.
    #[arg(long, default_value_t = DEFAULT_QUERY_SAMPLE)]
    query_sample: u64,
    /// One row per vertex or edge.
    #[arg(long)]
    emit_answers: bool,
    #[arg(long)]
    answers: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<AnswerKind>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; a manifest is written to `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, command: Command) -> Result<(RunConfig, Option<PathBuf>), CliError> {
        let graph = match (self.graph, self.gen) {
            (Some(path), _) => GraphSource::File(path),
            (None, Some(spec)) => GraphSource::Gen(spec),
            (None, None) => return Err(CliError::validation("graph", "pass --graph or --gen")),
        };
        let mut c = RunConfig::new(command, graph);
        c.seed = self
            .seed
            .parse::<MasterSeed>()
            .map_err(|e| CliError::validation("seed", e.to_string()))?;
        c.d = self.d;
        c.eps = self.eps;
        c.delta = self.delta.unwrap_or(c.delta);
        c.c1 = self.c1.unwrap_or(c.c1);
        c.c2 = self.c2.unwrap_or(c.c2);
        c.ell = self.ell;
        c.k = self.k;
        c.reps = self.reps;
        c.method = self.method;
        c.samples = self.samples;
        c.query_sample = self.query_sample;
        c.emit_answers = self.emit_answers;
        c.answers = self.answers;
        c.kind = self.kind;
        c.format = self.format;
        Ok((c, self.out))
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (command, args) = match cli.command {
        Cmd::Repro { manifest, out } => {
            let m = Manifest::load(&manifest)?;
            let report = run(&m.config)?;
            let text = report.render(&m.config);
            let mut code = report.exit_code();
            if let Some(original) = m.output.as_ref().and_then(|p| fs::read(p).ok()) {
                if original == text.as_bytes() {
                    eprintln!("output identical to {}", m.output.as_ref().unwrap().display());
                } else {
                    eprintln!("output differs from {}", m.output.as_ref().unwrap().display());
                    code = EXIT_CHECK_FAILED;
                }
            }
            emit(&text, out.as_ref())?;
            return Ok(code);
        }
        Cmd::Mis(a) => (Command::Mis, a),
        Cmd::MisSweep(a) => (Command::MisSweep, a),
        Cmd::Mm(a) => (Command::Mm, a),
        Cmd::Amis(a) => (Command::Amis, a),
        Cmd::Amm(a) => (Command::Amm, a),
        Cmd::RDist(a) => (Command::RDist, a),
        Cmd::ComponentStats(a) => (Command::ComponentStats, a),
        Cmd::Verify(a) => (Command::Verify, a),
    };
    let (config, out) = args.into_config(command)?;
    let report = match &out {
        Some(path) => run_to_file(&config, path)?,
        None => {
            let report = run(&config)?;
            emit(&report.render(&config), None)?;
            report
        }
    };
    for note in &report.notes {
        eprintln!("{note}");
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
