//! Experiment harness for `lca-core`: runs each algorithm over generated or
//! loaded graphs, verifies the answers and emits versioned CSV or JSON.

pub mod config;
pub mod error;
pub mod run;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{AnswerKind, Command, Format, GraphSource, MmMethod, RunConfig};
pub use error::CliError;
pub use run::{run, Report};
pub use table::Table;

/// What `--out P` records in `P.manifest.json`: enough to rerun the command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    /// Where the original output was written.
    pub output: Option<PathBuf>,
}

impl Manifest {
    pub fn new(config: RunConfig, output: Option<PathBuf>) -> Self {
        Manifest {
            tool: "lca".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            output,
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::validation("manifest", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation("manifest", e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Runs `config` and writes its output plus a manifest next to `out`.
pub fn run_to_file(config: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let report = run(config)?;
    fs::write(out, report.render(config)).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    Manifest::new(config.clone(), Some(out.to_path_buf())).save(&Manifest::path_for(out))?;
    Ok(report)
}
