use std::fs;
use std::path::Path;

use clap::ValueEnum;
use renewal_kit::{DistSpec, IncrementDistribution};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Fully resolved parameters of one run, echoed into every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    #[serde(flatten)]
    pub params: Params,
    pub dist: DistSpec,
    pub mode: Mode,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Params {
    Compute {
        n: usize,
    },
    Limit {
        tol: f64,
        budget: usize,
    },
    Verify {
        n: usize,
        m: usize,
    },
    Quadrature {
        l: u32,
        m_min: usize,
        m_max: usize,
        r: f64,
        panels: usize,
        tol: Option<f64>,
    },
    Simulate {
        n_max: usize,
        trials: u64,
        seed: u64,
        z: f64,
        min_pass_fraction: f64,
    },
}

impl RunSpec {
    pub fn distribution(&self) -> Result<IncrementDistribution, CliError> {
        IncrementDistribution::from_spec(&self.dist).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Reads the echoed spec back from a JSON output or the `# run:` line
    /// of a CSV output.
    pub fn from_output(text: &str) -> Result<Self, CliError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Envelope {
                run: RunSpec,
            }
            let env: Envelope = serde_json::from_str(trimmed)
                .map_err(|e| CliError::Validation(format!("cannot read run spec from JSON output: {e}")))?;
            return Ok(env.run);
        }
        let line = trimmed
            .lines()
            .find_map(|l| l.strip_prefix(crate::output::RUN_PREFIX))
            .ok_or_else(|| CliError::Validation("no '# run:' line found in CSV output".into()))?;
        serde_json::from_str(line).map_err(|e| CliError::Validation(format!("cannot parse run spec: {e}")))
    }
}

/// `--dist` is either inline JSON or the path of a JSON file.
pub fn load_dist_spec(arg: &str) -> Result<DistSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        let path = Path::new(arg);
        fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read distribution file {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("invalid distribution spec: {e}")))
}
