mod commands;
mod output;
mod spec;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Status;
use spec::{load_dist_spec, Format, Mode, Params, RunSpec};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: unparsable spec, invalid distribution, bad parameter.
    Validation(String),
    Io(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "renewal-kit", version, about = "Renewal sequences of lattice random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads; 0 picks one per core.
    #[arg(long, env = "RENEWAL_KIT_THREADS", default_value_t = 0, global = true)]
    threads: usize,
}

#[derive(Args)]
struct Common {
    /// Inline JSON or a path to a JSON file.
    #[arg(long)]
    dist: String,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Use f64 arithmetic even when the weights are rational.
    #[arg(long)]
    float: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate p_0..p_N with first and second differences.
    Compute {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
    },
    /// Bracket and estimate lim p_n.
    Limit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Largest N = 10·M the search may use.
        #[arg(long, default_value_t = 1 << 20)]
        budget: usize,
    },
    /// Run every identity and inequality check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Prefix length for the identity suite.
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Cutoff for the limit bracket check.
        #[arg(long, default_value_t = 100)]
        m: usize,
    },
    /// Compare Fourier-coefficient quadrature with the recurrence.
    Quadrature {
        #[command(flatten)]
        common: Common,
        /// Difference order.
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value_t = 0)]
        m_min: usize,
        #[arg(long, default_value_t = 20)]
        m_max: usize,
        /// Radius in (0, 1]; 1 selects the boundary integral.
        #[arg(long, default_value_t = 0.9)]
        r: f64,
        #[arg(long, default_value_t = renewal_kit::fourier::DEFAULT_PANELS)]
        panels: usize,
        /// Fail (exit 2) when any abs_diff exceeds this.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Monte Carlo estimate of p_n checked against the recurrence.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Confidence multiplier.
        #[arg(long, default_value_t = renewal_kit::mcsim::DEFAULT_Z)]
        z: f64,
        /// Fail (exit 2) below this fraction of passing levels.
        #[arg(long, default_value_t = 0.999)]
        min_pass_fraction: f64,
    },
    /// Re-run the parameters echoed in an earlier output.
    Replay {
        path: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn resolve(common: &Common, params: Params, float_only: bool) -> Result<RunSpec, CliError> {
    let dist = load_dist_spec(&common.dist)?;
    let mut spec = RunSpec {
        params,
        dist,
        mode: Mode::Float,
        format: common.format,
    };
    let d = spec.distribution()?;
    if !common.float && !float_only && d.is_rational() {
        spec.mode = Mode::Exact;
    }
    Ok(spec)
}

fn plan(command: Command) -> Result<(RunSpec, Option<PathBuf>), CliError> {
    Ok(match command {
        Command::Compute { common, n } => (resolve(&common, Params::Compute { n }, false)?, common.output),
        Command::Limit { common, tol, budget } => (resolve(&common, Params::Limit { tol, budget }, true)?, common.output),
        Command::Verify { common, n, m } => (resolve(&common, Params::Verify { n, m }, false)?, common.output),
        Command::Quadrature {
            common,
            l,
            m_min,
            m_max,
            r,
            panels,
            tol,
        } => (
            resolve(
                &common,
                Params::Quadrature {
                    l,
                    m_min,
                    m_max,
                    r,
                    panels,
                    tol,
                },
                false,
            )?,
            common.output,
        ),
        Command::Simulate {
            common,
            n_max,
            trials,
            seed,
            z,
            min_pass_fraction,
        } => (
            resolve(
                &common,
                Params::Simulate {
                    n_max,
                    trials,
                    seed,
                    z,
                    min_pass_fraction,
                },
                false,
            )?,
            common.output,
        ),
        Command::Replay { path, output } => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
            (RunSpec::from_output(&text)?, output)
        }
    })
}

fn execute(command: Command) -> Result<Status, CliError> {
    let (spec, output) = plan(command)?;
    let (doc, status) = commands::run(&spec)?;
    let mut out: Box<dyn Write> = match &output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    doc.write(&spec, &mut out)?;
    out.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(2)
        }
        Ok(Status::BudgetExhausted) => {
            eprintln!("error: budget exhausted before reaching the tolerance; partial results written");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(1)
        }
    }
}
