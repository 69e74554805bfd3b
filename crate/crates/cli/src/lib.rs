//! Command-line experiment driver. Every command is seed-deterministic and
//! prints JSON, except `carlitz --poly` and `--cyclotomic`, which print text.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;

pub use config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config or input text.
    Usage(String),
    /// The computation ran and failed.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ffdp", version, about = "Function-field decoding experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Carlitz polynomial [M](X), cyclotomic Φ_M, or the residue ring descriptor.
    Carlitz {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with_all = ["cyclotomic", "ring"])]
        poly: bool,
        #[arg(long, conflicts_with = "ring")]
        cyclotomic: bool,
        #[arg(long)]
        ring: bool,
        /// Accept deg Q > 1 over prime fields.
        #[arg(long)]
        allow_higher_degree: bool,
    },
    /// Splitting sweep: factors Φ_M(c, X) and compares with the prediction.
    Facts {
        #[command(flatten)]
        common: Common,
        /// Field orders to sweep.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        qs: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Plants a secret and runs the search-to-decision reduction.
    Reduce {
        #[command(flatten)]
        common: Common,
    },
    /// Finds a normal-basis generator and measures the generator rate.
    NormalBasis {
        #[command(flatten)]
        common: Common,
    },
    /// Emits samples as JSON lines.
    Sample {
        #[command(flatten)]
        common: Common,
    },
    /// Estimates a distinguisher's advantage between H_0 and a hybrid.
    Advantage {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Flat TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    #[arg(long = "M")]
    pub m: Option<String>,
    #[arg(long = "Q")]
    pub q_mod: Option<String>,
    /// bernoulli:<p>, weight:<t> or normal:<p>.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Overrides the repetition count derived from delta and mu.
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Maximum number of oracle samples.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Module rank.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Generator file written by `normal-basis`.
    #[arg(long)]
    pub basis: Option<PathBuf>,
    /// ml or planted.
    #[arg(long)]
    pub distinguisher: Option<String>,
    #[arg(long)]
    pub samples_per_query: Option<usize>,
    /// Hybrid index of the alternative stream for `advantage`.
    #[arg(long)]
    pub hybrid: Option<usize>,
    /// Include wall-clock times in reports.
    #[arg(long)]
    pub timing: bool,
}

impl Common {
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            q: self.q,
            p: self.p,
            e: self.e,
            m: self.m.clone(),
            q_mod: self.q_mod.clone(),
            noise: self.noise.clone(),
            delta: self.delta,
            mu: self.mu,
            repetitions: self.repetitions,
            budget: self.budget,
            workers: self.workers,
            seed: self.seed,
            out: self.out.clone(),
            d: self.d,
            trials: self.trials,
            count: self.count,
            basis: self.basis.clone(),
            distinguisher: self.distinguisher.clone(),
            samples_per_query: self.samples_per_query,
            hybrid: self.hybrid,
            timing: self.timing.then_some(true),
        };
        Ok(base.overlay(flags))
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match commands::execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
