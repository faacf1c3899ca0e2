//! Command-line experiments: configuration, replication, aggregation and
//! output.
//!
//! Every subcommand reads the same option set. Options may come from a JSON
//! file given by `--config`; flags on the command line override it.

mod commands;
mod compare;
pub mod verify;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffLaw;
use crate::error::{Error, Result};
use crate::nodal::Rect;

pub use commands::{
    geometry_check, kacrice, local, nodal_cell_polylines, plot, simulate, smallball,
    GeometryRecord, KacRiceReport, LocalRecord, LocalReport, SimRecord, SimReport, SmallBallReport,
};
pub use compare::{compare_laws, LawStats, PairStats, UniversalityReport};

/// Exit status for an invalid configuration.
pub const EXIT_INVALID: i32 = 2;
/// Exit status for a numerical failure such as the quadrature depth cap.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit status when a check fails.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "nodal-lab",
    version,
    about = "Nodal sets of random trigonometric polynomials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: ExperimentConfig,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Monte Carlo nodal length of f_n on [0, pi]^2.
    Simulate,
    /// Exact Gaussian expected length by Kac-Rice quadrature.
    Kacrice,
    /// Length distribution in a window of F_n or of a limit field.
    Local,
    /// Empirical P(|F_n(k pi, l pi)| <= eps) and the Halasz integral.
    Smallball,
    /// Line-crossing bounds on random or nodal polylines.
    GeometryCheck,
    /// SVG of a nodal set.
    Plot,
    /// Run the invariant suite.
    Verify,
    /// Compare length distributions across coefficient laws.
    Compare,
}

/// Options shared by all subcommands. Unset fields take per-command
/// defaults.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Subcommand named in a config file; must match the one given.
    #[arg(skip)]
    pub command: Option<Command>,
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Polynomial degree.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// gaussian, rademacher, exponential or uniform.
    #[arg(long, global = true)]
    pub law: Option<CoeffLaw>,
    /// Comma-separated laws for `compare`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub laws: Option<Vec<CoeffLaw>>,
    /// x_min,x_max,y_min,y_max; numbers may carry a `pi` suffix (`3pi`).
    #[arg(long, global = true, value_parser = parse_window)]
    pub window: Option<Rect>,
    /// Grid density of the global extraction.
    #[arg(long, global = true)]
    pub samples_per_unit: Option<f64>,
    /// Relative tolerance of the Kac-Rice quadrature.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub k: Option<u64>,
    #[arg(long, global = true)]
    pub l: Option<u64>,
    /// Spectral resolution of the limit-field samplers.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// `local`: polynomial, f_infinity or g_infinity. `geometry-check`: random or nodal.
    #[arg(long, global = true)]
    pub source: Option<String>,
    /// `local`: second source for a two-sample KS statistic.
    #[arg(long, global = true)]
    pub reference: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "NODAL_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Write 0 in the wall_ms column so outputs are byte-reproducible.
    #[arg(long, global = true)]
    pub omit_timing: bool,
}

impl ExperimentConfig {
    /// Fill unset fields from `file`.
    pub fn merged_over(self, file: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            command: self.command.or(file.command),
            config: self.config,
            seed: self.seed.or(file.seed),
            reps: self.reps.or(file.reps),
            n: self.n.or(file.n),
            law: self.law.or(file.law),
            laws: self.laws.or(file.laws),
            window: self.window.or(file.window),
            samples_per_unit: self.samples_per_unit.or(file.samples_per_unit),
            tol: self.tol.or(file.tol),
            eps: self.eps.or(file.eps),
            k: self.k.or(file.k),
            l: self.l.or(file.l),
            m: self.m.or(file.m),
            source: self.source.or(file.source),
            reference: self.reference.or(file.reference),
            out: self.out.or(file.out),
            threads: self.threads.or(file.threads),
            omit_timing: self.omit_timing || file.omit_timing,
        }
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| invalid(format!("bad config {}: {e}", path.display())))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn reps_or(&self, default: usize) -> Result<usize> {
        let r = self.reps.unwrap_or(default);
        if r == 0 {
            return Err(invalid("reps must be at least 1"));
        }
        Ok(r)
    }

    pub fn n_or(&self, default: usize) -> Result<usize> {
        let n = self.n.unwrap_or(default);
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        Ok(n)
    }

    pub fn law(&self) -> CoeffLaw {
        self.law.unwrap_or(CoeffLaw::Gaussian)
    }

    pub fn window_or(&self, default: Rect) -> Result<Rect> {
        let w = self.window.unwrap_or(default);
        w.validate()?;
        Ok(w)
    }

    /// Check the output directory exists or can be created.
    pub fn prepare_out(&self) -> Result<Option<&Path>> {
        match &self.out {
            None => Ok(None),
            Some(d) => {
                std::fs::create_dir_all(d)
                    .map_err(|e| invalid(format!("cannot create {}: {e}", d.display())))?;
                Ok(Some(d.as_path()))
            }
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let (num, scale) = match s.strip_suffix("pi") {
        Some(rest) => (rest.trim(), PI),
        None => (s, 1.0),
    };
    let v = match num {
        "" => 1.0,
        "-" => -1.0,
        _ => num
            .parse::<f64>()
            .map_err(|e| format!("bad number `{s}`: {e}"))?,
    };
    Ok(v * scale)
}

/// `x_min,x_max,y_min,y_max`.
pub fn parse_window(s: &str) -> std::result::Result<Rect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(parse_number)
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!("window needs four numbers, got {}", v.len()));
    }
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureDepth { .. }
        | Error::ClosedFormSingular
        | Error::DegenerateMarginal
        | Error::IdentityViolated(_) => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

/// Parse arguments, run the command and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command, cli.config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Merge the config file, then dispatch on a thread pool of the requested
/// size. Returns the exit status.
pub fn run(command: Command, flags: ExperimentConfig) -> Result<i32> {
    let cfg = match &flags.config {
        Some(p) => {
            let file = ExperimentConfig::load(p)?;
            flags.merged_over(file)
        }
        None => flags,
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(invalid(format!(
                "config is for `{}`, not `{}`",
                command_name(c),
                command_name(command)
            )));
        }
    }
    if cfg.threads == Some(0) {
        return Err(invalid("threads must be at least 1"));
    }
    let pool = crate::experiment::thread_pool(cfg.threads)?;
    pool.install(|| commands::dispatch(command, &cfg))
}

pub fn command_name(c: Command) -> &'static str {
    match c {
        Command::Simulate => "simulate",
        Command::Kacrice => "kacrice",
        Command::Local => "local",
        Command::Smallball => "smallball",
        Command::GeometryCheck => "geometry-check",
        Command::Plot => "plot",
        Command::Verify => "verify",
        Command::Compare => "compare",
    }
}
