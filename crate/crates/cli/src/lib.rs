//! Argument and config-file handling for the `hypersurface-ie` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hypersurface_ie::catalog::HypersurfaceSpec;
use hypersurface_ie::report::{self, Format, RunConfig};
use hypersurface_ie::verify::{CheckId, Tolerance};
use serde::Deserialize;
use thiserror::Error;

/// Environment variable read for the seed when neither `--seed` nor the
/// config file sets one.
pub const SEED_ENV: &str = "HYPERSURFACE_IE_SEED";

pub const EXIT_OK: u8 = 0;
pub const EXIT_UNEXPECTED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hypersurface-ie",
    version,
    about = "Numerical checks of height-function identities and inequalities for hypersurfaces of the unit sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a suite of checks on a list of surfaces.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// Check ids, comma separated or repeated; `all` runs every check.
    /// One of: takahashi, ie, chain, simons, crown, isoparametric, identities.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<String>,

    /// Surface spec, repeatable: `equator:n=<int>`,
    /// `clifford:k=<int>,n=<int>,r=<minimal|einstein|float>`, `cartan`,
    /// `profile:g=<int>,m=<int>,<int>`.
    #[arg(long = "surface")]
    pub surfaces: Vec<String>,

    /// Monte Carlo sample count (at least 10000 when Monte Carlo is used).
    #[arg(long)]
    pub samples: Option<usize>,

    /// RNG seed; falls back to the config file, then to HYPERSURFACE_IE_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Nodes per angle of the tensor quadrature rule.
    #[arg(long)]
    pub quadrature_degree: Option<usize>,

    /// Report path; plot tables are written next to it. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_parser = ["json", "csv"])]
    pub format: Option<String>,

    /// TOML file with the same keys; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub suite: Option<Vec<String>>,
    pub surfaces: Option<Vec<String>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub quadrature_degree: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<Tolerance>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("invalid config file {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },

    #[error("invalid surface `{text}`\n  {text}\n  {caret} {message}")]
    Surface { text: String, caret: String, message: String },

    #[error("{0}")]
    Check(String),

    #[error("invalid {SEED_ENV} `{0}`: expected a non-negative integer")]
    SeedEnv(String),

    #[error(transparent)]
    Core(#[from] hypersurface_ie::Error),
}

pub fn parse_surface(text: &str) -> Result<HypersurfaceSpec, ConfigError> {
    text.parse().map_err(|e| match e {
        hypersurface_ie::Error::Parse { column, message } => ConfigError::Surface {
            text: text.to_string(),
            caret: format!("{}^", " ".repeat(column.saturating_sub(1))),
            message,
        },
        other => ConfigError::Surface {
            text: text.to_string(),
            caret: format!("^{}", "~".repeat(text.len().saturating_sub(1))),
            message: other.to_string(),
        },
    })
}

pub fn parse_suite(items: &[String]) -> Result<Vec<CheckId>, ConfigError> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()) {
        if item == "all" {
            out.extend(CheckId::ALL);
        } else {
            out.push(item.parse().map_err(ConfigError::Check)?);
        }
    }
    Ok(out)
}

pub fn read_file_config(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
    toml::from_str(&text).map_err(|source| ConfigError::Toml { path: path.into(), source })
}

/// Merges flags over the config file over defaults. `seed_env` is the value of
/// [`SEED_ENV`], passed in so callers control the environment.
pub fn parse_config(args: &VerifyArgs, seed_env: Option<&str>) -> Result<RunConfig, ConfigError> {
    let file = match &args.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let defaults = RunConfig::default();

    let suite_items = if args.suite.is_empty() { file.suite.unwrap_or_default() } else { args.suite.clone() };
    let suite = if suite_items.is_empty() { defaults.suite } else { parse_suite(&suite_items)? };
    let surface_items =
        if args.surfaces.is_empty() { file.surfaces.unwrap_or_default() } else { args.surfaces.clone() };
    let surfaces = surface_items.iter().map(|s| parse_surface(s)).collect::<Result<Vec<_>, _>>()?;

    let env_seed =
        seed_env.map(|s| s.trim().parse::<u64>().map_err(|_| ConfigError::SeedEnv(s.to_string()))).transpose()?;
    let format = match &args.format {
        Some(f) => f.parse().map_err(ConfigError::Check)?,
        None => file.format.unwrap_or(defaults.format),
    };
    let cfg = RunConfig {
        suite,
        surfaces,
        samples: args.samples.or(file.samples).unwrap_or(defaults.samples),
        seed: args.seed.or(file.seed).or(env_seed).unwrap_or(defaults.seed),
        quadrature_degree: args.quadrature_degree.or(file.quadrature_degree).unwrap_or(defaults.quadrature_degree),
        tolerance: file.tolerance.unwrap_or(defaults.tolerance),
        out: args.out.clone().or(file.out),
        format,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn summary_line(r: &report::Report) -> String {
    let s = &r.summary;
    format!(
        "{} pass, {} expected-fail, {} fail, {} inconclusive, {} skipped",
        s.pass, s.expected_fail, s.fail, s.inconclusive, s.skipped
    )
}

/// Runs the binary on `argv` and returns the process exit code.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let Command::Verify(args) = cli.command;
    let seed_env = std::env::var(SEED_ENV).ok();
    let cfg = match parse_config(&args, seed_env.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let run = match report::run(&cfg) {
        Ok(run) => run,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    match &cfg.out {
        Some(out) => match run.write(out, cfg.format) {
            Ok(paths) => {
                for p in paths {
                    let _ = writeln!(stderr, "wrote {}", p.display());
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_UNEXPECTED;
            }
        },
        None => {
            let _ = stdout.write_all(run.report.render(cfg.format).as_bytes());
        }
    }
    let _ = writeln!(stderr, "{}", summary_line(&run.report));
    if run.report.summary.exit_code == 0 {
        EXIT_OK
    } else {
        EXIT_UNEXPECTED
    }
}
