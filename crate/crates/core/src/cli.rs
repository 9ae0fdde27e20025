//! Command-line front end.
//!
//! ```text
//! beamnoma <beam-pattern|gain-region|noma-probability|avg-sum-rate>
//!          [--config <path>] [--seed <u64>] [--trials <n>] [--n-bs <list>]
//!          [--policy <coverage|gain|coverage-no-control>] [--out <path>]
//!          [--format <csv|json>] [--threads <n>]
//! ```
//!
//! Flags override values from the config file, which override the defaults.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ConfigFile, OutputFormat, RunConfig};
use crate::experiments::ExperimentKind;
use crate::rates::FeasibilityPolicy;

/// Exit status for a bad invocation.
pub const EXIT_USAGE: u8 = 2;
/// Exit status for a runtime failure.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "beamnoma",
    version,
    about = "Hybrid mmWave NOMA with analog beamwidth control: link-level experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Beam pattern of the full array and of a 1.5x widened beam.
    BeamPattern(RunArgs),
    /// Asymptotic NOMA-over-TDMA gain on a (|psi12|, alpha12) grid.
    GainRegion(RunArgs),
    /// Probability of forming a NOMA group versus N_BS.
    NomaProbability(RunArgs),
    /// Average sum-rate versus N_BS.
    AvgSumRate(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Coverage,
    Gain,
    CoverageNoControl,
}

impl From<PolicyArg> for FeasibilityPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Coverage => FeasibilityPolicy::Coverage,
            PolicyArg::Gain => FeasibilityPolicy::Gain,
            PolicyArg::CoverageNoControl => FeasibilityPolicy::CoverageNoControl,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("must be at least 1".to_string()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed [default: 42].
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Monte-Carlo trials.
    #[arg(long, value_name = "N", value_parser = positive)]
    trials: Option<usize>,
    /// Comma-separated BS antenna counts [default: 16,24,32,40,48,56,64].
    #[arg(long = "n-bs", value_name = "LIST", value_delimiter = ',', value_parser = positive)]
    n_bs: Option<Vec<usize>>,
    /// NOMA-group rule for the beamwidth-controlled scheme [default: gain].
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    /// Output file [default: <experiment>.<format>].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads [default: all cores].
    #[arg(long, value_name = "N", value_parser = positive)]
    threads: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_FAILURE,
        }
    }
}

/// Parses `argv` (including the program name) into a resolved run.
pub fn parse_cli<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (kind, args) = match cli.command {
        Command::BeamPattern(a) => (ExperimentKind::BeamPattern, a),
        Command::GainRegion(a) => (ExperimentKind::GainRegion, a),
        Command::NomaProbability(a) => (ExperimentKind::NomaProbability, a),
        Command::AvgSumRate(a) => (ExperimentKind::AvgSumRate, a),
    };

    let mut file = match &args.config {
        Some(path) => ConfigFile::read(path)?,
        None => ConfigFile::default(),
    };
    if let Some(seed) = args.seed {
        file.master_seed = Some(seed);
    }
    if let Some(trials) = args.trials {
        file.trials = Some(trials);
    }
    if let Some(n_bs) = args.n_bs {
        file.n_bs_values = Some(n_bs);
    }
    if let Some(policy) = args.policy {
        file.policy = Some(policy.into());
    }
    let experiment = file.resolve(Some(kind))?;

    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let output_path = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", kind.as_str(), format.extension())));
    Ok(RunConfig {
        experiment,
        output_path,
        format,
        threads: args.threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn maps_flags() {
        let run = parse_cli([
            "beamnoma",
            "noma-probability",
            "--n-bs",
            "16,32,64",
            "--trials",
            "100000",
            "--seed",
            "7",
        ])
        .unwrap();
        let e = &run.experiment;
        assert_eq!(e.kind, ExperimentKind::NomaProbability);
        assert_eq!(e.n_bs_values, vec![16, 32, 64]);
        assert_eq!(e.trials, 100_000);
        assert_eq!(e.master_seed, 7);
        assert_eq!(e.policy, FeasibilityPolicy::Gain);
        assert_eq!(run.format, OutputFormat::Csv);
        assert_eq!(run.output_path, PathBuf::from("noma_probability.csv"));
    }

    #[test]
    fn defaults() {
        let run = parse_cli(["beamnoma", "avg-sum-rate"]).unwrap();
        assert_eq!(run.experiment.master_seed, 42);
        assert_eq!(run.experiment.n_bs_values, vec![16, 24, 32, 40, 48, 56, 64]);
        let run = parse_cli(["beamnoma", "beam-pattern", "--format", "json"]).unwrap();
        assert_eq!(run.experiment.n_bs_values, vec![25]);
        assert_eq!(run.output_path, PathBuf::from("beam_pattern.json"));
    }

    #[test]
    fn policy_names() {
        for (arg, policy) in [
            ("coverage", FeasibilityPolicy::Coverage),
            ("gain", FeasibilityPolicy::Gain),
            ("coverage-no-control", FeasibilityPolicy::CoverageNoControl),
        ] {
            let run = parse_cli(["beamnoma", "avg-sum-rate", "--policy", arg]).unwrap();
            assert_eq!(run.experiment.policy, policy);
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        for argv in [
            vec!["beamnoma"],
            vec!["beamnoma", "simulate"],
            vec!["beamnoma", "avg-sum-rate", "--bogus"],
            vec!["beamnoma", "avg-sum-rate", "--n-bs", "0"],
            vec!["beamnoma", "avg-sum-rate", "--n-bs", "16,0"],
            vec!["beamnoma", "avg-sum-rate", "--trials", "0"],
            vec!["beamnoma", "avg-sum-rate", "--policy", "best"],
        ] {
            let err = parse_cli(argv.clone()).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{argv:?}");
        }
    }

    #[test]
    fn flags_override_config() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(
            f,
            r#"{{"master_seed": 5, "trials": 77, "n_bs_values": [8, 16], "n_ue": 4}}"#
        )
        .unwrap();
        let path = f.path().to_str().unwrap().to_string();
        let run = parse_cli(["beamnoma", "avg-sum-rate", "--config", &path, "--seed", "6"]).unwrap();
        assert_eq!(run.experiment.master_seed, 6);
        assert_eq!(run.experiment.trials, 77);
        assert_eq!(run.experiment.n_bs_values, vec![8, 16]);
        assert_eq!(run.experiment.scenario.n_ue, 4);
    }

    #[test]
    fn unreadable_config_is_runtime_error() {
        let err = parse_cli(["beamnoma", "gain-region", "--config", "/nonexistent/x.json"])
            .unwrap_err();
        assert!(matches!(err, CliError::Config(crate::Error::Io { .. })));
        assert_eq!(err.exit_code(), EXIT_FAILURE);
    }
}
