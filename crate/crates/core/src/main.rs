use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use probe_readout::harness::{
    emit_diffraction_profile, output, run_fresnel_sweep, run_jitter_experiment,
    run_pit_depth_sweep, run_ter_sweep, ConfigError, ExperimentConfig, ExperimentKind, RunError,
};
use probe_readout::modem::{count_distinct_patterns, CountMethod};

/// Optical read channel simulator for cantilever-array probe storage.
#[derive(Parser)]
#[command(name = "probe-readout", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// TER of threshold and ML detection against SNR.
    Ter(Common),
    /// LLN-scaled vs genie detection under positioning jitter.
    Jitter(Common),
    /// ML TER against indentation depth for several laser wavelengths.
    Pitdepth(Common),
    /// TER against Fresnel number with Kirchhoff diffraction.
    Fresnel(Common),
    /// Diffraction intensity against angle.
    Profile {
        #[command(flatten)]
        common: Common,
        /// Named parameter set, e.g. `paper-fig4`.
        #[arg(long)]
        preset: Option<String>,
        /// Add a column computed by Kirchhoff quadrature.
        #[arg(long)]
        kirchhoff: bool,
    },
    /// Number of distinct intensity patterns of an N-cantilever array.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
    },
}

#[derive(Args)]
struct Common {
    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Extra `key=value` override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Formula,
    Brute,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => Failure::Config(c.into()),
            RunError::Model(m) => Failure::Runtime(m.into()),
        }
    }
}

fn load(
    kind: ExperimentKind,
    common: &Common,
    preset: Option<&str>,
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match preset {
        Some(name) => ExperimentConfig::preset(kind, name)?,
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        cfg.apply_text(&text)?;
    }
    for item in &common.overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            reason: format!("override `{item}` is not key=value"),
        })?;
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config_err = |e: ConfigError| Failure::Config(e.into());
    let runtime = Failure::Runtime;
    let (kind, common, preset) = match &cli.command {
        Command::Count { n, method } => {
            let method = match method {
                Method::Formula => CountMethod::Formula,
                Method::Brute => CountMethod::BruteForce,
            };
            let count =
                count_distinct_patterns(*n, method).map_err(|e| Failure::Config(e.into()))?;
            println!("{count}");
            return Ok(());
        }
        Command::Ter(c) => (ExperimentKind::TerSweep, c, None),
        Command::Jitter(c) => (ExperimentKind::Jitter, c, None),
        Command::Pitdepth(c) => (ExperimentKind::PitDepth, c, None),
        Command::Fresnel(c) => (ExperimentKind::Fresnel, c, None),
        Command::Profile { common, preset, .. } => {
            (ExperimentKind::Profile, common, preset.as_deref())
        }
    };
    let mut cfg = load(kind, common, preset).map_err(config_err)?;
    if let Command::Profile {
        kirchhoff: true, ..
    } = cli.command
    {
        cfg.kirchhoff = true;
    }
    let Format::Csv = common.format;

    let mut out = open_output(&common.out).map_err(runtime)?;
    let written = match kind {
        ExperimentKind::Profile => {
            let profile = emit_diffraction_profile(&cfg)?;
            output::write_profile_csv(&mut out, &cfg, &profile)
        }
        _ => {
            let curve = match kind {
                ExperimentKind::TerSweep => run_ter_sweep(&cfg)?,
                ExperimentKind::Jitter => run_jitter_experiment(&cfg)?,
                ExperimentKind::PitDepth => run_pit_depth_sweep(&cfg)?,
                ExperimentKind::Fresnel => run_fresnel_sweep(&cfg)?,
                ExperimentKind::Profile | ExperimentKind::Count => unreachable!(),
            };
            output::write_ter_csv(&mut out, &cfg, &curve)
        }
    };
    written
        .and_then(|()| out.flush())
        .context("writing output")
        .map_err(runtime)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
