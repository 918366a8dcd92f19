//! Command-line experiment runner.
//!
//! Subcommands:
//!   run    --config PATH [--reps N] [--seed S] [--out PATH]
//!   sweep  --config PATH [--reps N] [--seed S] [--out PATH]
//!   levels --family F --delta D [--k K] [envelope flags]
//!
//! `run` executes the configured replication batch and writes the fixed
//! CSV table (plus a JSON sidecar with per-k metadata next to it). `sweep`
//! emits the bias/std series of the time average across the configured
//! horizons. `levels` prints a level distribution and the frequencies it
//! implies. Exit code 0 on success, 2 on a configuration error.
//!
//! The worker pool size comes from the THREADS environment variable
//! (default: all cores). Output bytes do not depend on it.

use std::collections::HashMap;
use std::fs;
use std::process::ExitCode;

use steady_mc::experiment::{
    levels_report, render_csv, render_sweep_csv, run_experiment, sweep_bias_std, ExperimentConfig,
    LevelSpec, NuSpec,
};

const USAGE: &str = "\
steady-mc: unbiased steady-state Monte Carlo experiments

USAGE:
  steady-mc run --config PATH [--reps N] [--seed S] [--out PATH]
  steady-mc sweep --config PATH [--reps N] [--seed S] [--out PATH]
  steady-mc levels --family FAMILY --delta D [--k K] [--b-prime B]
                   [--c C --xi X] [--kappa K --kappa-prime KP --gamma G --eta E]

FAMILIES (levels):
  oblivious_exponential   needs --delta
  oblivious_power         needs --delta
  nu_geometric            needs --c --xi
  nu_polynomial           needs --c --xi
  nu_contraction          needs --kappa --kappa-prime --gamma --eta

The config file is a JSON document with \"schema\": 1; see the guide's
experiments chapter for the field list. THREADS sets the worker count.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => dispatch(run_command(&args[1..])),
        Some("sweep") => dispatch(sweep_command(&args[1..])),
        Some("levels") => dispatch(levels_command(&args[1..])),
        Some("--help") | Some("-h") | None => {
            print!("{USAGE}");
            ExitCode::SUCCESS
        }
        Some(other) => {
            eprintln!("unknown subcommand: {other}\n\n{USAGE}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(result: Result<(), CliError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<steady_mc::Error> for CliError {
    fn from(err: steady_mc::Error) -> Self {
        match err {
            steady_mc::Error::Config(_) | steady_mc::Error::InvalidParameter(_) => {
                CliError::Config(err.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn parse_flags(args: &[String]) -> Result<HashMap<String, String>, CliError> {
    let mut flags = HashMap::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(name) = arg.strip_prefix("--") else {
            return Err(CliError::Config(format!("unexpected argument: {arg}")));
        };
        if let Some((key, value)) = name.split_once('=') {
            flags.insert(key.to_string(), value.to_string());
        } else {
            let value = it
                .next()
                .ok_or_else(|| CliError::Config(format!("missing value for --{name}")))?;
            flags.insert(name.to_string(), value.clone());
        }
    }
    Ok(flags)
}

fn parsed<T: std::str::FromStr>(
    flags: &HashMap<String, String>,
    name: &str,
) -> Result<Option<T>, CliError> {
    match flags.get(name) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("invalid value for --{name}: {raw}"))),
    }
}

fn required<T: std::str::FromStr>(
    flags: &HashMap<String, String>,
    name: &str,
) -> Result<T, CliError> {
    parsed(flags, name)?.ok_or_else(|| CliError::Config(format!("missing required flag --{name}")))
}

fn init_thread_pool() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("THREADS") {
        let threads: usize = raw
            .parse()
            .map_err(|_| CliError::Config(format!("THREADS must be an integer, got {raw}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn load_config(args: &[String]) -> Result<(ExperimentConfig, Option<String>), CliError> {
    let flags = parse_flags(args)?;
    let path: String = required(&flags, "config")?;
    let raw = fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
    let mut config: ExperimentConfig = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("cannot parse config {path}: {e}")))?;
    if let Some(reps) = parsed::<u64>(&flags, "reps")? {
        config.reps = reps;
    }
    if let Some(seed) = parsed::<u64>(&flags, "seed")? {
        config.seed = seed;
    }
    if let Some(out) = flags.get("out") {
        config.out = Some(out.clone());
    }
    config.validate()?;
    let out = config.out.clone();
    Ok((config, out))
}

fn emit(csv: String, sidecar: Option<String>, out: Option<String>) -> Result<(), CliError> {
    match out {
        None => {
            print!("{csv}");
        }
        Some(path) => {
            fs::write(&path, csv).map_err(|e| CliError::Runtime(format!("write {path}: {e}")))?;
            if let Some(meta) = sidecar {
                let meta_path = format!("{path}.meta.json");
                fs::write(&meta_path, meta)
                    .map_err(|e| CliError::Runtime(format!("write {meta_path}: {e}")))?;
                eprintln!("wrote {path} and {meta_path}");
            } else {
                eprintln!("wrote {path}");
            }
        }
    }
    Ok(())
}

fn run_command(args: &[String]) -> Result<(), CliError> {
    let (config, out) = load_config(args)?;
    init_thread_pool()?;
    let report = run_experiment(&config)?;
    let csv = render_csv(&report.rows);
    let sidecar = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(format!("serialize sidecar: {e}")))?;
    emit(csv, Some(sidecar), out)
}

fn sweep_command(args: &[String]) -> Result<(), CliError> {
    let (config, out) = load_config(args)?;
    init_thread_pool()?;
    let rows = sweep_bias_std(&config)?;
    emit(render_sweep_csv(&rows), None, out)
}

fn levels_command(args: &[String]) -> Result<(), CliError> {
    let flags = parse_flags(args)?;
    let family: String = required(&flags, "family")?;
    let k: u64 = parsed(&flags, "k")?.unwrap_or(1);
    let b_prime: u64 = parsed(&flags, "b-prime")?.unwrap_or(k / 10);
    let spec = match family.as_str() {
        "oblivious_exponential" => LevelSpec::ObliviousExponential {
            delta: required(&flags, "delta")?,
        },
        "oblivious_power" => LevelSpec::ObliviousPower {
            delta: required(&flags, "delta")?,
        },
        "nu_geometric" => LevelSpec::NuDependent {
            nu: NuSpec::Geometric {
                c: required(&flags, "c")?,
                xi: required(&flags, "xi")?,
            },
        },
        "nu_polynomial" => LevelSpec::NuDependent {
            nu: NuSpec::Polynomial {
                c: required(&flags, "c")?,
                xi: required(&flags, "xi")?,
            },
        },
        "nu_contraction" => LevelSpec::NuDependent {
            nu: NuSpec::Contraction {
                kappa: required(&flags, "kappa")?,
                kappa_prime: required(&flags, "kappa-prime")?,
                gamma: required(&flags, "gamma")?,
                eta: required(&flags, "eta")?,
            },
        },
        other => {
            return Err(CliError::Config(format!("unknown level family: {other}")));
        }
    };
    let report = levels_report(&spec, k, b_prime)?;
    print!("{report}");
    Ok(())
}
