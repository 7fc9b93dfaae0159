//! `dkern <command> --config <file.json> [--out <path>] [--format csv|json]`

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;

use clap::Parser;

use config::{parse_config, Command, Format, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "dkern", version, about = "Weighted reduced Bergman kernels and kernel functions on planar domains")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `out` in the config. Standard output when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DKERN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config {
        path: "DKERN_THREADS".into(),
        reason: format!("expected a positive integer, got {raw:?}"),
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if cfg.command != args.command {
        return Err(CliError::Config {
            path: "command".into(),
            reason: format!("config says {}, command line says {}", cfg.command.name(), args.command.name()),
        });
    }
    if let Some(format) = args.format {
        cfg.format = Some(format);
    }
    Ok(cfg)
}

fn execute(args: &Args) -> Result<(), CliError> {
    init_threads()?;
    let cfg = load(args)?;
    let report = run::run(&cfg)?;
    let bytes = report.encode(cfg.format.unwrap_or(Format::Csv))?;
    let out = args.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from));
    match out {
        Some(path) => {
            std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() {
    let args = Args::parse();
    if let Err(e) = execute(&args) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
