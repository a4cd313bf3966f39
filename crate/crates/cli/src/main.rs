use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ddmcert::commands::{self, Failure};
use ddmcert::config::{parse_kv, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Run,
    Table1,
    Table2,
    Table3,
    Table4,
    Check,
}

/// Overlapping Schwarz iterations with guaranteed error majorants.
#[derive(Debug, Parser)]
#[command(name = "ddmcert", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// File of `key=value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `lshape` or `rect:MxN`.
    #[arg(long)]
    preset: Option<String>,
    /// Fine mesh spacing, e.g. `0.25` or `1/4`.
    #[arg(long = "h")]
    h: Option<String>,
    /// Corrector mesh spacing; defaults to h.
    #[arg(long = "H")]
    coarse_h: Option<String>,
    #[arg(long)]
    sweeps: Option<String>,
    /// multiplicative | additive
    #[arg(long)]
    mode: Option<String>,
    /// fixed | opt
    #[arg(long)]
    eps: Option<String>,
    /// alternating | sweep
    #[arg(long)]
    schedule: Option<String>,
    /// fine | corrector
    #[arg(long)]
    averaging: Option<String>,
    #[arg(long)]
    local_improvement: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit_fields: bool,
}

fn default_h(c: Command) -> f64 {
    match c {
        Command::Run | Command::Table1 | Command::Check => 0.25,
        Command::Table2 | Command::Table3 | Command::Table4 => 1.0 / 64.0,
    }
}

fn load(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut map = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
            parse_kv(&text)?
        }
        None => Default::default(),
    };
    let flags = [
        ("preset", cli.preset.clone()),
        ("h", cli.h.clone()),
        ("H", cli.coarse_h.clone()),
        ("sweeps", cli.sweeps.clone()),
        ("mode", cli.mode.clone()),
        ("eps", cli.eps.clone()),
        ("schedule", cli.schedule.clone()),
        ("averaging", cli.averaging.clone()),
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("emit_fields", cli.emit_fields.then(|| "true".into())),
        ("local_improvement", cli.local_improvement.then(|| "true".into())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    }
    RunConfig::from_map(&map, default_h(cli.command))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = load(&cli).map_err(Failure::Config).and_then(|cfg| match cli.command {
        Command::Run => commands::run(&cfg),
        Command::Table1 => commands::table1(&cfg),
        Command::Table2 => commands::table2(&cfg),
        Command::Table3 => commands::table3(&cfg),
        Command::Table4 => commands::table4(&cfg),
        Command::Check => commands::check(&cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ddmcert: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
