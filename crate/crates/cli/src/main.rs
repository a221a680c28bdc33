use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qnd_cli::{config::ConfigBuilder, output, run, CliError, Mode};

#[derive(Parser)]
#[command(name = "qnd", version, about = "Qubit readout through a driven resonator: closed forms, master equation, back-action rates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome probability, dephasing rate and pointer states
    Analytic(Common),
    /// Master-equation time series
    Lindblad(Common),
    /// Relaxation, excitation and dephasing rates from detector noise
    Backaction(Common),
    /// Outcome probability versus detuning and time, two noise models
    Fig2(Common),
    /// Outcome probability and dephasing versus detuning for four linewidths
    Fig3(Common),
    /// Agreement of consecutive projective measurements
    Repeat(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, applied after the file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, env = "QND_THREADS")]
    threads: Option<usize>,
}

fn execute(mode: Mode, args: Common) -> Result<(), CliError> {
    let mut builder = ConfigBuilder::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        builder = builder.text(&text)?;
    }
    for s in &args.set {
        builder = builder.set(s)?;
    }
    if let Some(n) = args.threads {
        builder = builder.set(&format!("threads={n}"))?;
    }
    let config = builder.mode(mode).finish()?;
    let result = run(&config)?;

    let target = args.out.or_else(|| config.output_path.as_ref().map(PathBuf::from));
    match target {
        Some(path) => output::write_csv(&result, &path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::emit_csv(&result, &mut lock)
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: match e.into_kind() {
                        csv::ErrorKind::Io(io) => io,
                        other => std::io::Error::other(format!("{other:?}")),
                    },
                })?;
            lock.flush().map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Analytic(a) => (Mode::Analytic, a),
        Command::Lindblad(a) => (Mode::Lindblad, a),
        Command::Backaction(a) => (Mode::Backaction, a),
        Command::Fig2(a) => (Mode::Fig2, a),
        Command::Fig3(a) => (Mode::Fig3, a),
        Command::Repeat(a) => (Mode::Repeatability, a),
    };
    match execute(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        // the reader went away, e.g. `qnd fig2 | head`
        Err(CliError::Io { ref source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qnd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
