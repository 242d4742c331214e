use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use proxfence_cli::commands::{
    cmd_eval, cmd_monitor, cmd_relay, cmd_simulate, cmd_trace, EvalConfig, MonitorConfig, RelayConfig, SimulateConfig,
    TraceConfig, DEFAULT_TICKS,
};
use proxfence_cli::error::CliError;

/// Proximity rules, fences and content availability over wireless scans.
#[derive(Debug, Parser)]
#[command(name = "proxfence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate rules over a scan trace and print firings and visible content.
    Eval {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Print fence ENTER/EXIT events for a scan trace.
    Monitor {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Simulate a world and run rules, content and fences for every device.
    Simulate {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TICKS)]
        ticks: u64,
        /// Overrides the seed in the world file.
        #[arg(long, env = "PROXFENCE_SEED")]
        seed: Option<u64>,
    },
    /// Write the scan trace one simulated device records.
    Trace {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        device: String,
        #[arg(long, default_value_t = DEFAULT_TICKS)]
        ticks: u64,
        #[arg(long, env = "PROXFENCE_SEED")]
        seed: Option<u64>,
    },
    /// Flood a message from one device and print hop counts.
    Relay {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        origin: String,
        #[arg(long)]
        ttl: u32,
        #[arg(long)]
        payload: String,
        #[arg(long, env = "PROXFENCE_SEED")]
        seed: Option<u64>,
    },
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Eval { rules, catalog, trace } => cmd_eval(&EvalConfig { rules, catalog, trace }, out),
        Command::Monitor { rules, trace } => cmd_monitor(&MonitorConfig { rules, trace }, out),
        Command::Simulate {
            world,
            rules,
            catalog,
            ticks,
            seed,
        } => cmd_simulate(
            &SimulateConfig {
                world,
                rules,
                catalog,
                ticks,
                seed,
            },
            out,
        ),
        Command::Trace {
            world,
            device,
            ticks,
            seed,
        } => cmd_trace(
            &TraceConfig {
                world,
                device,
                ticks,
                seed,
            },
            out,
        ),
        Command::Relay {
            world,
            origin,
            ttl,
            payload,
            seed,
        } => cmd_relay(
            &RelayConfig {
                world,
                origin,
                ttl,
                payload,
                seed,
            },
            out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|()| {
        out.flush()
            .map_err(|e| CliError::Runtime(format!("writing output: {e}")))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("proxfence: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
