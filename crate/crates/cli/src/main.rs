use clap::{Parser, Subcommand};

use soe_cli::commands::{
    cmd_calibrate, cmd_fit, cmd_render, cmd_report, cmd_scan, CalibrateArgs, FitArgs, RenderArgs,
    ReportArgs, ScanArgs,
};

/// Spin-orbit eraser toolkit: simulate hybrid-photon channel probes and
/// characterize channel disturbance from the resulting fringe scans.
#[derive(Parser)]
#[command(name = "soe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a two-projection measurement scan through a channel
    Scan(ScanArgs),
    /// Fit a scan CSV and write a channel report JSON
    Fit(FitArgs),
    /// Render a mode intensity profile to an ASCII PGM
    Render(RenderArgs),
    /// Invert visibility targets into a fiber channel spec JSON
    Calibrate(CalibrateArgs),
    /// Print (and save) the human-readable channel report for a scan CSV
    Report(ReportArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Render(args) => cmd_render(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Report(args) => cmd_report(args),
    };
    if let Err(err) = result {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}
