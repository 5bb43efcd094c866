//! `hexpack` command-line tool.
//!
//! Exit codes: 0 success, 1 verification violations (or no result), 2 usage
//! or input errors, 3 search budget exhausted.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "hexpack", version, about = "Search, verify and embed small hexahedral packings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a mesh: conformity, boundary, parity and optionally a target
    /// surface and element quality.
    Verify {
        mesh: PathBuf,
        /// `builtin:pyramid16`, `builtin:cube` or a pattern file.
        #[arg(long)]
        target: Option<String>,
        /// Report scaled Jacobians from the mesh's coordinate block.
        #[arg(long)]
        coords: bool,
        /// Treat mirror images as different surfaces.
        #[arg(long)]
        no_reflection: bool,
    },
    /// Find the fewest hexes whose packing has the target surface.
    Search {
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_hexes: usize,
        /// Skip packings that cannot reach the target's quad count in time.
        #[arg(long)]
        prune: bool,
        /// Write the witness here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// List surfaces reached by packings of both parities.
    Templates {
        #[arg(long)]
        max_hexes: usize,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Find an order in which the mesh can be grown move by move.
    GrowOrder {
        mesh: PathBuf,
        /// Write the witness here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_sphere_mode: bool,
        #[arg(long, value_delimiter = ',')]
        configs: Option<Vec<u8>>,
    },
    /// Place interior vertices given fixed boundary positions.
    Embed {
        mesh: PathBuf,
        /// `builtin:pyramid` or a coords file.
        #[arg(long)]
        boundary: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 40.0)]
        beta: f64,
    },
    /// Split every hex into 8.
    Subdivide {
        mesh: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a mesh with coordinates as VTK or its boundary as OBJ.
    Export {
        mesh: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct SearchFlags {
    #[arg(long)]
    threads: Option<usize>,
    /// Checkpoint directory; an existing checkpoint there is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    no_reflection: bool,
    /// Allow moves that change the surface topology.
    #[arg(long)]
    no_sphere_mode: bool,
    /// Allowed glue configurations, e.g. `1,2,4`.
    #[arg(long, value_delimiter = ',')]
    configs: Option<Vec<u8>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Vtk,
    Obj,
}

/// Result of a command that ran to completion.
pub enum Status {
    Ok,
    Violations,
    Exhausted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(1),
        Ok(Status::Exhausted) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
