//! `icx`: batch front end for intersection-complex computations.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "icx", version, about = "Intersection complexes of stratified simplicial spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Coefficient field: `q` or `fp:<p>`.
    #[arg(long, global = true, default_value = "q")]
    pub field: String,

    /// Cancel acyclic summands after every step.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    pub cleanup: Switch,

    /// Advisory test that strata links are rational homology spheres.
    #[arg(long, global = true)]
    pub check_links: bool,

    /// Directory for report files and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Refinement recipe: `extra-point`, `fake-sphere` or `random:<seed>`.
    #[arg(long, global = true)]
    pub refine: Option<String>,

    /// Build along the naive filtration.
    #[arg(long, global = true)]
    pub naive: bool,

    /// Stratification file, when the space is a complex file.
    #[arg(long, global = true)]
    pub strat: Option<String>,

    /// Local system file; the constant rank-one system otherwise.
    #[arg(long, global = true)]
    pub local: Option<String>,

    /// Costalk scans use this many sampled simplices.
    #[arg(long, global = true)]
    pub sample: Option<usize>,

    /// Add the Borel-indexed stalk column to `build`.
    #[arg(long, global = true)]
    pub borel: bool,

    /// Print a human table instead of JSON where one exists.
    #[arg(long, global = true)]
    pub table: bool,

    /// Replay a run manifest; its command, inputs and options win.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Load and validate a stratified space.
    Validate { space: String },
    /// The open filtration with its identity checks.
    Filtration { space: String },
    /// Run the construction and dump the bundle.
    Build { space: String },
    /// Check the generalized first axiom set.
    CheckAx1 { space: String },
    /// Check the stratification-free axiom set.
    CheckAx2 { space: String },
    /// Check the classical pure axioms.
    CheckClassicAx2 { space: String },
    /// Hypercohomology of the intersection complex.
    Hyperco { space: String },
    /// Stalk cohomology table.
    Stalks { space: String },
    /// Costalk cohomology table.
    Costalks { space: String },
    /// Compare with a refinement (`--refine`) or a second stratification file.
    Compare {
        space: String,
        /// Second stratification file.
        other: Option<String>,
    },
    /// Coarsen to the strata the intersection complex sees.
    Coarsen { space: String },
    /// Write a bundled space and its stratification.
    Demo { name: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Filtration { .. } => "filtration",
            Command::Build { .. } => "build",
            Command::CheckAx1 { .. } => "check-ax1",
            Command::CheckAx2 { .. } => "check-ax2",
            Command::CheckClassicAx2 { .. } => "check-classic-ax2",
            Command::Hyperco { .. } => "hyperco",
            Command::Stalks { .. } => "stalks",
            Command::Costalks { .. } => "costalks",
            Command::Compare { .. } => "compare",
            Command::Coarsen { .. } => "coarsen",
            Command::Demo { .. } => "demo",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if informational { 0 } else { 1 });
        }
    };
    match run::main(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("icx: {e}");
            ExitCode::from(1)
        }
    }
}
