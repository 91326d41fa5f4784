mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "crooked", version, about = "Crooked surfaces in the Einstein Universe")]
pub struct Cli {
    /// Key-value config file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the full report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Director of the first surface, `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    pub u1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u2: Option<String>,
    /// Inner allowable pair.
    #[arg(long, allow_hyphen_values = true)]
    pub z1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z2: Option<String>,
    /// Outer allowable pair; defaults to the inner one.
    #[arg(long, allow_hyphen_values = true)]
    pub outer_z1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub outer_z2: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mesh of the basic crooked surface.
    BasicExample {
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh of the lightcone of a point.
    Lightcone {
        #[arg(long, default_value = "1:0:0:0:1")]
        point: String,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two lightcones and their intersection circle.
    TwoCones {
        #[arg(long, default_value = "1:0:0:0:1")]
        p: String,
        #[arg(long, default_value = "-1:0:0:0:1")]
        q: String,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pull two crooked surfaces apart at both common points and certify
    /// the result.
    DisjointPair {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        resolution: Option<usize>,
        /// Radius of the balls around shared points left out of the
        /// intermediate margins.
        #[arg(long)]
        radius: Option<f64>,
        /// Also run the exact case analysis on the rational inputs.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cyclic crooked Schottky group: ping-pong and nested word images.
    Schottky {
        #[command(flatten)]
        pair: PairArgs,
        /// Rapidity of the boost along the first axis.
        #[arg(long, allow_hyphen_values = true)]
        rapidity: Option<f64>,
        #[arg(long)]
        probes: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        mesh_resolution: Option<usize>,
        /// Also certify the separation of the boundary surfaces.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Cartan projections of the powers of a word and their distortion class.
    Cartan {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        rapidity: Option<f64>,
        #[arg(long, default_value = "a")]
        word: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Separation margin between two surfaces.
    Certify {
        /// `vertex=a,b,c;director=a,b,c;extension=positive;outer=a,b,c`
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        exact: bool,
    },
    /// The basic surface against the image of the negative one.
    NegativeExample {
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Mesh of a surface given like `certify --s1`.
    ExportMesh {
        #[arg(long, default_value = "")]
        surface: String,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
