use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "entloc", version, about = "Localizable multipartite entanglement for small qubit states")]
pub struct Cli {
    /// Seed for Haar presets, sweeps and swarm searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; sweeps default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Site indices on the command line start at 1 instead of 0.
    #[arg(long, global = true)]
    pub one_based: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Entanglement of a whole state.
    Measure {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Swarm estimate of the localizable entanglement onto the unmeasured qubits.
    Localize {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        kind: KindArgs,
        #[command(flatten)]
        pso: PsoArgs,
    },
    /// Upper and lower bounds on the localizable entanglement.
    Bounds {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Graph-state tools.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Uniformly weighted graph states.
    #[command(subcommand)]
    Weighted(WeightedCommand),
    /// Haar-random states.
    #[command(subcommand)]
    Haar(HaarCommand),
    /// Transverse-field Ising chains.
    #[command(subcommand)]
    Ising(IsingCommand),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphCommand {
    /// Decide whether n-tangle 1 can be localized on the unmeasured vertices.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Concentratable entanglement of a graph state from adjacency ranks.
    Ce {
        #[arg(long)]
        graph: PathBuf,
        /// Label set, comma separated.
        #[arg(long = "s")]
        s: String,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightedCommand {
    /// Rotated-X measurement of every second vertex of a weighted line.
    Protocol {
        /// Number of measured vertices N (line of 2N + 1 vertices).
        #[arg(long)]
        pairs: usize,
        /// Edge phase in radians.
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Trace distance between two uniformly weighted versions of a graph.
    Distance {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, allow_hyphen_values = true)]
        chi: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Swarm search over local bases.
    Pso,
    /// Computational-basis measurement.
    Computational,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarCommand {
    /// Per-sample localizable entanglement with its bounds.
    Sweep {
        #[arg(long)]
        n_a: usize,
        #[arg(long)]
        n_b: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_enum, default_value_t = SweepMode::Pso)]
        mode: SweepMode,
        #[command(flatten)]
        pso: PsoArgs,
        /// Record wall-clock seconds per sample (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Monte Carlo moments of the kept marginal against closed forms.
    Moments {
        #[arg(long)]
        n_a: usize,
        #[arg(long)]
        n_b: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsingCommand {
    /// Ground-state localizable entanglement over a J/h grid (h = 1).
    Sweep {
        #[arg(long, default_value_t = 9)]
        sites: usize,
        #[arg(long, default_value_t = 0.0)]
        j_min: f64,
        #[arg(long, default_value_t = 2.0)]
        j_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Longitudinal field as a multiple of h.
        #[arg(long, default_value_t = 0.0)]
        hx_ratio: f64,
        /// Open instead of periodic boundary conditions.
        #[arg(long)]
        open: bool,
        #[command(flatten)]
        split: SplitArgs,
        /// Measures to evaluate: ntangle, ce or both.
        #[arg(long, value_delimiter = ',', default_value = "ntangle")]
        kinds: Vec<String>,
        /// Label set for ce, comma separated.
        #[arg(long = "s")]
        s: Option<String>,
        #[command(flatten)]
        pso: PsoArgs,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct StateArgs {
    /// JSON state file with `n_qubits`, `re` and `im`.
    #[arg(long, conflicts_with = "preset")]
    pub state: Option<PathBuf>,
    /// Built-in state: ghz:N, w:N, line-graph:N or haar:N.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct SplitArgs {
    /// Measured sites, comma separated.
    #[arg(long, default_value = "")]
    pub measured: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindName {
    Ntangle,
    Gme,
    Ce,
    SqrtCe,
}

#[derive(Args, Debug, Serialize)]
pub struct KindArgs {
    #[arg(long, value_enum)]
    pub kind: KindName,
    /// Label set for ce and sqrt-ce, comma separated.
    #[arg(long = "s")]
    pub s: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct PsoArgs {
    #[arg(long)]
    pub swarm: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}
