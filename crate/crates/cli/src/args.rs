use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Default base seed ("LME1" in ASCII).
pub const DEFAULT_SEED: u64 = 0x4C4D_4531;

#[derive(Debug, Parser)]
#[command(name = "lg", version, about = "Lindbladian workbench: inverse XL solve, evolution and simulated measurement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Base RNG seed, decimal or 0x-prefixed hex. Default 0x4C4D4531.
    #[arg(long, global = true, default_value = "0x4C4D4531", value_parser = parse_seed)]
    pub seed: u64,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "lg-out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for a Liouvillian, evolve to its steady state and estimate an observable.
    Pipeline(PipelineArgs),
    /// Time XL recovery of random XXZ chains over a range of sizes.
    XlBench(BenchArgs),
    /// Run the structural checks on an LME spec and print a pass/fail table.
    Verify(VerifyArgs),
    /// Steady states and spectral diagnostics of an LME spec.
    Steady(SteadyArgs),
    /// Estimate an observable on the steady state of an LME spec.
    Measure(MeasureArgs),
    /// Build the clock-register LME of a circuit and read out p1.
    EncodeCircuit(EncodeArgs),
}

#[derive(Debug, Args)]
pub struct MeasureOpts {
    /// Target RMSE of the ratio estimator; sets the shot budget.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Purity lower bound used for the budget. Defaults to the state's purity.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Total shots, overriding the budget; split evenly between the two tests.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Target `L†L` as a Pauli sum on 2n qubits.
    #[arg(long)]
    pub target: PathBuf,
    /// Ansatz JSON file, or `xxz:<sites>` / `local:<n>:<k>`.
    #[arg(long)]
    pub ansatz: String,
    /// Observable on the vectorized (2n-qubit) register.
    #[arg(long)]
    pub observable: PathBuf,
    #[command(flatten)]
    pub measure: MeasureOpts,
    #[arg(long, default_value_t = 4)]
    pub d_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub node_budget: usize,
    /// Overlap tolerance for the evolution-time bound.
    #[arg(long, default_value_t = 0.01)]
    pub overlap_eps: f64,
    /// Drop the identity-coefficient equation.
    #[arg(long)]
    pub no_ground_energy: bool,
    /// Trajectories used to estimate the mixing time of a non-Hermitian L.
    #[arg(long, default_value_t = 8)]
    pub probes: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 5)]
    pub n_min: usize,
    #[arg(long, default_value_t = 13)]
    pub n_max: usize,
    #[arg(long, default_value_t = 25)]
    pub reps: usize,
    #[arg(long, default_value_t = 4)]
    pub d_max: usize,
    /// Solve repetitions concurrently. Rows are identical apart from timings.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// LME spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Random observables for the expectation spot checks.
    #[arg(long, default_value_t = 8)]
    pub probes: usize,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub probes: usize,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub observable: PathBuf,
    #[command(flatten)]
    pub measure: MeasureOpts,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Circuit JSON: `{"n": .., "layers": [[[re, im], ..], ..]}`.
    #[arg(long)]
    pub circuit: PathBuf,
    #[command(flatten)]
    pub measure: MeasureOpts,
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}
