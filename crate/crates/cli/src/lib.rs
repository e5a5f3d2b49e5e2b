//! Command implementations behind the `lg` binary.

pub mod args;
pub mod bench;
mod commands;
pub mod io;

pub use args::{Cli, Command, DEFAULT_SEED};

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Pipeline(a) => commands::pipeline(a, cli.seed, out),
        Command::XlBench(a) => commands::xl_bench(a, cli.seed, out),
        Command::Verify(a) => commands::verify(a, cli.seed, out),
        Command::Steady(a) => commands::steady(a, cli.seed, out),
        Command::Measure(a) => commands::measure(a, cli.seed, out),
        Command::EncodeCircuit(a) => commands::encode_circuit(a, cli.seed, out),
    }
}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STRUCTURAL: i32 = 3;
pub const EXIT_UNSOLVABLE: i32 = 4;
pub const EXIT_NO_STEADY_STATE: i32 = 5;
pub const EXIT_BUDGET: i32 = 6;

/// Exit status for a failed run, keyed on the first library error in the chain.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use lg_core::Error;
    err.chain().find_map(|e| e.downcast_ref::<Error>()).map_or(EXIT_OTHER, |e| match e {
        Error::StructuralRejection(_) => EXIT_STRUCTURAL,
        Error::Unsolvable { .. } => EXIT_UNSOLVABLE,
        Error::NoSteadyState | Error::NonUniqueSteadyState(_) => EXIT_NO_STEADY_STATE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_OTHER,
    })
}
