use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgate_core::QgateError;

mod commands;
mod output;

/// Compile, simulate and check QGATE programs.
#[derive(Debug, Parser)]
#[command(name = "qgate", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Trotterized Pauli rotations.
    Pauli,
    /// Diagonal block plus one fan-out term per off-diagonal pair.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Postselect,
    Sample,
    AllBranches,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Frame {
    Immediate,
    Track,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvolutionKind {
    Native,
    Compiled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    Exact,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile exp(-i delta H) into a program JSON file.
    Compile {
        /// Hamiltonian: .mtx, .json or Pauli text.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "pauli")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        order: u32,
        /// Trotter steps.
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Shuffle the term order in every step with this seed.
        #[arg(long)]
        ordering_seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute a program and write the final logical state.
    Simulate {
        program: PathBuf,
        #[arg(long, value_enum, default_value = "postselect")]
        mode: SimMode,
        /// Required for `sample`.
        #[arg(long)]
        seed: Option<u64>,
        /// Basis index or a CSV file with columns index,re,im.
        #[arg(long, default_value = "0")]
        state: String,
        #[arg(long, value_enum, default_value = "immediate")]
        frame: Frame,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frobenius distance and fidelities against the exact evolution.
    TrotterScan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        orders: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        steps_list: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantum phase estimation, or a sweep over delta.
    Qpe {
        #[arg(long)]
        input: PathBuf,
        /// Phase register size.
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = 1024)]
        shots: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Multiplies delta to give the evolution time.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_enum, default_value = "native")]
        evolution: EvolutionKind,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// `ground`, a basis index, or a CSV file with columns index,re,im.
        #[arg(long, default_value = "ground")]
        state: String,
        /// Comma-separated delta values; writes a sweep table instead of a histogram.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the resource counts of a program.
    Cost {
        program: PathBuf,
        /// Also write the report; CSV for a `.csv` path, JSON otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a program with exp(-i delta H); exit 5 above tolerance.
    Verify {
        program: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        against: Reference,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const UNSUPPORTED: u8 = 3;
    pub const POSTSELECTION: u8 = 4;
    pub const TOLERANCE: u8 = 5;
}

/// Error carrying its own exit code.
#[derive(Debug)]
pub struct Coded {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for Coded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Coded {}

pub fn coded(code: u8, message: impl Into<String>) -> anyhow::Error {
    Coded { code, message: message.into() }.into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(c) = err.downcast_ref::<Coded>() {
        return c.code;
    }
    match err.downcast_ref::<QgateError>() {
        Some(QgateError::Parse { .. })
        | Some(QgateError::InvalidArgument(_))
        | Some(QgateError::InvalidIndex(_))
        | Some(QgateError::Dimension(_))
        | Some(QgateError::NonHermitian(_))
        | Some(QgateError::NonFinite(_))
        | Some(QgateError::MalformedProgram(_)) => exit::PARSE,
        Some(QgateError::Unsupported(_)) | Some(QgateError::Resource(_)) => exit::UNSUPPORTED,
        Some(QgateError::PostselectionImpossible { .. }) => exit::POSTSELECTION,
        _ => exit::IO,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Compile { input, method, order, steps, delta, ordering_seed, out } => {
            commands::compile(&input, method, order, steps, delta, ordering_seed, &out)
        }
        Command::Simulate { program, mode, seed, state, frame, out } => {
            commands::simulate(&program, mode, seed, &state, frame, &out)
        }
        Command::TrotterScan { input, orders, steps_list, delta, out } => {
            commands::trotter_scan(&input, &orders, &steps_list, delta, &out)
        }
        Command::Qpe { input, b, shots, seed, delta, scale, evolution, order, steps, state, sweep, out } => {
            let args = commands::QpeArgs { b, shots, seed, delta, scale, evolution, order, steps };
            commands::qpe(&input, &args, &state, sweep.as_deref(), &out)
        }
        Command::Cost { program, out } => commands::cost(&program, out.as_deref()),
        Command::Verify { program, against: Reference::Exact, input, delta, tolerance, out } => {
            commands::verify(&program, &input, delta, tolerance, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
