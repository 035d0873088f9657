use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use timcomp_cli::{cmd_analyze, cmd_demo, cmd_enumerate, cmd_verify, CmdResult};

/// Symmetric DoF bounds for cooperative cellular topologies.
#[derive(Parser)]
#[command(name = "timcomp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a topology file (first line K, then K rows of 0/1).
    Analyze {
        file: PathBuf,
        /// Comma-separated subset of coloring,covering,hamiltonian,matching,partition,regular,generator,compound,tdma.
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        json: bool,
        /// Replace every per-method cell-count limit.
        #[arg(long = "max-K-override", value_name = "N")]
        max_k_override: Option<usize>,
    },
    /// Run a built-in example: fig5, reg53, wyner:K, triangular:K, ex7, ex9, ex4-repetition.
    Demo {
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// Analyze every non-isomorphic topology with K cells.
    Enumerate {
        k: usize,
        /// Flag topologies where the coloring value is below the best outer bound.
        #[arg(long)]
        check_orthogonal_optimal: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check a scheme (JSON) against a topology file.
    Verify {
        topology: PathBuf,
        scheme: PathBuf,
        #[arg(long, default_value_t = timcomp::verifier::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = timcomp::verifier::DEFAULT_TRIALS)]
        trials: usize,
    },
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Analyze { file, methods, json, max_k_override } => {
            cmd_analyze(&file, methods.as_deref(), json, max_k_override)
        }
        Command::Demo { name, json } => cmd_demo(&name, json),
        Command::Enumerate { k, check_orthogonal_optimal, json } => cmd_enumerate(k, check_orthogonal_optimal, json),
        Command::Verify { topology, scheme, seed, trials } => cmd_verify(&topology, &scheme, seed, trials),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code as u8)
        }
    }
}
