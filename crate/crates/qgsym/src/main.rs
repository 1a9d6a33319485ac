use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qgsym::cli::{self, Command, OutputFormat, RunConfig};

/// Finite groups as symmetry groups of quantum graphs: build Frucht-style
/// realizations, compute graph symmetry groups and Laplacian spectra, and
/// certify unitary symmetries of the Schrödinger evolution.
#[derive(Parser)]
#[command(name = "qgsym", version, about)]
struct CliArgs {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args)]
struct CommonOpts {
    /// Subintervals per edge for the finite-element discretization.
    #[arg(long, default_value_t = 8)]
    mesh: usize,
    /// Number of modes (spectrum subcommand).
    #[arg(long)]
    modes: Option<usize>,
    /// Matrix tolerance for the symmetry certificates.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for the pseudo-random probe states.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output format: json, text, dot or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the primary output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Build the decorated realization graph of a group.
    Build {
        /// Group file (`perm <degree>` + cycles, or `table` + rows).
        group_file: PathBuf,
        /// Write the JSON gadget annotation here.
        #[arg(long)]
        annotation: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Symmetry groups and Whitney status of a graph.
    Aut {
        graph_file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Eigenvalues of the constrained metric-graph Laplacian.
    Spectrum {
        graph_file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Certify induced operators, flag non-induced edge symmetries.
    Verify {
        graph_file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Full pipeline: group -> graph -> verified realization -> certificates.
    Realize {
        group_file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Reproduce a packaged counterexample (currently: paw).
    Counterexample {
        which: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn build_config(command: Command, common: &CommonOpts, annotation: Option<PathBuf>) -> Result<RunConfig, qgsym::Error> {
    let format: OutputFormat = common.format.parse()?;
    Ok(RunConfig {
        mesh_n: common.mesh,
        modes: common.modes,
        tol: common.tol,
        seed: common.seed,
        format,
        out: common.out.clone(),
        annotation,
        ..RunConfig::new(command)
    })
}

fn main() -> ExitCode {
    let args = CliArgs::parse();
    let config = match &args.command {
        CliCommand::Build {
            group_file,
            annotation,
            common,
        } => build_config(
            Command::Build {
                group_file: group_file.clone(),
            },
            common,
            annotation.clone(),
        ),
        CliCommand::Aut { graph_file, common } => build_config(
            Command::Aut {
                graph_file: graph_file.clone(),
            },
            common,
            None,
        ),
        CliCommand::Spectrum { graph_file, common } => build_config(
            Command::Spectrum {
                graph_file: graph_file.clone(),
            },
            common,
            None,
        ),
        CliCommand::Verify { graph_file, common } => build_config(
            Command::Verify {
                graph_file: graph_file.clone(),
            },
            common,
            None,
        ),
        CliCommand::Realize { group_file, common } => build_config(
            Command::Realize {
                group_file: group_file.clone(),
            },
            common,
            None,
        ),
        CliCommand::Counterexample { which, common } => build_config(
            Command::Counterexample {
                which: which.clone(),
            },
            common,
            None,
        ),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::exit_code_for(&e) as u8);
        }
    };
    match cli::run(&config) {
        Ok(outcome) => {
            if config.out.is_none() {
                print!("{}", outcome.rendered);
            }
            if outcome.verification_failed {
                eprintln!("error: verification failed");
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code_for(&e) as u8)
        }
    }
}
