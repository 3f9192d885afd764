use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paracontact::soliton::JacobiHypothesis;
use paracontact_cli::battery::reproduce;
use paracontact_cli::commands::{self, CliError, SolitonArgs};
use paracontact_cli::document::{Format, ReportDocument};

/// Exact checks of paracontact structures and delta-almost Yamabe solitons.
///
/// INPUT is a manifold definition file or a built-in such as
/// `builtin:example_5_1?u=0`, `builtin:example_5_2` or
/// `builtin:flat_para_cosymplectic`.
#[derive(Parser)]
#[command(name = "paracontact", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Connection, curvature, Ricci tensor and scalar curvature.
    Curvature { input: String },
    /// Axioms, structure class and class identities.
    Structure { input: String },
    /// Soliton equation checks.
    #[command(subcommand)]
    Soliton(SolitonCommand),
    /// Run one identity (or `all`) on a soliton.
    Identity {
        id: String,
        input: String,
        #[command(flatten)]
        soliton: SolitonFlags,
        /// Treat the Jacobi-field premise of T4 as checked or assumed.
        #[arg(long, value_enum, default_value_t = JacobiArg::Check)]
        jacobi: JacobiArg,
    },
    /// Reproduce the published example computations and report discrepancies.
    ReproducePaper,
    /// Print an input in the definition file format.
    Print { input: String },
}

#[derive(Subcommand)]
enum SolitonCommand {
    /// Check (delta/2) L_Z g = (r - lambda) g and classify lambda.
    Verify {
        input: String,
        #[command(flatten)]
        soliton: SolitonFlags,
    },
    /// Solve the soliton equation for lambda.
    SolveLambda {
        input: String,
        #[command(flatten)]
        soliton: SolitonFlags,
    },
}

#[derive(Args)]
struct SolitonFlags {
    /// Potential field: a field name, `xi`, `grad:<fn>` or `[a, b, c]`.
    #[arg(long = "Z")]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Gradient potential function u, so that Z = grad u.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum JacobiArg {
    Check,
    Assume,
}

impl From<SolitonFlags> for SolitonArgs {
    fn from(f: SolitonFlags) -> Self {
        SolitonArgs {
            z: f.z,
            u: f.u,
            lambda: f.lambda,
            delta: f.delta,
        }
    }
}

fn run(command: Command, echo: &str) -> Result<ReportDocument, CliError> {
    match command {
        Command::Curvature { input } => commands::curvature(&input, echo),
        Command::Structure { input } => commands::structure(&input, echo),
        Command::Soliton(SolitonCommand::Verify { input, soliton }) => {
            commands::soliton_verify(&input, &soliton.into(), echo)
        }
        Command::Soliton(SolitonCommand::SolveLambda { input, soliton }) => {
            commands::soliton_solve_lambda(&input, &soliton.into(), echo)
        }
        Command::Identity {
            id,
            input,
            soliton,
            jacobi,
        } => {
            let jacobi = match jacobi {
                JacobiArg::Check => JacobiHypothesis::Check,
                JacobiArg::Assume => JacobiHypothesis::Assume,
            };
            commands::identity(&id, &input, &soliton.into(), jacobi, echo)
        }
        Command::ReproducePaper => Ok(reproduce(echo)),
        Command::Print { .. } => unreachable!("handled before dispatch"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    if let Command::Print { input } = &cli.command {
        return match commands::print(input) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }
    match run(cli.command, &echo) {
        Ok(doc) => {
            print!("{}", doc.emit(format));
            ExitCode::from(doc.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
