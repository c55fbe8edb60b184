//! `pcpkit` command-line front end.
//!
//! Exit codes: 0 success/pass, 1 I/O or parse error, 2 violated/entangled/fail,
//! 3 not applicable, 4 inconclusive.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pcpkit::abssep::{DEFAULT_SAMPLES, DEFAULT_SEED};
use pcpkit::construct::Method;

#[derive(Parser, Debug)]
#[command(
    name = "pcpkit",
    version,
    about = "Pairwise complete positivity and CLDUI separability tools"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the necessary conditions (a)-(e) on a pair file.
    CheckPair { path: PathBuf },
    /// Build a decomposition of a pair, or verify an existing certificate.
    Decompose {
        path: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: Method,
        /// Search index orderings when the recursive constructor gets stuck.
        #[arg(long)]
        perms: bool,
        /// Where to write the certificate.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify this certificate against the pair instead of constructing one.
        #[arg(long, value_name = "CERT", conflicts_with_all = ["out", "perms"])]
        verify: Option<PathBuf>,
    },
    /// Separability verdict for a CLDUI state given as a pair or a dense matrix.
    CheckState {
        path: PathBuf,
        /// Also build the dense n²×n² matrix and recompute every criterion.
        #[arg(long)]
        dense_crosscheck: bool,
        /// Scale the state to unit trace first.
        #[arg(long)]
        normalize: bool,
        /// Where to write the certificate when separability is certified.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random diagonal unitaries used to test invariance of dense inputs.
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, env = "PCPKIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Absolutely-PPT test of a spectrum, optionally certifying separability.
    AbsPpt {
        /// Local dimension (2 to 5).
        #[arg(long)]
        n: usize,
        /// Eigenvalues: a file, or an inline comma/space separated list or JSON array.
        #[arg(long)]
        lambdas: String,
        /// Write a separability certificate for every ordering.
        #[arg(long)]
        certify: bool,
        /// Directory for certificates.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Samples used to enumerate orderings.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, env = "PCPKIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s.parse::<Method>() {
        Ok(Method::Isotropic) => Err("isotropic pairs are built by the library, not read from files".into()),
        Ok(m) => Ok(m),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(commands::EXIT_IO)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let json = cli.json;
    let result = match cli.command {
        Command::CheckPair { path } => commands::check_pair(&path, json),
        Command::Decompose {
            path,
            method,
            perms,
            out,
            verify,
        } => match verify {
            Some(cert) => commands::verify_certificate(&path, &cert, json),
            None => commands::decompose(&path, method, perms, out.as_deref(), json),
        },
        Command::CheckState {
            path,
            dense_crosscheck,
            normalize,
            out,
            samples,
            seed,
        } => {
            let opts = commands::StateOptions {
                dense_crosscheck,
                normalize,
                out,
                samples,
                seed,
            };
            commands::check_state(&path, &opts, json)
        }
        Command::AbsPpt {
            n,
            lambdas,
            certify,
            out,
            samples,
            seed,
        } => {
            let opts = commands::AbsPptOptions {
                n,
                lambdas,
                certify,
                out,
                samples,
                seed,
            };
            commands::abs_ppt(&opts, json)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_IO)
        }
    }
}
