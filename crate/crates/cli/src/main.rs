mod catalog;
mod commands;
mod error;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use semired::hilbert_poly::TruncatedOrder;
use semired::langton::{LangtonConfig, DEFAULT_LANGTON_CAP};
use semired::quiver::DEFAULT_CAP;
use semired::text;
use semired::Backend;

use crate::error::{CliError, Result};
use crate::report::Report;

const DEFAULT_SEED: u64 = 20_240_601;

/// Semistable reduction of quiver representations over discrete valuation
/// rings, with exact arithmetic.
///
/// Exit codes: 0 success; 1 negative verdict (not semistable, not
/// S-equivalent, catalog mismatch); 2 usage, I/O, parse or precondition
/// error; 3 non-integral input; 4 Langton iteration cap reached; 5
/// subrepresentation enumeration over its cap; 6 failed internal self-check.
#[derive(Debug, Parser)]
#[command(name = "semired", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Backend for documents without a `backend` line: p-adic:<p> or t-adic:<p>
    #[arg(long, global = true)]
    backend: Option<Backend>,

    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Bound on the number of enumerated subspace tuples
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    enum_cap: u128,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Lex,
    Componentwise,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Smith normal form of a matrix over the valuation ring
    Snf { matrix: PathBuf },
    /// Filtrations and graded maps of a torsion module
    Torsion { module: PathBuf },
    /// Harder–Narasimhan filtration of a residue representation or of a model's reduction
    Hn { rep: PathBuf, stability: PathBuf },
    /// Semistability test with a destabilizing witness
    Semistable {
        rep: PathBuf,
        stability: PathBuf,
        /// Number of slope coordinates to compare (default: all)
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, value_enum, default_value_t = Order::Lex)]
        order: Order,
    },
    /// Langton semistable reduction of a lattice model
    Langton {
        model: PathBuf,
        stability: PathBuf,
        /// Maximum number of flips
        #[arg(long, default_value_t = DEFAULT_LANGTON_CAP)]
        cap: usize,
        /// Write the full trace document here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// S-equivalence of the semistable reductions of two models
    Sequiv {
        model1: PathBuf,
        model2: PathBuf,
        stability: PathBuf,
        /// Maximum number of flips per run
        #[arg(long, default_value_t = DEFAULT_LANGTON_CAP)]
        cap: usize,
    },
    /// Determinant line of a complex, or the isomorphism induced by a quasi-isomorphism
    Detline {
        complex: PathBuf,
        /// Target complex of the chain map
        #[arg(long, requires = "map")]
        target: Option<PathBuf>,
        /// Chain map document
        #[arg(long, requires = "target")]
        map: Option<PathBuf>,
    },
    /// Run the regression catalog against its golden files
    Catalog {
        /// all, a family name, or family/name
        #[arg(long, default_value = "all")]
        run: String,
        #[arg(long)]
        goldens: Option<PathBuf>,
        /// Rewrite the golden files from the current outputs
        #[arg(long)]
        bless: bool,
        /// Seed for the randomized starting models
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Reads and parses one input document, attributing errors to its path.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> semired::Result<T>) -> Result<T> {
    let text = read(path)?;
    parse(&text).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn config(cap: usize, enum_cap: u128) -> LangtonConfig {
    LangtonConfig { cap, enumeration_cap: enum_cap }
}

fn run(cli: &Cli) -> Result<Report> {
    let b = cli.backend;
    match &cli.command {
        Command::Snf { matrix } => {
            let (backend, a) = load(matrix, |t| text::parse_matrix_with(t, b))?;
            commands::snf(&backend, &a)
        }
        Command::Torsion { module } => {
            let (backend, q) = load(module, |t| text::parse_torsion_with(t, b))?;
            commands::torsion(&backend, &q)
        }
        Command::Hn { rep, stability } => {
            let m = load(rep, |t| commands::load_rep(t, b))?;
            let s = load(stability, text::parse_stability)?;
            commands::hn(&m, &s, cli.enum_cap)
        }
        Command::Semistable { rep, stability, level, order } => {
            let m = load(rep, |t| commands::load_rep(t, b))?;
            let s = load(stability, text::parse_stability)?;
            let order = match order {
                Order::Lex => TruncatedOrder::Lexicographic,
                Order::Componentwise => TruncatedOrder::Componentwise,
            };
            commands::semistable(&m, &s, *level, order, cli.enum_cap)
        }
        Command::Langton { model, stability, cap, trace } => {
            let model = load(model, |t| text::parse_model_with(t, b))?;
            let s = load(stability, text::parse_stability)?;
            let (report, full) = commands::langton(&model, &s, config(*cap, cli.enum_cap))?;
            if let Some(path) = trace {
                fs::write(path, text::format_trace(&full))
                    .map_err(|source| CliError::Io { path: path.clone(), source })?;
            }
            Ok(report)
        }
        Command::Sequiv { model1, model2, stability, cap } => {
            let m1 = load(model1, |t| text::parse_model_with(t, b))?;
            let m2 = load(model2, |t| text::parse_model_with(t, b))?;
            let s = load(stability, text::parse_stability)?;
            commands::sequiv(&m1, &m2, &s, config(*cap, cli.enum_cap))
        }
        Command::Detline { complex, target, map } => {
            let c = load(complex, text::parse_complex)?;
            match (target, map) {
                (Some(target), Some(map)) => {
                    let d = load(target, text::parse_complex)?;
                    let (start, phi) = load(map, text::parse_chain_map)?;
                    commands::detline(&c, Some((&d, start, &phi)))
                }
                _ => commands::detline(&c, None),
            }
        }
        Command::Catalog { run, goldens, bless, seed } => {
            let dir = goldens.clone().unwrap_or_else(|| PathBuf::from(catalog::DEFAULT_GOLDENS));
            let settings = catalog::Settings { seed: *seed, config: config(DEFAULT_LANGTON_CAP, cli.enum_cap) };
            catalog::run(run, &dir, *bless, &settings)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", if cli.json { report.json() } else { report.text() });
            ExitCode::from(report.outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
