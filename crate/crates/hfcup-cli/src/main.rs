//! JSON-in / JSON-out command line for the hfcup library.
//!
//! Every subcommand reads one JSON document (from a path, or stdin when the
//! path is `-`), writes one JSON document to stdout, and exits with:
//!
//! * 0 — success
//! * 2 — malformed or invalid input
//! * 3 — a bounded search ran out of budget ("undecided")
//! * 4 — an internal cross-check between independent rank computations failed
//!
//! Output is deterministic: stable field order, no timestamps.

use std::fmt::Display;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hfcup::classify::pipeline;
use hfcup::cone::{cone_rank, x_set, ConeModel};
use hfcup::cup::{homology, TripleCupForm};
use hfcup::lattice::{
    diagonalize_stably, discriminant, split_presentation, stably_equivalent, Lattice, Verdict,
    DEFAULT_BUDGET,
};
use hfcup::linalg::{smith_normal_form, IntMatrix};
use hfcup::Error;

const EXIT_BAD_INPUT: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;
const EXIT_CROSS_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "hfcup", version, about = "Exact cup-product, mapping-cone and lattice computations")]
struct Cli {
    /// Work budget for the bounded lattice searches.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homology of the cup complex of a triple cup product form.
    CupHomology { input: String },
    /// Surgery-equivalence class of a form (b1 = 3 or 4), with every rank
    /// route cross-checked.
    Classify { input: String },
    /// Predicted rank of the n-th model manifold via the cone induction.
    MnRank {
        #[arg(long)]
        n: u64,
    },
    /// Mapping-cone rank of a cone model over F2[U,U^-1].
    ConeRank { input: String },
    /// The six possible D-maps for the rank-6 surgery.
    XSet,
    /// Smith normal form of an integer matrix.
    Snf { input: String },
    /// Discriminant group and Q/Z pairing of a lattice Gram matrix.
    Discriminant { input: String },
    /// Stable equivalence of two lattices, by the discriminant criterion.
    StablyEquivalent { input: String },
    /// Diagonal stabilizer and unimodular change of basis for a lattice.
    Diagonalize { input: String },
    /// Homologically split surgery presentation from a linking matrix.
    SplitPresentation { input: String },
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn parse<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, String> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| format!("parsing {path}: {e}"))
}

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn fail(code: u8, message: impl Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn lib_error(err: Error) -> ExitCode {
    match err {
        Error::CrossCheck(_) => fail(EXIT_CROSS_CHECK, err),
        _ => fail(EXIT_BAD_INPUT, err),
    }
}

#[derive(Deserialize)]
struct LatticePair {
    first: IntMatrix,
    second: IntMatrix,
}

#[derive(Serialize)]
struct VerdictOut {
    verdict: Verdict,
}

#[derive(Serialize)]
struct UndecidedOut {
    verdict: Verdict,
    budget: u64,
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::CupHomology { input } => {
            let mu: TripleCupForm = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            let report = homology(&mu);
            if mu.rank() >= 1 && report.f2_total % 2 != 0 {
                eprintln!(
                    "warning: odd total F2 rank {}; expected even for b >= 1",
                    report.f2_total
                );
            }
            emit(&report);
            ExitCode::SUCCESS
        }
        Command::Classify { input } => {
            let mu: TripleCupForm = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            match pipeline(&mu) {
                Ok(report) => {
                    emit(&report);
                    ExitCode::SUCCESS
                }
                Err(e) => lib_error(e),
            }
        }
        Command::MnRank { n } => {
            #[derive(Serialize)]
            struct Out {
                n: u64,
                rank: usize,
            }
            emit(&Out {
                n,
                rank: hfcup::cone::mn_rank(n),
            });
            ExitCode::SUCCESS
        }
        Command::ConeRank { input } => {
            let model: ConeModel = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            #[derive(Serialize)]
            struct Out {
                rank: usize,
                canonical: bool,
            }
            if !model.is_canonical() {
                eprintln!("warning: p_plus is a nontrivial U-twist, which the grading argument excludes");
            }
            emit(&Out {
                rank: cone_rank(&model),
                canonical: model.is_canonical(),
            });
            ExitCode::SUCCESS
        }
        Command::XSet => {
            emit(&x_set());
            ExitCode::SUCCESS
        }
        Command::Snf { input } => {
            let m: IntMatrix = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            emit(&smith_normal_form(&m));
            ExitCode::SUCCESS
        }
        Command::Discriminant { input } => {
            let m: IntMatrix = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            match Lattice::new(m) {
                Ok(l) => {
                    emit(&discriminant(&l));
                    ExitCode::SUCCESS
                }
                Err(e) => lib_error(e),
            }
        }
        Command::StablyEquivalent { input } => {
            let pair: LatticePair = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            let lattices = Lattice::new(pair.first).and_then(|a| {
                Lattice::new(pair.second).map(|b| (a, b))
            });
            match lattices.and_then(|(a, b)| stably_equivalent(&a, &b, cli.budget)) {
                Ok(Verdict::Undecided) => {
                    emit(&UndecidedOut {
                        verdict: Verdict::Undecided,
                        budget: cli.budget,
                    });
                    ExitCode::from(EXIT_UNDECIDED)
                }
                Ok(v) => {
                    emit(&VerdictOut { verdict: v });
                    ExitCode::SUCCESS
                }
                Err(e) => lib_error(e),
            }
        }
        Command::Diagonalize { input } => {
            let m: IntMatrix = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            let lattice = match Lattice::new(m) {
                Ok(l) => l,
                Err(e) => return lib_error(e),
            };
            match diagonalize_stably(&lattice, cli.budget) {
                Some(result) => {
                    emit(&result);
                    ExitCode::SUCCESS
                }
                None => {
                    emit(&UndecidedOut {
                        verdict: Verdict::Undecided,
                        budget: cli.budget,
                    });
                    ExitCode::from(EXIT_UNDECIDED)
                }
            }
        }
        Command::SplitPresentation { input } => {
            let m: IntMatrix = match parse(&input) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_BAD_INPUT, e),
            };
            match split_presentation(&m, cli.budget) {
                Ok(Some(p)) => {
                    emit(&p);
                    ExitCode::SUCCESS
                }
                Ok(None) => {
                    emit(&UndecidedOut {
                        verdict: Verdict::Undecided,
                        budget: cli.budget,
                    });
                    ExitCode::from(EXIT_UNDECIDED)
                }
                Err(e) => lib_error(e),
            }
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
