//! Command-line interface.
//!
//! Exit codes are a stable contract: 0 when an explanation is found (or a
//! boolean command answers yes), 1 when there is no explanation (or the
//! answer is no), 2 for unsupported representation pairs, 3 for parse and
//! validation errors, 4 when `--verify` finds a disagreement.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use abduce::engine::{self, Hypothesis, SolveOutcome};
use abduce::formula::{Literal, PartialAssignment, VarId};
use abduce::generator::{self, QueryClass, SigmaClass};
use abduce::io::{self, ProblemFile, ProblemFileError};
use abduce::oracle;

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "abduce",
    version,
    about = "Subset-minimal explanations for propositional observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a best explanation for a problem file.
    Solve {
        file: PathBuf,
        /// Cross-check the outcome against the brute-force oracle (small
        /// instances only).
        #[arg(long)]
        verify: bool,
    },
    /// Test whether a hypothesis explains the query.
    Check {
        file: PathBuf,
        /// Space-separated signed literals, e.g. "1 -3".
        #[arg(long, allow_hyphen_values = true)]
        hypothesis: String,
    },
    /// Decide whether a variable occurs in every best explanation.
    Necessity {
        file: PathBuf,
        #[arg(long)]
        var: u32,
    },
    /// List full explanations in lexicographic order.
    EnumFull {
        file: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Run the brute-force oracle on a small problem.
    Oracle {
        file: PathBuf,
        /// All best (subset-minimal) explanations; the default.
        #[arg(long)]
        best: bool,
        /// All full explanations.
        #[arg(long, conflicts_with = "best")]
        full: bool,
        /// Does any best explanation mention this variable?
        #[arg(long, conflicts_with_all = ["best", "full"])]
        relevance: Option<u32>,
    },
    /// Emit a pseudo-random problem file.
    Gen {
        /// affine | horn | reverse-horn | two-dnf | positive | negative | horn-renamable
        #[arg(long)]
        class: String,
        #[arg(long)]
        vars: u32,
        /// Knowledge-base size (terms or equations).
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        seed: u64,
        /// clause | term | cnf | eqdisj; defaults to the class's natural pairing.
        #[arg(long)]
        query: Option<String>,
        /// Query size for multi-part query forms.
        #[arg(long, default_value_t = 2)]
        query_size: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    ExitCode::from(run(cli))
}

fn load(file: &PathBuf) -> Result<ProblemFile, u8> {
    let text = match std::fs::read_to_string(file) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return Err(EXIT_INPUT);
        }
    };
    match io::parse_problem(&text) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("warning: line {}: {}", w.line, w.message);
            }
            Ok(parsed)
        }
        Err(e @ ProblemFileError::Parse { .. }) => {
            eprintln!("error: {e}");
            Err(EXIT_INPUT)
        }
        Err(e @ ProblemFileError::Validation(_)) => {
            eprintln!("error: {e}");
            Err(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Solve { file, verify } => {
            let parsed = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let outcome = engine::solve(&parsed.problem);
            print!("{}", io::serialize_outcome(&outcome));
            if verify {
                if let Err(code) = verify_outcome(&parsed, &outcome) {
                    return code;
                }
            }
            match outcome {
                SolveOutcome::Best(_) => EXIT_OK,
                SolveOutcome::NoExplanation => EXIT_NO,
                SolveOutcome::Unsupported(_) => EXIT_UNSUPPORTED,
            }
        }
        Command::Check { file, hypothesis } => {
            let parsed = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let lits = match parse_hypothesis(&hypothesis, &parsed) {
                Ok(lits) => lits,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_INPUT;
                }
            };
            match engine::is_explanation(&parsed.problem, &Hypothesis::new(lits)) {
                Ok(true) => {
                    println!("EXPLANATION");
                    EXIT_OK
                }
                Ok(false) => {
                    println!("NOT AN EXPLANATION");
                    EXIT_NO
                }
                Err(e) => {
                    println!("UNSUPPORTED: {}", e.0);
                    EXIT_UNSUPPORTED
                }
            }
        }
        Command::Necessity { file, var } => {
            let parsed = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            if var == 0 || !parsed.problem.abducibles().contains(VarId::new(var.max(1))) {
                eprintln!("error: variable {var} is not an abducible of the problem");
                return EXIT_INPUT;
            }
            match engine::is_necessary(&parsed.problem, VarId::new(var)) {
                Ok(true) => {
                    println!("NECESSARY");
                    EXIT_OK
                }
                Ok(false) => {
                    println!("NOT NECESSARY");
                    EXIT_NO
                }
                Err(e) => {
                    println!("UNSUPPORTED: {}", e.0);
                    EXIT_UNSUPPORTED
                }
            }
        }
        Command::EnumFull { file, limit } => {
            let parsed = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            match engine::enumerate_full(&parsed.problem, limit) {
                Ok(hyps) => {
                    for h in hyps {
                        println!("{h}");
                    }
                    EXIT_OK
                }
                Err(e) => {
                    println!("UNSUPPORTED: {}", e.0);
                    EXIT_UNSUPPORTED
                }
            }
        }
        Command::Oracle {
            file,
            best,
            full,
            relevance,
        } => {
            let parsed = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let p = &parsed.problem;
            if let Some(var) = relevance {
                if var == 0 {
                    eprintln!("error: variables are 1-based");
                    return EXIT_INPUT;
                }
                return match oracle::relevance(p, VarId::new(var)) {
                    Ok(true) => {
                        println!("RELEVANT");
                        EXIT_OK
                    }
                    Ok(false) => {
                        println!("NOT RELEVANT");
                        EXIT_NO
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        EXIT_INPUT
                    }
                };
            }
            let result = if full && !best {
                oracle::full_explanations(p)
            } else {
                oracle::best_explanations(p)
            };
            match result {
                Ok(set) => {
                    for h in set {
                        println!("{h}");
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Command::Gen {
            class,
            vars,
            terms,
            seed,
            query,
            query_size,
        } => {
            let Some(sigma_class) = SigmaClass::from_name(&class) else {
                eprintln!("error: unknown class {class:?}");
                return EXIT_INPUT;
            };
            let query_shape = match query.as_deref() {
                None => default_query_shape(sigma_class),
                Some(name) => match QueryClass::from_name(name) {
                    Some(q) => q,
                    None => {
                        eprintln!("error: unknown query form {name:?}");
                        return EXIT_INPUT;
                    }
                },
            };
            if vars == 0 || terms == 0 {
                eprintln!("error: --vars and --terms must be positive");
                return EXIT_INPUT;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let max_abducibles = (vars as usize).div_ceil(2);
            let problem = generator::problem(
                sigma_class,
                query_shape,
                vars,
                terms,
                query_size,
                max_abducibles,
                &mut rng,
            );
            print!("{}", io::serialize_problem(&problem));
            EXIT_OK
        }
    }
}

fn default_query_shape(class: SigmaClass) -> QueryClass {
    match class {
        SigmaClass::Affine => QueryClass::EqDisj,
        _ => QueryClass::Clause,
    }
}

fn parse_hypothesis(text: &str, parsed: &ProblemFile) -> Result<PartialAssignment, String> {
    let mut lits = Vec::new();
    for token in text.split_whitespace() {
        let lit = token
            .parse::<i64>()
            .ok()
            .and_then(Literal::from_signed)
            .ok_or_else(|| {
                format!("hypothesis literals must be nonzero signed integers, got {token:?}")
            })?;
        if !parsed.problem.abducibles().contains(lit.var) {
            return Err(format!("variable {} is not an abducible", lit.var.get()));
        }
        lits.push(lit);
    }
    PartialAssignment::from_literals(lits)
        .ok_or_else(|| "hypothesis contains complementary literals".into())
}

fn verify_outcome(parsed: &ProblemFile, outcome: &SolveOutcome) -> Result<(), u8> {
    let p = &parsed.problem;
    if matches!(outcome, SolveOutcome::Unsupported(_)) {
        return Ok(());
    }
    let best = match oracle::best_explanations(p) {
        Ok(best) => best,
        Err(e) => {
            eprintln!("verify: skipped ({e})");
            return Ok(());
        }
    };
    let ok = match outcome {
        SolveOutcome::Best(e) => best.contains(e),
        SolveOutcome::NoExplanation => best.is_empty(),
        SolveOutcome::Unsupported(_) => true,
    };
    if ok {
        eprintln!("verify: ok");
        Ok(())
    } else {
        eprintln!("verify: MISMATCH against the brute-force oracle");
        Err(EXIT_VERIFY)
    }
}
