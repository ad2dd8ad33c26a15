//! Command-line front end: evaluation, proof search, proof checking,
//! encodings, measure classification, and corpus generation.
//!
//! Exit codes: 0 success, 1 parse/usage error, 2 unprovable or false,
//! 3 search budget exceeded.

use clap::{Args, Parser, Subcommand};
use mallfoc::prover::{check_proof_with, Prover, DEFAULT_BUDGET};
use mallfoc::qbf::Side;
use mallfoc::sequent::{parse_proof, render_proof, Discipline, Sequent, SystemId};
use mallfoc::{
    btt_prove, classify_cedent, corpus, evaluate, instantiate_simplify, ndcomp_run,
    prime_translate, qltrans, render_btt, Assignment, FormulaOrder, QbfFormula, Regime,
};
use rand::SeedableRng;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "mallfoc",
    version,
    about = "Proof search for MALL and its affine variant, QBF evaluation, and the encodings between them",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SearchOpts {
    /// Proof system
    #[arg(long, default_value = "mall", value_parser = parse_system)]
    system: SystemId,
    /// Focussing discipline (focussed systems only)
    #[arg(long, default_value = "multi", value_parser = parse_discipline)]
    discipline: Discipline,
    /// Search-node budget per query
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    nodes: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed QBF (or one under the empty assignment)
    Eval {
        /// Formula text or a file containing it
        input: String,
    },
    /// Search for a Boolean truth tree of a closed prenex QBF
    Btt { input: String },
    /// Search for a proof of a cedent (comma-separated formulas)
    Prove {
        #[command(flatten)]
        opts: SearchOpts,
        input: String,
    },
    /// Check a proof file produced by `prove` (or written by hand)
    Check {
        #[command(flatten)]
        opts: SearchOpts,
        /// Enforce the discipline while checking
        #[arg(long)]
        strict_discipline: bool,
        file: String,
    },
    /// Translate between the QBF and MALL worlds
    Encode {
        /// qbf-to-amall | prime | neg | pos
        kind: String,
        input: String,
    },
    /// Compute the measure pair and the provability class it selects
    Classify {
        #[arg(long, default_value = "standard", value_parser = parse_regime)]
        regime: Regime,
        /// Print every recursion clause fired
        #[arg(long)]
        trace: bool,
        /// Evaluate under a seeded formula order instead of the canonical one
        #[arg(long)]
        order: Option<u64>,
        input: String,
    },
    /// Decide provability through the measure-selected bounded-alternation predicate
    Decide {
        #[command(flatten)]
        opts: SearchOpts,
        #[arg(long, default_value = "standard", value_parser = parse_regime)]
        regime: Regime,
        input: String,
    },
    /// Stream a test-corpus family, one formula per line
    Corpus {
        /// qf | sentences | mall | cedents | strict
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap the number of lines (0 = everything the family defines)
        #[arg(long, default_value_t = 0)]
        limit: usize,
        /// Alternation level for the strict family
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// sigma | pi (strict family)
        #[arg(long, default_value = "sigma")]
        side: String,
        /// Sample count for the random families
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn parse_system(s: &str) -> Result<SystemId, String> {
    s.parse()
}

fn parse_discipline(s: &str) -> Result<Discipline, String> {
    s.parse()
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    match s {
        "standard" => Ok(Regime::Standard),
        "primed" => Ok(Regime::Primed),
        other => Err(format!("unknown regime `{other}`")),
    }
}

/// Arguments name either literal formula text or a file holding it.
fn read_input(input: &str) -> String {
    match std::fs::read_to_string(input) {
        Ok(text) => text.trim().to_string(),
        Err(_) => input.to_string(),
    }
}

/// Print a streamed line; a closed pipe (e.g. `| head`) ends the stream
/// without the default panic.
fn emit(line: impl std::fmt::Display) {
    use std::io::Write;
    if writeln!(std::io::stdout(), "{line}").is_err() {
        std::process::exit(0);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

const UNPROVABLE: u8 = 2;
const BUDGET: u8 = 3;

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Eval { input } => {
            let phi = mallfoc::parse_qbf(&read_input(&input)).map_err(|e| e.to_string())?;
            let verdict = evaluate(&phi, &Assignment::new());
            println!("{verdict}");
            Ok(if verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(UNPROVABLE)
            })
        }
        Command::Btt { input } => {
            let phi = mallfoc::parse_qbf(&read_input(&input)).map_err(|e| e.to_string())?;
            match btt_prove(&phi).map_err(|e| e.to_string())? {
                Some(proof) => {
                    print!("{}", render_btt(&proof));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("UNPROVABLE");
                    Ok(ExitCode::from(UNPROVABLE))
                }
            }
        }
        Command::Prove { opts, input } => {
            let cedent =
                mallfoc::parse_mall_cedent(&read_input(&input)).map_err(|e| e.to_string())?;
            let s = Sequent::plain(cedent);
            let mut prover = Prover::with_budget(opts.nodes);
            match prover.prove(opts.system, opts.discipline, &s) {
                Ok(Some(proof)) => {
                    print!("{}", render_proof(&proof));
                    Ok(ExitCode::SUCCESS)
                }
                Ok(None) => {
                    println!("UNPROVABLE");
                    Ok(ExitCode::from(UNPROVABLE))
                }
                Err(_) => {
                    println!("BUDGET EXCEEDED");
                    Ok(ExitCode::from(BUDGET))
                }
            }
        }
        Command::Check {
            opts,
            strict_discipline,
            file,
        } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("{file}: {e}"))?;
            let proof = parse_proof(&text, opts.system).map_err(|e| e.to_string())?;
            let discipline = strict_discipline.then_some(opts.discipline);
            match check_proof_with(&proof, discipline) {
                Ok(()) => {
                    println!("OK: {} nodes", proof.node_count());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("INVALID: {e}");
                    Ok(ExitCode::from(UNPROVABLE))
                }
            }
        }
        Command::Encode { kind, input } => {
            let text = read_input(&input);
            let output = match kind.as_str() {
                "qbf-to-amall" => {
                    let phi = mallfoc::parse_qbf(&text).map_err(|e| e.to_string())?;
                    let clean = instantiate_simplify(&phi, &Assignment::new());
                    if clean == QbfFormula::True || clean == QbfFormula::False {
                        return Err(format!("sentence collapses to the constant {clean}"));
                    }
                    qltrans(&clean).map_err(|e| e.to_string())?.formula
                }
                "prime" => {
                    let a = mallfoc::parse_mall(&text).map_err(|e| e.to_string())?;
                    prime_translate(&a)
                }
                "neg" => {
                    let phi = mallfoc::parse_qbf(&text).map_err(|e| e.to_string())?;
                    mallfoc::negtrans(&phi).map_err(|e| e.to_string())?
                }
                "pos" => {
                    let phi = mallfoc::parse_qbf(&text).map_err(|e| e.to_string())?;
                    mallfoc::postrans(&phi).map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown encoding `{other}`")),
            };
            println!("{output}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            regime,
            trace,
            order,
            input,
        } => {
            let cedent =
                mallfoc::parse_mall_cedent(&read_input(&input)).map_err(|e| e.to_string())?;
            let refs: Vec<_> = cedent.into_iter().map(Arc::new).collect();
            let formula_order = match order {
                None => FormulaOrder::canonical(),
                Some(seed) => FormulaOrder::seeded(seed),
            };
            if trace {
                let nd = ndcomp_run(&refs, &formula_order, regime, true);
                for line in &nd.trace {
                    println!("{line}");
                }
                let cond = mallfoc::condcomp_run(&refs, &formula_order, regime, true);
                for line in &cond.trace {
                    println!("{line}");
                }
            }
            let result = classify_cedent(&refs, regime);
            println!("{result}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Decide {
            opts,
            regime,
            input,
        } => {
            let formula = mallfoc::parse_mall(&read_input(&input)).map_err(|e| e.to_string())?;
            let mut prover = Prover::with_budget(opts.nodes);
            match mallfoc::decide_lqtrans(&mut prover, opts.system, &formula, regime) {
                Ok((verdict, result)) => {
                    println!(
                        "{} at {} (ndcomp={}, condcomp={})",
                        if verdict { "PROVABLE" } else { "UNPROVABLE" },
                        result.class_label,
                        result.ndcomp,
                        result.condcomp
                    );
                    Ok(if verdict {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(UNPROVABLE)
                    })
                }
                Err(_) => {
                    println!("BUDGET EXCEEDED");
                    Ok(ExitCode::from(BUDGET))
                }
            }
        }
        Command::Corpus {
            family,
            seed,
            limit,
            level,
            side,
            count,
        } => {
            let cap = |n: usize| if limit == 0 { n } else { limit.min(n) };
            match family.as_str() {
                "qf" => {
                    let fs =
                        corpus::qf_formulas_upto(&corpus::qbf_leaves(&["x", "y", "z"], true), 4);
                    for f in fs.iter().take(cap(fs.len())) {
                        emit(f);
                    }
                }
                "sentences" => {
                    let fs = corpus::closed_prenex_sentences(3);
                    for f in fs.iter().take(cap(fs.len())) {
                        emit(f);
                    }
                }
                "mall" => {
                    let fs = corpus::mall_formulas_upto(&corpus::standard_mall_leaves(), 3);
                    for f in fs.iter().take(cap(fs.len())) {
                        emit(f);
                    }
                }
                "cedents" => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    let n = if limit == 0 { count } else { limit.min(count) };
                    for _ in 0..n {
                        let s = corpus::random_cedent(&mut rng, 3, 8, &["x", "y"], true);
                        let line: Vec<String> = s.ctx.iter().map(|f| f.to_string()).collect();
                        emit(line.join(", "));
                    }
                }
                "strict" => {
                    let side = match side.as_str() {
                        "sigma" => Side::Sigma,
                        "pi" => Side::Pi,
                        other => return Err(format!("unknown side `{other}`")),
                    };
                    if level == 0 {
                        return Err("strict family needs --level >= 1".into());
                    }
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    let n = if limit == 0 { count } else { limit.min(count) };
                    for _ in 0..n {
                        emit(corpus::strict_sentence(&mut rng, side, level, 3));
                    }
                }
                other => return Err(format!("unknown corpus family `{other}`")),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
