//! Command-line frontend.
//!
//! Exit codes: 0 accept/agreement, 1 reject/disagreement, 2 fuel
//! exhausted, 3 usage or parse error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trilet::derivation::System;
use trilet::differ::{run_differential, DifferOptions, Signature};
use trilet::eval::EvalResult;
use trilet::json::{translation_to_json, DerivationJson, ReportJson};
use trilet::lncheck::LnChecker;
use trilet::parse::{parse, parse_type, SourceFile};
use trilet::pretty::{print_lnterm, print_term, print_type};
use trilet::syntax::{LNTerm, LinearContext};
use trilet::transform::{embed, measure, translate, unwind};
use trilet::tri::{CheckConfig, CheckOutcome, Strategy, TriChecker};

#[derive(Parser)]
#[command(
    name = "trilet",
    about = "Typechecker for a call-by-value lambda calculus with intersection, union, and empty types"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Let,
    Tri,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Heuristic,
    Exhaustive,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Heuristic => Strategy::Heuristic,
            StrategyArg::Exhaustive => Strategy::Exhaustive,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the file's subject term against a type
    Check {
        file: String,
        #[arg(long)]
        against: String,
        #[arg(long, value_enum, default_value = "let")]
        system: SystemArg,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value = "heuristic")]
        strategy: StrategyArg,
        #[arg(long)]
        json: bool,
        /// Print the accepting derivation
        #[arg(long)]
        derivation: bool,
    },
    /// Synthesize types for the file's subject term
    Synth {
        file: String,
        #[arg(long, value_enum, default_value = "let")]
        system: SystemArg,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value = "heuristic")]
        strategy: StrategyArg,
        #[arg(long)]
        json: bool,
    },
    /// Print the let-normal translation of the subject term
    Translate {
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the canonicality measure of the subject's translation
    Measure { file: String },
    /// Translate the subject and unwind the translation back
    Unwind { file: String },
    /// Evaluate the subject term
    Eval {
        file: String,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Run the differential corpus and report agreement
    Differ {
        #[arg(long, default_value_t = 7)]
        size: usize,
        #[arg(long, default_value_t = 500)]
        random: usize,
        #[arg(long, default_value_t = 0xD1FF)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, value_enum, default_value = "heuristic")]
        strategy: StrategyArg,
        #[arg(long)]
        json: bool,
    },
}

fn load(path: &str) -> Result<SourceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    parse(&text).map_err(|e| format!("{path}:{e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check {
            file,
            against,
            system,
            fuel,
            strategy,
            json,
            derivation,
        } => {
            let src = load(&file)?;
            let goal = parse_type(&against, &src.atoms).map_err(|e| e.to_string())?;
            let cfg = CheckConfig {
                strategy: strategy.into(),
                fuel,
                build_derivations: true,
            };
            let empty = LinearContext::empty();
            let (outcome, fuel_used, sys) = match system {
                SystemArg::Tri => {
                    let mut checker = TriChecker::new(cfg);
                    let out = checker
                        .check(&src.prelude, &empty, &LNTerm::from(&src.subject), &goal)
                        .map_err(|e| e.to_string())?;
                    (out, checker.fuel_used(), System::Tri)
                }
                SystemArg::Let => {
                    let translated = trilet::transform::translate_embed(&src.subject);
                    let mut checker = LnChecker::new(cfg);
                    let out = checker
                        .check(&src.prelude, &empty, &translated, &goal)
                        .map_err(|e| e.to_string())?;
                    (out, checker.fuel_used(), System::LetNormal)
                }
            };
            let (word, code) = match &outcome {
                CheckOutcome::Accept(_) => ("accept", ExitCode::SUCCESS),
                CheckOutcome::Reject => ("reject", ExitCode::from(1)),
                CheckOutcome::FuelExhausted => ("fuel-exhausted", ExitCode::from(2)),
            };
            if json {
                let deriv = match &outcome {
                    CheckOutcome::Accept(d) => Some(DerivationJson::from(&**d)),
                    _ => None,
                };
                let obj = serde_json::json!({
                    "outcome": word,
                    "system": match sys { System::Tri => "tri", System::LetNormal => "let" },
                    "fuel_used": fuel_used,
                    "derivation": deriv,
                });
                println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            } else {
                println!("{word}");
                if let CheckOutcome::Accept(d) = &outcome {
                    if derivation {
                        print_derivation(d, 0);
                    }
                }
            }
            Ok(code)
        }
        Command::Synth {
            file,
            system,
            fuel,
            strategy,
            json,
        } => {
            let src = load(&file)?;
            let cfg = CheckConfig {
                strategy: strategy.into(),
                fuel,
                build_derivations: true,
            };
            let empty = LinearContext::empty();
            let subject = LNTerm::from(&src.subject);
            let out = match system {
                SystemArg::Tri => {
                    let mut checker = TriChecker::new(cfg);
                    checker
                        .synth(&src.prelude, &empty, &subject)
                        .map_err(|e| e.to_string())?
                }
                SystemArg::Let => {
                    // synthesis applies the let-normal rule set to the source
                    // term directly; translation targets checking
                    let mut checker = LnChecker::new(cfg);
                    checker
                        .synth(&src.prelude, &empty, &subject)
                        .map_err(|e| e.to_string())?
                }
            };
            if json {
                let types: Vec<String> = out.types.iter().map(|(t, _)| print_type(t)).collect();
                let obj = serde_json::json!({
                    "types": types,
                    "fuel_exhausted": out.fuel_exhausted,
                });
                println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            } else {
                for (t, _) in &out.types {
                    println!("{}", print_type(t));
                }
            }
            if out.fuel_exhausted {
                Ok(ExitCode::from(2))
            } else if out.types.is_empty() {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Translate { file, json } => {
            let src = load(&file)?;
            let (l, body) = translate(&src.subject);
            let embedded = embed(&l, body.clone());
            if json {
                let obj = translation_to_json(&l, &body, &embedded);
                println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            } else {
                for b in &l.0 {
                    let marker = if b.is_slack() { "!" } else { "" };
                    println!("{}{} = {}", b.var(), marker, print_lnterm(b.rhs()));
                }
                println!("+ {}", print_lnterm(&body));
                println!("{}", print_lnterm(&embedded));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Measure { file } => {
            let src = load(&file)?;
            let translated = trilet::transform::translate_embed(&src.subject);
            println!("{}", measure(&translated));
            Ok(ExitCode::SUCCESS)
        }
        Command::Unwind { file } => {
            let src = load(&file)?;
            let translated = trilet::transform::translate_embed(&src.subject);
            let back = unwind(&translated).map_err(|e| e.to_string())?;
            println!("{}", print_term(&back));
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { file, max_steps } => {
            let src = load(&file)?;
            match trilet::eval::eval(&src.subject, max_steps) {
                EvalResult::Value(v) => {
                    println!("value: {}", print_term(&v));
                    Ok(ExitCode::SUCCESS)
                }
                EvalResult::Stuck { term, reason } => {
                    println!("stuck at {}: {}", print_term(&term), reason);
                    Ok(ExitCode::from(1))
                }
                EvalResult::OutOfSteps(t) => {
                    println!("out of steps at {}", print_term(&t));
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Differ {
            size,
            random,
            seed,
            fuel,
            strategy,
            json,
        } => {
            let sig = Signature {
                size_bound: size,
                seed,
                ..Signature::default()
            };
            let opts = DifferOptions {
                fuel,
                strategy: strategy.into(),
                random_count: random,
                random_size: 12,
                parallel: true,
                keep_cases: false,
            };
            let report = run_differential(&sig, &opts);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&ReportJson::from(&report)).unwrap()
                );
            } else {
                print!("{}", report.human_table());
            }
            if report.disagreements.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn print_derivation(d: &trilet::Derivation, depth: usize) {
    println!("{}{}  {}", "  ".repeat(depth), d.rule.name(), d.judgment.describe());
    for c in &d.children {
        print_derivation(c, depth + 1);
    }
}
