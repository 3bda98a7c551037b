//! `ejacat` — build, compose, classify and verify embedded Jordan algebras.
//!
//! JSON goes to stdout, human-readable progress to stderr, so output can be
//! piped. Exit codes: 0 success, 1 failed check, 2 parse error, 3 guardrail.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ejacat::api::{build_report, classify_json, classify_spec, compose_report, ComposeMethod};
use ejacat::category::{assess_morphism, LinearMapJson, MorphismCategory, MorphismVerdict};
use ejacat::constructors::{build_spec, parse_spec, EmbeddingKind};
use ejacat::suites::run_suite;
use ejacat::{Config, Error};

#[derive(Parser)]
#[command(name = "ejacat", version, about = "Euclidean Jordan algebras as embedded JC-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// RNG seed; falls back to $EJACAT_SEED, then 7
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report format on stdout
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Json)]
    output: OutputMode,
    /// Override the composite-size guardrail
    #[arg(long, global = true)]
    force: bool,
    #[arg(long = "tol-herm", global = true, help_heading = "Tolerances")]
    tol_herm: Option<f64>,
    #[arg(long = "tol-orth", global = true, help_heading = "Tolerances")]
    tol_orth: Option<f64>,
    #[arg(long = "tol-rank", global = true, help_heading = "Tolerances")]
    tol_rank: Option<f64>,
    #[arg(long = "tol-member", global = true, help_heading = "Tolerances")]
    tol_member: Option<f64>,
    #[arg(long = "tol-spec", global = true, help_heading = "Tolerances")]
    tol_spec: Option<f64>,
    #[arg(long = "tol-psd", global = true, help_heading = "Tolerances")]
    tol_psd: Option<f64>,
    #[arg(long = "tol-comm", global = true, help_heading = "Tolerances")]
    tol_comm: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Embedding {
    Std,
    Universal,
}

impl Embedding {
    fn kind(self) -> EmbeddingKind {
        match self {
            Embedding::Std => EmbeddingKind::Standard,
            Embedding::Universal => EmbeddingKind::Universal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closure,
    Fixedpoint,
}

impl Method {
    fn api(self) -> ComposeMethod {
        match self {
            Method::Closure => ComposeMethod::Closure,
            Method::Fixedpoint => ComposeMethod::FixedPoint,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an algebra from a spec such as R3, C2@universal or R2+C3
    Build {
        /// Algebra spec (families R, C, Q, V; `+` for direct sums)
        spec: String,
    },
    /// Compose two algebras and classify the result
    Compose {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Default embedding for specs without an explicit @-suffix
        #[arg(long, value_enum, default_value_t = Embedding::Std)]
        embedding: Embedding,
        #[arg(long, value_enum, default_value_t = Method::Closure)]
        method: Method,
    },
    /// Classify a spec or a JSON algebra file
    Classify {
        /// Algebra spec, or path to a JSON file as produced by `build`
        input: String,
    },
    /// Run a named check suite
    Verify {
        /// tables, spin, quabit, snake, dagger, categories, axioms or all
        #[arg(long)]
        suite: String,
        /// Largest family parameter for the table suite
        #[arg(long, default_value_t = 2)]
        max: usize,
    },
    /// Test whether a linear map is a morphism for a category
    CheckMorphism {
        /// JSON file holding {source, target, matrix}
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        /// cqm, rse, urue or invqm
        #[arg(long)]
        category: String,
    },
}

fn resolve_config(opts: &GlobalOpts) -> Result<Config, Error> {
    let seed = match opts.seed {
        Some(s) => s,
        None => match std::env::var("EJACAT_SEED") {
            Ok(text) => text
                .parse::<u64>()
                .map_err(|_| Error::ParseError(format!("EJACAT_SEED is not a u64: {text:?}")))?,
            Err(_) => 7,
        },
    };
    let mut config = Config::with_seed(seed);
    config.force = opts.force;
    if let Some(v) = opts.tol_herm {
        config.tol_herm = v;
    }
    if let Some(v) = opts.tol_orth {
        config.tol_orth = v;
    }
    if let Some(v) = opts.tol_rank {
        config.tol_rank = v;
    }
    if let Some(v) = opts.tol_member {
        config.tol_member = v;
    }
    if let Some(v) = opts.tol_spec {
        config.tol_spec = v;
    }
    if let Some(v) = opts.tol_psd {
        config.tol_psd = v;
    }
    if let Some(v) = opts.tol_comm {
        config.tol_comm = v;
    }
    Ok(config)
}

/// What a subcommand hands back to `main`: the JSON document, the
/// human-readable rendering, and whether every check passed.
struct Outcome {
    json: String,
    text: String,
    passed: bool,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string(value).map_err(|e| Error::ParseError(format!("serialization: {e}")))
}

fn cmd_build(spec: &str, config: &Config) -> Result<Outcome, Error> {
    let doc = build_report(spec, config)?;
    Ok(Outcome {
        text: format!(
            "built {}: ambient blocks {:?}, dimension {}",
            doc.label.as_deref().unwrap_or(spec),
            doc.ambient.blocks,
            doc.basis.len()
        ),
        json: to_json(&doc)?,
        passed: true,
    })
}

fn cmd_compose(
    left: &str,
    right: &str,
    embedding: Embedding,
    method: Method,
    config: &Config,
) -> Result<Outcome, Error> {
    let doc = compose_report(left, right, embedding.kind(), method.api(), config)?;
    Ok(Outcome {
        text: format!(
            "{} ⊙ {} = {} (dimension {}, rank {}, checks {})",
            doc.left,
            doc.right,
            doc.classification,
            doc.dimension,
            doc.rank,
            if doc.all_checks_passed { "pass" } else { "FAIL" }
        ),
        passed: doc.all_checks_passed,
        json: to_json(&doc)?,
    })
}

fn cmd_classify(input: &str, config: &Config) -> Result<Outcome, Error> {
    let doc = if Path::new(input).is_file() || input.ends_with(".json") {
        let text = fs::read_to_string(input)
            .map_err(|e| Error::ParseError(format!("cannot read {input}: {e}")))?;
        classify_json(&text, config)?
    } else {
        classify_spec(input, config)?
    };
    Ok(Outcome {
        text: format!(
            "{input}: {} (dimension {}, rank {})",
            doc.classification, doc.dimension, doc.rank
        ),
        json: to_json(&doc)?,
        passed: true,
    })
}

fn cmd_verify(suite: &str, max: usize, config: &Config) -> Result<Outcome, Error> {
    let report = run_suite(suite, max, config)?;
    let mut text = String::new();
    for c in &report.checks {
        let mark = if c.passed { " ok " } else { "FAIL" };
        text.push_str(&format!("[{mark}] {} — {}\n", c.name, c.detail));
    }
    text.push_str(&format!(
        "suite {}: {}/{} checks passed in {:.1}s",
        report.suite,
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len(),
        report.elapsed_seconds
    ));
    Ok(Outcome { json: to_json(&report)?, text, passed: report.all_passed })
}

#[derive(Serialize)]
struct MorphismReport {
    category: String,
    passed: bool,
    verdict: MorphismVerdict,
}

fn cmd_check_morphism(
    map_path: &Path,
    src: &str,
    dst: &str,
    category: &str,
    config: &Config,
) -> Result<Outcome, Error> {
    let category = MorphismCategory::parse(category)?;
    let text = fs::read_to_string(map_path)
        .map_err(|e| Error::ParseError(format!("cannot read {}: {e}", map_path.display())))?;
    let doc: LinearMapJson = serde_json::from_str(&text)
        .map_err(|e| Error::ParseError(format!("invalid map JSON: {e}")))?;
    let phi = doc.to_map()?;
    let src_built = build_spec(&parse_spec(src, EmbeddingKind::Standard)?, config)?;
    let dst_built = build_spec(&parse_spec(dst, EmbeddingKind::Standard)?, config)?;
    let verdict = assess_morphism(&phi, &src_built, &dst_built, category, config)?;
    let passed = match category {
        MorphismCategory::InvQm => {
            verdict.completely_positive && verdict.intertwiner.unwrap_or(false)
        }
        _ => verdict.relatively_cjp,
    };
    let doc = MorphismReport { category: category.name().to_string(), passed, verdict };
    Ok(Outcome {
        text: format!(
            "{src} → {dst} in {}: {} (jordan {}, cp {}, relCJP {})",
            doc.category,
            if passed { "morphism" } else { "NOT a morphism" },
            doc.verdict.jordan_preserving,
            doc.verdict.completely_positive,
            doc.verdict.relatively_cjp
        ),
        json: to_json(&doc)?,
        passed,
    })
}

fn run(cli: &Cli, config: &Config) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Build { spec } => cmd_build(spec, config),
        Command::Compose { left, right, embedding, method } => {
            cmd_compose(left, right, *embedding, *method, config)
        }
        Command::Classify { input } => cmd_classify(input, config),
        Command::Verify { suite, max } => cmd_verify(suite, *max, config),
        Command::CheckMorphism { map, src, dst, category } => {
            cmd_check_morphism(map, src, dst, category, config)
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ParseError(_) | Error::InvalidSpec(_) => 2,
        Error::GuardrailExceeded { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match resolve_config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    match run(&cli, &config) {
        Ok(outcome) => {
            match cli.global.output {
                OutputMode::Json => {
                    println!("{}", outcome.json);
                    eprintln!("{}", outcome.text);
                }
                OutputMode::Text => println!("{}", outcome.text),
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
