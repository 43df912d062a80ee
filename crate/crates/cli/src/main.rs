//! `lpform`: command-line entry point for the formulation toolkit.
//!
//! Exit status is 0 on success, 1 when the data is invalid or a check
//! fails, and 2 when a file cannot be read or written, a config is invalid,
//! or the generation service fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpform::augment::{
    AugmentError, AugmentPlan, AugmentSummary, GenServiceConfig, MutationConfig, augment_corpus,
};
use lpform::beams::{BeamLine, parse_beam_file};
use lpform::metrics::{DEFAULT_EXEC_TOL, evaluate_dataset_with};
use lpform::rules::{RuleConfig, rank_beams, select_top_k};
use lpform::solver::{
    SolverOptions, Status, emit_lp_file, parse_lp_file, solve_ilp_with, solve_lp_with,
};
use lpform::{CanonicalLP, ProblemRecord, canonicalize, parse_corpus};
use rayon::prelude::*;
use serde_json::{Value, json};

#[derive(Parser)]
#[command(name = "lpform", version, about = "Validate, canonicalize, rank, solve, evaluate and augment LP word-problem formulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Suppress progress messages on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,

    /// Worker threads for per-problem work (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check every record of a corpus and list violations.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Lower gold formulations to matrix form, one JSON line per record.
    Canonicalize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correct, score and rank beam candidates; keep the top k per problem.
    Rank {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        beams: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a single-objective IR or LP file.
    Solve(SolveArgs),
    /// Score ranked beams against gold: canonical accuracy, execution match, pass@k.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        beams: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Comma-separated k values for pass@k.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 5])]
        k: Vec<usize>,
        /// Relative tolerance for execution match.
        #[arg(long, default_value_t = DEFAULT_EXEC_TOL)]
        tol: f64,
        /// Directory for report.json, per_problem.csv and report.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an augmented corpus of mutated and multi-objective records.
    Augment(AugmentArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// IR file: a bare formulation or a corpus record with a gold formulation.
    #[arg(long, conflicts_with = "lp", required_unless_present = "lp")]
    ir: Option<PathBuf>,
    #[arg(long)]
    lp: Option<PathBuf>,
    /// Drop integrality and solve the LP relaxation.
    #[arg(long)]
    relax: bool,
    /// Exit 1 unless the status is Optimal.
    #[arg(long)]
    strict: bool,
    /// Write the problem as an LP file instead of solving it.
    #[arg(long, value_name = "FILE")]
    emit_lp: Option<PathBuf>,
    /// Row feasibility tolerance, relative to max(1, |rhs|).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Mutation config JSON; unspecified fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generation service config JSON; the default is the local stub.
    #[arg(long)]
    service: Option<PathBuf>,
    /// Overrides the seed in the mutation config.
    #[arg(long)]
    seed: Option<u64>,
    /// Single-objective mutants per record; the default follows the reference mix.
    #[arg(long)]
    per_record: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_corpus(path: &Path) -> Result<Vec<ProblemRecord>, Failure> {
    parse_corpus(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_beams(path: &Path) -> Result<Vec<BeamLine>, Failure> {
    parse_beam_file(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_rules(path: Option<&Path>) -> Result<RuleConfig, Failure> {
    match path {
        None => Ok(RuleConfig::default()),
        Some(p) => RuleConfig::from_json(&read(p)?).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
    }
}

fn load_json<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    match path {
        None => Ok(T::default()),
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
    }
}

fn jsonl(values: impl IntoIterator<Item = Value>) -> String {
    values.into_iter().map(|v| v.to_string() + "\n").collect()
}

// ---------------------------------------------------------------------------

fn cmd_validate(corpus: &Path) -> Outcome {
    let text = read(corpus)?;
    let (mut records, mut invalid) = (0, 0);
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        records += 1;
        let parsed = serde_json::from_str::<Value>(line)
            .map_err(|e| e.to_string())
            .and_then(|v| ProblemRecord::from_value_unchecked(&v).map_err(|e| e.to_string()));
        match parsed {
            Err(e) => {
                invalid += 1;
                println!("line {}: {e}", i + 1);
            }
            Ok(rec) => {
                let report = rec.check();
                if !report.is_empty() {
                    invalid += 1;
                    for v in &report.violations {
                        println!("line {} ({}): {}: {}", i + 1, rec.id, v.path, v.message);
                    }
                }
            }
        }
    }
    println!("{records} records, {invalid} with violations");
    if invalid > 0 { Err(Failure::Invalid(format!("{invalid} invalid record(s)"))) } else { Ok(()) }
}

fn cmd_canonicalize(corpus: &Path, out: Option<&Path>) -> Outcome {
    let recs = load_corpus(corpus)?;
    let rows: Vec<Result<Value, String>> = recs
        .par_iter()
        .filter(|r| r.gold.is_some())
        .map(|r| {
            let gold = r.gold.as_ref().expect("filtered");
            canonicalize(gold, r)
                .map(|lp| json!({ "id": r.id, "lp": serde_json::to_value(&lp).expect("canonical LP serializes") }))
                .map_err(|e| format!("{}: {e}", r.id))
        })
        .collect();
    let errors: Vec<&String> = rows.iter().filter_map(|r| r.as_ref().err()).collect();
    for e in &errors {
        eprintln!("error: {e}");
    }
    emit(out, &jsonl(rows.iter().filter_map(|r| r.as_ref().ok().cloned())))?;
    if errors.is_empty() { Ok(()) } else { Err(Failure::Invalid(format!("{} record(s) failed to lower", errors.len()))) }
}

fn cmd_rank(corpus: &Path, beams: &Path, rules: Option<&Path>, k: usize, out: Option<&Path>) -> Outcome {
    let cfg = load_rules(rules)?;
    let recs = load_corpus(corpus)?;
    let lines = load_beams(beams)?;
    let mut work = Vec::with_capacity(lines.len());
    for line in &lines {
        let rec = recs
            .iter()
            .find(|r| r.id == line.id)
            .ok_or_else(|| Failure::Invalid(format!("beam line {:?} has no matching record", line.id)))?;
        work.push((rec, line));
    }
    let ranked: Vec<Value> = work
        .par_iter()
        .map(|(rec, line)| {
            let ranked = rank_beams(line.to_candidates(), rec, &cfg);
            let top: Vec<Value> = select_top_k(&ranked, k).iter().enumerate().map(|(i, c)| c.to_value(i)).collect();
            json!({ "id": rec.id, "candidates": top })
        })
        .collect();
    emit(out, &jsonl(ranked))
}

fn solve_input(args: &SolveArgs) -> Result<(CanonicalLP, String), Failure> {
    if let Some(p) = &args.lp {
        let lp = parse_lp_file(&read(p)?).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
        let name = p.file_stem().map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned());
        return Ok((lp, name));
    }
    let p = args.ir.as_ref().expect("clap requires --ir or --lp");
    let v: Value = serde_json::from_str(&read(p)?).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
    let rec = ProblemRecord::from_value_unchecked(&v).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
    let gold = rec.gold.as_ref().ok_or_else(|| Failure::Invalid(format!("{}: no formulation", p.display())))?;
    let lp = canonicalize(gold, &rec).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
    let name = if rec.id.is_empty() {
        p.file_stem().map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned())
    } else {
        rec.id.clone()
    };
    Ok((lp, name))
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let (mut lp, name) = solve_input(args)?;
    if args.relax {
        lp = lp.relaxed();
    }
    if let Some(path) = &args.emit_lp {
        let text = emit_lp_file(&lp, &name).map_err(|e| Failure::Invalid(e.to_string()))?;
        return write(path, &text);
    }
    let mut opts = SolverOptions::default();
    if let Some(t) = args.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Io(format!("--tol must be a nonnegative number, got {t}")));
        }
        opts.feasibility_tol = t;
    }
    let payload = if args.relax {
        let s = solve_lp_with(&lp, &opts).map_err(|e| Failure::Invalid(e.to_string()))?;
        json!({ "status": s.status, "objective_value": s.objective_value, "assignment": s.assignment, "relaxed": true })
    } else {
        let s = solve_ilp_with(&lp, &opts).map_err(|e| Failure::Invalid(e.to_string()))?;
        json!({
            "status": s.status,
            "objective_value": s.objective_value,
            "assignment": s.assignment,
            "relaxed": false,
            "node_count": s.node_count,
        })
    };
    println!("{}", serde_json::to_string_pretty(&payload).expect("payload serializes"));
    let optimal = payload["status"] == json!(Status::Optimal);
    if args.strict && !optimal {
        return Err(Failure::Invalid(format!("status {}", payload["status"])));
    }
    Ok(())
}

fn cmd_eval(corpus: &Path, beams: &Path, rules: Option<&Path>, k: &[usize], tol: f64, out: &Path) -> Outcome {
    if k.contains(&0) {
        return Err(Failure::Io("--k values must be positive".into()));
    }
    let cfg = load_rules(rules)?;
    let recs = load_corpus(corpus)?;
    let lines = load_beams(beams)?;
    let report = evaluate_dataset_with(&recs, &lines, &cfg, k, tol).map_err(|e| Failure::Invalid(e.to_string()))?;
    write(&out.join("report.json"), &(report.to_json() + "\n"))?;
    write(&out.join("per_problem.csv"), &report.to_csv())?;
    let table = report.to_table();
    write(&out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_augment(args: &AugmentArgs, quiet: bool) -> Outcome {
    let mut cfg: MutationConfig = load_json(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let svc: GenServiceConfig = load_json(args.service.as_deref())?;
    let plan = args.per_record.map_or_else(AugmentPlan::default, AugmentPlan::per_record);
    let recs = load_corpus(&args.corpus)?;
    if !quiet {
        eprintln!("augmenting {} record(s) via {}", recs.len(), svc.service_label());
    }
    let out = augment_corpus(&recs, plan, &cfg, &svc).map_err(|e| match e {
        AugmentError::InvalidConfig(_) | AugmentError::ServiceUnavailable(_) | AugmentError::EmptyGeneration => {
            Failure::Io(e.to_string())
        }
        AugmentError::NotEligible(_) => Failure::Invalid(e.to_string()),
    })?;
    write(&args.out, &jsonl(out.iter().map(|r| r.to_value())))?;
    let s = AugmentSummary::of(&out);
    println!("original: {}  simulated: {}  multi-objective: {}", s.original, s.simulated, s.multi_objective);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
    }
    let result = match &cli.command {
        Command::Validate { corpus } => cmd_validate(corpus),
        Command::Canonicalize { corpus, out } => cmd_canonicalize(corpus, out.as_deref()),
        Command::Rank { corpus, beams, rules, k, out } => cmd_rank(corpus, beams, rules.as_deref(), *k, out.as_deref()),
        Command::Solve(args) => cmd_solve(args),
        Command::Eval { corpus, beams, rules, k, tol, out } => cmd_eval(corpus, beams, rules.as_deref(), k, *tol, out),
        Command::Augment(args) => cmd_augment(args, cli.quiet),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Invalid(m) | Failure::Io(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
