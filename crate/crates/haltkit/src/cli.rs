//! The `haltkit` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 the program faulted,
//! 3 a budget ran out, 4 an experiment row or proof check failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use haltkit_core::analyzers::{Analysis, AnalysisError};
use haltkit_core::decider::TraceEvent;
use haltkit_core::experiment::{
    corpus_oracle, generated_oracle, run_paper_experiment, OracleReport, ORACLE_INPUTS,
    ORACLE_PROGRAMS, ORACLE_SEED,
};
use haltkit_core::interp::{run_observed, RunOutcome, StepEvent};
use haltkit_core::refgraph::{ref_closure, RefGraph};
use haltkit_core::{
    analyze, analyze_unlimited, check_proof, corpus, make_diag, parse_decl, render, AnalysisStack,
    Analyzer, Budgets, Dialect, Dictionary, Fingerprint, Mode,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::{load_corpus, IoError};
use crate::json::{AnalysisDoc, DeclDoc, GraphDoc, OracleDoc, PaperTableDoc, ProofDoc, RunDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAULT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "haltkit",
    version,
    about = "Halting analyzers for a small procedural language"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Corpus directory (default: the bundled corpus).
    #[arg(long, global = true, value_name = "DIR")]
    corpus: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    max_steps: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    max_stack: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    max_string: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    max_analysis: Option<usize>,
    /// Write JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include frame events and proofs.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a procedure and print its normal form.
    Parse { program: String },
    /// List reference edges, for one name or the whole dictionary.
    Refs { name: Option<String> },
    /// Run a procedure on an input.
    Run { program: String, input: String },
    /// Ask an analyzer whether a procedure halts on an input.
    Halts {
        #[command(flatten)]
        which: Which,
        program: String,
        input: String,
    },
    /// Check a divergence proof written by `halts --trace`.
    CheckProof { file: PathBuf },
    /// Print the nemesis of an analyzer.
    Diag {
        #[arg(long = "halts", value_name = "ANALYZER")]
        halts: String,
        #[arg(long, value_name = "NAME")]
        name: String,
    },
    /// Reproducible experiments.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Which {
    /// A limited analyzer registered in the corpus.
    #[arg(long, value_name = "NAME")]
    analyzer: Option<String>,
    /// The unlimited analyzer.
    #[arg(long)]
    unlimited: bool,
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// The limited-analyzer verdict table.
    PaperTable,
    /// Unlimited-analyzer verdicts against execution.
    Oracle {
        #[arg(long, default_value_t = ORACLE_SEED)]
        seed: u64,
        #[arg(long, default_value_t = ORACLE_PROGRAMS)]
        count: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Load(#[from] IoError),
    #[error("{0}")]
    Input(String),
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses `args` (program name first) and runs the command. Returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        // the reader went away, as with `| head`
        Err(CliError::Write(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn budgets(g: &Global) -> Result<Budgets, CliError> {
    let d = Budgets::default();
    let b = Budgets {
        max_steps: g.max_steps.unwrap_or(d.max_steps),
        max_stack_depth: g.max_stack.unwrap_or(d.max_stack_depth),
        max_string_len: g.max_string.unwrap_or(d.max_string_len),
        max_analysis_depth: g.max_analysis.unwrap_or(d.max_analysis_depth),
    };
    if !b.is_valid() {
        return Err(CliError::Input("budgets must be positive".into()));
    }
    Ok(b)
}

fn dictionary(g: &Global) -> Result<Dictionary, CliError> {
    match &g.corpus {
        Some(dir) => Ok(load_corpus(dir)?),
        None => Ok(corpus::paper_dictionary()),
    }
}

fn is_source_path(arg: &str) -> bool {
    let path = Path::new(arg);
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| Dialect::from_extension(e).is_some())
        || path.is_file()
}

/// Resolves a command-line program argument: a dictionary name, or a
/// source file that is added to the dictionary unless an identical entry
/// is already there.
fn subject(dict: &mut Dictionary, arg: &str) -> Result<String, CliError> {
    if !is_source_path(arg) {
        if dict.entry(arg).is_some() {
            return Ok(arg.to_string());
        }
        return Err(CliError::Input(format!("no procedure named {arg:?}")));
    }
    let text = fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    let dialect = Path::new(arg)
        .extension()
        .and_then(|e| e.to_str())
        .and_then(Dialect::from_extension)
        .unwrap_or(dict.dialect());
    let decl = parse_decl(&text, dialect).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    let name = decl.name.clone();
    match dict.entry(&name) {
        Some(e) if e.fingerprint() == Fingerprint::of(&decl) => {}
        Some(_) => {
            return Err(CliError::Input(format!(
                "{arg}: {name:?} is already defined differently"
            )))
        }
        None => {
            dict.widen(decl.dialect);
            dict.insert(decl)
                .map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
        }
    }
    Ok(name)
}

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let g = &cli.global;
    let budgets = budgets(g)?;
    match cli.command {
        Command::Parse { program } => parse(g, &program, out),
        Command::Refs { name } => refs(g, name.as_deref(), out),
        Command::Run { program, input } => run_cmd(g, &budgets, &program, &input, out, err),
        Command::Halts {
            which,
            program,
            input,
        } => halts(g, &budgets, &which, &program, &input, out),
        Command::CheckProof { file } => check_proof_cmd(g, &file, out),
        Command::Diag { halts, name } => {
            writeln!(out, "{}", make_diag(&halts, &name).map_err(input_err)?)?;
            Ok(EXIT_OK)
        }
        Command::Experiment(Experiment::PaperTable) => paper_table(g, &budgets, out),
        Command::Experiment(Experiment::Oracle { seed, count }) => {
            oracle(g, &budgets, seed, count, out)
        }
    }
}

fn parse(g: &Global, program: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut dict = dictionary(g)?;
    let name = subject(&mut dict, program)?;
    let entry = dict.entry(&name).expect("subject resolves to an entry");
    if g.json {
        json_line(out, &DeclDoc::new(&entry.decl, entry.mentions()))?;
    } else {
        writeln!(out, "{}", render(&entry.decl))?;
    }
    Ok(EXIT_OK)
}

fn refs(g: &Global, name: Option<&str>, out: &mut dyn Write) -> Result<i32, CliError> {
    let dict = dictionary(g)?;
    let graph = RefGraph::build(&dict);
    let mut doc = GraphDoc::new(&graph, name);
    if let Some(n) = name {
        let closure = ref_closure(&dict, n).map_err(input_err)?;
        doc.closure = Some(closure.into_iter().collect());
    }
    if g.json {
        json_line(out, &doc)?;
        return Ok(EXIT_OK);
    }
    for e in &doc.edges {
        writeln!(out, "{} -> {} [{}]", e.from, e.to, e.kinds.join(", "))?;
    }
    if let Some(c) = &doc.closure {
        writeln!(out, "closure: {}", c.join(", "))?;
    }
    Ok(EXIT_OK)
}

fn run_cmd(
    g: &Global,
    budgets: &Budgets,
    program: &str,
    input: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut dict = dictionary(g)?;
    let name = subject(&mut dict, program)?;
    let mut events = Vec::new();
    let report = run_observed(&dict, &name, input, budgets, |config, ev| {
        if !g.trace {
            return;
        }
        match ev {
            StepEvent::Entered => {
                if let Some(top) = config.stack.last() {
                    events.push(TraceEvent::Enter {
                        depth: config.stack.len(),
                        proc: top.proc.clone(),
                        arg: top.arg.clone(),
                    });
                }
            }
            StepEvent::Returned(frame) => events.push(TraceEvent::Exit {
                depth: config.stack.len() + 1,
                proc: frame.proc.clone(),
                arg: frame.arg.clone(),
            }),
            StepEvent::Advanced | StepEvent::Printed(_) => {}
        }
    })
    .map_err(input_err)?;
    let (reason, code) = match &report.outcome {
        RunOutcome::Halted(_) => (None, EXIT_OK),
        RunOutcome::Fault(f, _) => (Some(f.to_string()), EXIT_FAULT),
        RunOutcome::BudgetExceeded(k, _) => (Some(k.to_string()), EXIT_BUDGET),
    };
    if g.json {
        json_line(
            out,
            &RunDoc {
                outcome: report.outcome.label(),
                reason,
                transcript: report.outcome.transcript(),
                steps: report.steps,
                trace: g.trace.then_some(events.as_slice()),
            },
        )?;
        return Ok(code);
    }
    for line in report.outcome.transcript() {
        writeln!(out, "{line}")?;
    }
    for ev in &events {
        match ev {
            TraceEvent::Enter { depth, proc, arg } => {
                writeln!(err, "{:>1$}enter {proc} ('{arg}')", "", depth - 1)?
            }
            TraceEvent::Exit { depth, proc, arg } => {
                writeln!(err, "{:>1$}exit {proc} ('{arg}')", "", depth - 1)?
            }
            TraceEvent::Regress { .. } => {}
        }
    }
    match reason {
        None => writeln!(err, "halted after {} steps", report.steps)?,
        Some(r) => writeln!(
            err,
            "{}: {r} after {} steps",
            report.outcome.label(),
            report.steps
        )?,
    }
    Ok(code)
}

fn halts(
    g: &Global,
    budgets: &Budgets,
    which: &Which,
    program: &str,
    input: &str,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut dict = dictionary(g)?;
    // a file argument is analyzed through its name once added
    let program = if is_source_path(program) {
        subject(&mut dict, program)?
    } else {
        program.to_string()
    };
    let mut stack = AnalysisStack::default();
    let (analyzer_name, result) = match &which.analyzer {
        Some(name) => {
            let analyzer = Analyzer::lookup(&dict, name)
                .filter(|a| a.mode() == Mode::Limited)
                .ok_or_else(|| CliError::Input(format!("no limited analyzer named {name:?}")))?;
            (
                name.clone(),
                analyze(&analyzer, &dict, &program, input, budgets, &mut stack),
            )
        }
        None => (
            haltkit_core::analyzers::UNLIMITED_NAME.to_string(),
            analyze_unlimited(&dict, &program, input, budgets, &mut stack),
        ),
    };
    let (analysis, budget): (Option<Analysis>, _) = match result {
        Ok(a) => (Some(a), None),
        Err(AnalysisError::Budget(k)) => (None, Some(k)),
        Err(e) => return Err(input_err(e)),
    };
    let verdict = analysis
        .as_ref()
        .map_or("unknown (budget)", |a| a.verdict.as_str());
    let decision = analysis.as_ref().and_then(|a| a.decision.as_ref());
    let code = if budget.is_some() {
        EXIT_BUDGET
    } else {
        EXIT_OK
    };
    if g.json || g.trace {
        let doc = AnalysisDoc {
            analyzer: &analyzer_name,
            program: &program,
            input,
            verdict,
            subject: analysis.as_ref().and_then(|a| a.subject.as_deref()),
            budget: budget.map(|k| k.as_str()),
            steps: decision.map(|d| d.steps),
            proof: decision.and_then(|d| d.proof.as_ref()),
            trace: decision.filter(|_| g.trace).map(|d| &d.trace),
        };
        json_line(out, &doc)?;
    } else {
        writeln!(out, "{verdict}")?;
    }
    Ok(code)
}

fn check_proof_cmd(g: &Global, file: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let doc: ProofDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let valid = check_proof(&doc.proof, &doc.trace);
    if g.json {
        json_line(out, &serde_json::json!({ "valid": valid }))?;
    } else {
        writeln!(out, "{}", if valid { "valid" } else { "invalid" })?;
    }
    Ok(if valid { EXIT_OK } else { EXIT_FAILED })
}

fn paper_table(g: &Global, budgets: &Budgets, out: &mut dyn Write) -> Result<i32, CliError> {
    let dict = dictionary(g)?;
    let report = run_paper_experiment(&dict, budgets);
    if g.json {
        json_line(out, &PaperTableDoc::new(&report))?;
    } else {
        writeln!(out, "{report}")?;
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn summary(out: &mut dyn Write, label: &str, r: &OracleReport) -> Result<(), CliError> {
    writeln!(
        out,
        "{label}: {} rows, {} agree, {} disagree, {} excluded (unknown (budget))",
        r.rows.len(),
        r.agreed,
        r.disagreed,
        r.excluded
    )?;
    for row in r.disagreements() {
        writeln!(
            out,
            "  DISAGREE {:?} on '{}': verdict '{}', run {}",
            row.program, row.input, row.verdict, row.run
        )?;
    }
    Ok(())
}

fn oracle(
    g: &Global,
    budgets: &Budgets,
    seed: u64,
    count: usize,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let dict = dictionary(g)?;
    let started = Instant::now();
    let corpus = corpus_oracle(&dict, ORACLE_INPUTS, budgets);
    let generated = generated_oracle(&mut ChaCha8Rng::seed_from_u64(seed), count, budgets);
    if g.json {
        json_line(
            out,
            &OracleDoc {
                schema_version: crate::json::SCHEMA_VERSION,
                experiment: "oracle",
                seed,
                count,
                corpus: &corpus,
                generated: &generated,
            },
        )?;
    } else {
        summary(out, "corpus", &corpus)?;
        summary(out, &format!("generated (seed {seed:#x})"), &generated)?;
        writeln!(out, "elapsed {:.2?}", started.elapsed())?;
    }
    Ok(if corpus.disagreed + generated.disagreed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
