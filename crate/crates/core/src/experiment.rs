//! The verdict-table experiment over the bundled corpus, and the oracle
//! experiment comparing unlimited verdicts with execution.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::analyzers::{analyze, analyze_unlimited, AnalysisError, Analyzer, UNLIMITED_NAME};
use crate::decider::{check_proof, AnalysisStack, Verdict};
use crate::dict::Dictionary;
use crate::gen::{gen_program, GenConfig};
use crate::interp::{run, Budgets};

/// What a row exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    /// A limited analyzer registered under the given name.
    Limited(&'static str),
    Unlimited,
    /// Actual execution; the expectation is a run-outcome label.
    Run,
}

impl Probe {
    pub fn label(self) -> &'static str {
        match self {
            Probe::Limited(n) => n,
            Probe::Unlimited => UNLIMITED_NAME,
            Probe::Run => "run",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expectation {
    pub probe: Probe,
    pub program: &'static str,
    pub input: &'static str,
    pub expected: &'static str,
}

const fn row(
    probe: Probe,
    program: &'static str,
    input: &'static str,
    expected: &'static str,
) -> Expectation {
    Expectation {
        probe,
        program,
        input,
        expected,
    }
}

/// Every row of the table, in report order.
pub const PAPER_TABLE: &[Expectation] = &[
    row(Probe::Limited("halts1"), "diag1", "diag1", "maybe"),
    row(Probe::Limited("halts2"), "diag1", "diag1", "yes"),
    row(Probe::Limited("halts2"), "diag2", "diag2", "maybe"),
    row(Probe::Limited("halts1"), "diag2", "diag2", "yes"),
    row(Probe::Limited("halts1"), "both", "both", "maybe"),
    row(Probe::Limited("halts2"), "both", "both", "maybe"),
    row(Probe::Unlimited, "loop", "x", "no"),
    row(Probe::Unlimited, "stop", "x", "yes"),
    row(Probe::Unlimited, "dtower", "dtower", "no"),
    row(Probe::Run, "dtower", "dtower", "budget-exceeded"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReportRow {
    pub analyzer: String,
    pub program: String,
    pub input: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub passed: usize,
    pub failed: usize,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn analysis_label(r: Result<crate::analyzers::Analysis, AnalysisError>) -> String {
    match r {
        Ok(a) => a.verdict.as_str().to_string(),
        Err(AnalysisError::Budget(_)) => "unknown (budget)".to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn evaluate(dict: &Dictionary, budgets: &Budgets, e: &Expectation) -> String {
    match e.probe {
        Probe::Limited(name) => match Analyzer::lookup(dict, name) {
            Some(a) => analysis_label(analyze(
                &a,
                dict,
                e.program,
                e.input,
                budgets,
                &mut AnalysisStack::default(),
            )),
            None => format!("error: no analyzer {name:?}"),
        },
        Probe::Unlimited => analysis_label(analyze_unlimited(
            dict,
            e.program,
            e.input,
            budgets,
            &mut AnalysisStack::default(),
        )),
        Probe::Run => match run(dict, e.program, e.input, budgets) {
            Ok(r) => r.outcome.label().to_string(),
            Err(err) => format!("error: {err}"),
        },
    }
}

/// Evaluates `table` row by row, in order.
pub fn run_experiment(
    dict: &Dictionary,
    budgets: &Budgets,
    table: &[Expectation],
) -> ExperimentReport {
    let rows: Vec<ReportRow> = table
        .iter()
        .map(|e| {
            let actual = evaluate(dict, budgets, e);
            ReportRow {
                analyzer: e.probe.label().to_string(),
                program: e.program.to_string(),
                input: e.input.to_string(),
                expected: e.expected.to_string(),
                pass: actual == e.expected,
                actual,
            }
        })
        .collect();
    let passed = rows.iter().filter(|r| r.pass).count();
    ExperimentReport {
        failed: rows.len() - passed,
        passed,
        rows,
    }
}

pub fn run_paper_experiment(dict: &Dictionary, budgets: &Budgets) -> ExperimentReport {
    run_experiment(dict, budgets, PAPER_TABLE)
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = [
            "analyzer", "program", "input", "expected", "actual", "result",
        ];
        let cells: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.analyzer.clone(),
                    r.program.clone(),
                    format!("'{}'", r.input),
                    format!("'{}'", r.expected),
                    format!("'{}'", r.actual),
                    String::from(if r.pass { "pass" } else { "FAIL" }),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, row: &[&str]| -> fmt::Result {
            let mut first = true;
            for (c, w) in row.iter().zip(widths) {
                if !first {
                    f.write_str("  ")?;
                }
                first = false;
                write!(f, "{c:<w$}")?;
            }
            writeln!(f)
        };
        line(f, &header)?;
        for row in &cells {
            let refs: Vec<&str> = row.iter().map(String::as_str).collect();
            line(f, &refs)?;
        }
        write!(f, "{} passed, {} failed", self.passed, self.failed)
    }
}

/// Seed of the generated half of the oracle experiment.
pub const ORACLE_SEED: u64 = 0x005e_ed0f_0a1e;
/// Generated programs in the oracle experiment.
pub const ORACLE_PROGRAMS: usize = 500;
/// Inputs every corpus entry is checked on, besides its own name.
pub const ORACLE_INPUTS: &[&str] = &["x", ""];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OracleStatus {
    Agree,
    Disagree,
    /// The analysis ran out of budget.
    Excluded,
}

/// One unlimited-analyzer verdict checked against execution.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleRow {
    pub program: String,
    pub input: String,
    pub verdict: String,
    pub run: String,
    /// Whether the divergence proof checked, for 'no' verdicts.
    pub proof_checked: Option<bool>,
    pub status: OracleStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
    pub agreed: usize,
    pub disagreed: usize,
    pub excluded: usize,
}

impl OracleReport {
    pub fn push(&mut self, row: OracleRow) {
        match row.status {
            OracleStatus::Agree => self.agreed += 1,
            OracleStatus::Disagree => self.disagreed += 1,
            OracleStatus::Excluded => self.excluded += 1,
        }
        self.rows.push(row);
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &OracleRow> {
        self.rows
            .iter()
            .filter(|r| r.status == OracleStatus::Disagree)
    }
}

/// Compares `analyze_unlimited(proc, input)` with a run under the same
/// budgets. 'yes' must come with termination; 'no' with non-termination and
/// a proof that checks.
pub fn oracle_row(dict: &Dictionary, proc: &str, input: &str, budgets: &Budgets) -> OracleRow {
    let analysis = analyze_unlimited(dict, proc, input, budgets, &mut AnalysisStack::default());
    let outcome = run(dict, proc, input, budgets).map(|r| r.outcome);
    let run_label = match &outcome {
        Ok(o) => o.label().to_string(),
        Err(e) => format!("error: {e}"),
    };
    let terminated = outcome.as_ref().map(|o| o.terminated()).ok();
    let mut proof_checked = None;
    let (verdict, status) = match analysis {
        Err(AnalysisError::Budget(_)) => ("unknown (budget)".to_string(), OracleStatus::Excluded),
        Err(e) => (format!("error: {e}"), OracleStatus::Disagree),
        Ok(a) => {
            let agree = match (a.verdict, terminated) {
                (Verdict::Yes, Some(t)) => t,
                (Verdict::No, Some(t)) => {
                    let checked = a
                        .decision
                        .as_ref()
                        .and_then(|d| d.proof.as_ref().map(|p| check_proof(p, &d.trace)))
                        .unwrap_or(false);
                    proof_checked = Some(checked);
                    !t && checked
                }
                _ => false,
            };
            let status = if agree {
                OracleStatus::Agree
            } else {
                OracleStatus::Disagree
            };
            (a.verdict.as_str().to_string(), status)
        }
    };
    OracleRow {
        program: proc.to_string(),
        input: input.to_string(),
        verdict,
        run: run_label,
        proof_checked,
        status,
    }
}

/// Every plain entry of `dict` on each of `inputs` and on its own name.
pub fn corpus_oracle(dict: &Dictionary, inputs: &[&str], budgets: &Budgets) -> OracleReport {
    let mut report = OracleReport::default();
    for entry in dict.entries().filter(|e| e.is_plain()) {
        let own = [entry.name()];
        for input in inputs.iter().chain(own.iter()) {
            report.push(oracle_row(dict, entry.name(), input, budgets));
        }
    }
    report
}

/// `count` generated programs, each on its generated input. Rows name the
/// program by its index and source text.
pub fn generated_oracle<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    budgets: &Budgets,
) -> OracleReport {
    let cfg = GenConfig::default();
    let mut report = OracleReport::default();
    for idx in 0..count {
        let program = gen_program(rng, &cfg);
        let dict = program.dictionary();
        let mut row = oracle_row(&dict, &program.entry, &program.input, budgets);
        let sources: Vec<&str> = program.decls.iter().map(|d| d.source.as_str()).collect();
        row.program = format!("#{idx}\n{}", sources.join(""));
        report.push(row);
    }
    report
}
