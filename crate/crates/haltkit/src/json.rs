//! JSON documents written by the command line.
//!
//! Experiment reports carry `schema_version`; the schema lives in
//! `schema/experiment-report.v1.json`.

use std::collections::BTreeMap;

use haltkit_core::decider::{Trace, TraceEvent};
use haltkit_core::experiment::{ExperimentReport, OracleReport};
use haltkit_core::refgraph::{RefGraph, RefKinds};
use haltkit_core::{DivergenceProof, ProcDecl};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct PaperTableDoc<'a> {
    pub schema_version: u32,
    pub experiment: &'static str,
    #[serde(flatten)]
    pub report: &'a ExperimentReport,
}

impl<'a> PaperTableDoc<'a> {
    pub fn new(report: &'a ExperimentReport) -> Self {
        PaperTableDoc {
            schema_version: SCHEMA_VERSION,
            experiment: "paper-table",
            report,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OracleDoc<'a> {
    pub schema_version: u32,
    pub experiment: &'static str,
    pub seed: u64,
    pub count: usize,
    pub corpus: &'a OracleReport,
    pub generated: &'a OracleReport,
}

#[derive(Debug, Serialize)]
pub struct Edge<'a> {
    pub from: &'a str,
    pub to: &'a str,
    pub kinds: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct GraphDoc<'a> {
    pub nodes: Vec<&'a str>,
    pub edges: Vec<Edge<'a>>,
    /// Present when the listing was restricted to one name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<Vec<String>>,
}

pub fn kind_names(kinds: &RefKinds) -> Vec<&'static str> {
    kinds.iter().map(|k| k.as_str()).collect()
}

impl<'a> GraphDoc<'a> {
    /// The whole graph, or only the edges leaving `from`.
    pub fn new(graph: &'a RefGraph, from: Option<&str>) -> Self {
        let edges = graph
            .edge_list()
            .filter(|(f, _, _)| from.is_none_or(|n| n == *f))
            .map(|(from, to, kinds)| Edge {
                from,
                to,
                kinds: kind_names(kinds),
            })
            .collect();
        GraphDoc {
            nodes: graph.nodes.iter().map(String::as_str).collect(),
            edges,
            closure: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DeclDoc<'a> {
    pub name: &'a str,
    pub dialect: haltkit_core::Dialect,
    pub fingerprint: String,
    pub normal_form: String,
    pub mentions: BTreeMap<&'a str, Vec<&'static str>>,
}

impl<'a> DeclDoc<'a> {
    pub fn new(decl: &'a ProcDecl, mentions: &'a BTreeMap<String, RefKinds>) -> Self {
        DeclDoc {
            name: &decl.name,
            dialect: decl.dialect,
            fingerprint: haltkit_core::Fingerprint::of(decl).to_hex(),
            normal_form: haltkit_core::render(decl),
            mentions: mentions
                .iter()
                .map(|(n, k)| (n.as_str(), kind_names(k)))
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunDoc<'a> {
    /// `halted`, `fault` or `budget-exceeded`.
    pub outcome: &'static str,
    /// The fault, or the exhausted budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub transcript: &'a [String],
    pub steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<&'a [TraceEvent]>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisDoc<'a> {
    pub analyzer: &'a str,
    pub program: &'a str,
    pub input: &'a str,
    /// A verdict, or `unknown (budget)`.
    pub verdict: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<&'a DivergenceProof>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<&'a Trace>,
}

/// What `check-proof` reads: any object with `proof` and `trace`, such as
/// the output of `halts --trace`.
#[derive(Debug, Deserialize)]
pub struct ProofDoc {
    pub proof: DivergenceProof,
    pub trace: Trace,
}
