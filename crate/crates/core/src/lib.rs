//! Halting analysis over a small deterministic language.
//!
//! The crate is `no_std` (it needs `alloc`). It contains the two-dialect
//! language front end, the reference graph, a small-step interpreter with
//! budgets, the halting decider, the halts-family analyzers and the bundled
//! experiment corpus. File IO and the command line live in the `haltkit`
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analyzers;
pub mod corpus;
pub mod decider;
pub mod dict;
pub mod experiment;
pub mod gen;
pub mod interp;
pub mod lang;
mod machine;
pub mod refgraph;

pub use analyzers::{
    analyze, analyze_unlimited, make_diag, make_halts, register_ihalts, Analysis, Analyzer, Mode,
};
pub use decider::{check_proof, decide, AnalysisStack, DivergenceProof, Verdict};
pub use dict::{Dictionary, Fingerprint, Intrinsic};
pub use interp::{run, Budgets, RunOutcome};
pub use lang::{parse_decl, render, Dialect, ProcDecl};
