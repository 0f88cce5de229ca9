//! Halting decisions for the pure deterministic fragment.
//!
//! The decider simulates execution step by step and answers 'yes' when the
//! simulation halts or faults. It answers 'no' on two rules only:
//!
//! - **Pending-call repetition.** A call that pushes `(proc, arg)` while an
//!   identical frame is still pending recreates that frame's computation
//!   exactly (no state, no nondeterminism), so it reaches the same call
//!   again, forever.
//! - **Analysis regress.** A nested analysis requests the very
//!   `(analyzer, program, input)` analysis that a host-level invocation is
//!   currently running. The simulated call would have to finish that
//!   analysis first, so it never returns.
//!
//! Regress is only detected against host-level entries. Analyses invoked by
//! object programs are ordinary calls: when they re-enter themselves they
//! really recurse, and the analysis-depth budget stops them. That asymmetry
//! is what lets an unlimited analyzer answer 'no' about an interpreter tower
//! whose actual execution does not terminate.
//!
//! Running out of any budget is an error, never a verdict.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dict::{Dictionary, Fingerprint};
use crate::interp::{BudgetKind, Budgets, Interrupt};
use crate::machine::{DictRef, Machine};

/// The four object-level analyzer answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Maybe,
    NotApplicable,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::Yes,
        Verdict::No,
        Verdict::Maybe,
        Verdict::NotApplicable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Maybe => "maybe",
            Verdict::NotApplicable => "not applicable",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        Verdict::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Halting {
    Yes,
    No,
}

impl From<Halting> for Verdict {
    fn from(h: Halting) -> Verdict {
        match h {
            Halting::Yes => Verdict::Yes,
            Halting::No => Verdict::No,
        }
    }
}

/// Identity of one analysis in progress.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalysisEntry {
    pub analyzer: String,
    pub fingerprint: Fingerprint,
    pub input: String,
}

/// Who started an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Origin {
    /// The toolkit itself, from outside any object program.
    Host,
    /// An object program calling an intrinsic.
    Object,
}

/// The chain of analyses currently running, outermost first.
///
/// Host entries are never duplicated: a request matching a live host entry
/// is refused with a regress signal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalysisStack {
    entries: Vec<(AnalysisEntry, Origin)>,
}

/// Raised when a nested request matches a live host entry.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegressSignal {
    pub entry: AnalysisEntry,
    /// Entries pushed on top of the matching host entry at the time of the
    /// request, outermost first.
    pub via: Vec<AnalysisEntry>,
}

impl AnalysisStack {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &(AnalysisEntry, Origin)> {
        self.entries.iter()
    }

    pub fn top(&self) -> Option<&(AnalysisEntry, Origin)> {
        self.entries.last()
    }

    /// Pushes `entry` unless it would re-enter a live host analysis or
    /// exceed the analysis-depth budget.
    pub fn request(
        &mut self,
        entry: AnalysisEntry,
        origin: Origin,
        budgets: &Budgets,
    ) -> Result<(), Interrupt> {
        if let Some(pos) = self
            .entries
            .iter()
            .position(|(e, o)| *o == Origin::Host && *e == entry)
        {
            let via = self.entries[pos + 1..]
                .iter()
                .map(|(e, _)| e.clone())
                .collect();
            return Err(Interrupt::Regress(RegressSignal { entry, via }));
        }
        if self.entries.len() >= budgets.max_analysis_depth {
            return Err(Interrupt::Budget(BudgetKind::AnalysisDepth));
        }
        self.entries.push((entry, origin));
        Ok(())
    }

    pub fn pop(&mut self) -> Option<(AnalysisEntry, Origin)> {
        self.entries.pop()
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", rename_all = "snake_case"))]
pub enum DivergenceProof {
    /// `(proc, arg)` was pushed while the frame at `depth` (1-based) held the
    /// same pair.
    PendingCallRepeat {
        proc: String,
        arg: String,
        depth: usize,
    },
    /// The simulation re-requested the analysis it belongs to.
    AnalysisRegress {
        analyzer: String,
        fingerprint: Fingerprint,
        input: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "event", rename_all = "snake_case"))]
pub enum TraceEvent {
    Enter {
        depth: usize,
        proc: String,
        arg: String,
    },
    Exit {
        depth: usize,
        proc: String,
        arg: String,
    },
    Regress {
        requested: AnalysisEntry,
        via: Vec<AnalysisEntry>,
    },
}

/// What the top-level simulation did: frame pushes and pops, plus any
/// regress that reached it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trace {
    pub root: Option<AnalysisEntry>,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub halting: Halting,
    pub proof: Option<DivergenceProof>,
    pub trace: Trace,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("unknown procedure {0:?}")]
    UnknownProcedure(String),
    #[error("budget {0} exhausted")]
    Budget(BudgetKind),
    #[error("analysis of {0:?} re-entered with no live host analysis to resolve it")]
    UnresolvedRegress(AnalysisEntry),
}

impl From<Interrupt> for DecideError {
    fn from(i: Interrupt) -> Self {
        match i {
            Interrupt::Budget(k) => DecideError::Budget(k),
            Interrupt::Regress(sig) => DecideError::UnresolvedRegress(sig.entry),
        }
    }
}

/// Decides whether `proc` halts on `input`. The caller is expected to have
/// pushed its own analysis entry; a regress against that entry is resolved
/// here as 'no'.
pub fn decide(
    dict: &Dictionary,
    proc: &str,
    input: &str,
    budgets: &Budgets,
    analyses: &mut AnalysisStack,
) -> Result<Decision, DecideError> {
    if dict.entry(proc).is_none() {
        return Err(DecideError::UnknownProcedure(String::from(proc)));
    }
    let mut machine = Machine::new(budgets, analyses);
    Ok(machine.decide(DictRef::Borrowed(dict), proc, input, true)?)
}

/// Checks a proof against the trace it was produced with.
///
/// A pending-call proof holds when replaying the trace's frame events ends
/// with a push of `(proc, arg)` while the frame at the cited depth holds the
/// same pair. A regress proof holds when the cited analysis is the trace's
/// root and the trace records a request for it.
pub fn check_proof(proof: &DivergenceProof, trace: &Trace) -> bool {
    match proof {
        DivergenceProof::PendingCallRepeat { proc, arg, depth } => {
            let mut stack: Vec<(&str, &str)> = Vec::new();
            for ev in &trace.events {
                match ev {
                    TraceEvent::Enter {
                        depth: d,
                        proc,
                        arg,
                    } => {
                        if *d != stack.len() + 1 {
                            return false;
                        }
                        stack.push((proc, arg));
                    }
                    TraceEvent::Exit {
                        depth: d,
                        proc,
                        arg,
                    } => {
                        if *d != stack.len() || stack.pop() != Some((proc.as_str(), arg.as_str())) {
                            return false;
                        }
                    }
                    TraceEvent::Regress { .. } => return false,
                }
            }
            let Some(last) = stack.pop() else {
                return false;
            };
            let earlier = depth.checked_sub(1).and_then(|i| stack.get(i));
            last == (proc.as_str(), arg.as_str()) && earlier == Some(&last)
        }
        DivergenceProof::AnalysisRegress {
            analyzer,
            fingerprint,
            input,
        } => {
            let cited = AnalysisEntry {
                analyzer: analyzer.clone(),
                fingerprint: *fingerprint,
                input: input.clone(),
            };
            trace.root.as_ref() == Some(&cited)
                && trace.events.iter().any(
                    |ev| matches!(ev, TraceEvent::Regress { requested, .. } if *requested == cited),
                )
        }
    }
}
