//! The halts family.
//!
//! A limited analyzer is parameterised only by its own name. It answers
//! 'not applicable' for anything that is not a plain one-parameter procedure
//! in the dictionary, 'maybe' for procedures that refer to it, and otherwise
//! the decider's answer. The unlimited analyzer has an underscored name that
//! no plain program can mention, so it drops the 'maybe' branch. `ihalts` is
//! a plain-named interpreter running the unlimited analyzer, callable from
//! plain programs.
//!
//! There is deliberately no way to build an analyzer over its own dialect
//! without the 'maybe' guard.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;

use crate::decider::{AnalysisEntry, AnalysisStack, Decision, Origin, Verdict};
use crate::dict::{DictError, Dictionary, Intrinsic, IntrinsicKind};
use crate::interp::{BudgetKind, Budgets, Interrupt};
use crate::lang::{
    is_keyword, parse_decl, render, tokenize, Dialect, Expr, ProcDecl, Stmt, TokenKind,
};
use crate::machine::{DictRef, Machine};
use crate::refgraph::refers;

/// Self-name of the unlimited analyzer.
pub const UNLIMITED_NAME: &str = "halts_";
/// Name of the interpreter intrinsic.
pub const IHALTS_NAME: &str = "ihalts";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Limited,
    Unlimited,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Analyzer {
    self_name: String,
    mode: Mode,
}

impl Analyzer {
    pub fn self_name(&self) -> &str {
        &self.self_name
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Subjects are always plain procedures.
    pub fn domain_dialect(&self) -> Dialect {
        Dialect::Plain
    }

    /// The analyzer registered in `dict` under `name`, if any. For an
    /// interpreter intrinsic this is the analyzer it runs.
    pub fn lookup(dict: &Dictionary, name: &str) -> Option<Analyzer> {
        let intrinsic = dict.intrinsic(name)?;
        Some(match &intrinsic.kind {
            IntrinsicKind::Limited => Analyzer {
                self_name: intrinsic.name.clone(),
                mode: Mode::Limited,
            },
            IntrinsicKind::Unlimited => Analyzer {
                self_name: intrinsic.name.clone(),
                mode: Mode::Unlimited,
            },
            IntrinsicKind::Interpreted { analyzer } => Analyzer {
                self_name: analyzer.clone(),
                mode: Mode::Unlimited,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzerError {
    #[error("{0:?} is a reserved word")]
    Keyword(String),
    #[error("{name:?} is not a valid {dialect} identifier")]
    InvalidName { name: String, dialect: Dialect },
    #[error("an unlimited analyzer needs an underscore in its name, got {0:?}")]
    NotStratified(String),
    #[error(transparent)]
    Dict(#[from] DictError),
}

fn check_plain_name(name: &str) -> Result<(), AnalyzerError> {
    if is_keyword(name) {
        return Err(AnalyzerError::Keyword(String::from(name)));
    }
    if !Dialect::Plain.is_valid_identifier(name) {
        return Err(AnalyzerError::InvalidName {
            name: String::from(name),
            dialect: Dialect::Plain,
        });
    }
    Ok(())
}

/// Registers a limited analyzer called `self_name`.
pub fn make_halts(dict: &mut Dictionary, self_name: &str) -> Result<Analyzer, AnalyzerError> {
    check_plain_name(self_name)?;
    dict.register_intrinsic(Intrinsic::limited(self_name))?;
    Ok(Analyzer {
        self_name: String::from(self_name),
        mode: Mode::Limited,
    })
}

/// Registers an unlimited analyzer. Its name must contain an underscore so
/// that plain programs cannot mention it.
pub fn make_unlimited(dict: &mut Dictionary, self_name: &str) -> Result<Analyzer, AnalyzerError> {
    if !Dialect::Underscored.is_valid_identifier(self_name) {
        return Err(AnalyzerError::InvalidName {
            name: String::from(self_name),
            dialect: Dialect::Underscored,
        });
    }
    if !self_name.contains('_') {
        return Err(AnalyzerError::NotStratified(String::from(self_name)));
    }
    dict.register_intrinsic(Intrinsic::unlimited(self_name))?;
    Ok(Analyzer {
        self_name: String::from(self_name),
        mode: Mode::Unlimited,
    })
}

/// The unlimited analyzer `halts_`, registering it if needed.
pub fn unlimited(dict: &mut Dictionary) -> Result<Analyzer, AnalyzerError> {
    match Analyzer::lookup(dict, UNLIMITED_NAME) {
        Some(a)
            if dict.intrinsic(UNLIMITED_NAME).map(|i| &i.kind)
                == Some(&IntrinsicKind::Unlimited) =>
        {
            Ok(a)
        }
        _ => make_unlimited(dict, UNLIMITED_NAME),
    }
}

/// Registers `ihalts`, an interpreter running `halts_` that plain programs
/// can call. Registers `halts_` too when it is missing.
pub fn register_ihalts(dict: &mut Dictionary) -> Result<Intrinsic, AnalyzerError> {
    if dict.contains(IHALTS_NAME) {
        return Err(DictError::Duplicate(String::from(IHALTS_NAME)).into());
    }
    unlimited(dict)?;
    let intrinsic = Intrinsic::interpreted(IHALTS_NAME, UNLIMITED_NAME);
    dict.register_intrinsic(intrinsic.clone())?;
    Ok(intrinsic)
}

/// Source of the nemesis of `halts_name`: it calls the analyzer on its own
/// input and loops exactly when the answer is 'yes'.
pub fn make_diag(halts_name: &str, diag_name: &str) -> Result<String, AnalyzerError> {
    check_plain_name(halts_name)?;
    check_plain_name(diag_name)?;
    let s = || Expr::var("s");
    let body = Stmt::Seq(vec![Stmt::If {
        lhs: Expr::call(halts_name, s(), s()),
        rhs: Expr::lit("yes"),
        then: Box::new(Stmt::Call {
            callee: String::from(diag_name),
            arg: s(),
        }),
        otherwise: None,
    }]);
    let decl = ProcDecl {
        name: String::from(diag_name),
        param: String::from("s"),
        body,
        comments: vec![],
        dialect: Dialect::Plain,
        source: String::new(),
    };
    Ok(render(&decl))
}

/// An analyzer's answer plus, when the decider ran, its decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub verdict: Verdict,
    pub decision: Option<Decision>,
    /// The name the subject was resolved to, if it was applicable.
    pub subject: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("budget {0} exhausted")]
    Budget(BudgetKind),
    #[error("analysis of {0:?} re-entered with no live host analysis to resolve it")]
    UnresolvedRegress(AnalysisEntry),
    #[error("{0:?} is not a limited analyzer")]
    WrongMode(String),
}

impl From<Interrupt> for AnalysisError {
    fn from(i: Interrupt) -> Self {
        match i {
            Interrupt::Budget(k) => AnalysisError::Budget(k),
            Interrupt::Regress(sig) => AnalysisError::UnresolvedRegress(sig.entry),
        }
    }
}

/// Resolves `p` to a plain dictionary procedure. `p` is either the name of
/// an entry or a full declaration; a declaration not yet in the dictionary
/// is added to a private snapshot.
fn resolve_subject<'d>(dict: &DictRef<'d>, p: &str) -> Option<(DictRef<'d>, String)> {
    if let Ok(tokens) = tokenize(p, Dialect::Underscored) {
        if let [tok] = tokens.as_slice() {
            if tok.kind == TokenKind::Identifier {
                let entry = dict.entry(&tok.lexeme)?;
                return entry.is_plain().then(|| (dict.clone(), tok.lexeme.clone()));
            }
        }
    }
    let decl = parse_decl(p, Dialect::Plain).ok()?;
    if !crate::lang::validate_signature(&decl) {
        return None;
    }
    let name = decl.name.clone();
    if let Some(entry) = dict.entry(&name) {
        let fp = crate::dict::Fingerprint::of(&decl);
        return (entry.fingerprint() == fp && entry.is_plain()).then(|| (dict.clone(), name));
    }
    if dict.contains(&name) {
        return None;
    }
    let mut owned = Dictionary::clone(dict);
    owned.insert(decl).ok()?;
    Some((DictRef::Shared(Arc::new(owned)), name))
}

/// How an analysis request will be answered.
pub(crate) enum Prepared<'d> {
    /// Without simulating: 'not applicable' or 'maybe'.
    Immediate {
        verdict: Verdict,
        subject: Option<String>,
    },
    /// By deciding `name` in `dict` under the analysis identity `entry`.
    Simulate {
        dict: DictRef<'d>,
        name: String,
        entry: AnalysisEntry,
    },
}

pub(crate) fn prepare<'d>(
    dict: &DictRef<'d>,
    analyzer: &Analyzer,
    p: &str,
    i: &str,
) -> Prepared<'d> {
    let not_applicable = Prepared::Immediate {
        verdict: Verdict::NotApplicable,
        subject: None,
    };
    let Some((dict, name)) = resolve_subject(dict, p) else {
        return not_applicable;
    };
    if analyzer.mode == Mode::Limited && refers(&dict, &name, &analyzer.self_name).unwrap_or(false)
    {
        return Prepared::Immediate {
            verdict: Verdict::Maybe,
            subject: Some(name),
        };
    }
    let Some(entry) = dict.entry(&name) else {
        return not_applicable;
    };
    let entry = AnalysisEntry {
        analyzer: analyzer.self_name.clone(),
        fingerprint: entry.fingerprint(),
        input: String::from(i),
    };
    Prepared::Simulate { dict, name, entry }
}

fn analyze_host(
    analyzer: &Analyzer,
    dict: &Dictionary,
    p: &str,
    i: &str,
    budgets: &Budgets,
    analyses: &mut AnalysisStack,
) -> Result<Analysis, AnalysisError> {
    let (dict, name, entry) = match prepare(&DictRef::Borrowed(dict), analyzer, p, i) {
        Prepared::Immediate { verdict, subject } => {
            return Ok(Analysis {
                verdict,
                decision: None,
                subject,
            })
        }
        Prepared::Simulate { dict, name, entry } => (dict, name, entry),
    };
    analyses.request(entry, Origin::Host, budgets)?;
    let decided = Machine::new(budgets, analyses).decide(dict, &name, i, true);
    analyses.pop();
    let decision = decided?;
    Ok(Analysis {
        verdict: decision.halting.into(),
        decision: Some(decision),
        subject: Some(name),
    })
}

/// Runs a limited analyzer on `(p, i)`.
pub fn analyze(
    analyzer: &Analyzer,
    dict: &Dictionary,
    p: &str,
    i: &str,
    budgets: &Budgets,
    analyses: &mut AnalysisStack,
) -> Result<Analysis, AnalysisError> {
    if analyzer.mode != Mode::Limited {
        return Err(AnalysisError::WrongMode(analyzer.self_name.clone()));
    }
    analyze_host(analyzer, dict, p, i, budgets, analyses)
}

/// Runs the unlimited analyzer `halts_` on `(p, i)`. Never answers 'maybe'.
pub fn analyze_unlimited(
    dict: &Dictionary,
    p: &str,
    i: &str,
    budgets: &Budgets,
    analyses: &mut AnalysisStack,
) -> Result<Analysis, AnalysisError> {
    let analyzer = Analyzer {
        self_name: String::from(UNLIMITED_NAME),
        mode: Mode::Unlimited,
    };
    analyze_host(&analyzer, dict, p, i, budgets, analyses)
}
