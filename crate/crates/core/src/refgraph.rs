//! The "refers to" relation over a dictionary.
//!
//! Procedure `a` refers directly to `b` when `b` is a dictionary entry or an
//! intrinsic and its name appears in `a` as a callee, as a maximal
//! identifier-shaped run inside a string literal, or likewise inside a
//! comment. The declared name and the parameter are declaration sites and do
//! not count. Intrinsics contribute their declared reference sets.
//!
//! Dictionaries are finite, so the closure is always computable.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use crate::dict::Dictionary;
use crate::lang::{identifier_shaped, Expr, ProcDecl, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RefKind {
    IdentifierUse,
    StringLiteralMention,
    CommentMention,
}

impl RefKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RefKind::IdentifierUse => "identifier_use",
            RefKind::StringLiteralMention => "string_literal_mention",
            RefKind::CommentMention => "comment_mention",
        }
    }
}

pub type RefKinds = BTreeSet<RefKind>;

/// Every name `decl` mentions, whether or not it is known to any dictionary.
pub fn mentions(decl: &ProcDecl) -> BTreeMap<String, RefKinds> {
    let mut out: BTreeMap<String, RefKinds> = BTreeMap::new();
    let mut add = |name: &str, kind| {
        out.entry(String::from(name)).or_default().insert(kind);
    };
    for c in &decl.comments {
        for (_, w) in identifier_shaped(c) {
            add(w, RefKind::CommentMention);
        }
    }
    let mut stack = alloc::vec![&decl.body];
    let mut exprs: Vec<&Expr> = Vec::new();
    while let Some(s) = stack.pop() {
        match s {
            Stmt::Seq(items) => stack.extend(items.iter()),
            Stmt::If {
                lhs,
                rhs,
                then,
                otherwise,
            } => {
                exprs.push(lhs);
                exprs.push(rhs);
                stack.push(then);
                if let Some(e) = otherwise {
                    stack.push(e);
                }
            }
            Stmt::Call { callee, arg } => {
                add(callee, RefKind::IdentifierUse);
                exprs.push(arg);
            }
            Stmt::Print(e) => exprs.push(e),
            Stmt::Skip => {}
        }
    }
    while let Some(e) = exprs.pop() {
        match e {
            Expr::Lit(text) => {
                for (_, w) in identifier_shaped(text) {
                    add(w, RefKind::StringLiteralMention);
                }
            }
            Expr::Var(_) => {}
            Expr::Concat(l, r) => {
                exprs.push(l);
                exprs.push(r);
            }
            Expr::FnCall { callee, args } => {
                add(callee, RefKind::IdentifierUse);
                exprs.push(&args.0);
                exprs.push(&args.1);
            }
        }
    }
    out
}

/// Direct references of `decl` restricted to the nodes of `dict`.
pub fn direct_refs(decl: &ProcDecl, dict: &Dictionary) -> BTreeMap<String, RefKinds> {
    let mut m = mentions(decl);
    m.retain(|name, _| dict.contains(name));
    m
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefError {
    #[error("unknown name {0:?}")]
    UnknownName(String),
}

fn successors<'d>(
    dict: &'d Dictionary,
    node: &str,
) -> impl Iterator<Item = (&'d String, &'d RefKinds)> + 'd {
    let entry = dict.entry(node);
    let intrinsic = dict.intrinsic(node);
    entry
        .into_iter()
        .flat_map(|e| e.mentions().iter())
        .chain(intrinsic.into_iter().flat_map(|i| i.declared_refs.iter()))
        .filter(move |(name, _)| dict.contains(name))
}

/// Reachable set from `from` plus the number of nodes expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub names: BTreeSet<String>,
    pub expanded: usize,
}

/// Names reachable from `from` by a path of one or more edges. `from` itself
/// is included only when it lies on a cycle.
pub fn ref_closure(dict: &Dictionary, from: &str) -> Result<BTreeSet<String>, RefError> {
    ref_closure_counted(dict, from).map(|c| c.names)
}

pub fn ref_closure_counted(dict: &Dictionary, from: &str) -> Result<Closure, RefError> {
    if !dict.contains(from) {
        return Err(RefError::UnknownName(String::from(from)));
    }
    let mut names = BTreeSet::new();
    let mut expanded_set = BTreeSet::new();
    let mut queue = VecDeque::from([String::from(from)]);
    while let Some(node) = queue.pop_front() {
        if !expanded_set.insert(node.clone()) {
            continue;
        }
        for (next, _) in successors(dict, &node) {
            if names.insert(next.clone()) && !expanded_set.contains(next) {
                queue.push_back(next.clone());
            }
        }
    }
    Ok(Closure {
        names,
        expanded: expanded_set.len(),
    })
}

pub fn refers(dict: &Dictionary, from: &str, to: &str) -> Result<bool, RefError> {
    Ok(ref_closure(dict, from)?.contains(to))
}

/// The whole graph, materialised for display and export.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<String, BTreeMap<String, RefKinds>>,
}

impl RefGraph {
    pub fn build(dict: &Dictionary) -> RefGraph {
        let nodes: BTreeSet<String> = dict.names().map(String::from).collect();
        let edges = nodes
            .iter()
            .map(|n| {
                let out = successors(dict, n)
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                (n.clone(), out)
            })
            .collect();
        RefGraph { nodes, edges }
    }

    /// All edges in `(from, to, kinds)` order.
    pub fn edge_list(&self) -> impl Iterator<Item = (&str, &str, &RefKinds)> {
        self.edges.iter().flat_map(|(from, outs)| {
            outs.iter()
                .map(move |(to, k)| (from.as_str(), to.as_str(), k))
        })
    }
}
