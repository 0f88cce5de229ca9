//! Strategies shared by the property suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use haltkit_core::analyzers::{make_halts, register_ihalts};
use haltkit_core::gen::{gen_program, GenConfig, Program};
use haltkit_core::lang::{Dialect, Expr, ProcDecl, Stmt};
use haltkit_core::refgraph::{RefKind, RefKinds};
use haltkit_core::{Budgets, Dictionary};
use proptest::prelude::*;
use proptest::sample::select;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PROCS: &[&str] = &["loop", "stop", "diag1", "p", "q"];
pub const FUNS: &[&str] = &["halts1", "ihalts"];

pub fn literal() -> impl Strategy<Value = String> {
    prop_oneof![
        "[abc]{0,3}",
        "[a-c' {}_]{0,5}",
        select(PROCS).prop_map(String::from),
    ]
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![literal().prop_map(Expr::Lit), Just(Expr::var("s"))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::concat(l, r)),
            (select(FUNS), inner.clone(), inner).prop_map(|(f, a, b)| Expr::call(f, a, b)),
        ]
    })
}

pub fn stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        (select(PROCS), expr()).prop_map(|(c, arg)| Stmt::Call {
            callee: c.to_string(),
            arg
        }),
        expr().prop_map(Stmt::Print),
        Just(Stmt::Skip),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Stmt::Seq),
            (expr(), expr(), inner.clone(), prop::option::of(inner)).prop_map(
                |(lhs, rhs, t, e)| Stmt::If {
                    lhs,
                    rhs,
                    then: Box::new(t),
                    otherwise: e.map(Box::new),
                }
            ),
        ]
    })
}

/// Plain declarations as raw syntax trees, not necessarily in normal form.
pub fn decl() -> impl Strategy<Value = ProcDecl> {
    (
        select(PROCS),
        prop::collection::vec(stmt(), 0..4),
        prop::collection::vec("[a-z0-9 _']{0,8}", 0..3),
    )
        .prop_map(|(name, body, comments)| ProcDecl {
            name: name.to_string(),
            param: "s".to_string(),
            body: Stmt::Seq(body),
            comments,
            dialect: Dialect::Plain,
            source: String::new(),
        })
}

/// A text made of lexically interesting fragments.
pub fn fragment_text() -> impl Strategy<Value = String> {
    let frag = select(&[
        "begin", "end", "halts_", "a_b", "x1", "A", "'", "{", "}", "'lit'", "'a_b'", "{c_d}", "(",
        ")", ";", " ", "\n", "_", "+", "=", ":", ",", "9", "#",
    ]);
    prop::collection::vec(frag, 0..14).prop_map(|v| v.concat())
}

/// A dictionary of up to eight procedures `p0`.. whose mentions are known
/// in advance, plus `halts1`, `ihalts` and `halts_`.
#[derive(Debug, Clone)]
pub struct RefCase {
    pub dict: Dictionary,
    /// Edges the texts were built to contain.
    pub expected: BTreeMap<String, BTreeMap<String, RefKinds>>,
}

fn pool(k: usize) -> Vec<String> {
    let mut v: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
    v.extend(["halts1", "ihalts", "halts_"].map(String::from));
    v
}

fn build_ref_case(mentions: Vec<Vec<(usize, u8)>>) -> RefCase {
    let k = mentions.len();
    let names = pool(k);
    let mut dict = Dictionary::new(Dialect::Plain);
    make_halts(&mut dict, "halts1").unwrap();
    register_ihalts(&mut dict).unwrap();
    let mut expected: BTreeMap<String, BTreeMap<String, RefKinds>> = BTreeMap::new();
    for (i, ms) in mentions.into_iter().enumerate() {
        let me = &names[i];
        let mut stmts = vec!["print ('zp1' + 'p0x')".to_string()];
        let mut comments = vec!["{p1x halts1y}".to_string()];
        let out = expected.entry(me.clone()).or_default();
        for (t, kind) in ms {
            let target = &names[t % names.len()];
            let kind = match kind % 3 {
                0 if target == "halts_" => RefKind::StringLiteralMention,
                0 => RefKind::IdentifierUse,
                1 => RefKind::StringLiteralMention,
                _ => RefKind::CommentMention,
            };
            match kind {
                RefKind::IdentifierUse if target.starts_with('p') => {
                    stmts.push(format!("if s = 'zz' then {target} (s)"))
                }
                RefKind::IdentifierUse => stmts.push(format!("print ({target} (s, s))")),
                RefKind::StringLiteralMention => stmts.push(format!("print ('see {target}')")),
                RefKind::CommentMention => comments.push(format!("{{mentions {target}}}")),
            }
            out.entry(target.clone()).or_default().insert(kind);
        }
        let text = format!(
            "procedure {me} (s: string);\n{}\nbegin\n  {}\nend\n",
            comments.join("\n"),
            stmts.join(";\n  ")
        );
        dict.add_source(&text).unwrap();
    }
    for (name, refs) in [
        ("halts1", "halts1"),
        ("ihalts", "halts_"),
        ("halts_", "halts_"),
    ] {
        let kinds: RefKinds = dict.intrinsic(name).unwrap().declared_refs[refs].clone();
        expected
            .entry(name.to_string())
            .or_default()
            .insert(refs.to_string(), kinds);
    }
    RefCase { dict, expected }
}

pub fn ref_case() -> impl Strategy<Value = RefCase> {
    (1..=8usize)
        .prop_flat_map(|k| {
            prop::collection::vec(prop::collection::vec((0..k + 3, 0..3u8), 0..4), k)
        })
        .prop_map(build_ref_case)
}

/// Reachability by depth-first search over an explicit edge map, paths of
/// at least one edge.
pub fn reachable(
    edges: &BTreeMap<String, BTreeMap<String, RefKinds>>,
    from: &str,
) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&str> = edges
        .get(from)
        .into_iter()
        .flat_map(|m| m.keys())
        .map(String::as_str)
        .collect();
    while let Some(n) = stack.pop() {
        if seen.insert(n.to_string()) {
            stack.extend(
                edges
                    .get(n)
                    .into_iter()
                    .flat_map(|m| m.keys())
                    .map(String::as_str),
            );
        }
    }
    seen
}

/// A generated program from a seed.
pub fn program() -> impl Strategy<Value = Program> {
    any::<u64>()
        .prop_map(|seed| gen_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default()))
}

/// Deliberately small budgets, so that every kind of exhaustion occurs.
pub fn small_budgets() -> impl Strategy<Value = Budgets> {
    (1..3_000u64, 1..40usize, 1..24usize, 1..6usize).prop_map(|(s, k, l, a)| Budgets {
        max_steps: s,
        max_stack_depth: k,
        max_string_len: l,
        max_analysis_depth: a,
    })
}

/// `b` grown componentwise.
pub fn larger(b: Budgets) -> impl Strategy<Value = Budgets> {
    (0..3_000u64, 0..40usize, 0..24usize, 0..6usize).prop_map(move |(s, k, l, a)| Budgets {
        max_steps: b.max_steps + s,
        max_stack_depth: b.max_stack_depth + k,
        max_string_len: b.max_string_len + l,
        max_analysis_depth: b.max_analysis_depth + a,
    })
}
