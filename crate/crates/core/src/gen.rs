//! Random plain programs for checking analyzers against the interpreter.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::analyzers::register_ihalts;
use crate::dict::Dictionary;
use crate::lang::{parse_decl, render, Dialect, Expr, ProcDecl, Stmt};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    /// Procedure names; the first is the entry point.
    pub names: &'static [&'static str],
    /// Literal alphabet.
    pub alphabet: &'static [char],
    /// Maximum statement nesting.
    pub max_depth: usize,
    pub max_lit_len: usize,
    /// Whether generated code calls `ihalts`.
    pub ihalts: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            names: &["a", "b", "c"],
            alphabet: &['a', 'b', 'c'],
            max_depth: 4,
            max_lit_len: 2,
            ihalts: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<ProcDecl>,
    pub entry: String,
    pub input: String,
}

impl Program {
    /// A plain dictionary holding the program, with `ihalts` registered.
    pub fn dictionary(&self) -> Dictionary {
        let mut dict = Dictionary::new(Dialect::Plain);
        for d in &self.decls {
            dict.insert(d.clone())
                .expect("generated names are distinct");
        }
        register_ihalts(&mut dict).expect("generated names avoid intrinsics");
        dict
    }
}

fn literal<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> String {
    let len = rng.random_range(0..=cfg.max_lit_len);
    (0..len)
        .map(|_| *cfg.alphabet.choose(rng).unwrap_or(&'a'))
        .collect()
}

fn name<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> String {
    String::from(*cfg.names.choose(rng).unwrap_or(&"a"))
}

pub fn gen_expr<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Expr {
    let choice = if depth == 0 {
        rng.random_range(0..2)
    } else {
        rng.random_range(0..6)
    };
    match choice {
        0 | 2 => Expr::Lit(literal(rng, cfg)),
        1 | 3 => Expr::var("s"),
        4 => Expr::concat(gen_expr(rng, cfg, depth - 1), gen_expr(rng, cfg, depth - 1)),
        _ if cfg.ihalts => {
            let program = if rng.random_bool(0.7) {
                Expr::Lit(name(rng, cfg))
            } else {
                Expr::var("s")
            };
            Expr::call("ihalts", program, gen_expr(rng, cfg, depth - 1))
        }
        _ => Expr::Lit(literal(rng, cfg)),
    }
}

pub fn gen_stmt<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Stmt {
    let choice = if depth == 0 {
        rng.random_range(0..2)
    } else {
        rng.random_range(0..5)
    };
    match choice {
        0 | 2 => Stmt::Call {
            callee: name(rng, cfg),
            arg: gen_expr(rng, cfg, depth.min(2)),
        },
        1 => Stmt::Print(gen_expr(rng, cfg, depth.min(2))),
        3 => Stmt::If {
            lhs: gen_expr(rng, cfg, depth.min(2)),
            rhs: gen_expr(rng, cfg, depth.min(2)),
            then: Box::new(gen_stmt(rng, cfg, depth - 1)),
            otherwise: if rng.random_bool(0.5) {
                Some(Box::new(gen_stmt(rng, cfg, depth - 1)))
            } else {
                None
            },
        },
        _ => {
            let n = rng.random_range(0..=3);
            Stmt::Seq((0..n).map(|_| gen_stmt(rng, cfg, depth - 1)).collect())
        }
    }
}

/// A declaration of `name` whose body nests at most `cfg.max_depth` deep.
pub fn gen_decl<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, name: &str) -> ProcDecl {
    let n = rng.random_range(1..=3);
    let depth = cfg.max_depth.saturating_sub(1);
    let raw = ProcDecl {
        name: String::from(name),
        param: String::from("s"),
        body: Stmt::Seq((0..n).map(|_| gen_stmt(rng, cfg, depth)).collect()),
        comments: Vec::new(),
        dialect: Dialect::Plain,
        source: String::new(),
    };
    // through the parser, for normal form and a real source text
    parse_decl(&render(&raw), Dialect::Plain).expect("rendered declarations parse")
}

/// Declares a prefix of `cfg.names`; names past the prefix stay unresolved.
pub fn gen_program<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Program {
    let count = rng.random_range(1..=cfg.names.len().max(1));
    let decls = cfg.names[..count]
        .iter()
        .map(|n| gen_decl(rng, cfg, n))
        .collect();
    Program {
        decls,
        entry: String::from(cfg.names.first().copied().unwrap_or("a")),
        input: literal(rng, cfg),
    }
}
