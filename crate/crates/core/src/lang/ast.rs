use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::Dialect;

/// A parsed one-parameter procedure.
///
/// Equality is structural: `source` is ignored, so a declaration compares
/// equal to the re-parse of its canonical rendering.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProcDecl {
    pub name: String,
    pub param: String,
    pub body: Stmt,
    /// Comment texts (without braces) in source order.
    pub comments: Vec<String>,
    pub dialect: Dialect,
    pub source: String,
}

impl PartialEq for ProcDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.param == other.param
            && self.body == other.body
            && self.comments == other.comments
            && self.dialect == other.dialect
    }
}

impl Eq for ProcDecl {}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Stmt {
    Seq(Vec<Stmt>),
    If {
        lhs: Expr,
        rhs: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    Call {
        callee: String,
        arg: Expr,
    },
    Print(Expr),
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Expr {
    Lit(String),
    Var(String),
    Concat(Box<Expr>, Box<Expr>),
    FnCall {
        callee: String,
        args: Box<(Expr, Expr)>,
    },
}

impl Expr {
    pub fn lit(s: impl Into<String>) -> Expr {
        Expr::Lit(s.into())
    }

    pub fn var(s: impl Into<String>) -> Expr {
        Expr::Var(s.into())
    }

    pub fn concat(l: Expr, r: Expr) -> Expr {
        Expr::Concat(Box::new(l), Box::new(r))
    }

    pub fn call(callee: impl Into<String>, a: Expr, b: Expr) -> Expr {
        Expr::FnCall {
            callee: callee.into(),
            args: Box::new((a, b)),
        }
    }
}
