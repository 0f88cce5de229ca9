//! The toy language: two dialects sharing one grammar.
//!
//! Procedures take exactly one string parameter. Statements are sequences,
//! `if`-equality tests, procedure calls and `print`; expressions are string
//! literals, the parameter, left-associative `+` concatenation and calls to
//! two-argument host intrinsics.

mod ast;
mod parser;
mod render;
mod rewrite;
mod token;

use core::fmt;

pub use ast::{Expr, ProcDecl, Stmt};
pub use parser::{parse_decl, validate_signature, ParseError};
pub use render::render;
pub use rewrite::{rename_ident, strip_underscores, RenameMode, RewriteError};
pub use token::{identifier_shaped, is_keyword, tokenize, LexError, Token, TokenKind, KEYWORDS};

/// Which identifiers are legal. Every `Plain` identifier is also a valid
/// `Underscored` identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dialect {
    /// A letter followed by letters and digits.
    Plain,
    /// A letter followed by letters, digits and underscores.
    Underscored,
}

impl Dialect {
    pub fn is_valid_identifier(self, name: &str) -> bool {
        let mut chars = name.chars();
        let Some(first) = chars.next() else {
            return false;
        };
        first.is_ascii_alphabetic()
            && chars
                .all(|c| c.is_ascii_alphanumeric() || (c == '_' && self == Dialect::Underscored))
            && !is_keyword(name)
    }

    /// File extension used for one-declaration source files.
    pub fn extension(self) -> &'static str {
        match self {
            Dialect::Plain => "ml0",
            Dialect::Underscored => "ml_",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Dialect> {
        match ext {
            "ml0" => Some(Dialect::Plain),
            "ml_" => Some(Dialect::Underscored),
            _ => None,
        }
    }

    /// The smallest dialect accepting both.
    pub fn join(self, other: Dialect) -> Dialect {
        self.max(other)
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Plain => "plain",
            Dialect::Underscored => "underscored",
        })
    }
}

/// Half-open byte range into a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}
