//! Lexer for both dialects.
//!
//! Whitespace is the only thing that does not become a token: comments are
//! kept so that reference analysis and renaming can see them, and every token
//! carries the byte span it was read from. Slicing the source between two
//! adjacent spans always yields whitespace.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Dialect, Span};

/// Reserved words. `while`, `do`, `var` and `function` are reserved without
/// being used by the grammar so that names borrowed from Pascal cannot be
/// declared.
pub const KEYWORDS: &[&str] = &[
    "begin",
    "do",
    "else",
    "end",
    "function",
    "if",
    "print",
    "procedure",
    "string",
    "then",
    "var",
    "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    Comment,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    /// Decoded content of a string literal (quotes removed, `''` collapsed)
    /// or the inside of a comment. `None` for the other kinds.
    pub fn text(&self) -> Option<String> {
        match self.kind {
            TokenKind::StringLiteral => {
                let inner = &self.lexeme[1..self.lexeme.len() - 1];
                Some(inner.replace("''", "'"))
            }
            TokenKind::Comment => Some(String::from(&self.lexeme[1..self.lexeme.len() - 1])),
            _ => None,
        }
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punctuation && self.lexeme.len() == 1 && self.lexeme.starts_with(c)
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme == word
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("illegal character {ch:?} at {span}")]
    IllegalCharacter { ch: char, span: Span },
    #[error("unterminated string literal starting at {span}")]
    UnterminatedString { span: Span },
    #[error("unterminated comment starting at {span}")]
    UnterminatedComment { span: Span },
    #[error("underscore in identifier {ident:?} is not allowed in the plain dialect (at {span})")]
    UnderscoreInPlain { ident: String, span: Span },
}

impl LexError {
    pub fn span(&self) -> Span {
        match self {
            LexError::IllegalCharacter { span, .. }
            | LexError::UnterminatedString { span }
            | LexError::UnterminatedComment { span }
            | LexError::UnderscoreInPlain { span, .. } => *span,
        }
    }
}

const PUNCTUATION: &[char] = &['(', ')', ':', ';', ',', '=', '+'];

pub fn tokenize(text: &str, dialect: Dialect) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;

    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let kind = if c.is_ascii_alphabetic() {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let word = &text[start..pos];
            if dialect == Dialect::Plain {
                if let Some(off) = word.find('_') {
                    return Err(LexError::UnderscoreInPlain {
                        ident: String::from(word),
                        span: Span::new(start + off, start + off + 1),
                    });
                }
            }
            if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c == b'\'' {
            pos += 1;
            loop {
                match bytes.get(pos) {
                    None => {
                        return Err(LexError::UnterminatedString {
                            span: Span::new(start, text.len()),
                        })
                    }
                    Some(b'\'') if bytes.get(pos + 1) == Some(&b'\'') => pos += 2,
                    Some(b'\'') => {
                        pos += 1;
                        break;
                    }
                    Some(_) => pos += 1,
                }
            }
            TokenKind::StringLiteral
        } else if c == b'{' {
            match text[pos..].find('}') {
                Some(close) => pos += close + 1,
                None => {
                    return Err(LexError::UnterminatedComment {
                        span: Span::new(start, text.len()),
                    })
                }
            }
            TokenKind::Comment
        } else if PUNCTUATION.contains(&(c as char)) {
            pos += 1;
            TokenKind::Punctuation
        } else {
            let ch = text[pos..].chars().next().unwrap_or('\u{fffd}');
            return Err(LexError::IllegalCharacter {
                ch,
                span: Span::new(start, start + ch.len_utf8()),
            });
        };
        tokens.push(Token {
            kind,
            lexeme: String::from(&text[start..pos]),
            span: Span::new(start, pos),
        });
    }
    Ok(tokens)
}

/// Maximal runs of `[A-Za-z0-9_]` that begin with a letter, with their byte
/// offsets inside `text`. Used to find names mentioned in literals and
/// comments.
pub fn identifier_shaped(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    core::iter::from_fn(move || {
        while pos < bytes.len() {
            let start = pos;
            if bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_' {
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                if bytes[start].is_ascii_alphabetic() {
                    return Some((start, &text[start..pos]));
                }
            } else {
                pos += 1;
            }
        }
        None
    })
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Identifier => "identifier",
            TokenKind::StringLiteral => "string literal",
            TokenKind::Comment => "comment",
            TokenKind::Punctuation => "punctuation",
        })
    }
}
