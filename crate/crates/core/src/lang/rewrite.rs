//! Token-level source rewriting: renaming and underscore stripping.
//!
//! Rewrites splice replacement text into the original source, so layout and
//! comments survive untouched apart from the replaced names.

use alloc::collections::BTreeMap;
use alloc::string::String;

use super::token::{identifier_shaped, is_keyword, tokenize, LexError, Token, TokenKind};
use super::Dialect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RenameMode {
    /// Only identifier tokens are rewritten.
    IdentifiersOnly,
    /// Identifier tokens plus exact identifier-shaped occurrences inside
    /// string literals and comments.
    Thorough,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{0:?} is a reserved word")]
    KeywordCollision(String),
    #[error("{name:?} is not a valid {dialect} identifier")]
    InvalidIdentifier { name: String, dialect: Dialect },
    #[error("identifiers {first:?} and {second:?} both become {stripped:?}")]
    Collision {
        first: String,
        second: String,
        stripped: String,
    },
}

fn check_name(name: &str, dialect: Dialect) -> Result<(), RewriteError> {
    if is_keyword(name) {
        return Err(RewriteError::KeywordCollision(String::from(name)));
    }
    if !dialect.is_valid_identifier(name) {
        return Err(RewriteError::InvalidIdentifier {
            name: String::from(name),
            dialect,
        });
    }
    Ok(())
}

/// Rewrites every token through `map`. Identifiers are replaced whole;
/// under `Thorough`, identifier-shaped runs inside literals and comments
/// are replaced too.
fn splice(
    text: &str,
    tokens: &[Token],
    mode: RenameMode,
    map: impl Fn(&str) -> Option<String>,
) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for tok in tokens {
        out.push_str(&text[last..tok.span.start]);
        match tok.kind {
            TokenKind::Identifier => match map(&tok.lexeme) {
                Some(new) => out.push_str(&new),
                None => out.push_str(&tok.lexeme),
            },
            TokenKind::StringLiteral | TokenKind::Comment if mode == RenameMode::Thorough => {
                let mut pos = 0;
                for (off, word) in identifier_shaped(&tok.lexeme) {
                    if let Some(new) = map(word) {
                        out.push_str(&tok.lexeme[pos..off]);
                        out.push_str(&new);
                        pos = off + word.len();
                    }
                }
                out.push_str(&tok.lexeme[pos..]);
            }
            _ => out.push_str(&tok.lexeme),
        }
        last = tok.span.end;
    }
    out.push_str(&text[last..]);
    out
}

/// Renames `old` to `new` throughout `text`. Text without `old` comes back
/// unchanged.
pub fn rename_ident(
    text: &str,
    dialect: Dialect,
    old: &str,
    new: &str,
    mode: RenameMode,
) -> Result<String, RewriteError> {
    check_name(new, dialect)?;
    check_name(old, dialect)?;
    let tokens = tokenize(text, dialect)?;
    Ok(splice(text, &tokens, mode, |w| {
        (w == old).then(|| String::from(new))
    }))
}

/// Deletes underscores from every identifier, turning underscored text into
/// plain text.
pub fn strip_underscores(text: &str, mode: RenameMode) -> Result<String, RewriteError> {
    let tokens = tokenize(text, Dialect::Underscored)?;

    // stripped name -> original identifier
    let mut seen: BTreeMap<String, &str> = BTreeMap::new();
    let mut renames: BTreeMap<&str, String> = BTreeMap::new();
    for tok in tokens.iter().filter(|t| t.kind == TokenKind::Identifier) {
        let original = tok.lexeme.as_str();
        let stripped: String = original.chars().filter(|&c| c != '_').collect();
        match seen.get(stripped.as_str()) {
            Some(prev) if *prev != original => {
                return Err(RewriteError::Collision {
                    first: String::from(*prev),
                    second: String::from(original),
                    stripped,
                })
            }
            Some(_) => continue,
            None => {}
        }
        if stripped != original {
            if is_keyword(&stripped) {
                return Err(RewriteError::KeywordCollision(stripped));
            }
            renames.insert(original, stripped.clone());
        }
        seen.insert(stripped, original);
    }

    let out = splice(text, &tokens, mode, |w| renames.get(w).cloned());
    tokenize(&out, Dialect::Plain)?;
    Ok(out)
}
