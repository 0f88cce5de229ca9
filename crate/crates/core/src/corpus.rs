//! Corpus assembly: one declaration per file plus an intrinsics manifest.
//!
//! File names are `<declared name>.ml0` for plain sources and
//! `<declared name>.ml_` for underscored ones. The manifest
//! (`intrinsics.list`) holds one directive per line:
//!
//! ```text
//! # comment
//! limited halts1
//! unlimited halts_
//! ihalts
//! ```
//!
//! The standard corpus and the underscored `A_` fixture are bundled.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::analyzers::{make_halts, make_unlimited, register_ihalts, AnalyzerError, IHALTS_NAME};
use crate::dict::{DictError, Dictionary, IntrinsicKind};
use crate::lang::{parse_decl, Dialect, ParseError};

pub const MANIFEST_FILE: &str = "intrinsics.list";

/// The bundled corpus, `(file name, contents)`.
pub const PAPER_FILES: &[(&str, &str)] = &[
    ("both.ml0", include_str!("../corpus/paper/both.ml0")),
    (
        "bothhelper.ml0",
        include_str!("../corpus/paper/bothhelper.ml0"),
    ),
    ("diag.ml0", include_str!("../corpus/paper/diag.ml0")),
    ("diag1.ml0", include_str!("../corpus/paper/diag1.ml0")),
    ("diag2.ml0", include_str!("../corpus/paper/diag2.ml0")),
    ("dtower.ml0", include_str!("../corpus/paper/dtower.ml0")),
    ("loop.ml0", include_str!("../corpus/paper/loop.ml0")),
    ("stop.ml0", include_str!("../corpus/paper/stop.ml0")),
];

pub const PAPER_MANIFEST: &str = include_str!("../corpus/paper/intrinsics.list");

/// The self-naming procedure in the underscored dialect.
pub const A_UNDERSCORE: (&str, &str) = ("A_.ml_", include_str!("../corpus/underscored/A_.ml_"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Limited(String),
    Unlimited(String),
    Ihalts,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error(
        "{file}: declares {declared:?}; the file must be named after the procedure it declares"
    )]
    NameMismatch { file: String, declared: String },
    #[error("{file}: unknown extension (expected .ml0 or .ml_)")]
    Extension { file: String },
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error(transparent)]
    Analyzer(#[from] AnalyzerError),
}

pub fn parse_manifest(text: &str) -> Result<Vec<Directive>, CorpusError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let directive = match words.as_slice() {
            ["limited", name] => Directive::Limited(String::from(*name)),
            ["unlimited", name] => Directive::Unlimited(String::from(*name)),
            ["ihalts"] => Directive::Ihalts,
            _ => {
                return Err(CorpusError::Manifest {
                    line: idx + 1,
                    message: format!("unrecognised directive {line:?}"),
                })
            }
        };
        out.push(directive);
    }
    Ok(out)
}

/// Manifest text that re-creates the intrinsics of `dict`.
pub fn render_manifest(dict: &Dictionary) -> String {
    let mut out = String::new();
    let interpreted = dict
        .intrinsics()
        .any(|i| matches!(i.kind, IntrinsicKind::Interpreted { .. }));
    for i in dict.intrinsics() {
        match &i.kind {
            IntrinsicKind::Limited => out.push_str(&format!("limited {}\n", i.name)),
            // ihalts brings halts_ along
            IntrinsicKind::Unlimited
                if interpreted && i.name == crate::analyzers::UNLIMITED_NAME => {}
            IntrinsicKind::Unlimited => out.push_str(&format!("unlimited {}\n", i.name)),
            IntrinsicKind::Interpreted { .. } => {}
        }
    }
    if interpreted {
        out.push_str(IHALTS_NAME);
        out.push('\n');
    }
    out
}

fn apply(dict: &mut Dictionary, directives: &[Directive]) -> Result<(), CorpusError> {
    for d in directives {
        match d {
            Directive::Limited(n) => {
                make_halts(dict, n)?;
            }
            Directive::Unlimited(n) => {
                make_unlimited(dict, n)?;
            }
            Directive::Ihalts => {
                register_ihalts(dict)?;
            }
        }
    }
    Ok(())
}

/// Builds a dictionary from `(file name, contents)` pairs and an optional
/// manifest. The dictionary is underscored if any file is.
pub fn build<'a>(
    files: impl IntoIterator<Item = (&'a str, &'a str)>,
    manifest: Option<&str>,
) -> Result<Dictionary, CorpusError> {
    let mut files: Vec<(&str, &str)> = files.into_iter().collect();
    files.sort();
    let mut parsed = Vec::with_capacity(files.len());
    let mut dialect = Dialect::Plain;
    for (file, text) in files {
        let (stem, ext) = file.rsplit_once('.').unwrap_or((file, ""));
        let Some(file_dialect) = Dialect::from_extension(ext) else {
            return Err(CorpusError::Extension {
                file: String::from(file),
            });
        };
        let decl = parse_decl(text, file_dialect).map_err(|error| CorpusError::Parse {
            file: String::from(file),
            error,
        })?;
        if decl.name != stem {
            return Err(CorpusError::NameMismatch {
                file: String::from(file),
                declared: decl.name,
            });
        }
        dialect = dialect.join(file_dialect);
        parsed.push(decl);
    }
    let mut dict = Dictionary::new(dialect);
    for decl in parsed {
        dict.insert(decl).map_err(|e| match e {
            DictError::Duplicate(n) => CorpusError::Duplicate(n),
            other => CorpusError::Analyzer(other.into()),
        })?;
    }
    if let Some(m) = manifest {
        apply(&mut dict, &parse_manifest(m)?)?;
    }
    Ok(dict)
}

/// The bundled corpus with `halts1`, `halts2`, `halts_` and `ihalts`.
pub fn paper_dictionary() -> Dictionary {
    build(PAPER_FILES.iter().copied(), Some(PAPER_MANIFEST)).expect("bundled corpus is well formed")
}

/// An underscored dictionary holding `A_`.
pub fn underscored_dictionary() -> Dictionary {
    build([A_UNDERSCORE], None).expect("bundled fixture is well formed")
}
