//! The dictionary every analysis consults: procedure declarations by name
//! plus the host intrinsics object programs can call.
//!
//! A `Dictionary` is a cheap-to-clone snapshot. Mutation goes through
//! `&mut self`, so an owner that shares snapshots must clone first.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use sha2::{Digest, Sha256};

use crate::interp::Code;
use crate::lang::{parse_decl, render, tokenize, Dialect, ParseError, ProcDecl};
use crate::refgraph::{mentions, RefKind, RefKinds};

/// SHA-256 of a declaration's canonical rendering.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub fn of(decl: &ProcDecl) -> Fingerprint {
        Fingerprint(Sha256::digest(render(decl).as_bytes()).into())
    }

    pub fn to_hex(&self) -> String {
        use core::fmt::Write;
        let mut s = String::with_capacity(64);
        for b in self.0 {
            let _ = write!(s, "{b:02x}");
        }
        s
    }

    pub fn from_hex(hex: &str) -> Option<Fingerprint> {
        if hex.len() != 64 || !hex.is_ascii() {
            return None;
        }
        let mut out = [0u8; 32];
        for (i, b) in out.iter_mut().enumerate() {
            *b = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).ok()?;
        }
        Some(Fingerprint(out))
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", &self.to_hex()[..16])
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let hex = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        Fingerprint::from_hex(&hex)
            .ok_or_else(|| serde::de::Error::custom("expected 64 hex digits"))
    }
}

/// A dictionary entry with everything derived from its declaration.
#[derive(Debug)]
pub struct Entry {
    pub decl: ProcDecl,
    code: Code,
    mentions: BTreeMap<String, RefKinds>,
    fingerprint: Fingerprint,
    plain: bool,
}

impl Entry {
    pub fn new(decl: ProcDecl) -> Entry {
        let plain =
            decl.dialect == Dialect::Plain || tokenize(&decl.source, Dialect::Plain).is_ok();
        Entry {
            code: Code::compile(&decl.body),
            mentions: mentions(&decl),
            fingerprint: Fingerprint::of(&decl),
            plain,
            decl,
        }
    }

    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn mentions(&self) -> &BTreeMap<String, RefKinds> {
        &self.mentions
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    /// Whether the source is also legal in the plain dialect.
    pub fn is_plain(&self) -> bool {
        self.plain
    }
}

/// What an intrinsic does when called.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum IntrinsicKind {
    /// A limited analyzer whose self-name is the intrinsic's name.
    Limited,
    /// An unlimited analyzer whose self-name is the intrinsic's name.
    Unlimited,
    /// An interpreter running the named unlimited analyzer. Its analyses are
    /// identified by that analyzer's name, not by the intrinsic's.
    Interpreted { analyzer: String },
}

/// A host function callable from object programs as `name (p, i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Intrinsic {
    pub name: String,
    pub kind: IntrinsicKind,
    pub declared_refs: BTreeMap<String, RefKinds>,
}

impl Intrinsic {
    pub const ARITY: usize = 2;

    pub fn limited(name: &str) -> Intrinsic {
        Intrinsic::analyzer(name, IntrinsicKind::Limited)
    }

    pub fn unlimited(name: &str) -> Intrinsic {
        Intrinsic::analyzer(name, IntrinsicKind::Unlimited)
    }

    fn analyzer(name: &str, kind: IntrinsicKind) -> Intrinsic {
        // an analyzer's own text names it in its specification comment and
        // in its body
        let kinds = RefKinds::from([RefKind::IdentifierUse, RefKind::CommentMention]);
        Intrinsic {
            name: String::from(name),
            kind,
            declared_refs: BTreeMap::from([(String::from(name), kinds)]),
        }
    }

    pub fn interpreted(name: &str, analyzer: &str) -> Intrinsic {
        // the interpreter carries the analyzer's text as data
        let kinds = RefKinds::from([RefKind::StringLiteralMention]);
        Intrinsic {
            name: String::from(name),
            kind: IntrinsicKind::Interpreted {
                analyzer: String::from(analyzer),
            },
            declared_refs: BTreeMap::from([(String::from(analyzer), kinds)]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DictError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("{name:?} is written in the {found} dialect but the dictionary holds {expected} declarations")]
    DialectMismatch {
        name: String,
        found: Dialect,
        expected: Dialect,
    },
    #[error("{0:?} is not a valid intrinsic name")]
    InvalidName(String),
}

#[derive(Debug, Clone)]
pub struct Dictionary {
    dialect: Dialect,
    entries: BTreeMap<String, Arc<Entry>>,
    intrinsics: BTreeMap<String, Arc<Intrinsic>>,
}

impl Dictionary {
    pub fn new(dialect: Dialect) -> Dictionary {
        Dictionary {
            dialect,
            entries: BTreeMap::new(),
            intrinsics: BTreeMap::new(),
        }
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    /// Widens the dialect; never narrows it.
    pub fn widen(&mut self, dialect: Dialect) {
        self.dialect = self.dialect.join(dialect);
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.intrinsics.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name) || self.intrinsics.contains_key(name)
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name).map(|e| &**e)
    }

    pub fn intrinsic(&self, name: &str) -> Option<&Intrinsic> {
        self.intrinsics.get(name).map(|i| &**i)
    }

    /// Entries sorted by name.
    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.entries.values().map(|e| &**e)
    }

    pub fn intrinsics(&self) -> impl Iterator<Item = &Intrinsic> {
        self.intrinsics.values().map(|i| &**i)
    }

    /// Every node name: entries and intrinsics, sorted.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        let all: BTreeSet<&str> = self
            .entries
            .keys()
            .chain(self.intrinsics.keys())
            .map(String::as_str)
            .collect();
        all.into_iter()
    }

    pub fn insert(&mut self, decl: ProcDecl) -> Result<(), DictError> {
        if decl.dialect > self.dialect {
            return Err(DictError::DialectMismatch {
                name: decl.name,
                found: decl.dialect,
                expected: self.dialect,
            });
        }
        if self.contains(&decl.name) {
            return Err(DictError::Duplicate(decl.name));
        }
        self.entries
            .insert(decl.name.clone(), Arc::new(Entry::new(decl)));
        Ok(())
    }

    /// Parses `text` in the dictionary's dialect and inserts it. Returns the
    /// declared name.
    pub fn add_source(&mut self, text: &str) -> Result<String, DictError> {
        let decl = parse_decl(text, self.dialect)?;
        let name = decl.name.clone();
        self.insert(decl)?;
        Ok(name)
    }

    /// A new snapshot with `text` added.
    pub fn add_decl(&self, text: &str) -> Result<Dictionary, DictError> {
        let mut next = self.clone();
        next.add_source(text)?;
        Ok(next)
    }

    pub fn register_intrinsic(&mut self, intrinsic: Intrinsic) -> Result<(), DictError> {
        if !Dialect::Underscored.is_valid_identifier(&intrinsic.name) {
            return Err(DictError::InvalidName(intrinsic.name));
        }
        if self.contains(&intrinsic.name) {
            return Err(DictError::Duplicate(intrinsic.name));
        }
        self.intrinsics
            .insert(intrinsic.name.clone(), Arc::new(intrinsic));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STOP: &str = "procedure stop (s: string); begin end";

    #[test]
    fn add_and_duplicate() {
        let empty = Dictionary::new(Dialect::Plain);
        let one = empty.add_decl(STOP).unwrap();
        assert_eq!(one.entries().count(), 1);
        assert!(empty.entries().next().is_none());
        assert_eq!(
            one.add_decl(STOP).unwrap_err(),
            DictError::Duplicate("stop".into())
        );
    }

    #[test]
    fn entry_name_clashes_with_intrinsic() {
        let mut d = Dictionary::new(Dialect::Plain);
        d.register_intrinsic(Intrinsic::limited("stop")).unwrap();
        assert!(matches!(d.add_source(STOP), Err(DictError::Duplicate(_))));
    }

    #[test]
    fn dialect_of_entries_is_checked() {
        let mut d = Dictionary::new(Dialect::Plain);
        let decl = parse_decl("procedure A_ (s: string); begin end", Dialect::Underscored).unwrap();
        assert!(matches!(
            d.insert(decl.clone()),
            Err(DictError::DialectMismatch { .. })
        ));
        d.widen(Dialect::Underscored);
        d.insert(decl).unwrap();
        assert!(!d.entry("A_").unwrap().is_plain());
    }

    #[test]
    fn plain_text_in_underscored_dictionary_is_plain() {
        let mut d = Dictionary::new(Dialect::Underscored);
        d.add_source(STOP).unwrap();
        assert!(d.entry("stop").unwrap().is_plain());
    }

    #[test]
    fn fingerprint_ignores_layout() {
        let a = parse_decl(STOP, Dialect::Plain).unwrap();
        let b = parse_decl("procedure stop(s:string);\n\nbegin\nend", Dialect::Plain).unwrap();
        let c = parse_decl(
            "procedure stop (s: string); begin print (s) end",
            Dialect::Plain,
        )
        .unwrap();
        assert_eq!(Fingerprint::of(&a), Fingerprint::of(&b));
        assert_ne!(Fingerprint::of(&a), Fingerprint::of(&c));
        assert_eq!(Fingerprint::of(&a).to_hex().len(), 64);
    }

    #[test]
    fn fingerprint_hex_round_trip() {
        let fp = Fingerprint::of(&parse_decl(STOP, Dialect::Plain).unwrap());
        assert_eq!(Fingerprint::from_hex(&fp.to_hex()), Some(fp));
        assert_eq!(Fingerprint::from_hex("abc"), None);
        assert_eq!(Fingerprint::from_hex(&"zz".repeat(32)), None);
    }
}
