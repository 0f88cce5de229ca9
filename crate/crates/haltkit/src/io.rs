//! Corpus directories.
//!
//! A corpus directory holds one `<name>.ml0` or `<name>.ml_` file per
//! procedure and, optionally, an `intrinsics.list` manifest. Other files are
//! ignored.

use std::fs;
use std::path::{Path, PathBuf};

use haltkit_core::corpus::{self, CorpusError, MANIFEST_FILE};
use haltkit_core::{Dialect, Dictionary};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", dir.display())]
    Corpus {
        dir: PathBuf,
        #[source]
        source: CorpusError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn is_source(name: &str) -> bool {
    name.rsplit_once('.')
        .is_some_and(|(_, ext)| Dialect::from_extension(ext).is_some())
}

/// Loads every source file in `dir` plus its manifest, if present.
pub fn load_corpus(dir: &Path) -> Result<Dictionary, IoError> {
    let mut files = Vec::new();
    for item in fs::read_dir(dir).map_err(io_err(dir))? {
        let item = item.map_err(io_err(dir))?;
        let name = item.file_name().to_string_lossy().into_owned();
        if is_source(&name) {
            let path = item.path();
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            files.push((name, text));
        }
    }
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = match fs::read_to_string(&manifest_path) {
        Ok(m) => Some(m),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(io_err(&manifest_path)(e)),
    };
    corpus::build(
        files.iter().map(|(n, t)| (n.as_str(), t.as_str())),
        manifest.as_deref(),
    )
    .map_err(|source| IoError::Corpus {
        dir: dir.to_path_buf(),
        source,
    })
}

/// Writes `dict` to `dir`, creating it if needed. Entries keep their source
/// text; the manifest is written only when there are intrinsics.
pub fn save_corpus(dict: &Dictionary, dir: &Path) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for entry in dict.entries() {
        let decl = &entry.decl;
        let path = dir.join(format!("{}.{}", decl.name, decl.dialect.extension()));
        let text = if decl.source.is_empty() {
            haltkit_core::render(decl)
        } else {
            decl.source.clone()
        };
        fs::write(&path, text).map_err(io_err(&path))?;
    }
    let manifest = corpus::render_manifest(dict);
    if !manifest.is_empty() {
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, manifest).map_err(io_err(&path))?;
    }
    Ok(())
}
