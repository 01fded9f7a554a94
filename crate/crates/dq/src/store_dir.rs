//! Directory-backed persistence: `quads.nq` plus one raw payload file per
//! document under `documents/`, named by the percent-encoded graph IRI.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use dq_core::ingest::{DocumentError, DocumentStore};
use dq_core::{Dataset, Iri, QuadStore};
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::nquads::{parse_nquads, serialize_nquads, BlankScope, ParseError, ParseOptions};

pub const QUADS_FILE: &str = "quads.nq";
pub const DOCUMENTS_DIR: &str = "documents";

const FILE_NAME: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_');

#[derive(Debug, thiserror::Error)]
pub enum StoreDirError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreDirError + '_ {
    move |source| StoreDirError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[derive(Debug, Clone)]
pub struct StoreDir {
    root: PathBuf,
}

impl StoreDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        StoreDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn quads_path(&self) -> PathBuf {
        self.root.join(QUADS_FILE)
    }

    /// The stored quads; an absent directory or file is an empty store.
    pub fn load(&self) -> Result<QuadStore, StoreDirError> {
        let path = self.quads_path();
        let bytes = match fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(QuadStore::new()),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let options = ParseOptions {
            blanks: BlankScope::Preserve,
            ..ParseOptions::default()
        };
        let parsed = parse_nquads(&bytes, options).map_err(|source| StoreDirError::Parse { path, source })?;
        Ok(parsed.quads.into_iter().collect())
    }

    pub fn save(&self, dataset: &Dataset) -> Result<(), StoreDirError> {
        fs::create_dir_all(&self.root).map_err(io_err(&self.root))?;
        let path = self.quads_path();
        write_atomic(&path, serialize_nquads(dataset).as_bytes()).map_err(io_err(&path))
    }

    pub fn documents(&self) -> FileDocuments {
        FileDocuments::new(self.root.join(DOCUMENTS_DIR))
    }
}

/// Raw payloads as files in one directory.
#[derive(Debug, Clone)]
pub struct FileDocuments {
    dir: PathBuf,
}

impl FileDocuments {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FileDocuments { dir: dir.into() }
    }

    pub fn path_for(&self, key: &Iri) -> PathBuf {
        self.dir.join(utf8_percent_encode(key.as_str(), FILE_NAME).to_string())
    }

    /// Stored keys, sorted.
    pub fn keys(&self) -> io::Result<Vec<Iri>> {
        let mut keys = Vec::new();
        let entries = match fs::read_dir(&self.dir) {
            Ok(entries) => entries,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(keys),
            Err(e) => return Err(e),
        };
        for entry in entries {
            let name = entry?.file_name();
            let Some(name) = name.to_str() else { continue };
            let Ok(decoded) = percent_decode_str(name).decode_utf8() else { continue };
            if let Ok(iri) = Iri::new(decoded.into_owned()) {
                keys.push(iri);
            }
        }
        keys.sort();
        Ok(keys)
    }
}

fn doc_err(path: &Path, e: io::Error) -> DocumentError {
    DocumentError(format!("{}: {e}", path.display()))
}

impl DocumentStore for FileDocuments {
    fn contains(&self, key: &Iri) -> bool {
        self.path_for(key).is_file()
    }

    fn put(&mut self, key: &Iri, payload: &[u8]) -> Result<(), DocumentError> {
        fs::create_dir_all(&self.dir).map_err(|e| doc_err(&self.dir, e))?;
        let path = self.path_for(key);
        write_atomic(&path, payload).map_err(|e| doc_err(&path, e))
    }

    fn get(&self, key: &Iri) -> Result<Option<Vec<u8>>, DocumentError> {
        let path = self.path_for(key);
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(doc_err(&path, e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dq_core::{BlankNode, Literal, Quad};

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn missing_directory_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let store = StoreDir::new(dir.path().join("nope"));
        assert!(store.load().unwrap().is_empty());
        assert!(store.documents().keys().unwrap().is_empty());
    }

    #[test]
    fn quads_survive_save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let store_dir = StoreDir::new(dir.path().join("s"));
        let mut store = QuadStore::new();
        store.insert(&Quad::new(BlankNode::new("b0").unwrap(), iri("a:p"), Literal::string("x\ny"), iri("a:g")).unwrap());
        store.insert(&Quad::new(iri("a:s"), iri("a:p"), Literal::double(0.1), iri("a:g")).unwrap());
        store_dir.save(&store).unwrap();
        let loaded = store_dir.load().unwrap();
        assert_eq!(
            loaded.iter().collect::<std::collections::BTreeSet<_>>(),
            store.iter().collect::<std::collections::BTreeSet<_>>()
        );
    }

    #[test]
    fn documents_are_byte_identical_and_keyed_by_iri() {
        let dir = tempfile::tempdir().unwrap();
        let mut docs = FileDocuments::new(dir.path());
        let key = iri("urn:dq:scenario/graph/0001?x=1#frag");
        let payload = b"line one\r\n\x00\xffbinary";
        assert!(!docs.contains(&key));
        docs.put(&key, payload).unwrap();
        assert!(docs.contains(&key));
        assert_eq!(docs.get(&key).unwrap().unwrap(), payload);
        assert_eq!(docs.keys().unwrap(), vec![key.clone()]);
        let name = docs.path_for(&key).file_name().unwrap().to_str().unwrap().to_string();
        assert!(!name.contains('/') && !name.contains(':'), "{name}");
        assert_eq!(docs.get(&iri("urn:other")).unwrap(), None);
    }
}
