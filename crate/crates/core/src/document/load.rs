use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use super::{build_document, load_xml, parse_document, Document};
use crate::builtins;
use crate::error::{Error, ErrorKind, Result};

/// Where document files come from.
pub trait DocumentSource {
    fn read(&self, path: &Path) -> Result<String>;
}

/// Reads documents from the file system.
#[derive(Debug, Clone, Copy, Default)]
pub struct FileSource;

impl DocumentSource for FileSource {
    fn read(&self, path: &Path) -> Result<String> {
        std::fs::read_to_string(path)
            .map_err(|e| Error::new(ErrorKind::ImportNotFound(format!("{}: {e}", path.display()))))
    }
}

/// An in-memory file tree, for tests and embedding.
#[derive(Debug, Clone, Default)]
pub struct MemorySource {
    files: BTreeMap<PathBuf, String>,
}

impl MemorySource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, path: impl AsRef<Path>, text: impl Into<String>) -> Self {
        self.files.insert(normalize_path(path.as_ref()), text.into());
        self
    }
}

impl DocumentSource for MemorySource {
    fn read(&self, path: &Path) -> Result<String> {
        self.files
            .get(&normalize_path(path))
            .cloned()
            .ok_or_else(|| Error::new(ErrorKind::ImportNotFound(path.display().to_string())))
    }
}

/// Lexical normalization: drops `.` and resolves `..` against preceding
/// components.
fn normalize_path(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other),
        }
    }
    out
}

/// Loads documents and, recursively, their imports. Author sources
/// (`.lzd`) are parsed and built; `.xml` files are read as machine views.
/// Each file is loaded once; import paths are relative to the importing
/// file.
pub struct DocumentLoader<S> {
    source: S,
    stack: Vec<PathBuf>,
    cache: BTreeMap<PathBuf, Document>,
}

impl<S: DocumentSource> DocumentLoader<S> {
    pub fn new(source: S) -> Self {
        DocumentLoader {
            source,
            stack: Vec::new(),
            cache: BTreeMap::new(),
        }
    }

    pub fn load(&mut self, path: impl AsRef<Path>) -> Result<Document> {
        let path = normalize_path(path.as_ref());
        if let Some(doc) = self.cache.get(&path) {
            return Ok(doc.clone());
        }
        if self.stack.contains(&path) {
            let chain: Vec<String> = self
                .stack
                .iter()
                .chain(std::iter::once(&path))
                .map(|p| p.display().to_string())
                .collect();
            return Err(Error::new(ErrorKind::ImportCycle(chain.join(" → "))));
        }
        let text = self.source.read(&path)?;
        self.stack.push(path.clone());
        let result = self.load_text(&path, &text);
        self.stack.pop();
        let doc = result.map_err(|e| e.in_file(path.display().to_string()))?;
        self.cache.insert(path, doc.clone());
        Ok(doc)
    }

    fn load_text(&mut self, path: &Path, text: &str) -> Result<Document> {
        if path.extension().is_some_and(|e| e == "xml") {
            return load_xml(text.as_bytes());
        }
        let ast = parse_document(text)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        let mut imports = BTreeMap::new();
        for import in ast.imports() {
            if import.name == builtins::DOCUMENT {
                return Err(Error::at(
                    ErrorKind::Syntax(format!("import name `{}` is reserved", builtins::DOCUMENT)),
                    import.pos,
                ));
            }
            let doc = self.load(dir.join(&import.path)).map_err(|e| {
                // errors inside the imported file already carry its path
                if e.file.is_some() {
                    e
                } else {
                    e.or_at(import.pos)
                }
            })?;
            imports.insert(import.name.clone(), doc);
        }
        build_document(&document_name(path), &ast, &imports)
    }
}

/// A document is named after its file stem.
pub fn document_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
