//! The example documents, embedded so that tests and tools can build them
//! without touching the file system.

use crate::document::{Document, DocumentLoader, MemorySource};
use crate::error::Result;

pub const FUNCTIONS: &str = include_str!("../examples/functions.lzd");
pub const PREDATOR_PREY: &str = include_str!("../examples/predator-prey.lzd");
pub const HERON: &str = include_str!("../examples/heron.lzd");
pub const EULER: &str = include_str!("../examples/euler.lzd");

/// File names and sources of every example document.
pub const FILES: [(&str, &str); 4] = [
    ("functions.lzd", FUNCTIONS),
    ("predator-prey.lzd", PREDATOR_PREY),
    ("heron.lzd", HERON),
    ("euler.lzd", EULER),
];

pub fn source() -> MemorySource {
    FILES
        .iter()
        .fold(MemorySource::new(), |src, (name, text)| src.with(name, *text))
}

/// Builds the example document `name` (file stem, e.g. `"heron"`).
pub fn load(name: &str) -> Result<Document> {
    DocumentLoader::new(source()).load(format!("{name}.lzd"))
}
