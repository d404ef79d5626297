//! Errors shared by every stage of the pipeline.
//!
//! Each [`ErrorKind`] has a stable short code used in command-line
//! diagnostics (`path:line:col: CODE: message`).

use std::fmt;

use crate::sort::SortName;

/// 1-based line and column (columns count Unicode scalar values).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePos {
    pub line: u32,
    pub col: u32,
}

impl SourcePos {
    pub const START: SourcePos = SourcePos { line: 1, col: 1 };

    pub fn new(line: u32, col: u32) -> Self {
        SourcePos { line, col }
    }

    /// Interprets `self` as a position relative to text that starts at
    /// `origin` and returns the absolute position.
    pub fn relative_to(self, origin: SourcePos) -> SourcePos {
        if self.line == 1 {
            SourcePos::new(origin.line, origin.col + self.col - 1)
        } else {
            SourcePos::new(origin.line + self.line - 1, self.col)
        }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ErrorKind {
    #[error("subsort cycle: {}", join_sorts(.0))]
    Cycle(Vec<SortName>),
    #[error("unknown sort `{0}`")]
    UnknownSort(SortName),
    #[error("conflicting declaration: {0}")]
    Conflict(String),
    #[error("signature is not preregular: {0}")]
    Preregularity(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("no such operator: {0}")]
    NoSuchOperator(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("ambiguous expression: {0}")]
    Ambiguity(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("`{0}` is declared both as a variable and as a nullary operator")]
    VariableCollision(String),
    #[error("term is not ground: variable `{0}`")]
    NotGround(String),
    #[error("unknown context reference `{0}`")]
    UnknownReference(String),
    #[error("duplicate context name `{0}`")]
    DuplicateContext(String),
    #[error("duplicate asset label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown asset label `{0}`")]
    UnknownLabel(String),
    #[error("renaming collision: {0}")]
    RenameCollision(String),
    #[error("import not found: {0}")]
    ImportNotFound(String),
    #[error("import cycle: {0}")]
    ImportCycle(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("operator `{0}` has no floating-point counterpart")]
    UnmappedOperator(String),
    #[error("step limit of {0} rewrite steps exceeded")]
    StepLimitExceeded(usize),
}

fn join_sorts(sorts: &[SortName]) -> String {
    sorts
        .iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(" ⊆ ")
}

impl ErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            ErrorKind::Cycle(_) => "CycleError",
            ErrorKind::UnknownSort(_) => "UnknownSort",
            ErrorKind::Conflict(_) => "ConflictError",
            ErrorKind::Preregularity(_) => "PreregularityError",
            ErrorKind::KindMismatch(_) => "KindMismatch",
            ErrorKind::NoSuchOperator(_) => "NoSuchOperator",
            ErrorKind::Syntax(_) => "SyntaxError",
            ErrorKind::Ambiguity(_) => "AmbiguityError",
            ErrorKind::InvalidRule(_) => "InvalidRule",
            ErrorKind::VariableCollision(_) => "VariableCollision",
            ErrorKind::NotGround(_) => "NotGround",
            ErrorKind::UnknownReference(_) => "UnknownReference",
            ErrorKind::DuplicateContext(_) => "DuplicateContext",
            ErrorKind::DuplicateLabel(_) => "DuplicateLabel",
            ErrorKind::UnknownLabel(_) => "UnknownLabel",
            ErrorKind::RenameCollision(_) => "RenameCollision",
            ErrorKind::ImportNotFound(_) => "ImportNotFound",
            ErrorKind::ImportCycle(_) => "ImportCycle",
            ErrorKind::Schema(_) => "SchemaError",
            ErrorKind::UnmappedOperator(_) => "UnmappedOperator",
            ErrorKind::StepLimitExceeded(_) => "StepLimitExceeded",
        }
    }
}

/// An [`ErrorKind`] with an optional source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Error {
    pub kind: ErrorKind,
    pub pos: Option<SourcePos>,
    /// The document the position refers to, when it is not the one being
    /// processed (errors inside imports).
    pub file: Option<String>,
}

impl Error {
    pub fn new(kind: ErrorKind) -> Self {
        Error {
            kind,
            pos: None,
            file: None,
        }
    }

    pub fn at(kind: ErrorKind, pos: SourcePos) -> Self {
        Error {
            kind,
            pos: Some(pos),
            file: None,
        }
    }

    /// Attaches `pos` unless the error already carries a position.
    pub fn or_at(mut self, pos: SourcePos) -> Self {
        self.pos.get_or_insert(pos);
        self
    }

    /// Rebases a position computed inside a fragment onto the fragment's
    /// location in the enclosing text; a missing position becomes `origin`.
    pub fn rebase(mut self, origin: SourcePos) -> Self {
        self.pos = Some(match self.pos {
            Some(p) => p.relative_to(origin),
            None => origin,
        });
        self
    }

    /// Records the file the error position refers to, keeping an
    /// innermost one.
    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file.get_or_insert_with(|| file.into());
        self
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl From<ErrorKind> for Error {
    fn from(kind: ErrorKind) -> Self {
        Error::new(kind)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(pos) => write!(f, "{}: {}: {}", pos, self.code(), self.kind),
            None => write!(f, "{}: {}", self.code(), self.kind),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T, E = Error> = std::result::Result<T, E>;
