//! Leibniz: a digital scientific notation.
//!
//! A Leibniz document is narrative text with embedded *contexts*. Each
//! context defines an order-sorted term algebra, a list of rewrite rules
//! and labeled assets (terms and equations). This crate elaborates author
//! documents, evaluates terms by rewriting with exact rational arithmetic,
//! renders a reader view (HTML) and a machine view (XML), and derives
//! IEEE 754 binary64 versions of numerical contexts.
//!
//! ```
//! use leibniz::{corpus, rewrite::normalize, syntax::render_term};
//!
//! let doc = corpus::load("heron").unwrap();
//! let heron = doc.context("heron").unwrap();
//! let t = heron.parse_term("heron-step(1, 2)").unwrap();
//! let (nf, _) = normalize(heron, &t, 1000).unwrap();
//! assert_eq!(render_term(&nf), "3/2");
//! ```

pub mod builtins;
pub mod context;
pub mod corpus;
pub mod document;
pub mod error;
pub mod fp_derive;
pub mod number;
pub mod rewrite;
pub mod signature;
pub mod sort;
pub mod syntax;
pub mod term;

pub use context::{Asset, Context, ContextRef, Equation};
pub use document::Document;
pub use error::{Error, ErrorKind, Result, SourcePos};
pub use term::Term;
