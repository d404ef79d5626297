//! Concrete expression syntax: parsing and canonical rendering of terms.
//!
//! ```text
//! expr     = operand { INFIX operand }        (* one operator per chain *)
//! operand  = primary { "[" expr "]" | "_" primary | "^" primary }
//! primary  = literal | name | name "(" [ expr { "," expr } ] ")" | "(" expr ")"
//! literal  = rational | binary64
//! rational = [ "-" ] digits [ "/" digits ]
//! binary64 = [ "-" ] digits ( "." digits [ exponent ] | exponent ) | [ "-" ] "∞" | "NaN"
//! ```
//!
//! `name` is an identifier (letters, digits, inner `-`, `→`, primes) or a
//! run of symbol characters. An identifier is used as an infix operator
//! when the scope declares an infix operator of that name.

mod lexer;
mod parser;
mod render;

use std::collections::BTreeMap;

pub use parser::{parse_equation, parse_rule, parse_term};
pub use render::render_term;
pub(crate) use render::render_side;

pub(crate) use lexer::{is_ident_continue, is_ident_start};

use crate::signature::Signature;
use crate::sort::{SortGraph, SortName};
use crate::term::Term;

/// Everything the parser needs to resolve names.
#[derive(Debug, Clone, Copy)]
pub struct Scope<'a> {
    pub graph: &'a SortGraph,
    pub signature: &'a Signature,
    pub variables: &'a BTreeMap<String, SortName>,
}

pub fn render_equation(left: &Term, right: &Term) -> String {
    format!("{} = {}", render_side(left, &["="]), render_side(right, &["="]))
}

pub fn render_rule(pattern: &Term, replacement: &Term) -> String {
    format!(
        "{} ⇒ {}",
        render_side(pattern, &["⇒", "=>"]),
        render_side(replacement, &["⇒", "=>"])
    )
}
