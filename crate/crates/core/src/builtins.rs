//! The builtin contexts `builtins/boolean`, `builtins/numbers` and
//! `builtins/fp64`, and the arithmetic that backs them.
//!
//! The contexts are ordinary Leibniz source, elaborated once on first use.
//! Arithmetic on literals is performed natively for an operator whenever
//! the context at hand contains that operator's canonical declaration
//! (for example `ℚ + ℚ : ℚ`), so renamed or derived copies of the builtins
//! keep their arithmetic and user contexts that merely reuse a symbol do
//! not acquire any.

use std::sync::OnceLock;

use crate::context::Context;
use crate::document::{build_document, parse_document, Document};
use crate::error::Result;
use crate::number::{sorts, Fp64, Rational};
use crate::signature::OperatorDecl;
use crate::term::{Fixity, Term};

pub use crate::number::round_to_fp64;

/// The reserved document name of the builtin contexts.
pub const DOCUMENT: &str = "builtins";

pub const SOURCE: &str = include_str!("builtins.lzd");

static BUILTINS: OnceLock<Document> = OnceLock::new();

/// The builtin document. Its elaboration runs every signature check, so a
/// broken builtin definition fails here, the first time any builtin is
/// needed.
pub fn document() -> &'static Document {
    BUILTINS.get_or_init(|| {
        let ast = parse_document(SOURCE).unwrap_or_else(|e| panic!("builtin source: {e}"));
        build_document(DOCUMENT, &ast, &Default::default()).unwrap_or_else(|e| panic!("builtin contexts: {e}"))
    })
}

pub fn context(name: &str) -> Option<&'static Context> {
    document().context(name)
}

pub fn builtin_contexts() -> &'static [Context] {
    &document().contexts
}

/// The value of a builtin operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value<N> {
    Number(N),
    Bool(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    DivisionByZero,
    Unsupported,
}

const ARITHMETIC: [&str; 4] = ["+", "−", "×", "÷"];
const COMPARISONS: [&str; 5] = ["<", ">", "≤", "≥", "="];

/// Exact evaluation of a binary builtin operator on rationals.
pub fn eval_rational(op: &str, a: &Rational, b: &Rational) -> Result<Value<Rational>, EvalError> {
    use std::cmp::Ordering::*;
    Ok(match op {
        "+" => Value::Number(a.add(b)),
        "−" => Value::Number(a.sub(b)),
        "×" => Value::Number(a.mul(b)),
        "÷" => Value::Number(a.div(b).ok_or(EvalError::DivisionByZero)?),
        _ => {
            let ord = a.cmp(b);
            Value::Bool(match op {
                "<" => ord == Less,
                ">" => ord == Greater,
                "≤" => ord != Greater,
                "≥" => ord != Less,
                "=" => ord == Equal,
                _ => return Err(EvalError::Unsupported),
            })
        }
    })
}

/// IEEE 754 binary64 evaluation (round to nearest, ties to even) of a
/// binary builtin operator.
pub fn eval_fp64(op: &str, a: Fp64, b: Fp64) -> Result<Value<Fp64>, EvalError> {
    let (x, y) = (a.value(), b.value());
    Ok(match op {
        "+" => Value::Number(Fp64::from_f64(x + y)),
        "−" => Value::Number(Fp64::from_f64(x - y)),
        "×" => Value::Number(Fp64::from_f64(x * y)),
        "÷" => Value::Number(Fp64::from_f64(x / y)),
        "<" => Value::Bool(x < y),
        ">" => Value::Bool(x > y),
        "≤" => Value::Bool(x <= y),
        "≥" => Value::Bool(x >= y),
        "=" => Value::Bool(x == y),
        _ => return Err(EvalError::Unsupported),
    })
}

fn canonical_decl(op: &str, operand: &str) -> Option<OperatorDecl> {
    let (right, result) = if ARITHMETIC.contains(&op) {
        let right = if op == "÷" && operand == sorts::RAT { sorts::RAT_NZ } else { operand };
        (right, operand)
    } else if COMPARISONS.contains(&op) {
        (operand, sorts::BOOLEAN)
    } else {
        return None;
    };
    Some(OperatorDecl::infix(operand, op, right, result))
}

fn bool_term(ctx: &Context, b: bool) -> Option<Result<Term>> {
    let name = if b { "true" } else { "false" };
    let decl = OperatorDecl::prefix(name, &[], sorts::BOOLEAN);
    ctx.signature
        .contains(&decl)
        .then(|| Term::constant(&ctx.graph, &ctx.signature, name))
}

/// Evaluates a builtin operator applied to two literals, when `ctx`
/// provides it. `None` means no builtin applies (including division by
/// zero, which leaves the term as it is).
pub(crate) fn evaluate(ctx: &Context, t: &Term) -> Option<Result<Term>> {
    let (op, Fixity::Infix) = t.operator()? else {
        return None;
    };
    let [a, b] = t.args() else { return None };
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        if !ctx.signature.contains(&canonical_decl(op, sorts::RAT)?) {
            return None;
        }
        return match eval_rational(op, x, y).ok()? {
            Value::Number(q) => Some(Term::rational(&ctx.graph, q)),
            Value::Bool(v) => bool_term(ctx, v),
        };
    }
    if let (Some(x), Some(y)) = (a.as_fp64(), b.as_fp64()) {
        if !ctx.signature.contains(&canonical_decl(op, sorts::FP64)?) {
            return None;
        }
        return match eval_fp64(op, x, y).ok()? {
            Value::Number(v) => Some(Term::fp64(&ctx.graph, v)),
            Value::Bool(v) => bool_term(ctx, v),
        };
    }
    None
}
