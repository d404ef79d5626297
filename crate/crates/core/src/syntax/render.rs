use std::cmp::Ordering;

use crate::term::{Fixity, Node, Term};

/// Canonical text of a term. Parentheses appear only where the parser
/// needs them, so `parse_term(render_term(t)) == t`.
pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &[], &mut out);
    out
}

/// Renders one side of an equation or rule, parenthesizing a top-level
/// infix application whose operator is one of `stops`.
pub(crate) fn render_side(t: &Term, stops: &[&str]) -> String {
    let mut out = String::new();
    write_term(t, stops, &mut out);
    out
}

fn infix_name(t: &Term) -> Option<&str> {
    match t.operator() {
        Some((op, Fixity::Infix)) => Some(op),
        _ => None,
    }
}

// literals that read ambiguously next to a postfix operator
fn is_compound_literal(t: &Term) -> bool {
    match t.node() {
        Node::Rational(q) => !q.is_integer() || q.signum() == Ordering::Less,
        Node::Fp64(x) => x.value().is_sign_negative() && !x.value().is_nan(),
        _ => false,
    }
}

/// Literals, variables and prefix applications.
fn is_primary(t: &Term) -> bool {
    match t.node() {
        Node::Rational(_) | Node::Fp64(_) => !is_compound_literal(t),
        Node::Var { .. } => true,
        Node::App { fixity, .. } => *fixity == Fixity::Prefix,
    }
}

fn write_parenthesized(t: &Term, out: &mut String) {
    out.push('(');
    write_term(t, &[], out);
    out.push(')');
}

fn write_term(t: &Term, stops: &[&str], out: &mut String) {
    match t.node() {
        Node::Rational(q) => out.push_str(&q.to_string()),
        Node::Fp64(x) => out.push_str(&x.to_string()),
        Node::Var { name, .. } => out.push_str(name),
        Node::App { op, fixity, args } => match fixity {
            Fixity::Prefix => {
                out.push_str(op);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_term(a, &[], out);
                    }
                    out.push(')');
                }
            }
            Fixity::Infix => {
                if stops.contains(&op.as_str()) {
                    write_parenthesized(t, out);
                    return;
                }
                let (l, r) = (&args[0], &args[1]);
                match infix_name(l) {
                    Some(lop) if lop != op => write_parenthesized(l, out),
                    _ => write_term(l, &[], out),
                }
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                if infix_name(r).is_some() {
                    write_parenthesized(r, out);
                } else {
                    write_term(r, &[], out);
                }
            }
            Fixity::Bracket | Fixity::Subscript | Fixity::Superscript => {
                let (base, arg) = (&args[0], &args[1]);
                if infix_name(base).is_some() || is_compound_literal(base) {
                    write_parenthesized(base, out);
                } else {
                    write_term(base, &[], out);
                }
                match fixity {
                    Fixity::Bracket => {
                        out.push('[');
                        write_term(arg, &[], out);
                        out.push(']');
                        return;
                    }
                    Fixity::Subscript => out.push('_'),
                    _ => out.push('^'),
                }
                if is_primary(arg) {
                    write_term(arg, &[], out);
                } else {
                    write_parenthesized(arg, out);
                }
            }
        },
    }
}
