//! Recursive descent over the token stream. Infix operators have no
//! precedence: a chain of one operator associates to the left, and any mix
//! of distinct infix operators must be parenthesized.

use super::lexer::{tokenize, Tok, Token};
use super::Scope;
use crate::error::{Error, ErrorKind, Result, SourcePos};
use crate::number::{Fp64, Rational};
use crate::term::{Fixity, Term, BRACKET_OP, SUBSCRIPT_OP, SUPERSCRIPT_OP};

/// Deepest accepted term, so that the recursive passes over terms stay
/// well within the stack.
pub const MAX_NESTING: usize = 1000;

#[derive(Debug, Clone)]
enum Raw {
    Rational(Rational),
    Fp64(Fp64),
    Name(String),
    App {
        op: String,
        fixity: Fixity,
        args: Vec<(Raw, SourcePos)>,
        height: usize,
    },
}

/// `stops` lists symbols that end the expression at the top level (used to
/// split equations and rules).
struct Parser<'s, 'a> {
    tokens: Vec<Token>,
    at: usize,
    scope: &'s Scope<'a>,
    stops: &'static [&'static str],
}

impl Raw {
    fn height(&self) -> usize {
        match self {
            Raw::App { height, .. } => *height,
            _ => 1,
        }
    }
}

/// Builds an application node, refusing trees deeper than [`MAX_NESTING`].
fn app(op: String, fixity: Fixity, args: Vec<(Raw, SourcePos)>, pos: SourcePos) -> Result<(Raw, SourcePos)> {
    let height = 1 + args.iter().map(|(a, _)| a.height()).max().unwrap_or(0);
    if height > MAX_NESTING {
        return Err(Error::at(ErrorKind::Syntax(format!("nesting deeper than {MAX_NESTING}")), pos));
    }
    Ok((Raw::App { op, fixity, args, height }, pos))
}

impl<'s, 'a> Parser<'s, 'a> {
    fn new(text: &str, scope: &'s Scope<'a>, stops: &'static [&'static str]) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(text)?,
            at: 0,
            scope,
            stops,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn peek_tok(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: String) -> Result<T> {
        Err(Error::at(ErrorKind::Syntax(msg), self.peek().pos))
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek_tok() == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek_tok().describe()))
        }
    }

    fn at_stop(&self, depth: usize) -> bool {
        depth == 0 && matches!(self.peek_tok(), Tok::Symbol(s) if self.stops.contains(&s.as_str()))
    }

    /// The infix operator at the cursor, if any.
    fn infix_op(&self, depth: usize) -> Option<String> {
        if self.at_stop(depth) {
            return None;
        }
        match self.peek_tok() {
            Tok::Symbol(s) => Some(s.clone()),
            Tok::Ident(w) if self.scope.signature.has_operator(w, Fixity::Infix) => Some(w.clone()),
            _ => None,
        }
    }

    fn expr(&mut self, depth: usize) -> Result<(Raw, SourcePos)> {
        let first = self.operand(depth)?;
        let Some(op) = self.infix_op(depth) else {
            return Ok(first);
        };
        let start = first.1;
        let mut acc = first;
        while let Some(next_op) = self.infix_op(depth) {
            if next_op != op {
                return Err(Error::at(
                    ErrorKind::Ambiguity(format!(
                        "`{op}` and `{next_op}` are mixed without parentheses"
                    )),
                    self.peek().pos,
                ));
            }
            self.next();
            let rhs = self.operand(depth)?;
            acc = app(op.clone(), Fixity::Infix, vec![acc, rhs], start)?;
        }
        Ok(acc)
    }

    fn operand(&mut self, depth: usize) -> Result<(Raw, SourcePos)> {
        let mut base = self.primary(depth)?;
        loop {
            let (op, fixity, arg) = match self.peek_tok() {
                Tok::LBracket => {
                    self.next();
                    let index = self.expr(depth + 1)?;
                    self.expect(Tok::RBracket)?;
                    (BRACKET_OP, Fixity::Bracket, index)
                }
                Tok::Underscore => {
                    self.next();
                    (SUBSCRIPT_OP, Fixity::Subscript, self.primary(depth)?)
                }
                Tok::Caret => {
                    self.next();
                    (SUPERSCRIPT_OP, Fixity::Superscript, self.primary(depth)?)
                }
                _ => return Ok(base),
            };
            let pos = base.1;
            base = app(op.into(), fixity, vec![base, arg], pos)?;
        }
    }

    fn primary(&mut self, depth: usize) -> Result<(Raw, SourcePos)> {
        if depth > MAX_NESTING {
            return self.error(format!("nesting deeper than {MAX_NESTING}"));
        }
        let tok = self.next();
        let pos = tok.pos;
        let raw = match tok.tok {
            Tok::Rational(text) => match Rational::parse(&text) {
                Some(q) => Raw::Rational(q),
                None => return Err(Error::at(ErrorKind::Syntax(format!("invalid literal `{text}`")), pos)),
            },
            Tok::Float(text) => match Fp64::parse(&text) {
                Some(x) => Raw::Fp64(x),
                None => return Err(Error::at(ErrorKind::Syntax(format!("invalid literal `{text}`")), pos)),
            },
            Tok::LParen => {
                let inner = self.expr(depth + 1)?;
                self.expect(Tok::RParen)?;
                return Ok((inner.0, pos));
            }
            Tok::Ident(name) | Tok::Symbol(name) if *self.peek_tok() == Tok::LParen => {
                self.next();
                let mut args = Vec::new();
                if *self.peek_tok() != Tok::RParen {
                    loop {
                        args.push(self.expr(depth + 1)?);
                        if *self.peek_tok() == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                return app(name, Fixity::Prefix, args, pos);
            }
            Tok::Ident(name) => Raw::Name(name),
            other => {
                return Err(Error::at(
                    ErrorKind::Syntax(format!("expected an operand, found {}", other.describe())),
                    pos,
                ))
            }
        };
        Ok((raw, pos))
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek_tok() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek_tok().describe()))
        }
    }
}

fn build(raw: (Raw, SourcePos), scope: &Scope<'_>) -> Result<Term> {
    let (raw, pos) = raw;
    let g = scope.graph;
    let result = match raw {
        Raw::Rational(q) => Term::rational(g, q),
        Raw::Fp64(x) => Term::fp64(g, x),
        Raw::Name(name) => match scope.variables.get(&name) {
            Some(sort) => Term::var(g, name, sort.clone()),
            None => Term::constant(g, scope.signature, name),
        },
        Raw::App { op, fixity, args, .. } => {
            let args = args
                .into_iter()
                .map(|a| build(a, scope))
                .collect::<Result<Vec<_>>>()?;
            Term::app(g, scope.signature, op, fixity, args)
        }
    };
    result.map_err(|e| e.or_at(pos))
}

pub fn parse_term(text: &str, scope: &Scope<'_>) -> Result<Term> {
    let mut p = Parser::new(text, scope, &[])?;
    let raw = p.expr(0)?;
    p.finish()?;
    build(raw, scope)
}

fn parse_pair(text: &str, scope: &Scope<'_>, stops: &'static [&'static str], what: &str) -> Result<(Term, Term)> {
    let mut p = Parser::new(text, scope, stops)?;
    let left = p.expr(0)?;
    if !p.at_stop(0) {
        return p.error(format!("expected `{}` in {what}, found {}", stops[0], p.peek_tok().describe()));
    }
    p.next();
    let right = p.expr(0)?;
    p.finish()?;
    Ok((build(left, scope)?, build(right, scope)?))
}

/// Parses `lhs = rhs`.
pub fn parse_equation(text: &str, scope: &Scope<'_>) -> Result<(Term, Term)> {
    parse_pair(text, scope, &["="], "equation")
}

/// Parses `pattern ⇒ replacement` (ASCII `=>` accepted).
pub fn parse_rule(text: &str, scope: &Scope<'_>) -> Result<(Term, Term)> {
    parse_pair(text, scope, &["⇒", "=>"], "rule")
}
