//! Matching, substitution and normalization.
//!
//! Normalization is leftmost-innermost: the children of a node are brought
//! to normal form from left to right before the node itself is rewritten.
//! At each position the context's rules are tried in order, and builtin
//! arithmetic only when no rule matches.

use std::collections::BTreeMap;
use std::fmt;

use crate::builtins;
use crate::context::Context;
use crate::error::{Error, ErrorKind, Result};
use crate::signature::Signature;
use crate::sort::SortGraph;
use crate::syntax::render_term;
use crate::term::{Node, Path, Sorting, Term};

pub const DEFAULT_STEP_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pattern: Term,
    replacement: Term,
}

impl RewriteRule {
    pub fn new(graph: &SortGraph, pattern: Term, replacement: Term) -> Result<RewriteRule> {
        let invalid = |msg: String| Err(Error::new(ErrorKind::InvalidRule(msg)));
        if pattern.is_var() || pattern.is_literal() {
            return invalid(format!(
                "pattern `{}` must be an operator application",
                render_term(&pattern)
            ));
        }
        let bound = pattern.variables();
        for (name, _) in replacement.variables() {
            if !bound.iter().any(|(n, _)| *n == name) {
                return invalid(format!("variable `{name}` of the replacement does not occur in the pattern"));
            }
        }
        if pattern.sorting().kind(graph)? != replacement.sorting().kind(graph)? {
            return invalid(format!(
                "`{}` and `{}` belong to different kinds",
                render_term(&pattern),
                render_term(&replacement)
            ));
        }
        Ok(RewriteRule { pattern, replacement })
    }

    pub fn pattern(&self) -> &Term {
        &self.pattern
    }

    pub fn replacement(&self) -> &Term {
        &self.replacement
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_rule(&self.pattern, &self.replacement))
    }
}

/// Variable bindings produced by [`match_pattern`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn bind(&mut self, var: impl Into<String>, t: Term) {
        self.0.insert(var.into(), t);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Syntactic matching of `pattern` against the ground term `t`. A variable
/// only binds a subterm whose sort is at or below its own, so flagged
/// subterms never bind.
pub fn match_pattern(graph: &SortGraph, pattern: &Term, t: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    match_into(graph, pattern, t, &mut s).then_some(s)
}

fn match_into(graph: &SortGraph, p: &Term, t: &Term, s: &mut Substitution) -> bool {
    match (p.node(), t.node()) {
        (Node::Var { name, sort }, _) => {
            if let Some(bound) = s.get(name) {
                return bound == t;
            }
            match t.sorting() {
                Sorting::Sort(ts) if graph.leq(ts, sort) => {
                    s.bind(name.clone(), t.clone());
                    true
                }
                _ => false,
            }
        }
        (Node::Rational(a), Node::Rational(b)) => a == b,
        (Node::Fp64(a), Node::Fp64(b)) => a == b,
        (
            Node::App { op, fixity, args },
            Node::App {
                op: top,
                fixity: tfix,
                args: targs,
            },
        ) => {
            op == top
                && fixity == tfix
                && args.len() == targs.len()
                && args.iter().zip(targs).all(|(pa, ta)| match_into(graph, pa, ta, s))
        }
        _ => false,
    }
}

/// Replaces bound variables and re-infers every sort on the way up, which
/// is what clears error flags once a conforming subterm arrives.
pub fn apply_substitution(graph: &SortGraph, signature: &Signature, t: &Term, s: &Substitution) -> Result<Term> {
    if t.is_ground() {
        return Ok(t.clone());
    }
    t.rebuild(graph, signature, &|node: &Term, _| match node.node() {
        Node::Var { name, .. } => Some(
            s.get(name)
                .cloned()
                .ok_or_else(|| Error::new(ErrorKind::NotGround(name.clone()))),
        ),
        _ => None,
    })
}

/// Which rule performed a rewrite step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleRef {
    /// Index into the context's rule list.
    User(usize),
    Builtin,
}

impl fmt::Display for RuleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleRef::User(i) => write!(f, "rule {i}"),
            RuleRef::Builtin => f.write_str("builtin"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub path: Path,
    pub rule: RuleRef,
    pub before: Term,
    pub after: Term,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "ε".to_string()
        } else {
            self.path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
        };
        write!(
            f,
            "{path} {}: {} ⇒ {}",
            self.rule,
            render_term(&self.before),
            render_term(&self.after)
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// One line per step: `path rule: before ⇒ after`, with `ε` for the root.
impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{step}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    /// The partial trace holds exactly `limit` steps.
    StepLimitExceeded { limit: usize, partial: Trace },
    Invalid(Error),
}

impl NormalizeError {
    pub fn into_error(self) -> Error {
        match self {
            NormalizeError::StepLimitExceeded { limit, .. } => Error::new(ErrorKind::StepLimitExceeded(limit)),
            NormalizeError::Invalid(e) => e,
        }
    }
}

impl From<Error> for NormalizeError {
    fn from(e: Error) -> Self {
        NormalizeError::Invalid(e)
    }
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeError::StepLimitExceeded { limit, .. } => {
                write!(f, "{}", ErrorKind::StepLimitExceeded(*limit))
            }
            NormalizeError::Invalid(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for NormalizeError {}

/// Rewrites a ground term to normal form in `ctx`.
pub fn normalize(ctx: &Context, t: &Term, step_limit: usize) -> Result<(Term, Trace), NormalizeError> {
    if let Some(v) = t.first_variable() {
        return Err(Error::new(ErrorKind::NotGround(v.to_string())).into());
    }
    let mut engine = Engine {
        ctx,
        limit: step_limit,
        trace: Trace::default(),
    };
    let mut path = Vec::new();
    let nf = engine.normalize(t.clone(), &mut path)?;
    Ok((nf, engine.trace))
}

struct Engine<'c> {
    ctx: &'c Context,
    limit: usize,
    trace: Trace,
}

impl Engine<'_> {
    // Recursion depth is bounded by term depth: repeated rewrites at one
    // position are handled by the loop.
    fn normalize(&mut self, t: Term, path: &mut Path) -> Result<Term, NormalizeError> {
        let mut current = self.normalize_children(t, path)?;
        while let Some((rule, after)) = self.rewrite_root(&current)? {
            if self.trace.len() == self.limit {
                return Err(NormalizeError::StepLimitExceeded {
                    limit: self.limit,
                    partial: std::mem::take(&mut self.trace),
                });
            }
            self.trace.steps.push(TraceStep {
                path: path.clone(),
                rule,
                before: current,
                after: after.clone(),
            });
            current = self.normalize_children(after, path)?;
        }
        Ok(current)
    }

    fn normalize_children(&mut self, t: Term, path: &mut Path) -> Result<Term, NormalizeError> {
        let Node::App { op, fixity, args } = t.node() else {
            return Ok(t);
        };
        let mut changed = false;
        let mut new_args = Vec::with_capacity(args.len());
        for (i, a) in args.iter().enumerate() {
            path.push(i);
            let n = self.normalize(a.clone(), path)?;
            path.pop();
            changed |= n != *a;
            new_args.push(n);
        }
        if !changed {
            return Ok(t);
        }
        let ctx = self.ctx;
        Ok(Term::app(&ctx.graph, &ctx.signature, op.clone(), *fixity, new_args)?)
    }

    fn rewrite_root(&self, t: &Term) -> Result<Option<(RuleRef, Term)>> {
        let ctx = self.ctx;
        if !matches!(t.node(), Node::App { .. }) {
            return Ok(None);
        }
        for (i, rule) in ctx.rules.iter().enumerate() {
            if let Some(s) = match_pattern(&ctx.graph, &rule.pattern, t) {
                let after = apply_substitution(&ctx.graph, &ctx.signature, &rule.replacement, &s)?;
                return Ok(Some((RuleRef::User(i), after)));
            }
        }
        match builtins::evaluate(ctx, t) {
            Some(after) => Ok(Some((RuleRef::Builtin, after?))),
            None => Ok(None),
        }
    }
}

/// Replaces the subterm at `path`, re-inferring the sorts of its ancestors.
pub fn replace_at(graph: &SortGraph, signature: &Signature, t: &Term, path: &[usize], new: Term) -> Result<Term> {
    let Some((&i, rest)) = path.split_first() else {
        return Ok(new);
    };
    let Node::App { op, fixity, args } = t.node() else {
        return Err(Error::new(ErrorKind::Syntax(format!("no position {i} in a leaf"))));
    };
    let Some(child) = args.get(i) else {
        return Err(Error::new(ErrorKind::Syntax(format!("no position {i}"))));
    };
    let mut args = args.clone();
    args[i] = replace_at(graph, signature, child, rest, new)?;
    Term::app(graph, signature, op.clone(), *fixity, args)
}
