//! Lowering of a context over the number lattice to IEEE 754 binary64.
//!
//! Every numeric sort becomes `FP64`, the builtin number operators become
//! their binary64 counterparts, and rational literals are rounded to the
//! nearest binary64 value. Terms keep their exact tree shape, so the
//! derived context performs the same operations in the same order.

use std::fmt;

use crate::builtins;
use crate::context::{Asset, Context, ContextBuilder, ContextRef, Equation, InclusionMode, Provenance, Renaming};
use crate::error::{Error, ErrorKind, Result};
use crate::number::{is_exact_fp64, round_to_fp64, sorts, Fp64, Rational};
use crate::rewrite::RewriteRule;
use crate::signature::OperatorDecl;
use crate::sort::{SortDecl, SortName};
use crate::term::{Node, Term};

pub const FORMAT: &str = "binary64";

/// A rational literal that binary64 cannot represent exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InexactLiteral {
    /// Where the literal occurs, e.g. `rule 3` or `asset x0`.
    pub location: String,
    pub exact: Rational,
    pub rounded: Fp64,
}

impl fmt::Display for InexactLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} rounded to {}", self.location, self.exact, self.rounded)
    }
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub context: Context,
    pub inexact: Vec<InexactLiteral>,
}

fn is_numeric(s: &SortName) -> bool {
    sorts::RATIONAL_FAMILY.contains(&s.as_str()) || sorts::REAL_FAMILY.contains(&s.as_str())
}

fn is_rational_family(s: &SortName) -> bool {
    sorts::RATIONAL_FAMILY.contains(&s.as_str())
}

fn map_sort(s: &SortName) -> SortName {
    if is_numeric(s) {
        SortName::new(sorts::FP64)
    } else {
        s.clone()
    }
}

/// Derives `<name>-fp64` from `ctx`, which is known to readers as `source`.
pub fn derive_fp(ctx: &Context, source: ContextRef) -> Result<Derivation> {
    let numbers = builtins::context("numbers").expect("builtin numbers context");
    let fp64 = builtins::context("fp64").expect("builtin fp64 context");
    let mut b = ContextBuilder::new(format!("{}-fp64", ctx.name));
    if ctx.graph.sorts().any(is_numeric) {
        b.include(
            ContextRef::new(builtins::DOCUMENT, "fp64"),
            fp64,
            InclusionMode::Use,
            &Renaming::default(),
        )?;
    }
    b.push_provenance(Provenance::Derived {
        source,
        format: FORMAT.into(),
    });

    let mut sort_decls: Vec<SortDecl> = ctx.graph.sorts().map(|s| SortDecl::Sort(map_sort(s))).collect();
    for (a, c) in ctx.graph.edges() {
        let (a, c) = (map_sort(a), map_sort(c));
        if a != c {
            sort_decls.push(SortDecl::Subsort(a, c));
        }
    }
    b.declare_sorts(sort_decls)?;

    for d in ctx.signature.decls() {
        if numbers.signature.contains(d) {
            continue;
        }
        let sorts_of = || d.args.iter().chain(std::iter::once(&d.result));
        if sorts_of().any(is_rational_family) {
            return Err(Error::new(ErrorKind::UnmappedOperator(d.name.clone())));
        }
        b.declare_op(OperatorDecl::new(
            d.name.clone(),
            d.fixity,
            d.args.iter().map(map_sort).collect(),
            map_sort(&d.result),
        ))?;
    }
    for (v, s) in &ctx.variables {
        b.declare_var(v, map_sort(s))?;
    }
    b.finish_algebra()?;

    let mut inexact = Vec::new();
    for (i, rule) in ctx.rules.iter().enumerate() {
        let target = b.context();
        let location = format!("rule {i}");
        let pattern = lower(target, rule.pattern(), &location, &mut inexact)?;
        let replacement = lower(target, rule.replacement(), &location, &mut inexact)?;
        let rule = RewriteRule::new(&target.graph, pattern, replacement)?;
        if !target.rules.contains(&rule) {
            b.add_rule(rule);
        }
    }
    for (label, asset) in &ctx.assets {
        let target = b.context();
        let location = format!("asset {label}");
        let lowered = match asset {
            Asset::Term(t) => Asset::Term(lower(target, t, &location, &mut inexact)?),
            Asset::Equation(e) => Asset::Equation(Equation::new(
                &target.graph,
                lower(target, &e.left, &location, &mut inexact)?,
                lower(target, &e.right, &location, &mut inexact)?,
            )?),
        };
        b.add_asset(label, lowered)?;
    }
    Ok(Derivation {
        context: b.finish(),
        inexact,
    })
}

/// Lowers a term into `target`, which already holds the derived algebra.
pub fn lower_term(target: &Context, t: &Term) -> Result<(Term, Vec<InexactLiteral>)> {
    let mut inexact = Vec::new();
    let lowered = lower(target, t, "term", &mut inexact)?;
    Ok((lowered, inexact))
}

fn lower(target: &Context, t: &Term, location: &str, inexact: &mut Vec<InexactLiteral>) -> Result<Term> {
    let g = &target.graph;
    match t.node() {
        Node::Rational(q) => {
            let rounded = round_to_fp64(q);
            if !is_exact_fp64(q) {
                inexact.push(InexactLiteral {
                    location: location.to_owned(),
                    exact: q.clone(),
                    rounded,
                });
            }
            Term::fp64(g, rounded)
        }
        Node::Fp64(x) => Term::fp64(g, *x),
        Node::Var { name, sort } => Term::var(g, name.clone(), map_sort(sort)),
        Node::App { op, fixity, args } => {
            let args = args
                .iter()
                .map(|a| lower(target, a, location, inexact))
                .collect::<Result<Vec<_>>>()?;
            Term::app(g, &target.signature, op.clone(), *fixity, args)
        }
    }
}
