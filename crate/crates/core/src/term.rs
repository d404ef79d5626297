//! Terms with inferred sorts.
//!
//! Every [`Term`] carries the result of order-sorted inference: a proper
//! sort, or a kind when the term is error-flagged. Terms can only be built
//! through the constructors here, which run inference against a sort graph
//! and signature, so a `Term` value is always well-formed for the algebra it
//! was built in.

use std::fmt;

use crate::error::Result;
use crate::number::{sorts, Fp64, Rational};
use crate::signature::Signature;
use crate::sort::{KindId, SortGraph, SortName};

pub const BRACKET_OP: &str = "[]";
pub const SUBSCRIPT_OP: &str = "_";
pub const SUPERSCRIPT_OP: &str = "^";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fixity {
    Prefix,
    Infix,
    Bracket,
    Subscript,
    Superscript,
}

impl Fixity {
    pub fn as_str(self) -> &'static str {
        match self {
            Fixity::Prefix => "prefix",
            Fixity::Infix => "infix",
            Fixity::Bracket => "bracket",
            Fixity::Subscript => "subscript",
            Fixity::Superscript => "superscript",
        }
    }

    pub fn parse(s: &str) -> Option<Fixity> {
        Some(match s {
            "prefix" => Fixity::Prefix,
            "infix" => Fixity::Infix,
            "bracket" => Fixity::Bracket,
            "subscript" => Fixity::Subscript,
            "superscript" => Fixity::Superscript,
            _ => return None,
        })
    }

    /// The fixed operator name of the special operators.
    pub fn special_name(self) -> Option<&'static str> {
        match self {
            Fixity::Bracket => Some(BRACKET_OP),
            Fixity::Subscript => Some(SUBSCRIPT_OP),
            Fixity::Superscript => Some(SUPERSCRIPT_OP),
            Fixity::Prefix | Fixity::Infix => None,
        }
    }

    /// Whether operators of this fixity are binary by construction.
    pub fn is_binary(self) -> bool {
        !matches!(self, Fixity::Prefix)
    }
}

impl fmt::Display for Fixity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of sort inference: a proper sort, or a kind for a flagged term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sorting {
    Sort(SortName),
    Kind(KindId),
}

impl Sorting {
    pub fn is_flagged(&self) -> bool {
        matches!(self, Sorting::Kind(_))
    }

    pub fn sort(&self) -> Option<&SortName> {
        match self {
            Sorting::Sort(s) => Some(s),
            Sorting::Kind(_) => None,
        }
    }

    pub fn kind(&self, graph: &SortGraph) -> Result<KindId> {
        match self {
            Sorting::Sort(s) => graph.kind_of(s),
            Sorting::Kind(k) => Ok(k.clone()),
        }
    }
}

impl fmt::Display for Sorting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sorting::Sort(s) => write!(f, "{s}"),
            Sorting::Kind(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Rational(Rational),
    Fp64(Fp64),
    Var {
        name: String,
        sort: SortName,
    },
    App {
        op: String,
        fixity: Fixity,
        args: Vec<Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    node: Node,
    sorting: Sorting,
}

/// A position in a term: the child indices from the root.
pub type Path = Vec<usize>;

impl Term {
    pub fn rational(graph: &SortGraph, value: Rational) -> Result<Term> {
        let sort = SortName::new(value.literal_sort());
        graph.check(&sort)?;
        Ok(Term {
            node: Node::Rational(value),
            sorting: Sorting::Sort(sort),
        })
    }

    pub fn fp64(graph: &SortGraph, value: Fp64) -> Result<Term> {
        let sort = SortName::new(sorts::FP64);
        graph.check(&sort)?;
        Ok(Term {
            node: Node::Fp64(value),
            sorting: Sorting::Sort(sort),
        })
    }

    pub fn var(graph: &SortGraph, name: impl Into<String>, sort: SortName) -> Result<Term> {
        graph.check(&sort)?;
        Ok(Term {
            node: Node::Var {
                name: name.into(),
                sort: sort.clone(),
            },
            sorting: Sorting::Sort(sort),
        })
    }

    /// Builds an application, inferring its sort from the children.
    pub fn app(
        graph: &SortGraph,
        signature: &Signature,
        op: impl Into<String>,
        fixity: Fixity,
        args: Vec<Term>,
    ) -> Result<Term> {
        let op = op.into();
        let arg_sorts: Vec<Sorting> = args.iter().map(|a| a.sorting.clone()).collect();
        let sorting = signature.infer_sort(graph, &op, fixity, &arg_sorts)?;
        Ok(Term {
            node: Node::App { op, fixity, args },
            sorting,
        })
    }

    /// Nullary prefix application.
    pub fn constant(graph: &SortGraph, signature: &Signature, op: impl Into<String>) -> Result<Term> {
        Term::app(graph, signature, op, Fixity::Prefix, vec![])
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn sorting(&self) -> &Sorting {
        &self.sorting
    }

    pub fn is_flagged(&self) -> bool {
        self.sorting.is_flagged()
    }

    pub fn args(&self) -> &[Term] {
        match &self.node {
            Node::App { args, .. } => args,
            _ => &[],
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.node {
            Node::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_fp64(&self) -> Option<Fp64> {
        match &self.node {
            Node::Fp64(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self.node, Node::Rational(_) | Node::Fp64(_))
    }

    pub fn is_var(&self) -> bool {
        matches!(self.node, Node::Var { .. })
    }

    /// Name and fixity of an application.
    pub fn operator(&self) -> Option<(&str, Fixity)> {
        match &self.node {
            Node::App { op, fixity, .. } => Some((op, *fixity)),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.first_variable().is_none()
    }

    pub fn first_variable(&self) -> Option<&str> {
        match &self.node {
            Node::Var { name, .. } => Some(name),
            Node::App { args, .. } => args.iter().find_map(Term::first_variable),
            _ => None,
        }
    }

    /// Variables with their sorts, in left-to-right order of first occurrence.
    pub fn variables(&self) -> Vec<(&str, &SortName)> {
        fn walk<'a>(t: &'a Term, out: &mut Vec<(&'a str, &'a SortName)>) {
            match &t.node {
                Node::Var { name, sort } => {
                    if !out.iter().any(|(n, _)| *n == name) {
                        out.push((name, sort));
                    }
                }
                Node::App { args, .. } => args.iter().for_each(|a| walk(a, out)),
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.args().get(i)?.subterm(rest),
        }
    }

    /// Rebuilds this term bottom-up in another algebra, optionally
    /// transforming every node on the way. Used for renaming, derivation and
    /// deserialization, which all need sorts re-inferred from scratch.
    pub fn rebuild<F>(&self, graph: &SortGraph, signature: &Signature, map: &F) -> Result<Term>
    where
        F: Fn(&Term, Vec<Term>) -> Option<Result<Term>>,
    {
        let args = self
            .args()
            .iter()
            .map(|a| a.rebuild(graph, signature, map))
            .collect::<Result<Vec<_>>>()?;
        if let Some(t) = map(self, args.clone()) {
            return t;
        }
        match &self.node {
            Node::Rational(q) => Term::rational(graph, q.clone()),
            Node::Fp64(x) => Term::fp64(graph, *x),
            Node::Var { name, sort } => Term::var(graph, name.clone(), sort.clone()),
            Node::App { op, fixity, .. } => Term::app(graph, signature, op.clone(), *fixity, args),
        }
    }

    /// Re-infers all sorts in the given algebra.
    pub fn reinfer(&self, graph: &SortGraph, signature: &Signature) -> Result<Term> {
        self.rebuild(graph, signature, &|_, _| None)
    }
}
