//! Operator declarations and order-sorted overload resolution.
//!
//! Declarations are grouped by name, fixity and arity. Within a group,
//! the sort of an application is the least result sort among the
//! declarations whose argument sorts lie above the actual argument sorts.
//! When the arguments only agree at the kind level the application is
//! flagged with the result kind instead of being rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, ErrorKind, Result};
use crate::sort::{KindId, SortGraph, SortName};
use crate::term::{Fixity, Sorting};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorDecl {
    pub name: String,
    pub fixity: Fixity,
    pub args: Vec<SortName>,
    pub result: SortName,
}

impl OperatorDecl {
    pub fn new(name: impl Into<String>, fixity: Fixity, args: Vec<SortName>, result: SortName) -> Self {
        OperatorDecl {
            name: name.into(),
            fixity,
            args,
            result,
        }
    }

    pub fn prefix(name: &str, args: &[&str], result: &str) -> Self {
        OperatorDecl::new(
            name,
            Fixity::Prefix,
            args.iter().map(|s| SortName::new(*s)).collect(),
            SortName::new(result),
        )
    }

    pub fn infix(left: &str, name: &str, right: &str, result: &str) -> Self {
        OperatorDecl::new(
            name,
            Fixity::Infix,
            vec![SortName::new(left), SortName::new(right)],
            SortName::new(result),
        )
    }

    pub fn key(&self) -> OpKey {
        OpKey {
            name: self.name.clone(),
            fixity: self.fixity,
            arity: self.args.len(),
        }
    }

    fn validate_shape(&self) -> Result<()> {
        if self.fixity.is_binary() && self.args.len() != 2 {
            return Err(Error::new(ErrorKind::Syntax(format!(
                "{} operator `{}` must have exactly two arguments",
                self.fixity, self.name
            ))));
        }
        if let Some(special) = self.fixity.special_name() {
            if self.name != special {
                return Err(Error::new(ErrorKind::Syntax(format!(
                    "{} operator must be named `{special}`",
                    self.fixity
                ))));
            }
        }
        Ok(())
    }

    fn profile(&self) -> String {
        let args: Vec<&str> = self.args.iter().map(SortName::as_str).collect();
        format!("{}({}) : {}", self.name, args.join(", "), self.result)
    }
}

impl fmt::Display for OperatorDecl {
    /// The author-syntax body of an `@op` command.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.args;
        match self.fixity {
            Fixity::Prefix if a.is_empty() => write!(f, "{} : {}", self.name, self.result),
            Fixity::Prefix => {
                let args: Vec<&str> = a.iter().map(SortName::as_str).collect();
                write!(f, "{}({}) : {}", self.name, args.join(", "), self.result)
            }
            Fixity::Infix => write!(f, "{} {} {} : {}", a[0], self.name, a[1], self.result),
            Fixity::Bracket => write!(f, "{}[{}] : {}", a[0], a[1], self.result),
            Fixity::Subscript => write!(f, "{}_{} : {}", a[0], a[1], self.result),
            Fixity::Superscript => write!(f, "{}^{} : {}", a[0], a[1], self.result),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpKey {
    pub name: String,
    pub fixity: Fixity,
    pub arity: usize,
}

impl fmt::Display for OpKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} operator `{}` with {} argument(s)", self.fixity, self.name, self.arity)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    // each group is kept sorted and free of duplicates
    groups: BTreeMap<OpKey, Vec<OperatorDecl>>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    /// Adds a declaration without checking preregularity. Returns whether the
    /// declaration was new.
    pub fn insert(&mut self, decl: OperatorDecl) -> Result<bool> {
        decl.validate_shape()?;
        let group = self.groups.entry(decl.key()).or_default();
        if let Some(existing) = group.iter().find(|d| d.args == decl.args) {
            if existing.result == decl.result {
                return Ok(false);
            }
            return Err(Error::new(ErrorKind::Conflict(format!(
                "`{}` conflicts with `{}`",
                decl.profile(),
                existing.profile()
            ))));
        }
        let at = group.binary_search(&decl).unwrap_err();
        group.insert(at, decl);
        Ok(true)
    }

    /// Adds a declaration whose sorts must exist in `graph`, then re-checks
    /// preregularity of its group.
    pub fn declare_operator(&self, graph: &SortGraph, decl: OperatorDecl) -> Result<Signature> {
        for s in decl.args.iter().chain(std::iter::once(&decl.result)) {
            graph.check(s)?;
        }
        let key = decl.key();
        let mut next = self.clone();
        next.insert(decl)?;
        next.check_group(graph, &key)?;
        Ok(next)
    }

    pub fn decls(&self) -> impl Iterator<Item = &OperatorDecl> {
        self.groups.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn contains(&self, decl: &OperatorDecl) -> bool {
        self.groups
            .get(&decl.key())
            .is_some_and(|g| g.binary_search(decl).is_ok())
    }

    pub fn group(&self, name: &str, fixity: Fixity, arity: usize) -> &[OperatorDecl] {
        let key = OpKey {
            name: name.to_owned(),
            fixity,
            arity,
        };
        self.groups.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether any declaration has this name and fixity.
    pub fn has_operator(&self, name: &str, fixity: Fixity) -> bool {
        self.groups.keys().any(|k| k.name == name && k.fixity == fixity)
    }

    pub fn has_name(&self, name: &str) -> bool {
        self.groups.keys().any(|k| k.name == name)
    }

    /// Checks that every declared sort exists and every group is preregular.
    pub fn check(&self, graph: &SortGraph) -> Result<()> {
        for d in self.decls() {
            for s in d.args.iter().chain(std::iter::once(&d.result)) {
                graph.check(s)?;
            }
        }
        for key in self.groups.keys() {
            self.check_group(graph, key)?;
        }
        Ok(())
    }

    /// Preregularity of one group: declarations with the same argument kinds
    /// must have results in one kind, and every argument tuple below at least
    /// one declaration must select a unique least result sort.
    pub fn check_group(&self, graph: &SortGraph, key: &OpKey) -> Result<()> {
        let Some(group) = self.groups.get(key) else {
            return Ok(());
        };
        let mut clusters: BTreeMap<Vec<KindId>, Vec<&OperatorDecl>> = BTreeMap::new();
        for d in group {
            let kinds = d.args.iter().map(|s| graph.kind_of(s)).collect::<Result<Vec<_>>>()?;
            clusters.entry(kinds).or_default().push(d);
        }
        for decls in clusters.values() {
            let result_kinds = decls
                .iter()
                .map(|d| graph.kind_of(&d.result))
                .collect::<Result<BTreeSet<_>>>()?;
            if result_kinds.len() > 1 {
                return Err(Error::new(ErrorKind::Preregularity(format!(
                    "{key} has results in different kinds for the same argument kinds"
                ))));
            }
            // per-position candidates: every sort below some declared argument sort
            let candidates: Vec<Vec<&SortName>> = (0..key.arity)
                .map(|i| {
                    let declared: BTreeSet<&SortName> = decls.iter().map(|d| &d.args[i]).collect();
                    let kind = graph.kind_of(declared.iter().next().unwrap()).unwrap();
                    graph
                        .sorts_of_kind(&kind)
                        .filter(|s| declared.iter().any(|d| graph.leq(s, d)))
                        .collect()
                })
                .collect();
            let mut tuple = vec![0usize; key.arity];
            loop {
                let sorts: Vec<&SortName> = tuple.iter().enumerate().map(|(i, &j)| candidates[i][j]).collect();
                let results: Vec<&SortName> = decls
                    .iter()
                    .filter(|d| sorts.iter().zip(&d.args).all(|(s, a)| graph.leq(s, a)))
                    .map(|d| &d.result)
                    .collect();
                if !results.is_empty() && least(graph, &results).is_none() {
                    let shown: Vec<&str> = sorts.iter().map(|s| s.as_str()).collect();
                    let res: Vec<&str> = results.iter().map(|s| s.as_str()).collect();
                    return Err(Error::new(ErrorKind::Preregularity(format!(
                        "{key} applied to ({}) has no least result sort among {{{}}}",
                        shown.join(", "),
                        res.join(", ")
                    ))));
                }
                // odometer increment
                let mut pos = 0;
                loop {
                    if pos == key.arity {
                        break;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < candidates[pos].len() {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == key.arity {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Infers the sort of an application from the sorts (or kinds) of its
    /// arguments.
    pub fn infer_sort(&self, graph: &SortGraph, name: &str, fixity: Fixity, args: &[Sorting]) -> Result<Sorting> {
        let group = self.group(name, fixity, args.len());
        if group.is_empty() {
            return Err(Error::new(ErrorKind::NoSuchOperator(if self.has_operator(name, fixity) {
                format!("{fixity} operator `{name}` does not take {} argument(s)", args.len())
            } else {
                format!("{fixity} operator `{name}`")
            })));
        }
        let arg_kinds = args.iter().map(|a| a.kind(graph)).collect::<Result<Vec<_>>>()?;
        let mut compatible = Vec::new();
        for d in group {
            let mut ok = true;
            for (req, kind) in d.args.iter().zip(&arg_kinds) {
                if graph.kind_of(req)? != *kind {
                    ok = false;
                    break;
                }
            }
            if ok {
                compatible.push(d);
            }
        }
        let Some(first) = compatible.first() else {
            let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            return Err(Error::new(ErrorKind::KindMismatch(format!(
                "`{name}` cannot be applied to arguments of sorts ({})",
                shown.join(", ")
            ))));
        };

        let proper: Option<Vec<&SortName>> = args.iter().map(Sorting::sort).collect();
        if let Some(sorts) = proper {
            let results: Vec<&SortName> = compatible
                .iter()
                .filter(|d| sorts.iter().zip(&d.args).all(|(s, a)| graph.leq(s, a)))
                .map(|d| &d.result)
                .collect();
            if !results.is_empty() {
                return match least(graph, &results) {
                    Some(r) => Ok(Sorting::Sort(r.clone())),
                    None => Err(Error::new(ErrorKind::Preregularity(format!(
                        "no least result sort for `{name}`"
                    )))),
                };
            }
        }
        Ok(Sorting::Kind(graph.kind_of(&first.result)?))
    }

    /// Applies sort and operator renamings to every declaration.
    pub fn map(
        &self,
        sort: impl Fn(&SortName) -> SortName,
        op: impl Fn(&str, Fixity) -> String,
    ) -> Result<Signature> {
        let mut out = Signature::new();
        for d in self.decls() {
            out.insert(OperatorDecl {
                name: op(&d.name, d.fixity),
                fixity: d.fixity,
                args: d.args.iter().map(&sort).collect(),
                result: sort(&d.result),
            })?;
        }
        Ok(out)
    }

    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for d in other.decls() {
            out.insert(d.clone())?;
        }
        Ok(out)
    }
}

fn least<'a>(graph: &SortGraph, sorts: &[&'a SortName]) -> Option<&'a SortName> {
    sorts
        .iter()
        .copied()
        .find(|&cand| sorts.iter().all(|s| graph.leq(cand, s)))
}
