//! Contexts: an order-sorted algebra together with its rewrite rules and
//! labeled assets, assembled from declarations and included contexts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, ErrorKind, Result, SourcePos};
use crate::rewrite::RewriteRule;
use crate::signature::{OperatorDecl, Signature};
use crate::sort::{SortDecl, SortGraph, SortName};
use crate::syntax::{self, Scope};
use crate::term::{Fixity, Node, Term};

/// A context as seen from another document: `document/context`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextRef {
    pub document: String,
    pub context: String,
}

impl ContextRef {
    pub fn new(document: impl Into<String>, context: impl Into<String>) -> Self {
        ContextRef {
            document: document.into(),
            context: context.into(),
        }
    }
}

impl fmt::Display for ContextRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.document, self.context)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InclusionMode {
    /// Imports the algebra and the rules.
    Use,
    /// Additionally imports variables and assets.
    Extend,
}

impl InclusionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InclusionMode::Use => "use",
            InclusionMode::Extend => "extend",
        }
    }
}

/// Sort and operator renamings applied to an included context.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Renaming {
    pub sorts: BTreeMap<SortName, SortName>,
    pub ops: BTreeMap<String, String>,
}

impl Renaming {
    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty() && self.ops.is_empty()
    }

    pub fn sort(&self, s: &SortName) -> SortName {
        self.sorts.get(s).cloned().unwrap_or_else(|| s.clone())
    }

    pub fn op(&self, name: &str) -> String {
        self.ops.get(name).cloned().unwrap_or_else(|| name.to_owned())
    }

    /// Classifies author-level `from → to` pairs as sort or operator
    /// renamings by looking the names up in `source`.
    pub fn resolve(source: &Context, pairs: &[(String, String)]) -> Result<Renaming> {
        let mut r = Renaming::default();
        for (from, to) in pairs {
            let sort = SortName::new(from.as_str());
            let previous = if source.graph.contains(&sort) {
                r.sorts.insert(sort, SortName::new(to.as_str())).is_some()
            } else if source.signature.has_name(from) {
                r.ops.insert(from.clone(), to.clone()).is_some()
            } else {
                return Err(Error::new(ErrorKind::RenameCollision(format!(
                    "`{from}` is neither a sort nor an operator of `{}`",
                    source.name
                ))));
            };
            if previous {
                return Err(Error::new(ErrorKind::RenameCollision(format!("`{from}` is renamed twice"))));
            }
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionRecord {
    pub source: ContextRef,
    pub mode: InclusionMode,
    pub renaming: Renaming,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Include(InclusionRecord),
    /// Mechanically lowered from `source` to the named floating-point format.
    Derived { source: ContextRef, format: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub left: Term,
    pub right: Term,
}

impl Equation {
    pub fn new(graph: &SortGraph, left: Term, right: Term) -> Result<Equation> {
        let (lk, rk) = (left.sorting().kind(graph)?, right.sorting().kind(graph)?);
        if lk != rk {
            return Err(Error::new(ErrorKind::KindMismatch(format!(
                "the sides of `{}` belong to kinds {lk} and {rk}",
                syntax::render_equation(&left, &right)
            ))));
        }
        Ok(Equation { left, right })
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::render_equation(&self.left, &self.right))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Asset {
    Term(Term),
    Equation(Equation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub name: String,
    pub graph: SortGraph,
    pub signature: Signature,
    pub variables: BTreeMap<String, SortName>,
    pub rules: Vec<RewriteRule>,
    pub assets: BTreeMap<String, Asset>,
    pub provenance: Vec<Provenance>,
}

impl Context {
    pub fn empty(name: impl Into<String>) -> Context {
        Context {
            name: name.into(),
            graph: SortGraph::new(),
            signature: Signature::new(),
            variables: BTreeMap::new(),
            rules: Vec::new(),
            assets: BTreeMap::new(),
            provenance: Vec::new(),
        }
    }

    pub fn scope(&self) -> Scope<'_> {
        Scope {
            graph: &self.graph,
            signature: &self.signature,
            variables: &self.variables,
        }
    }

    pub fn parse_term(&self, text: &str) -> Result<Term> {
        syntax::parse_term(text, &self.scope())
    }

    pub fn parse_rule(&self, text: &str) -> Result<RewriteRule> {
        let (p, r) = syntax::parse_rule(text, &self.scope())?;
        RewriteRule::new(&self.graph, p, r)
    }

    pub fn parse_equation(&self, text: &str) -> Result<Equation> {
        let (l, r) = syntax::parse_equation(text, &self.scope())?;
        Equation::new(&self.graph, l, r)
    }

    pub fn lookup_asset(&self, label: &str) -> Result<&Asset> {
        self.assets
            .get(label)
            .ok_or_else(|| Error::new(ErrorKind::UnknownLabel(label.to_owned())))
    }

    /// Re-infers a term in this context's algebra after mapping its
    /// variable sorts and operator names.
    pub(crate) fn import_term(
        &self,
        t: &Term,
        sort: &dyn Fn(&SortName) -> SortName,
        op: &dyn Fn(&str) -> String,
    ) -> Result<Term> {
        let (g, sig) = (&self.graph, &self.signature);
        t.rebuild(g, sig, &|node: &Term, args: Vec<Term>| match node.node() {
            Node::Var { name, sort: s } => Some(Term::var(g, name.clone(), sort(s))),
            Node::App { op: name, fixity, .. } => Some(Term::app(g, sig, op(name), *fixity, args)),
            _ => None,
        })
    }

    pub(crate) fn import_rule(
        &self,
        rule: &RewriteRule,
        sort: &dyn Fn(&SortName) -> SortName,
        op: &dyn Fn(&str) -> String,
    ) -> Result<RewriteRule> {
        RewriteRule::new(
            &self.graph,
            self.import_term(rule.pattern(), sort, op)?,
            self.import_term(rule.replacement(), sort, op)?,
        )
    }

    pub(crate) fn import_asset(
        &self,
        asset: &Asset,
        sort: &dyn Fn(&SortName) -> SortName,
        op: &dyn Fn(&str) -> String,
    ) -> Result<Asset> {
        Ok(match asset {
            Asset::Term(t) => Asset::Term(self.import_term(t, sort, op)?),
            Asset::Equation(e) => Asset::Equation(Equation::new(
                &self.graph,
                self.import_term(&e.left, sort, op)?,
                self.import_term(&e.right, sort, op)?,
            )?),
        })
    }

    /// A copy of this context with sorts and operators renamed.
    pub fn renamed(&self, r: &Renaming) -> Result<Context> {
        check_renaming(
            r.sorts.iter().map(|(a, b)| (a.as_str(), b.as_str())),
            |s| self.graph.contains(&SortName::new(s)),
            "sort",
        )?;
        check_renaming(
            r.ops.iter().map(|(a, b)| (a.as_str(), b.as_str())),
            |o| self.signature.has_name(o),
            "operator",
        )?;
        let sort = |s: &SortName| r.sort(s);
        let op = |o: &str| r.op(o);
        let mut out = Context::empty(self.name.clone());
        out.graph = self.graph.map_sorts(sort)?;
        out.signature = self.signature.map(sort, |o, _| op(o))?;
        out.variables = self.variables.iter().map(|(v, s)| (v.clone(), sort(s))).collect();
        for rule in &self.rules {
            let rule = out.import_rule(rule, &sort, &op)?;
            out.rules.push(rule);
        }
        for (label, asset) in &self.assets {
            let asset = out.import_asset(asset, &sort, &op)?;
            out.assets.insert(label.clone(), asset);
        }
        out.provenance = self.provenance.clone();
        Ok(out)
    }

    /// Re-checks every invariant, for contexts that come from untrusted data.
    pub fn validate(&self) -> Result<()> {
        self.signature.check(&self.graph)?;
        for (v, s) in &self.variables {
            self.graph.check(s)?;
            check_variable_name(&self.signature, v)?;
        }
        let id_sort = |s: &SortName| s.clone();
        let id_op = |o: &str| o.to_owned();
        for rule in &self.rules {
            let again = self.import_rule(rule, &id_sort, &id_op)?;
            if &again != rule {
                return Err(Error::new(ErrorKind::Schema(format!("rule `{rule}` carries inconsistent sorts"))));
            }
        }
        for (label, asset) in &self.assets {
            let again = self.import_asset(asset, &id_sort, &id_op)?;
            if &again != asset {
                return Err(Error::new(ErrorKind::Schema(format!("asset `{label}` carries inconsistent sorts"))));
            }
        }
        Ok(())
    }
}

fn check_renaming<'a>(
    pairs: impl Iterator<Item = (&'a str, &'a str)> + Clone,
    exists: impl Fn(&str) -> bool,
    what: &str,
) -> Result<()> {
    let collision = |msg: String| Err(Error::new(ErrorKind::RenameCollision(msg)));
    let domain: BTreeSet<&str> = pairs.clone().map(|(a, _)| a).collect();
    let mut targets = BTreeSet::new();
    for (from, to) in pairs {
        if !exists(from) {
            return collision(format!("{what} `{from}` does not exist"));
        }
        if !targets.insert(to) {
            return collision(format!("two {what}s are renamed to `{to}`"));
        }
        if from != to && exists(to) && !domain.contains(to) {
            return collision(format!("{what} `{from}` is renamed to the existing {what} `{to}`"));
        }
    }
    Ok(())
}

fn check_variable_name(signature: &Signature, name: &str) -> Result<()> {
    if signature.group(name, Fixity::Prefix, 0).is_empty() {
        Ok(())
    } else {
        Err(Error::new(ErrorKind::VariableCollision(name.to_owned())))
    }
}

/// A context under construction. Inclusions go first, then the algebra,
/// then [`ContextBuilder::finish_algebra`], then rules and assets.
#[derive(Debug, Clone)]
pub struct ContextBuilder {
    ctx: Context,
    plain_sorts: BTreeSet<SortName>,
    renamed_sorts: BTreeSet<SortName>,
    plain_ops: BTreeSet<String>,
    renamed_ops: BTreeSet<String>,
}

impl ContextBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ContextBuilder {
            ctx: Context::empty(name),
            plain_sorts: BTreeSet::new(),
            renamed_sorts: BTreeSet::new(),
            plain_ops: BTreeSet::new(),
            renamed_ops: BTreeSet::new(),
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn push_provenance(&mut self, p: Provenance) {
        self.ctx.provenance.push(p);
    }

    /// Merges `source` (renamed by `renaming`) into the context. Rules and
    /// assets are re-inferred later, once the whole algebra is known.
    pub fn include(
        &mut self,
        source_ref: ContextRef,
        source: &Context,
        mode: InclusionMode,
        renaming: &Renaming,
    ) -> Result<()> {
        for p in &self.ctx.provenance {
            if let Provenance::Include(rec) = p {
                if rec.source == source_ref && rec.renaming != *renaming {
                    return Err(Error::new(ErrorKind::Conflict(format!(
                        "`{source_ref}` is included twice with different renamings"
                    ))));
                }
            }
        }
        let renamed;
        let src = if renaming.is_empty() {
            source
        } else {
            renamed = source.renamed(renaming)?;
            &renamed
        };
        for s in source.graph.sorts() {
            match renaming.sorts.get(s) {
                Some(t) => self.renamed_sorts.insert(t.clone()),
                None => self.plain_sorts.insert(s.clone()),
            };
        }
        for d in source.signature.decls() {
            match renaming.ops.get(&d.name) {
                Some(t) => self.renamed_ops.insert(t.clone()),
                None => self.plain_ops.insert(d.name.clone()),
            };
        }
        let ctx = &mut self.ctx;
        ctx.graph = ctx.graph.merge(&src.graph)?;
        ctx.signature = ctx.signature.merge(&src.signature)?;
        ctx.rules.extend(src.rules.iter().cloned());
        if mode == InclusionMode::Extend {
            for (v, s) in &src.variables {
                self.declare_var(v, s.clone())?;
            }
            for (label, asset) in &src.assets {
                match self.ctx.assets.get(label) {
                    Some(existing) if existing == asset => {}
                    Some(_) => return Err(Error::new(ErrorKind::DuplicateLabel(label.clone()))),
                    None => {
                        self.ctx.assets.insert(label.clone(), asset.clone());
                    }
                }
            }
        }
        self.ctx.provenance.push(Provenance::Include(InclusionRecord {
            source: source_ref,
            mode,
            renaming: renaming.clone(),
        }));
        Ok(())
    }

    pub fn declare_sorts(&mut self, decls: impl IntoIterator<Item = SortDecl>) -> Result<()> {
        let own = SortGraph::build(decls)?;
        self.plain_sorts.extend(own.sorts().cloned());
        self.ctx.graph = self.ctx.graph.merge(&own)?;
        Ok(())
    }

    /// Adds an operator declaration; preregularity is checked by
    /// [`ContextBuilder::finish_algebra`].
    pub fn declare_op(&mut self, decl: OperatorDecl) -> Result<()> {
        self.plain_ops.insert(decl.name.clone());
        self.ctx.signature.insert(decl)?;
        Ok(())
    }

    pub fn declare_var(&mut self, name: &str, sort: SortName) -> Result<()> {
        match self.ctx.variables.get(name) {
            Some(s) if *s == sort => Ok(()),
            Some(s) => Err(Error::new(ErrorKind::Conflict(format!(
                "variable `{name}` is declared with sorts {s} and {sort}"
            )))),
            None => {
                self.ctx.variables.insert(name.to_owned(), sort);
                Ok(())
            }
        }
    }

    /// Checks the complete algebra and re-infers the included rules and
    /// assets in it. Rules reached along several inclusion paths are kept
    /// once, at their first position.
    pub fn finish_algebra(&mut self) -> Result<()> {
        if let Some(s) = self.plain_sorts.intersection(&self.renamed_sorts).next() {
            return Err(Error::new(ErrorKind::RenameCollision(format!(
                "sort `{s}` arrives both through a renaming and under its own name"
            ))));
        }
        if let Some(o) = self.plain_ops.intersection(&self.renamed_ops).next() {
            return Err(Error::new(ErrorKind::RenameCollision(format!(
                "operator `{o}` arrives both through a renaming and under its own name"
            ))));
        }
        let ctx = &mut self.ctx;
        ctx.signature.check(&ctx.graph)?;
        for (v, s) in &ctx.variables {
            ctx.graph.check(s)?;
            check_variable_name(&ctx.signature, v)?;
        }
        let id_sort = |s: &SortName| s.clone();
        let id_op = |o: &str| o.to_owned();
        let mut rules: Vec<RewriteRule> = Vec::with_capacity(ctx.rules.len());
        for rule in &ctx.rules {
            let rule = ctx.import_rule(rule, &id_sort, &id_op)?;
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
        let mut assets = BTreeMap::new();
        for (label, asset) in &ctx.assets {
            assets.insert(label.clone(), ctx.import_asset(asset, &id_sort, &id_op)?);
        }
        ctx.rules = rules;
        ctx.assets = assets;
        Ok(())
    }

    pub fn add_rule(&mut self, rule: RewriteRule) {
        self.ctx.rules.push(rule);
    }

    pub fn add_asset(&mut self, label: &str, asset: Asset) -> Result<()> {
        if self.ctx.assets.contains_key(label) {
            return Err(Error::new(ErrorKind::DuplicateLabel(label.to_owned())));
        }
        self.ctx.assets.insert(label.to_owned(), asset);
        Ok(())
    }

    pub fn finish(self) -> Context {
        self.ctx
    }
}

/// One declaration of a context body, as written by an author.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Include {
        mode: InclusionMode,
        reference: String,
        renames: Vec<(String, String)>,
    },
    Sort(SortDecl),
    Op(OperatorDecl),
    Var { name: String, sort: SortName },
    /// `pattern ⇒ replacement`, parsed once the algebra is complete.
    Rule(String),
    Term { label: String, text: String },
    Equation { label: String, text: String },
}

/// A value with the source position of its text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located<T> {
    pub value: T,
    pub pos: SourcePos,
}

impl<T> Located<T> {
    pub fn new(value: T, pos: SourcePos) -> Self {
        Located { value, pos }
    }
}

/// Resolves the textual reference of a `@use` or `@extend`.
pub trait Resolver {
    fn resolve(&mut self, reference: &str) -> Result<(ContextRef, Context)>;
}

impl<F> Resolver for F
where
    F: FnMut(&str) -> Result<(ContextRef, Context)>,
{
    fn resolve(&mut self, reference: &str) -> Result<(ContextRef, Context)> {
        self(reference)
    }
}

/// Builds a context from its declarations. Sort, operator and variable
/// declarations may appear in any order; inclusions apply in textual order,
/// and rules keep their textual order after all included rules.
pub fn elaborate_context(name: &str, decls: &[Located<Declaration>], resolver: &mut dyn Resolver) -> Result<Context> {
    let mut b = ContextBuilder::new(name);
    let mut first_include = None;
    for d in decls {
        if let Declaration::Include {
            mode,
            reference,
            renames,
        } = &d.value
        {
            first_include.get_or_insert(d.pos);
            let at = |e: Error| e.or_at(d.pos);
            let (source_ref, source) = resolver.resolve(reference).map_err(at)?;
            let renaming = Renaming::resolve(&source, renames).map_err(at)?;
            b.include(source_ref, &source, *mode, &renaming).map_err(at)?;
        }
    }

    let sort_decls: Vec<&Located<Declaration>> = decls
        .iter()
        .filter(|d| matches!(d.value, Declaration::Sort(_)))
        .collect();
    if let Err(e) = b.declare_sorts(sort_decls.iter().map(|d| match &d.value {
        Declaration::Sort(s) => s.clone(),
        _ => unreachable!(),
    })) {
        // report at the declaration that closes the cycle, if any
        let pos = sort_decls
            .iter()
            .find(|d| match (&d.value, &e.kind) {
                (Declaration::Sort(SortDecl::Subsort(a, _)), ErrorKind::Cycle(c)) => c.contains(a),
                _ => false,
            })
            .or(sort_decls.first())
            .map_or(SourcePos::START, |d| d.pos);
        return Err(e.or_at(pos));
    }

    for d in decls {
        let at = |e: Error| e.or_at(d.pos);
        match &d.value {
            Declaration::Op(op) => b.declare_op(op.clone()).map_err(at)?,
            Declaration::Var { name, sort } => b.declare_var(name, sort.clone()).map_err(at)?,
            _ => {}
        }
    }
    // attribute algebra errors to the first own declaration involved
    for d in decls {
        let ctx = b.context();
        let result = match &d.value {
            Declaration::Op(op) => op
                .args
                .iter()
                .chain(std::iter::once(&op.result))
                .try_for_each(|s| ctx.graph.check(s))
                .and_then(|_| ctx.signature.check_group(&ctx.graph, &op.key())),
            Declaration::Var { name, sort } => ctx
                .graph
                .check(sort)
                .and_then(|_| check_variable_name(&ctx.signature, name)),
            _ => Ok(()),
        };
        result.map_err(|e| e.or_at(d.pos))?;
    }
    b.finish_algebra()
        .map_err(|e| e.or_at(first_include.unwrap_or(SourcePos::START)))?;

    for d in decls {
        let ctx = b.context();
        let rebase = |e: Error| e.rebase(d.pos);
        match &d.value {
            Declaration::Rule(text) => {
                let rule = ctx.parse_rule(text).map_err(rebase)?;
                b.add_rule(rule);
            }
            Declaration::Term { label, text } => {
                let t = ctx.parse_term(text).map_err(rebase)?;
                b.add_asset(label, Asset::Term(t)).map_err(|e| e.or_at(d.pos))?;
            }
            Declaration::Equation { label, text } => {
                let eq = ctx.parse_equation(text).map_err(rebase)?;
                b.add_asset(label, Asset::Equation(eq)).map_err(|e| e.or_at(d.pos))?;
            }
            _ => {}
        }
    }
    Ok(b.finish())
}
