//! The machine view: a rigid XML encoding of a document's formal content.
//! Every context is written with its complete merged algebra, rules and
//! assets, so a file can be loaded without resolving anything; inclusion
//! records are kept as provenance.

use std::fmt::Write;

use roxmltree::Node as XmlNode;

use super::{Computed, Document};
use crate::context::{
    Asset, Context, ContextRef, Equation, InclusionMode, InclusionRecord, Provenance, Renaming,
};
use crate::error::{Error, ErrorKind, Result};
use crate::number::{Fp64, Rational};
use crate::rewrite::{normalize, RewriteRule, DEFAULT_STEP_LIMIT};
use crate::signature::OperatorDecl;
use crate::sort::{SortDecl, SortGraph, SortName};
use crate::term::{Fixity, Node, Term};

pub const XML_NAMESPACE: &str = "urn:leibniz-rw:v1";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn tag(name: &str, attrs: &[(&str, &str)]) -> String {
        let mut s = format!("<{name}");
        for (k, v) in attrs {
            let _ = write!(s, " {k}=\"{}\"", escape(v));
        }
        s
    }

    fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.out.push_str(&Self::tag(name, attrs));
        self.out.push_str("/>\n");
    }

    fn open(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.indent();
        self.out.push_str(&Self::tag(name, attrs));
        self.out.push_str(">\n");
        self.depth += 1;
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        let _ = writeln!(self.out, "</{name}>");
    }

    fn term(&mut self, t: &Term) {
        match t.node() {
            Node::Rational(q) => {
                let (n, d) = (q.numer().to_string(), q.denom().to_string());
                self.empty("rational", &[("num", &n), ("denom", &d)]);
            }
            Node::Fp64(x) => self.empty("fp64", &[("hex-bits", &format!("{:016x}", x.bits()))]),
            Node::Var { name, sort } => self.empty("var-ref", &[("id", name), ("sort", sort.as_str())]),
            Node::App { op, fixity, args } => {
                let attrs = [("op", op.as_str()), ("fixity", fixity.as_str())];
                if args.is_empty() {
                    self.empty("app", &attrs);
                } else {
                    self.open("app", &attrs);
                    for a in args {
                        self.term(a);
                    }
                    self.close("app");
                }
            }
        }
    }

    fn wrapped(&mut self, name: &str, t: &Term) {
        self.open(name, &[]);
        self.term(t);
        self.close(name);
    }

    fn context(&mut self, ctx: &Context, computed: &[&Computed]) {
        self.open("context", &[("name", &ctx.name)]);
        for p in &ctx.provenance {
            match p {
                Provenance::Include(rec) => {
                    let name = rec.mode.as_str();
                    let attrs = [
                        ("document", rec.source.document.as_str()),
                        ("context", rec.source.context.as_str()),
                    ];
                    if rec.renaming.is_empty() {
                        self.empty(name, &attrs);
                        continue;
                    }
                    self.open(name, &attrs);
                    for (from, to) in &rec.renaming.sorts {
                        self.empty("rename", &[("kind", "sort"), ("from", from.as_str()), ("to", to.as_str())]);
                    }
                    for (from, to) in &rec.renaming.ops {
                        self.empty("rename", &[("kind", "op"), ("from", from), ("to", to)]);
                    }
                    self.close(name);
                }
                Provenance::Derived { source, format } => self.empty(
                    "derived-from",
                    &[
                        ("document", &source.document),
                        ("context", &source.context),
                        ("format", format),
                    ],
                ),
            }
        }
        for s in ctx.graph.sorts() {
            self.empty("sort", &[("id", s.as_str())]);
        }
        for (a, b) in ctx.graph.edges() {
            self.empty("subsort", &[("lesser", a.as_str()), ("greater", b.as_str())]);
        }
        for d in ctx.signature.decls() {
            self.open("op", &[("id", &d.name), ("fixity", d.fixity.as_str())]);
            for a in &d.args {
                self.empty("arg", &[("sort", a.as_str())]);
            }
            self.empty("result", &[("sort", d.result.as_str())]);
            self.close("op");
        }
        for (v, s) in &ctx.variables {
            self.empty("var", &[("id", v), ("sort", s.as_str())]);
        }
        for (i, r) in ctx.rules.iter().enumerate() {
            self.open("rule", &[("index", &i.to_string())]);
            self.wrapped("pattern", r.pattern());
            self.wrapped("replacement", r.replacement());
            self.close("rule");
        }
        for (label, asset) in &ctx.assets {
            self.open("asset", &[("label", label)]);
            match asset {
                Asset::Term(t) => self.wrapped("term", t),
                Asset::Equation(e) => {
                    self.open("equation", &[]);
                    self.wrapped("left", &e.left);
                    self.wrapped("right", &e.right);
                    self.close("equation");
                }
            }
            self.close("asset");
        }
        for c in computed {
            self.open("computed", &[("ordinal", &c.ordinal.to_string())]);
            self.wrapped("input", &c.input);
            self.wrapped("normal-form", &c.normal_form);
            self.close("computed");
        }
        self.close("context");
    }
}

/// Serializes the formal content of `doc`. The output depends only on that
/// content, so equal documents give identical bytes.
pub fn emit_xml(doc: &Document) -> Vec<u8> {
    let mut w = Writer {
        out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
        depth: 0,
    };
    let attrs = [("xmlns", XML_NAMESPACE), ("name", doc.name.as_str())];
    if doc.contexts.is_empty() {
        w.empty("leibniz-document", &attrs);
    } else {
        w.open("leibniz-document", &attrs);
        for ctx in &doc.contexts {
            let computed: Vec<&Computed> = doc.computed_in(&ctx.name).collect();
            w.context(ctx, &computed);
        }
        w.close("leibniz-document");
    }
    w.out.into_bytes()
}

fn schema(msg: impl Into<String>) -> Error {
    Error::new(ErrorKind::Schema(msg.into()))
}

fn elements<'a, 'i>(node: XmlNode<'a, 'i>) -> Result<Vec<XmlNode<'a, 'i>>> {
    let mut out = Vec::new();
    for child in node.children() {
        if child.is_element() {
            if child.tag_name().namespace() != Some(XML_NAMESPACE) {
                return Err(schema(format!("element `{}` is outside the Leibniz namespace", child.tag_name().name())));
            }
            out.push(child);
        } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
            return Err(schema(format!("unexpected text inside `{}`", node.tag_name().name())));
        }
    }
    Ok(out)
}

fn attr<'a>(node: XmlNode<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name)
        .ok_or_else(|| schema(format!("`{}` lacks attribute `{name}`", node.tag_name().name())))
}

fn single_term(node: XmlNode<'_, '_>, ctx: &Context) -> Result<Term> {
    match elements(node)?.as_slice() {
        [one] => decode_term(*one, ctx),
        _ => Err(schema(format!("`{}` must contain exactly one term", node.tag_name().name()))),
    }
}

fn decode_term(node: XmlNode<'_, '_>, ctx: &Context) -> Result<Term> {
    let g = &ctx.graph;
    match node.tag_name().name() {
        "rational" => {
            let (n, d) = (attr(node, "num")?, attr(node, "denom")?);
            let parse = |s: &str| {
                rug::Integer::from_str_radix(s, 10).map_err(|_| schema(format!("invalid integer `{s}`")))
            };
            let (n, d) = (parse(n)?, parse(d)?);
            if d <= 0 {
                return Err(schema("denominator must be positive"));
            }
            let q = Rational::new(n, d).expect("nonzero denominator");
            if q.numer().to_string() != attr(node, "num")? || q.denom().to_string() != attr(node, "denom")? {
                return Err(schema("rational is not in lowest terms"));
            }
            Term::rational(g, q)
        }
        "fp64" => {
            let hex = attr(node, "hex-bits")?;
            let bits = u64::from_str_radix(hex, 16)
                .ok()
                .filter(|_| hex.len() == 16)
                .ok_or_else(|| schema(format!("invalid hex-bits `{hex}`")))?;
            let x = Fp64::from_bits(bits);
            if x.bits() != bits {
                return Err(schema(format!("non-canonical NaN `{hex}`")));
            }
            Term::fp64(g, x)
        }
        "var-ref" => Term::var(g, attr(node, "id")?, SortName::new(attr(node, "sort")?)),
        "app" => {
            let fixity = Fixity::parse(attr(node, "fixity")?).ok_or_else(|| schema("invalid fixity"))?;
            let args = elements(node)?
                .into_iter()
                .map(|c| decode_term(c, ctx))
                .collect::<Result<Vec<_>>>()?;
            Term::app(g, &ctx.signature, attr(node, "op")?, fixity, args)
        }
        other => Err(schema(format!("`{other}` is not a term"))),
    }
}

/// Reads a machine view and re-checks everything in it, including that
/// every stored normal form is what normalization actually produces.
pub fn load_xml(bytes: &[u8]) -> Result<Document> {
    let text = std::str::from_utf8(bytes).map_err(|e| schema(format!("not UTF-8: {e}")))?;
    let xml = roxmltree::Document::parse(text).map_err(|e| schema(format!("malformed XML: {e}")))?;
    let root = xml.root_element();
    if root.tag_name().name() != "leibniz-document" || root.tag_name().namespace() != Some(XML_NAMESPACE) {
        return Err(schema("root element must be `leibniz-document` in the Leibniz namespace"));
    }
    let mut doc = Document::empty(attr(root, "name")?);
    for node in elements(root)? {
        if node.tag_name().name() != "context" {
            return Err(schema(format!("unexpected `{}` in document", node.tag_name().name())));
        }
        let (ctx, computed) = decode_context(node)?;
        doc.add_context(ctx)?;
        doc.computed.extend(computed);
    }
    Ok(doc)
}

fn decode_context(node: XmlNode<'_, '_>) -> Result<(Context, Vec<Computed>)> {
    let mut ctx = Context::empty(attr(node, "name")?);
    let children = elements(node)?;
    let mut sort_decls = Vec::new();
    for c in &children {
        match c.tag_name().name() {
            "use" | "extend" => {
                let mode = if c.tag_name().name() == "use" { InclusionMode::Use } else { InclusionMode::Extend };
                let mut renaming = Renaming::default();
                for r in elements(*c)? {
                    if r.tag_name().name() != "rename" {
                        return Err(schema("inclusions may only contain `rename`"));
                    }
                    let (from, to) = (attr(r, "from")?, attr(r, "to")?);
                    match attr(r, "kind")? {
                        "sort" => {
                            renaming.sorts.insert(SortName::new(from), SortName::new(to));
                        }
                        "op" => {
                            renaming.ops.insert(from.into(), to.into());
                        }
                        k => return Err(schema(format!("invalid rename kind `{k}`"))),
                    }
                }
                ctx.provenance.push(Provenance::Include(InclusionRecord {
                    source: ContextRef::new(attr(*c, "document")?, attr(*c, "context")?),
                    mode,
                    renaming,
                }));
            }
            "derived-from" => ctx.provenance.push(Provenance::Derived {
                source: ContextRef::new(attr(*c, "document")?, attr(*c, "context")?),
                format: attr(*c, "format")?.into(),
            }),
            "sort" => sort_decls.push(SortDecl::Sort(SortName::new(attr(*c, "id")?))),
            "subsort" => sort_decls.push(SortDecl::Subsort(
                SortName::new(attr(*c, "lesser")?),
                SortName::new(attr(*c, "greater")?),
            )),
            _ => {}
        }
    }
    ctx.graph = SortGraph::build(sort_decls)?;
    for c in &children {
        match c.tag_name().name() {
            "op" => {
                let fixity = Fixity::parse(attr(*c, "fixity")?).ok_or_else(|| schema("invalid fixity"))?;
                let parts = elements(*c)?;
                let Some((result, args)) = parts.split_last() else {
                    return Err(schema("`op` lacks a result"));
                };
                if result.tag_name().name() != "result" || args.iter().any(|a| a.tag_name().name() != "arg") {
                    return Err(schema("`op` must hold `arg` elements followed by one `result`"));
                }
                let args = args
                    .iter()
                    .map(|a| attr(*a, "sort").map(SortName::new))
                    .collect::<Result<Vec<_>>>()?;
                let decl = OperatorDecl::new(attr(*c, "id")?, fixity, args, SortName::new(attr(*result, "sort")?));
                if !ctx.signature.insert(decl)? {
                    return Err(schema("duplicate operator declaration"));
                }
            }
            "var" => {
                let id = attr(*c, "id")?;
                if ctx.variables.insert(id.into(), SortName::new(attr(*c, "sort")?)).is_some() {
                    return Err(schema(format!("variable `{id}` is declared twice")));
                }
            }
            _ => {}
        }
    }
    ctx.signature.check(&ctx.graph)?;
    ctx.validate()?;

    let mut computed = Vec::new();
    for c in &children {
        match c.tag_name().name() {
            "rule" => {
                if attr(*c, "index")? != ctx.rules.len().to_string() {
                    return Err(schema("rule indexes must count up from 0"));
                }
                let pattern = single_term(only_child_named(*c, "pattern", 0)?, &ctx)?;
                let replacement = single_term(only_child_named(*c, "replacement", 1)?, &ctx)?;
                let rule = RewriteRule::new(&ctx.graph, pattern, replacement)?;
                ctx.rules.push(rule);
            }
            "asset" => {
                let label = attr(*c, "label")?;
                let body = match elements(*c)?.as_slice() {
                    [one] => *one,
                    _ => return Err(schema("`asset` must hold one `term` or `equation`")),
                };
                let asset = match body.tag_name().name() {
                    "term" => Asset::Term(single_term(body, &ctx)?),
                    "equation" => Asset::Equation(Equation::new(
                        &ctx.graph,
                        single_term(only_child_named(body, "left", 0)?, &ctx)?,
                        single_term(only_child_named(body, "right", 1)?, &ctx)?,
                    )?),
                    other => return Err(schema(format!("`{other}` is not an asset"))),
                };
                if ctx.assets.insert(label.into(), asset).is_some() {
                    return Err(Error::new(ErrorKind::DuplicateLabel(label.into())));
                }
            }
            "computed" => {
                let ordinal: usize = attr(*c, "ordinal")?
                    .parse()
                    .map_err(|_| schema("invalid ordinal"))?;
                if ordinal != computed.len() + 1 {
                    return Err(schema("computed ordinals must count up from 1"));
                }
                let input = single_term(only_child_named(*c, "input", 0)?, &ctx)?;
                let normal_form = single_term(only_child_named(*c, "normal-form", 1)?, &ctx)?;
                computed.push(Computed {
                    context: ctx.name.clone(),
                    ordinal,
                    input,
                    normal_form,
                });
            }
            "use" | "extend" | "derived-from" | "sort" | "subsort" | "op" | "var" => {}
            other => return Err(schema(format!("unexpected `{other}` in context"))),
        }
    }
    ctx.validate()?;
    for c in &computed {
        let (nf, _) = normalize(&ctx, &c.input, DEFAULT_STEP_LIMIT).map_err(|e| e.into_error())?;
        if nf != c.normal_form {
            return Err(schema(format!(
                "computed result {} of `{}` is not the normal form of its input",
                c.ordinal, ctx.name
            )));
        }
    }
    Ok((ctx, computed))
}

fn only_child_named<'a, 'i>(node: XmlNode<'a, 'i>, name: &str, index: usize) -> Result<XmlNode<'a, 'i>> {
    let children = elements(node)?;
    match children.get(index) {
        Some(c) if c.tag_name().name() == name && children.len() == 2 => Ok(*c),
        _ => Err(schema(format!("`{}` must hold `{name}` at position {}", node.tag_name().name(), index + 1))),
    }
}
