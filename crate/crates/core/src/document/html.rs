//! The reader view. Authored code sits in blue `leibniz-code` spans whose
//! text is the canonical rendering (it parses back in its context);
//! computed results sit in green `leibniz-computed` spans.

use std::fmt::Write;

use super::{Block, Computed, Document, Item};
use crate::context::{Asset, Context, Declaration, Provenance};
use crate::signature::OperatorDecl;
use crate::sort::SortDecl;
use crate::syntax::{render_equation, render_rule, render_term};

const STYLE: &str = "body { font-family: serif; max-width: 48em; margin: 2em auto; line-height: 1.5; }
.leibniz-code { background: #dde8ff; font-family: monospace; padding: 0 0.2em; }
.leibniz-computed { background: #d8f5d0; font-family: monospace; padding: 0 0.2em; }
section.leibniz-context { border-left: 3px solid #8aa6e0; padding-left: 1em; margin: 1em 0; }
section.leibniz-derived { border-left-color: #6fbf5a; background: #f1fbee; }
ul.leibniz-listing { list-style: none; padding-left: 0; }
";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

struct Html {
    out: String,
}

impl Html {
    fn span(&mut self, class: &str, command: &str, context: &str, text: &str) {
        let _ = write!(
            self.out,
            "<span class=\"{class}\" data-leibniz=\"{command}\" data-context=\"{}\">{}</span>",
            escape(context),
            escape(text)
        );
    }

    fn narrative(&mut self, text: &str) {
        for para in text.split("\n\n").map(str::trim).filter(|p| !p.is_empty()) {
            let _ = writeln!(self.out, "<p>{}</p>", escape(para));
        }
    }

    fn computed(&mut self, ctx: &str, c: &Computed) {
        self.out.push_str("<p class=\"leibniz-eval\">");
        self.span("leibniz-code", "eval", ctx, &render_term(&c.input));
        self.out.push_str(" ⇒ ");
        self.span("leibniz-computed", "result", ctx, &render_term(&c.normal_form));
        self.out.push_str("</p>\n");
    }

    fn code_line(&mut self, class: &str, command: &str, ctx: &str, text: &str) {
        self.out.push_str("<li>");
        self.span(class, command, ctx, text);
        self.out.push_str("</li>\n");
    }

    /// Lists the complete formal content of a context, for contexts that
    /// have no author source.
    fn listing(&mut self, doc: &Document, ctx: &Context, class: &str) {
        let name = &ctx.name;
        self.out.push_str("<ul class=\"leibniz-listing\">\n");
        for p in &ctx.provenance {
            match p {
                Provenance::Include(rec) => {
                    let text = include_text(&rec.source.to_string(), &rename_pairs(&rec.renaming));
                    self.code_line(class, rec.mode.as_str(), name, &text);
                }
                Provenance::Derived { source, format } => {
                    self.code_line(class, "derived-from", name, &format!("{source} ({format})"));
                }
            }
        }
        for s in ctx.graph.sorts() {
            self.code_line(class, "sort", name, s.as_str());
        }
        for (a, b) in ctx.graph.edges() {
            self.code_line(class, "sort", name, &format!("{a} ⊆ {b}"));
        }
        for d in ctx.signature.decls() {
            self.code_line(class, "op", name, &d.to_string());
        }
        for (v, s) in &ctx.variables {
            self.code_line(class, "var", name, &format!("{v} : {s}"));
        }
        for r in &ctx.rules {
            self.code_line(class, "rule", name, &r.to_string());
        }
        for (label, asset) in &ctx.assets {
            let (command, text) = asset_text(label, asset);
            self.code_line(class, command, name, &text);
        }
        self.out.push_str("</ul>\n");
        for c in doc.computed_in(name) {
            self.computed(name, c);
        }
    }
}

fn rename_pairs(r: &crate::context::Renaming) -> Vec<(String, String)> {
    r.sorts
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .chain(r.ops.iter().map(|(a, b)| (a.clone(), b.clone())))
        .collect()
}

fn include_text(reference: &str, renames: &[(String, String)]) -> String {
    if renames.is_empty() {
        return reference.to_owned();
    }
    let items: Vec<String> = renames.iter().map(|(a, b)| format!("{a} → {b}")).collect();
    format!("{reference} | rename: {}", items.join(", "))
}

fn asset_text(label: &str, asset: &Asset) -> (&'static str, String) {
    match asset {
        Asset::Term(t) => ("term", format!("{label} : {}", render_term(t))),
        Asset::Equation(e) => ("equation", format!("{label} : {}", render_equation(&e.left, &e.right))),
    }
}

fn sort_decl_text(d: &SortDecl) -> String {
    match d {
        SortDecl::Sort(s) => s.to_string(),
        SortDecl::Subsort(a, b) => format!("{a} ⊆ {b}"),
    }
}

fn op_text(d: &OperatorDecl) -> String {
    d.to_string()
}

/// Renders the reader view. Byte output depends only on the document.
pub fn render_html(doc: &Document) -> Vec<u8> {
    let mut h = Html { out: String::new() };
    let _ = write!(
        h.out,
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>\n{STYLE}</style>\n</head>\n<body>\n",
        escape(&doc.name)
    );
    let mut shown = Vec::new();
    if let Some(ast) = &doc.source {
        for block in &ast.blocks {
            match block {
                Block::Narrative(text) => h.narrative(text),
                Block::Import(i) => {
                    h.out.push_str("<p>");
                    h.span("leibniz-code", "import", "", &format!("{} = {}", i.name, i.path));
                    h.out.push_str("</p>\n");
                }
                Block::Context(block) => {
                    let Some(ctx) = doc.context(&block.name) else { continue };
                    shown.push(ctx.name.clone());
                    let _ = writeln!(
                        h.out,
                        "<section class=\"leibniz-context\" id=\"{0}\">\n<h2>Context {0}</h2>",
                        escape(&ctx.name)
                    );
                    let mut evals = doc.computed_in(&ctx.name);
                    for item in &block.body {
                        match item {
                            Item::Narrative(text) => h.narrative(text),
                            Item::Decl(d) => {
                                h.out.push_str("<p>");
                                let (command, text) = declaration_text(ctx, &d.value);
                                h.span("leibniz-code", command, &ctx.name, &text);
                                h.out.push_str("</p>\n");
                            }
                            Item::Eval(_) => {
                                if let Some(c) = evals.next() {
                                    h.computed(&ctx.name, c);
                                }
                            }
                        }
                    }
                    h.out.push_str("</section>\n");
                }
            }
        }
    }
    for ctx in doc.contexts.iter().filter(|c| !shown.contains(&c.name)) {
        let derived = ctx.provenance.iter().any(|p| matches!(p, Provenance::Derived { .. }));
        let (section, class) = if derived {
            ("leibniz-context leibniz-derived", "leibniz-computed")
        } else {
            ("leibniz-context", "leibniz-code")
        };
        let _ = writeln!(
            h.out,
            "<section class=\"{section}\" id=\"{0}\">\n<h2>Context {0}</h2>",
            escape(&ctx.name)
        );
        h.listing(doc, ctx, class);
        h.out.push_str("</section>\n");
    }
    h.out.push_str("</body>\n</html>\n");
    h.out.into_bytes()
}

/// Canonical text of an author declaration, taken from the elaborated
/// context where the declaration produced a term.
fn declaration_text(ctx: &Context, d: &Declaration) -> (&'static str, String) {
    match d {
        Declaration::Include { mode, reference, renames } => (mode.as_str(), include_text(reference, renames)),
        Declaration::Sort(s) => ("sort", sort_decl_text(s)),
        Declaration::Op(op) => ("op", op_text(op)),
        Declaration::Var { name, sort } => ("var", format!("{name} : {sort}")),
        Declaration::Rule(text) => match ctx.parse_rule(text) {
            Ok(r) => ("rule", render_rule(r.pattern(), r.replacement())),
            Err(_) => ("rule", text.trim().to_owned()),
        },
        Declaration::Term { label, .. } | Declaration::Equation { label, .. } => match ctx.assets.get(label) {
            Some(asset) => asset_text(label, asset),
            None => ("term", label.clone()),
        },
    }
}
