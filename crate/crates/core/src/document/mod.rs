//! Documents: narrative with embedded contexts, their elaboration, and the
//! reader (HTML) and machine (XML) views.

mod author;
mod html;
mod load;
mod xml;

use std::collections::BTreeMap;

pub use author::{canonical_sort, parse_declaration, parse_document, parse_op, Block, ContextBlock, DocumentAst, Import, Item};
pub use html::render_html;
pub use load::{document_name, DocumentLoader, DocumentSource, FileSource, MemorySource};
pub use xml::{emit_xml, load_xml, XML_NAMESPACE};

use crate::builtins;
use crate::context::{elaborate_context, Context, ContextRef};
use crate::error::{Error, ErrorKind, Result};
use crate::rewrite::{normalize, DEFAULT_STEP_LIMIT};
use crate::term::Term;

/// The result of one `@eval`: `ordinal` counts from 1 within its context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Computed {
    pub context: String,
    pub ordinal: usize,
    pub input: Term,
    pub normal_form: Term,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub name: String,
    pub contexts: Vec<Context>,
    pub computed: Vec<Computed>,
    /// The author source, when the document was built from one. Narrative
    /// lives only here.
    pub source: Option<DocumentAst>,
}

/// Documents compare by formal content; narrative is not part of it.
impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.contexts == other.contexts && self.computed == other.computed
    }
}

impl Eq for Document {}

impl Document {
    pub fn empty(name: impl Into<String>) -> Document {
        Document {
            name: name.into(),
            contexts: Vec::new(),
            computed: Vec::new(),
            source: None,
        }
    }

    pub fn context(&self, name: &str) -> Option<&Context> {
        self.contexts.iter().find(|c| c.name == name)
    }

    pub fn require_context(&self, name: &str) -> Result<&Context> {
        self.context(name)
            .ok_or_else(|| Error::new(ErrorKind::UnknownReference(format!("{}/{name}", self.name))))
    }

    pub fn computed_in<'a>(&'a self, context: &'a str) -> impl Iterator<Item = &'a Computed> + 'a {
        self.computed.iter().filter(move |c| c.context == context)
    }

    /// Appends a context produced outside the author source.
    pub fn add_context(&mut self, ctx: Context) -> Result<()> {
        if self.context(&ctx.name).is_some() {
            return Err(Error::new(ErrorKind::DuplicateContext(ctx.name)));
        }
        self.contexts.push(ctx);
        Ok(())
    }
}

/// Elaborates every context of `ast` in order and evaluates its `@eval`
/// requests. `imports` maps import names to already built documents;
/// references `builtins/...` resolve to the builtin contexts.
pub fn build_document(name: &str, ast: &DocumentAst, imports: &BTreeMap<String, Document>) -> Result<Document> {
    let mut doc = Document::empty(name);
    for block in ast.contexts() {
        let mut resolver = |reference: &str| -> Result<(ContextRef, Context)> {
            resolve(&doc, reference, imports)
        };
        let decls = block.declarations();
        let ctx = elaborate_context(&block.name, &decls, &mut resolver).map_err(|e| e.or_at(block.pos))?;
        let mut ordinal = 0;
        for item in &block.body {
            let Item::Eval(request) = item else { continue };
            ordinal += 1;
            let input = ctx.parse_term(&request.value).map_err(|e| e.rebase(request.pos))?;
            let (normal_form, _) = normalize(&ctx, &input, DEFAULT_STEP_LIMIT)
                .map_err(|e| e.into_error().or_at(request.pos))?;
            doc.computed.push(Computed {
                context: block.name.clone(),
                ordinal,
                input,
                normal_form,
            });
        }
        doc.contexts.push(ctx);
    }
    doc.source = Some(ast.clone());
    Ok(doc)
}

fn resolve(doc: &Document, reference: &str, imports: &BTreeMap<String, Document>) -> Result<(ContextRef, Context)> {
    let unknown = || Error::new(ErrorKind::UnknownReference(reference.to_owned()));
    match reference.split_once('/') {
        None => {
            let ctx = doc.context(reference).ok_or_else(unknown)?;
            Ok((ContextRef::new(doc.name.clone(), reference), ctx.clone()))
        }
        Some((builtins::DOCUMENT, name)) => {
            let ctx = builtins::context(name).ok_or_else(unknown)?;
            Ok((ContextRef::new(builtins::DOCUMENT, name), ctx.clone()))
        }
        Some((import, name)) => {
            let imported = imports.get(import).ok_or_else(unknown)?;
            let ctx = imported.context(name).ok_or_else(unknown)?;
            Ok((ContextRef::new(imported.name.clone(), name), ctx.clone()))
        }
    }
}
