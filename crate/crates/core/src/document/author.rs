//! The `@`-command author syntax.
//!
//! ```text
//! document = { narrative | import | context }
//! import   = "@import{" name "=" path "}"
//! context  = "@context{" name "}" [ws] "{" { narrative | command } "}"
//! command  = "@" ( "use" | "extend" | "sort" | "op" | "var" | "rule"
//!                | "term" | "equation" | "eval" ) "{" text "}"
//! ```
//!
//! Braces inside command text and narrative must balance. Any other `@`
//! is narrative.

use crate::context::{Declaration, InclusionMode, Located};
use crate::error::{Error, ErrorKind, Result, SourcePos};
use crate::signature::OperatorDecl;
use crate::sort::{SortDecl, SortName};
use crate::term::Fixity;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentAst {
    pub blocks: Vec<Block>,
}

impl DocumentAst {
    pub fn imports(&self) -> impl Iterator<Item = &Import> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Import(i) => Some(i),
            _ => None,
        })
    }

    pub fn contexts(&self) -> impl Iterator<Item = &ContextBlock> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Context(c) => Some(c),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub name: String,
    pub path: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Narrative(String),
    Import(Import),
    Context(ContextBlock),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextBlock {
    pub name: String,
    pub pos: SourcePos,
    pub body: Vec<Item>,
}

impl ContextBlock {
    pub fn declarations(&self) -> Vec<Located<Declaration>> {
        self.body
            .iter()
            .filter_map(|i| match i {
                Item::Decl(d) => Some(d.clone()),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Narrative(String),
    Decl(Located<Declaration>),
    /// Expression text to normalize when the document is built.
    Eval(Located<String>),
}

const BODY_COMMANDS: [&str; 9] = ["use", "extend", "sort", "op", "var", "rule", "term", "equation", "eval"];

struct Scanner {
    chars: Vec<char>,
    at: usize,
    line: u32,
    col: u32,
}

impl Scanner {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.at + ahead).copied()
    }

    fn pos(&self) -> SourcePos {
        SourcePos::new(self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// The command name after an `@`, without consuming anything.
    fn command_ahead(&self) -> Option<String> {
        if self.peek(0) != Some('@') {
            return None;
        }
        let name: String = self.chars[self.at + 1..]
            .iter()
            .take_while(|c| c.is_ascii_alphabetic())
            .collect();
        (!name.is_empty() && self.peek(1 + name.chars().count()) == Some('{')).then_some(name)
    }

    fn skip_command_name(&mut self, name: &str) {
        for _ in 0..=name.chars().count() {
            self.bump();
        }
    }

    /// Reads `{...}` with balanced braces; returns the inner text and the
    /// position of its first character.
    fn group(&mut self) -> Result<(String, SourcePos)> {
        let open = self.pos();
        if self.bump() != Some('{') {
            return Err(Error::at(ErrorKind::Syntax("expected `{`".into()), open));
        }
        let start = self.pos();
        let mut depth = 0usize;
        let mut text = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(Error::at(
                        ErrorKind::Syntax(format!("`{{` opened at {open} is never closed")),
                        self.pos(),
                    ))
                }
                Some('{') => depth += 1,
                Some('}') if depth == 0 => return Ok((text, start)),
                Some('}') => depth -= 1,
                Some(_) => {}
            }
            text.push(self.chars[self.at - 1]);
        }
    }

    fn skip_whitespace(&mut self) {
        while self.peek(0).is_some_and(char::is_whitespace) {
            self.bump();
        }
    }
}

pub fn parse_document(text: &str) -> Result<DocumentAst> {
    let mut s = Scanner {
        chars: text.chars().collect(),
        at: 0,
        line: 1,
        col: 1,
    };
    let mut blocks = Vec::new();
    let mut narrative = String::new();
    let flush = |narrative: &mut String, blocks: &mut Vec<Block>| {
        if !narrative.is_empty() {
            blocks.push(Block::Narrative(std::mem::take(narrative)));
        }
    };
    while s.peek(0).is_some() {
        let pos = s.pos();
        match s.command_ahead().as_deref() {
            Some("import") => {
                s.skip_command_name("import");
                let (body, at) = s.group()?;
                let Some((name, path)) = body.split_once('=') else {
                    return Err(Error::at(ErrorKind::Syntax("expected `@import{name = path}`".into()), at));
                };
                let (name, path) = (name.trim(), path.trim());
                check_name(name, "import name", at)?;
                if path.is_empty() {
                    return Err(Error::at(ErrorKind::Syntax("empty import path".into()), at));
                }
                flush(&mut narrative, &mut blocks);
                blocks.push(Block::Import(Import {
                    name: name.into(),
                    path: path.into(),
                    pos,
                }));
            }
            Some("context") => {
                s.skip_command_name("context");
                let (name, at) = s.group()?;
                let name = name.trim();
                check_name(name, "context name", at)?;
                s.skip_whitespace();
                let body = context_body(&mut s)?;
                flush(&mut narrative, &mut blocks);
                blocks.push(Block::Context(ContextBlock {
                    name: name.into(),
                    pos,
                    body,
                }));
            }
            Some(cmd) if BODY_COMMANDS.contains(&cmd) => {
                return Err(Error::at(
                    ErrorKind::Syntax(format!("`@{cmd}` outside of a context")),
                    pos,
                ))
            }
            _ => narrative.push(s.bump().unwrap()),
        }
    }
    flush(&mut narrative, &mut blocks);
    let mut names = std::collections::BTreeSet::new();
    for b in &blocks {
        let (name, pos, what) = match b {
            Block::Import(i) => (&i.name, i.pos, "import"),
            Block::Context(c) => (&c.name, c.pos, "context"),
            Block::Narrative(_) => continue,
        };
        if !names.insert((what, name.clone())) {
            let kind = if what == "import" {
                ErrorKind::Syntax(format!("import name `{name}` is used twice"))
            } else {
                ErrorKind::DuplicateContext(name.clone())
            };
            return Err(Error::at(kind, pos));
        }
    }
    Ok(DocumentAst { blocks })
}

fn context_body(s: &mut Scanner) -> Result<Vec<Item>> {
    let open = s.pos();
    if s.bump() != Some('{') {
        return Err(Error::at(ErrorKind::Syntax("expected `{` to open the context body".into()), open));
    }
    let mut items = Vec::new();
    let mut narrative = String::new();
    let mut depth = 0usize;
    loop {
        let pos = s.pos();
        if let Some(cmd) = s.command_ahead() {
            if BODY_COMMANDS.contains(&cmd.as_str()) {
                s.skip_command_name(&cmd);
                let (text, at) = s.group()?;
                if !narrative.is_empty() {
                    items.push(Item::Narrative(std::mem::take(&mut narrative)));
                }
                if cmd == "eval" {
                    items.push(Item::Eval(Located::new(text, at)));
                } else {
                    for d in parse_declaration(&cmd, &text, at)? {
                        items.push(Item::Decl(d));
                    }
                }
                continue;
            }
            if cmd == "context" || cmd == "import" {
                return Err(Error::at(ErrorKind::Syntax(format!("`@{cmd}` inside a context")), pos));
            }
        }
        match s.bump() {
            None => {
                return Err(Error::at(
                    ErrorKind::Syntax(format!("context body opened at {open} is never closed")),
                    s.pos(),
                ))
            }
            Some('}') if depth == 0 => break,
            Some(c) => {
                match c {
                    '{' => depth += 1,
                    '}' => depth -= 1,
                    _ => {}
                }
                narrative.push(c);
            }
        }
    }
    if !narrative.is_empty() {
        items.push(Item::Narrative(narrative));
    }
    Ok(items)
}

fn check_name(name: &str, what: &str, pos: SourcePos) -> Result<()> {
    if name.is_empty() || name.contains(char::is_whitespace) || name.contains(['{', '}', '/']) {
        Err(Error::at(ErrorKind::Syntax(format!("invalid {what} `{name}`")), pos))
    } else {
        Ok(())
    }
}

/// Maps the ASCII spellings of the number sorts (`R`, `Qp`, `R->R`, ...)
/// to their canonical names.
pub fn canonical_sort(name: &str) -> SortName {
    let part = |p: &str| -> String {
        let (base, suffix) = p.split_at(p.chars().next().map_or(0, char::len_utf8));
        let mapped = match base {
            "N" => "ℕ",
            "Z" => "ℤ",
            "Q" => "ℚ",
            "R" => "ℝ",
            _ => return p.to_owned(),
        };
        if matches!(suffix, "" | "nz" | "p" | "nn") {
            format!("{mapped}{suffix}")
        } else {
            p.to_owned()
        }
    };
    let parts: Vec<String> = name.replace("->", "→").split('→').map(part).collect();
    SortName::new(parts.join("→"))
}

fn sort_name(text: &str, pos: SourcePos) -> Result<SortName> {
    let t = text.trim();
    if t.is_empty() || t.contains(char::is_whitespace) || t.contains(['(', ')', ',', ':', '[', ']', '_', '^']) {
        return Err(Error::at(ErrorKind::Syntax(format!("invalid sort name `{t}`")), pos));
    }
    Ok(canonical_sort(t))
}

/// Position of the character at byte offset `offset` of `text`, which
/// starts at `origin`.
fn offset_pos(text: &str, offset: usize, origin: SourcePos) -> SourcePos {
    let mut pos = origin;
    for c in text[..offset].chars() {
        if c == '\n' {
            pos = SourcePos::new(pos.line + 1, 1);
        } else {
            pos.col += 1;
        }
    }
    pos
}

/// Splits `label : rest`, returning the label and the rest with its
/// position.
fn labeled(text: &str, pos: SourcePos, cmd: &str) -> Result<(String, String, SourcePos)> {
    let Some(i) = text.find(':') else {
        return Err(Error::at(ErrorKind::Syntax(format!("expected `@{cmd}{{label : ...}}`")), pos));
    };
    let label = text[..i].trim();
    check_name(label, "label", pos)?;
    let rest = &text[i + 1..];
    Ok((label.into(), rest.into(), offset_pos(text, i + 1, pos)))
}

pub fn parse_declaration(cmd: &str, text: &str, pos: SourcePos) -> Result<Vec<Located<Declaration>>> {
    let one = |d: Declaration| Ok(vec![Located::new(d, pos)]);
    match cmd {
        "use" | "extend" => {
            let mode = if cmd == "use" { InclusionMode::Use } else { InclusionMode::Extend };
            let (reference, renames) = match text.split_once('|') {
                None => (text.trim(), Vec::new()),
                Some((r, rest)) => (r.trim(), parse_renames(rest, pos)?),
            };
            if reference.is_empty() || reference.contains(char::is_whitespace) {
                return Err(Error::at(ErrorKind::Syntax(format!("invalid context reference `{reference}`")), pos));
            }
            one(Declaration::Include {
                mode,
                reference: reference.into(),
                renames,
            })
        }
        "sort" => {
            let normalized = text.replace("<:", "⊆");
            match normalized.split_once('⊆') {
                None => one(Declaration::Sort(SortDecl::Sort(sort_name(text, pos)?))),
                Some((a, b)) => one(Declaration::Sort(SortDecl::Subsort(sort_name(a, pos)?, sort_name(b, pos)?))),
            }
        }
        "op" => one(Declaration::Op(parse_op(text, pos)?)),
        "var" => {
            let Some((names, sort)) = text.rsplit_once(':') else {
                return Err(Error::at(ErrorKind::Syntax("expected `@var{name : Sort}`".into()), pos));
            };
            let sort = sort_name(sort, pos)?;
            names
                .split(',')
                .map(|n| {
                    let n = n.trim();
                    if !is_identifier(n) {
                        return Err(Error::at(ErrorKind::Syntax(format!("invalid variable name `{n}`")), pos));
                    }
                    Ok(Located::new(
                        Declaration::Var {
                            name: n.into(),
                            sort: sort.clone(),
                        },
                        pos,
                    ))
                })
                .collect()
        }
        "rule" => one(Declaration::Rule(text.into())),
        "term" => {
            let (label, rest, at) = labeled(text, pos, cmd)?;
            Ok(vec![Located::new(Declaration::Term { label, text: rest }, at)])
        }
        "equation" => {
            let (label, rest, at) = labeled(text, pos, cmd)?;
            Ok(vec![Located::new(Declaration::Equation { label, text: rest }, at)])
        }
        _ => Err(Error::at(ErrorKind::Syntax(format!("unknown command `@{cmd}`")), pos)),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(crate::syntax::is_ident_start)
        && chars.all(|c| crate::syntax::is_ident_continue(c) || c == '-')
        && !s.ends_with('-')
}

fn parse_renames(text: &str, pos: SourcePos) -> Result<Vec<(String, String)>> {
    let Some(items) = text.trim().strip_prefix("rename:") else {
        return Err(Error::at(ErrorKind::Syntax("expected `rename:` after `|`".into()), pos));
    };
    items
        .split(',')
        .map(|item| {
            let item = item.trim();
            let split = [" → ", " -> ", "→", "->"]
                .iter()
                .find_map(|arrow| item.split_once(arrow));
            match split {
                Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                    Ok((rename_name(a.trim()), rename_name(b.trim())))
                }
                _ => Err(Error::at(ErrorKind::Syntax(format!("invalid renaming `{item}`")), pos)),
            }
        })
        .collect()
}

fn rename_name(s: &str) -> String {
    canonical_sort(s).as_str().to_owned()
}

/// Parses the body of `@op`: `f(S1, ..., Sn) : S`, `S1 sym S2 : S`,
/// `S1[S2] : S`, `S1_S2 : S`, `S1^S2 : S` or `c : S`.
pub fn parse_op(text: &str, pos: SourcePos) -> Result<OperatorDecl> {
    let err = |msg: String| Error::at(ErrorKind::Syntax(msg), pos);
    let Some((lhs, result)) = text.rsplit_once(':') else {
        return Err(err("expected `: Sort` in operator declaration".into()));
    };
    let (lhs, result) = (lhs.trim(), sort_name(result, pos)?);
    let sorts = |parts: &[&str]| parts.iter().map(|p| sort_name(p, pos)).collect::<Result<Vec<_>>>();
    let words: Vec<&str> = lhs.split_whitespace().collect();
    if let (Some(open), true) = (lhs.find('('), lhs.ends_with(')')) {
        let name = &lhs[..open];
        if !is_identifier(name) && (name.is_empty() || name.contains(char::is_whitespace)) {
            return Err(err(format!("invalid operator name `{name}`")));
        }
        let inner = lhs[open + 1..lhs.len() - 1].trim();
        let args = if inner.is_empty() {
            Vec::new()
        } else {
            sorts(&inner.split(',').collect::<Vec<_>>())?
        };
        return Ok(OperatorDecl::new(name, Fixity::Prefix, args, result));
    }
    if let (Some(open), true) = (lhs.find('['), lhs.ends_with(']')) {
        let args = sorts(&[&lhs[..open], &lhs[open + 1..lhs.len() - 1]])?;
        return Ok(OperatorDecl::new(crate::term::BRACKET_OP, Fixity::Bracket, args, result));
    }
    match words.as_slice() {
        [l, op, r] => Ok(OperatorDecl::new(*op, Fixity::Infix, sorts(&[l, r])?, result)),
        [w] => {
            for (sep, fixity) in [('_', Fixity::Subscript), ('^', Fixity::Superscript)] {
                if let Some((a, b)) = w.split_once(sep) {
                    let name = fixity.special_name().expect("postfix fixity");
                    return Ok(OperatorDecl::new(name, fixity, sorts(&[a, b])?, result));
                }
            }
            if !is_identifier(w) && w.contains(['(', ')', '[', ']', ',']) {
                return Err(err(format!("invalid operator name `{w}`")));
            }
            Ok(OperatorDecl::new(*w, Fixity::Prefix, Vec::new(), result))
        }
        _ => Err(err(format!("cannot read operator declaration `{lhs}`"))),
    }
}
