use crate::error::{Error, ErrorKind, Result, SourcePos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Rational literal text such as `3`, `-1/2`.
    Rational(String),
    /// Binary64 literal text such as `0.5`, `1e-7`, `∞`, `NaN`.
    Float(String),
    Ident(String),
    Symbol(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Underscore,
    Caret,
    Eof,
}

impl Tok {
    fn ends_operand(&self) -> bool {
        matches!(
            self,
            Tok::Rational(_) | Tok::Float(_) | Tok::Ident(_) | Tok::RParen | Tok::RBracket
        )
    }

    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Rational(s) | Tok::Float(s) => format!("literal `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Symbol(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '→' | '′' | '\'')
}

fn is_symbol_char(c: char) -> bool {
    !(c.is_whitespace()
        || c.is_alphanumeric()
        || matches!(c, '(' | ')' | '[' | ']' | ',' | '_' | '^' | '-'))
}

struct Lexer {
    chars: Vec<char>,
    at: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        at: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
    };
    lx.run()?;
    Ok(lx.tokens)
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.at + ahead).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.at];
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn pos(&self) -> SourcePos {
        SourcePos::new(self.line, self.col)
    }

    fn push(&mut self, tok: Tok, pos: SourcePos) {
        self.tokens.push(Token { tok, pos });
    }

    fn after_operand(&self) -> bool {
        self.tokens.last().is_some_and(|t| t.tok.ends_operand())
    }

    fn run(&mut self) -> Result<()> {
        while let Some(c) = self.peek(0) {
            let pos = self.pos();
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                ',' => Some(Tok::Comma),
                '_' => Some(Tok::Underscore),
                '^' => Some(Tok::Caret),
                _ => None,
            };
            if let Some(tok) = single {
                self.bump();
                self.push(tok, pos);
            } else if c.is_ascii_digit() {
                let tok = self.number(String::new());
                self.push(tok, pos);
            } else if c == '-' {
                self.minus(pos)?;
            } else if is_ident_start(c) {
                let ident = self.ident();
                let tok = if ident == "NaN" { Tok::Float(ident) } else { Tok::Ident(ident) };
                self.push(tok, pos);
            } else {
                let mut sym = String::new();
                while let Some(c) = self.peek(0).filter(|c| is_symbol_char(*c)) {
                    sym.push(c);
                    self.bump();
                }
                let tok = if sym == "∞" { Tok::Float(sym) } else { Tok::Symbol(sym) };
                self.push(tok, pos);
            }
        }
        let pos = self.pos();
        self.push(Tok::Eof, pos);
        Ok(())
    }

    fn minus(&mut self, pos: SourcePos) -> Result<()> {
        let next = self.peek(1);
        let starts_number = next.is_some_and(|c| c.is_ascii_digit() || c == '∞');
        if starts_number && !self.after_operand() {
            self.bump();
            if self.peek(0) == Some('∞') {
                self.bump();
                self.push(Tok::Float("-∞".into()), pos);
            } else {
                let tok = self.number("-".into());
                self.push(tok, pos);
            }
            return Ok(());
        }
        let spaced_before = self.at == 0 || self.chars[self.at - 1].is_whitespace();
        let spaced_after = next.is_none_or(char::is_whitespace);
        if spaced_before && spaced_after {
            self.bump();
            self.push(Tok::Symbol("-".into()), pos);
            Ok(())
        } else {
            Err(Error::at(
                ErrorKind::Syntax("`-` must be surrounded by whitespace or start a negative literal".into()),
                pos,
            ))
        }
    }

    fn digits(&mut self, out: &mut String) {
        while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
            out.push(c);
            self.bump();
        }
    }

    fn number(&mut self, mut text: String) -> Tok {
        self.digits(&mut text);
        let digit_at = |lx: &Self, k| lx.peek(k).is_some_and(|c: char| c.is_ascii_digit());
        if self.peek(0) == Some('/') && digit_at(self, 1) {
            text.push(self.bump());
            self.digits(&mut text);
            return Tok::Rational(text);
        }
        let mut float = false;
        if self.peek(0) == Some('.') && digit_at(self, 1) {
            float = true;
            text.push(self.bump());
            self.digits(&mut text);
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let signed = matches!(self.peek(1), Some('+' | '-')) && digit_at(self, 2);
            if signed || digit_at(self, 1) {
                float = true;
                text.push(self.bump());
                if signed {
                    text.push(self.bump());
                }
                self.digits(&mut text);
            }
        }
        if float {
            Tok::Float(text)
        } else {
            Tok::Rational(text)
        }
    }

    fn ident(&mut self) -> String {
        let mut out = String::new();
        out.push(self.bump());
        loop {
            match self.peek(0) {
                Some(c) if is_ident_continue(c) => {
                    out.push(c);
                    self.bump();
                }
                Some('-') if self.peek(1).is_some_and(char::is_alphanumeric) => {
                    out.push('-');
                    self.bump();
                }
                _ => break,
            }
        }
        out
    }
}
