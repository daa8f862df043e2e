//! Concrete syntax: recursive-descent parser for terms and equation files.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{ConstName, Env, Label, Process, Term, TermError, VarName};

/// Whether generated names (with a `%<n>` suffix) are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    User,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Alias kept for callers that think of a parsed file as a system.
pub type System = Process;

pub(crate) fn is_const_text(s: &str, mode: ParseMode) -> bool {
    let mut lx = Lexer::new(s, 1, mode);
    matches!(lx.next_token(), Ok(Some((Tok::Const(_), _)))) && matches!(lx.next_token(), Ok(None))
}

pub(crate) fn is_var_text(s: &str, mode: ParseMode) -> bool {
    let text = format!("${s}");
    let mut lx = Lexer::new(&text, 1, mode);
    matches!(lx.next_token(), Ok(Some((Tok::Var(_), _)))) && matches!(lx.next_token(), Ok(None))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Const(String),
    Var(String),
    Lower(String),
    Zero,
    One,
    Dot,
    Plus,
    LParen,
    RParen,
    Define,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Const(s) | Tok::Lower(s) => format!("`{s}`"),
            Tok::Var(s) => format!("`${s}`"),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Define => "`:=`".into(),
        }
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    mode: ParseMode,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize, mode: ParseMode) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line, mode, _src: src }
    }

    fn err(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: col + 1, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn ident_tail(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn generated_suffix(&mut self, s: &mut String, start: usize) -> Result<(), ParseError> {
        if self.peek() != Some('%') {
            return Ok(());
        }
        if self.mode == ParseMode::User {
            return Err(self.err(self.pos, "`%` is reserved for generated names"));
        }
        s.push('%');
        self.pos += 1;
        let digits = self.ident_tail();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(self.err(start, "malformed generated name"));
        }
        s.push_str(&digits);
        Ok(())
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        while let Some(c) = self.peek() {
            if c == '#' {
                self.pos = self.chars.len();
            } else if c.is_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '.' => {
                self.pos += 1;
                Tok::Dot
            }
            '+' => {
                self.pos += 1;
                Tok::Plus
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            ':' => {
                if self.chars.get(self.pos + 1) == Some(&'=') {
                    self.pos += 2;
                    Tok::Define
                } else {
                    return Err(self.err(start, "expected `:=`"));
                }
            }
            '0' | '1' => {
                self.pos += 1;
                if matches!(self.peek(), Some(d) if d.is_ascii_alphanumeric()) {
                    return Err(self.err(start, "numeric literal must be `0` or `1`"));
                }
                if c == '0' {
                    Tok::Zero
                } else {
                    Tok::One
                }
            }
            '$' => {
                self.pos += 1;
                match self.peek() {
                    Some(d) if d.is_ascii_alphabetic() || d == '_' => {}
                    _ => return Err(self.err(start, "expected a variable name after `$`")),
                }
                let mut s = self.ident_tail();
                self.generated_suffix(&mut s, start)?;
                Tok::Var(s)
            }
            c if c.is_ascii_uppercase() => {
                let mut s = self.ident_tail();
                if self.peek() == Some('{') {
                    s.push('{');
                    self.pos += 1;
                    loop {
                        match self.peek() {
                            Some('}') => {
                                s.push('}');
                                self.pos += 1;
                                break;
                            }
                            Some(d) if d.is_ascii_digit() || d == ',' => {
                                s.push(d);
                                self.pos += 1;
                            }
                            _ => return Err(self.err(start, "malformed index set in constant name")),
                        }
                    }
                }
                self.generated_suffix(&mut s, start)?;
                Tok::Const(s)
            }
            c if c.is_ascii_lowercase() => Tok::Lower(self.ident_tail()),
            other => return Err(self.err(start, format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, start)))
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut out = Vec::new();
        while let Some(t) = self.next_token()? {
            out.push(t);
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let col = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col);
        ParseError { line: self.line, col: col + 1, message: message.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn sum(&mut self) -> Result<Term, ParseError> {
        let mut left = self.prefixed()?;
        while self.peek() == Some(&Tok::Plus) {
            self.bump();
            let right = self.prefixed()?;
            left = Term::sum(left, right);
        }
        Ok(left)
    }

    fn prefixed(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Tok::Zero) => Ok(Term::Zero),
            Some(Tok::One) => Ok(Term::One),
            Some(Tok::Const(s)) => Ok(Term::Const(ConstName::new_unchecked(&s))),
            Some(Tok::Var(s)) => Ok(Term::Var(VarName::new_unchecked(&s))),
            Some(Tok::LParen) => {
                let t = self.sum()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(t),
                    _ => {
                        self.pos -= 1;
                        Err(self.err_here("expected `)`"))
                    }
                }
            }
            Some(Tok::Lower(s)) => {
                let label = Label::parse(&s).map_err(|_| {
                    self.pos -= 1;
                    self.err_here(format!("invalid label `{s}`"))
                })?;
                match self.bump() {
                    Some(Tok::Dot) => {}
                    _ => {
                        self.pos -= 1;
                        return Err(self.err_here(format!("expected `.` after label `{s}`")));
                    }
                }
                let body = self.prefixed()?;
                Ok(Term::prefix(label, body))
            }
            Some(other) => {
                self.pos -= 1;
                Err(self.err_here(format!("unexpected {}", other.describe())))
            }
            None => Err(self.err_here("unexpected end of input")),
        }
    }
}

fn sort_error(line: usize, t: &Term) -> ParseError {
    ParseError { line, col: 1, message: format!("a constant cannot be a sum operand in `{t}`") }
}

fn parse_term_line(src: &str, line: usize, mode: ParseMode) -> Result<Term, ParseError> {
    let toks = Lexer::new(src, line, mode).tokenize()?;
    let mut p = Parser { toks, pos: 0, line, end_col: src.chars().count() };
    let t = p.sum()?;
    if p.pos < p.toks.len() {
        let desc = p.toks[p.pos].0.describe();
        return Err(p.err_here(format!("unexpected {desc}")));
    }
    if !t.is_well_sorted() {
        return Err(sort_error(line, &t));
    }
    Ok(t)
}

/// Parses a single term (no definitions). Sum operands must be guarded.
pub fn parse_term(src: &str, mode: ParseMode) -> Result<Term, ParseError> {
    parse_term_line(src, 1, mode)
}

/// Parses an equation file: one `Name := body` per line, `#` comments, and an
/// optional `root <term>` line. Without a `root` line the first defined constant
/// is the root.
pub fn parse_system(src: &str, mode: ParseMode) -> Result<Process, ParseError> {
    let mut env = Env::new();
    let mut first: Option<ConstName> = None;
    let mut root: Option<(Term, usize)> = None;
    let mut mentioned: Vec<(ConstName, usize)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("root") {
            if rest.starts_with(char::is_whitespace) {
                if root.is_some() {
                    return Err(ParseError { line, col: 1, message: "duplicate `root` line".into() });
                }
                let t = parse_term_line(rest, line, mode)?;
                root = Some((t, line));
                continue;
            }
        }
        let Some(split) = text.find(":=") else {
            return Err(ParseError { line, col: 1, message: "expected `Name := body`".into() });
        };
        let name_text = text[..split].trim();
        if !is_const_text(name_text, mode) {
            return Err(ParseError { line, col: 1, message: format!("invalid constant name `{name_text}`") });
        }
        let name = ConstName::new_unchecked(name_text);
        let body_src = &text[split + 2..];
        let body = parse_term_line(body_src, line, mode).map_err(|mut e| {
            if e.line == line {
                e.col += split + 2;
            }
            e
        })?;
        if !body.is_guarded() {
            return Err(ParseError {
                line,
                col: split + 3,
                message: format!("body of {name} must be guarded, got `{body}`"),
            });
        }
        let mut refs = BTreeSet::new();
        body.const_refs(&mut refs);
        mentioned.extend(refs.into_iter().map(|c| (c, line)));
        if first.is_none() {
            first = Some(name.clone());
        }
        env.define(name.clone(), body).map_err(|e| ParseError {
            line,
            col: 1,
            message: match e {
                TermError::Redefined(n) => format!("constant {n} defined twice"),
                other => other.to_string(),
            },
        })?;
    }
    let root = match root {
        Some((t, line)) => {
            let mut refs = BTreeSet::new();
            t.const_refs(&mut refs);
            mentioned.extend(refs.into_iter().map(|c| (c, line)));
            t
        }
        None => match first {
            Some(c) => Term::Const(c),
            None => {
                return Err(ParseError { line: 1, col: 1, message: "empty system: no definitions and no root".into() })
            }
        },
    };
    if let Some((missing, line)) = mentioned.into_iter().find(|(c, _)| !env.contains(c)) {
        return Err(ParseError { line, col: 1, message: format!("undefined constant {missing}") });
    }
    Ok(Process { root, env })
}

/// Text form accepted by [`parse_system`]: reachable definitions in
/// breadth-first order, preceded by a `root` line when the root is not the
/// first constant.
pub fn write_system(p: &Process) -> String {
    let order = super::bfs_consts(&p.root, &p.env);
    let mut out = String::new();
    let first_is_root = matches!(&p.root, Term::Const(c) if order.first() == Some(c));
    if !first_is_root {
        out.push_str(&format!("root {}\n", p.root));
    }
    for c in order {
        if let Some(body) = p.env.body(&c) {
            out.push_str(&format!("{c} := {body}\n"));
        }
    }
    out
}
