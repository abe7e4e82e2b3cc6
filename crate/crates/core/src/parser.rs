//! The `.poly` text format and the canonical renderer.
//!
//! Grammar, one polynomial per line:
//!
//! ```text
//! expression := term (('+' | '-') term)*
//! term       := factor ('*' factor)*
//! factor     := INT | VAR | VAR '^' INT | '(' expression ')' | '-' factor
//! VAR        := [A-Za-z_][A-Za-z0-9_]*
//! INT        := [0-9]+
//! ```
//!
//! `#` starts a comment running to the end of the line and blank lines are
//! skipped. Implicit multiplication and division are rejected. Variables are
//! numbered by their first textual occurrence in the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::FieldSpec;
use crate::poly::{Monomial, OrderKind, PolyRing, Polynomial};
use crate::toricity::PolySystem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    Division,
    BadExponent(String),
    UnknownVariable(String),
}

/// A syntax error; `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected `{found}`, expected {expected}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "unexpected end of input, expected {expected}")
            }
            ParseErrorKind::Division => write!(
                f,
                "division is not supported; coefficients must be integers"
            ),
            ParseErrorKind::BadExponent(e) => {
                write!(
                    f,
                    "exponent must be a non-negative integer literal, found `{e}`"
                )
            }
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SystemFileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(i) => write!(f, "{i}"),
            Tok::Var(v) => f.write_str(v),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    column: usize,
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |column, kind| ParseError { line, column, kind };
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, column });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Spanned {
                tok: Tok::Int(digits.parse().expect("decimal digits")),
                column,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Var(chars[start..i].iter().collect()),
                column,
            });
        } else if c == '/' {
            return Err(err(column, ParseErrorKind::Division));
        } else {
            return Err(err(column, ParseErrorKind::UnexpectedChar(c)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_column: usize,
    ring: &'a Arc<PolyRing>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error_here(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some(s) => ParseError {
                line: self.line,
                column: s.column,
                kind: ParseErrorKind::UnexpectedToken {
                    found: s.tok.to_string(),
                    expected,
                },
            },
            None => ParseError {
                line: self.line,
                column: self.end_column,
                kind: ParseErrorKind::UnexpectedEnd { expected },
            },
        }
    }

    fn parse_line(&mut self) -> Result<Polynomial, ParseError> {
        let f = self.expression()?;
        if self.pos < self.toks.len() {
            return Err(self.error_here("an operator"));
        }
        Ok(f)
    }

    fn expression(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let Some(spanned) = self.toks.get(self.pos) else {
            return Err(self.error_here("a number, variable or `(`"));
        };
        match &spanned.tok {
            Tok::Int(i) => {
                self.pos += 1;
                let c = self.ring.field().from_integer(i);
                Ok(Polynomial::constant(self.ring, c).expect("ring field"))
            }
            Tok::Var(name) => {
                self.pos += 1;
                let index = self.ring.index_of(name).ok_or_else(|| ParseError {
                    line: self.line,
                    column: spanned.column,
                    kind: ParseErrorKind::UnknownVariable(name.clone()),
                })?;
                let mut exp = 1u32;
                if let Some(Tok::Caret) = self.peek() {
                    self.pos += 1;
                    exp = self.exponent()?;
                }
                let mut exps = vec![0; self.ring.nvars()];
                exps[index] = exp;
                let one = self.ring.field().one();
                Ok(
                    Polynomial::from_terms(self.ring, [(one, Monomial::new(exps))])
                        .expect("ring field"),
                )
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expression()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error_here("`)`")),
                }
            }
            Tok::Minus => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            _ => Err(self.error_here("a number, variable or `(`")),
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let bad = |s: &Spanned, text: String| ParseError {
            line: self.line,
            column: s.column,
            kind: ParseErrorKind::BadExponent(text),
        };
        match self.toks.get(self.pos) {
            Some(
                s @ Spanned {
                    tok: Tok::Int(i), ..
                },
            ) => {
                self.pos += 1;
                u32::try_from(i).map_err(|_| bad(s, i.to_string()))
            }
            Some(s) => Err(bad(s, s.tok.to_string())),
            None => Err(self.error_here("an exponent")),
        }
    }
}

fn parse_tokens(
    toks: &[Spanned],
    line: usize,
    end_column: usize,
    ring: &Arc<PolyRing>,
) -> Result<Polynomial, ParseError> {
    Parser {
        toks,
        pos: 0,
        line,
        end_column,
        ring,
    }
    .parse_line()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn push_names(toks: &[Spanned], names: &mut Vec<String>) {
    for t in toks {
        if let Tok::Var(v) = &t.tok {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
    }
}

/// Parses one polynomial; the ring holds the variables in textual order.
pub fn parse_polynomial(text: &str, field: FieldSpec) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text, 1)?;
    let mut names = Vec::new();
    push_names(&toks, &mut names);
    let ring = PolyRing::new(names, field, OrderKind::Grevlex).expect("distinct names");
    parse_tokens(&toks, 1, text.chars().count() + 1, &ring)
}

/// Parses one polynomial over an existing ring.
pub fn parse_polynomial_in(text: &str, ring: &Arc<PolyRing>) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text, 1)?;
    parse_tokens(&toks, 1, text.chars().count() + 1, ring)
}

/// The raw contents of a `.poly` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub model: String,
    pub field: FieldSpec,
    /// `(line number, text)` for every line that is not blank after comment removal.
    pub lines: Vec<(usize, String)>,
}

impl SystemFile {
    pub fn from_text(model: impl Into<String>, text: &str, field: FieldSpec) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = strip_comment(l);
                (!body.trim().is_empty()).then(|| (i + 1, body.to_string()))
            })
            .collect();
        SystemFile {
            model: model.into(),
            field,
            lines,
        }
    }

    /// Reads a file; the model id is the file stem.
    pub fn read(path: &Path, field: FieldSpec) -> Result<Self, SystemFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| SystemFileError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let model = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self::from_text(model, &text, field))
    }

    pub fn to_system(&self) -> Result<PolySystem, ParseError> {
        let mut tokenized = Vec::with_capacity(self.lines.len());
        let mut names = Vec::new();
        for (line, text) in &self.lines {
            let toks = tokenize(text, *line)?;
            push_names(&toks, &mut names);
            tokenized.push((*line, text.chars().count() + 1, toks));
        }
        let ring = PolyRing::new(names, self.field, OrderKind::Grevlex).expect("distinct names");
        let polys = tokenized
            .iter()
            .map(|(line, end, toks)| parse_tokens(toks, *line, *end, &ring))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolySystem::new(&ring, polys).expect("polynomials share the file ring"))
    }
}

pub fn parse_system_str(text: &str, field: FieldSpec) -> Result<PolySystem, ParseError> {
    SystemFile::from_text("input", text, field).to_system()
}

pub fn parse_system_file(path: &Path, field: FieldSpec) -> Result<PolySystem, SystemFileError> {
    SystemFile::read(path, field)?
        .to_system()
        .map_err(|source| SystemFileError::Parse {
            path: path.to_path_buf(),
            source,
        })
}

/// Canonical text of `f`: terms in the ring order, `*` between factors and
/// `^` only for exponents above one.
///
/// Integer coefficients (and all residues) round-trip through
/// [`parse_polynomial_in`]. Non-integral rationals print as `p/q`, which the
/// parser deliberately refuses.
pub fn render(f: &Polynomial) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let names: Vec<&str> = f.ring().names().collect();
    let mut out = String::new();
    for (i, t) in f.terms().iter().enumerate() {
        let negative = t.coeff.is_negative();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mut factors: Vec<String> = Vec::new();
        let magnitude = t.coeff.abs();
        if !magnitude.is_one() || t.monomial.is_one() {
            factors.push(magnitude.to_string());
        }
        for (name, &e) in names.iter().zip(t.monomial.exponents()) {
            match e {
                0 => {}
                1 => factors.push(name.to_string()),
                _ => factors.push(format!("{name}^{e}")),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}
