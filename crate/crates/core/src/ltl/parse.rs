//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, loosest first: `|`, `&`, the binary temporal operators
//! (`U`, `W`, `R`, right-associative), then the prefix operators
//! (`!`, `X`, `WX`, `F`, `G`).

use thiserror::Error;

use super::{Formula, PropSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Syntax { pos: usize, found: String, expected: &'static str },
    #[error("unknown proposition {name:?} at position {pos}")]
    UnknownProposition { pos: usize, name: String },
    #[error("unexpected character {ch:?} at position {pos}")]
    BadCharacter { pos: usize, ch: char },
}

const KEYWORDS: &[&str] = &["true", "false", "X", "WX", "F", "G", "U", "W", "R"];

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Bang,
    Amp,
    Bar,
    LParen,
    RParen,
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("{w:?}"),
            Tok::Bang => "'!'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Bar => "'|'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok<'_>)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Word(&text[start..i])));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or(c);
                return Err(ParseError::BadCharacter { pos: i, ch });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a, 'p> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
    props: &'p PropSet,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> &Tok<'a> {
        &self.toks[self.at].1
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let (pos, tok) = &self.toks[self.at];
        ParseError::Syntax { pos: *pos, found: tok.describe(), expected }
    }

    fn bump(&mut self) {
        self.at += 1;
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = Formula::or(lhs, self.and_expr()?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.temporal_expr()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.temporal_expr()?);
        }
        Ok(lhs)
    }

    fn temporal_expr(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary_expr()?;
        let ctor: fn(Formula, Formula) -> Formula = match self.peek() {
            Tok::Word("U") => Formula::until,
            Tok::Word("W") => Formula::weak_until,
            Tok::Word("R") => Formula::release,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(ctor(lhs, self.temporal_expr()?))
    }

    fn unary_expr(&mut self) -> Result<Formula, ParseError> {
        let ctor: fn(Formula) -> Formula = match self.peek() {
            Tok::Bang => Formula::not,
            Tok::Word("X") => Formula::next,
            Tok::Word("WX") => Formula::weak_next,
            Tok::Word("F") => Formula::eventually,
            Tok::Word("G") => Formula::globally,
            _ => return self.atom(),
        };
        self.bump();
        Ok(ctor(self.unary_expr()?))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        const EXPECTED: &str = "a proposition, constant, prefix operator or '('";
        let (pos, tok) = self.toks[self.at].clone();
        match tok {
            Tok::LParen => {
                self.bump();
                let inner = self.or_expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("')'"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Word("true") => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Word("false") => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Word(w) if !KEYWORDS.contains(&w) => {
                let index = self
                    .props
                    .index_of(w)
                    .ok_or_else(|| ParseError::UnknownProposition { pos, name: w.to_string() })?;
                self.bump();
                Ok(Formula::Prop(index))
            }
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses `text` against the proposition set `props`.
pub fn parse(text: &str, props: &PropSet) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, at: 0, props };
    let f = p.or_expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(f)
}
