//! Text format for rings and monomial ideals.
//!
//! ```text
//! document  = "vars" ":" name ("," name)* ";" "ideal" ":" gens
//! gens      = [ monomial ("," monomial)* ]
//! monomial  = term ("*" term)*
//! term      = name ("^" posint)?
//! ```
//!
//! Whitespace is insignificant. Positions in errors are character offsets.

use std::fmt;

use crate::ring::{Monomial, MonomialIdeal, RingContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    UnknownVariable(String),
    InvalidRing(String),
    ZeroExponent,
    ExponentOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at position {}: ", self.position)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found '{found}'")
            }
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "expected {expected}, found end of input"),
            ParseErrorKind::UnknownVariable(name) => write!(f, "unknown variable '{name}'"),
            ParseErrorKind::InvalidRing(msg) => write!(f, "{msg}"),
            ParseErrorKind::ZeroExponent => write!(f, "exponents must be positive"),
            ParseErrorKind::ExponentOverflow => write!(f, "exponent overflow"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Colon,
    Comma,
    Semi,
    Caret,
    Star,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Int(s) => s.clone(),
            Tok::Colon => ":".into(),
            Tok::Comma => ",".into(),
            Tok::Semi => ";".into(),
            Tok::Caret => "^".into(),
            Tok::Star => "*".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '^' => Tok::Caret,
            '*' => Tok::Star,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(chars[start..i].iter().collect())));
                continue;
            }
            other => return Err(ParseError { position: start, kind: ParseErrorKind::UnexpectedChar(other) }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Self { toks: tokenize(text)?, pos: 0, end: text.chars().count() })
    }

    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some((p, t)) => {
                ParseError { position: *p, kind: ParseErrorKind::UnexpectedToken { found: t.text(), expected } }
            }
            None => ParseError { position: self.end, kind: ParseErrorKind::UnexpectedEnd { expected } },
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, t)) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(expected)),
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<(usize, String), ParseError> {
        match self.peek() {
            Some((p, Tok::Ident(s))) => {
                let r = (*p, s.clone());
                self.pos += 1;
                Ok(r)
            }
            _ => Err(self.err_here(expected)),
        }
    }

    fn keyword(&mut self, word: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, Tok::Ident(s))) if s == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(word)),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn var_list(&mut self) -> Result<RingContext, ParseError> {
        let start = self.peek().map_or(self.end, |(p, _)| *p);
        let mut names = vec![self.ident("variable name")?.1];
        while matches!(self.peek(), Some((_, Tok::Comma))) {
            self.pos += 1;
            names.push(self.ident("variable name")?.1);
        }
        RingContext::new(names)
            .map_err(|e| ParseError { position: start, kind: ParseErrorKind::InvalidRing(e.to_string()) })
    }

    fn generators(&mut self, ctx: &RingContext) -> Result<MonomialIdeal, ParseError> {
        let mut gens = Vec::new();
        if !self.at_end() {
            gens.push(self.monomial(ctx)?);
            while matches!(self.peek(), Some((_, Tok::Comma))) {
                self.pos += 1;
                gens.push(self.monomial(ctx)?);
            }
        }
        if !self.at_end() {
            return Err(self.err_here("',' or end of input"));
        }
        Ok(MonomialIdeal::new(ctx.num_vars(), gens))
    }

    fn monomial(&mut self, ctx: &RingContext) -> Result<Monomial, ParseError> {
        let mut exps = vec![0u32; ctx.num_vars()];
        loop {
            let (p, name) = self.ident("variable name")?;
            let idx =
                ctx.index_of(&name).ok_or(ParseError { position: p, kind: ParseErrorKind::UnknownVariable(name) })?;
            let mut e = 1u32;
            if matches!(self.peek(), Some((_, Tok::Caret))) {
                self.pos += 1;
                match self.peek() {
                    Some((ip, Tok::Int(digits))) => {
                        let ip = *ip;
                        e = digits
                            .parse()
                            .map_err(|_| ParseError { position: ip, kind: ParseErrorKind::ExponentOverflow })?;
                        if e == 0 {
                            return Err(ParseError { position: ip, kind: ParseErrorKind::ZeroExponent });
                        }
                        self.pos += 1;
                    }
                    _ => return Err(self.err_here("positive integer exponent")),
                }
            }
            exps[idx] =
                exps[idx].checked_add(e).ok_or(ParseError { position: p, kind: ParseErrorKind::ExponentOverflow })?;
            if matches!(self.peek(), Some((_, Tok::Star))) {
                self.pos += 1;
            } else {
                return Ok(Monomial::new(exps));
            }
        }
    }
}

/// Parses a comma-separated generator list in the given ring.
pub fn parse_ideal(text: &str, ctx: &RingContext) -> Result<MonomialIdeal, ParseError> {
    Parser::new(text)?.generators(ctx)
}

/// Parses a full `vars: ... ; ideal: ...` document.
pub fn parse_document(text: &str) -> Result<(RingContext, MonomialIdeal), ParseError> {
    let mut p = Parser::new(text)?;
    p.keyword("vars")?;
    p.expect(Tok::Colon, "':'")?;
    let ctx = p.var_list()?;
    p.expect(Tok::Semi, "';'")?;
    p.keyword("ideal")?;
    p.expect(Tok::Colon, "':'")?;
    let ideal = p.generators(&ctx)?;
    Ok((ctx, ideal))
}
