//! Tokenizer shared by the surface-syntax parsers.
//!
//! The surface syntax is ASCII (`\`, `~`, `*`, `->`, `new`), but the
//! Unicode spellings produced by the pretty printers' Unicode mode
//! (λ, •, ν, ✓, ⌜x⌝) are accepted too, so both renderings read back.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Backslash,
    Dot,
    LParen,
    RParen,
    Bar,
    Bang,
    Lt,
    Gt,
    Star,
    Tilde,
    Arrow,
    Zero,
    Nu,
    Check,
    ProtectOpen,
    ProtectClose,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Nu => f.write_str("`new`"),
            Tok::Check => f.write_str("`ok`"),
            Tok::ProtectOpen => f.write_str("`⌜`"),
            Tok::ProtectClose => f.write_str("`⌝`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

/// A parse failure at a 1-based character column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(column: usize, message: impl Into<String>) -> Self {
        Self { column, message: message.into() }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let single = match c {
            '\\' | 'λ' => Some(Tok::Backslash),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '|' => Some(Tok::Bar),
            '!' => Some(Tok::Bang),
            '<' | '⟨' => Some(Tok::Lt),
            '>' | '⟩' => Some(Tok::Gt),
            '*' | '•' => Some(Tok::Star),
            '~' => Some(Tok::Tilde),
            '0' => Some(Tok::Zero),
            'ν' => Some(Tok::Nu),
            '✓' => Some(Tok::Check),
            '⌜' => Some(Tok::ProtectOpen),
            '⌝' => Some(Tok::ProtectClose),
            '→' => Some(Tok::Arrow),
            _ => None,
        };
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, col));
            i += 2;
        } else if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if chars.get(i) == Some(&'\'') {
                i += 1;
                let digits = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits {
                    return Err(ParseError::new(i + 1, "expected digits after `'`"));
                }
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "new" => Tok::Nu,
                "ok" => Tok::Check,
                _ => Tok::Ident(word),
            };
            out.push((tok, col));
        } else {
            return Err(ParseError::new(col, alloc::format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// Cursor over a token stream with position-carrying errors.
pub struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Self { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    pub fn save(&self) -> usize {
        self.pos
    }

    pub fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.column(), alloc::format!("expected {wanted}, found {}", self.peek()))
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(self.unexpected("end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_are_one_based_characters() {
        let toks = tokenize("λx. x'2 -> ok").unwrap();
        let cols: Vec<usize> = toks.iter().map(|t| t.1).collect();
        assert_eq!(cols, [1, 2, 3, 5, 9, 12, 14]);
        assert_eq!(toks[3].0, Tok::Ident("x'2".into()));
        assert_eq!(toks[5].0, Tok::Check);
    }

    #[test]
    fn dangling_prime_is_rejected() {
        assert_eq!(tokenize("x' y").unwrap_err().column, 3);
    }
}
