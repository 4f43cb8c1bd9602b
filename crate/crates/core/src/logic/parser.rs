//! Concrete formula syntax.
//!
//! ```text
//! imp   := or ("->" imp)?
//! or    := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := ("!" | "K" | "L" | "dia" | "box" | "<e>" | "[e]") unary | atom
//! atom  := "true" | "false" | ident | "(" imp ")"
//! ```
//!
//! Positions in errors are character offsets into the input, starting at 0.

use thiserror::Error;

use super::Formula;
use crate::frame::{Alphabet, EventId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown event `{name}` at position {position}")]
    UnknownEvent { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::SyntaxError { position, .. } | ParseError::UnknownEvent { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    Open,
    Close,
    Diamond(String),
    Square(String),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::Diamond(e) => format!("`<{e}>`"),
        Tok::Square(e) => format!("`[{e}]`"),
        Tok::End => "end of input".into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '-' => {
                if chars.get(i + 1) != Some(&'>') {
                    return Err(syntax(i, "expected `->`"));
                }
                i += 1;
                Tok::Arrow
            }
            '<' | '[' => {
                let close = if c == '<' { '>' } else { ']' };
                let end = chars[i + 1..]
                    .iter()
                    .position(|&d| d == close)
                    .ok_or_else(|| syntax(i, format!("unclosed `{c}`")))?;
                let name: String = chars[i + 1..i + 1 + end].iter().collect::<String>().trim().to_string();
                if name.is_empty() {
                    return Err(syntax(i, "missing event name"));
                }
                i += end + 1;
                if c == '<' {
                    Tok::Diamond(name)
                } else {
                    Tok::Square(name)
                }
            }
            c if is_ident_start(c) => {
                while i + 1 < chars.len() && is_ident_char(chars[i + 1]) {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            c => return Err(syntax(i, format!("unexpected character `{c}`"))),
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn position(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn event(&self, name: &str, position: usize) -> Result<EventId, ParseError> {
        self.alphabet.lookup(name).ok_or_else(|| ParseError::UnknownEvent {
            name: name.to_string(),
            position,
        })
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let (position, tok) = self.bump();
        match tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Diamond(name) => {
                let e = self.event(&name, position)?;
                Ok(Formula::after(e, self.unary()?))
            }
            Tok::Square(name) => {
                let e = self.event(&name, position)?;
                Ok(Formula::after_box(e, self.unary()?))
            }
            Tok::Ident(word) => match word.as_str() {
                "K" => Ok(Formula::k(self.unary()?)),
                "L" => Ok(Formula::l(self.unary()?)),
                "dia" => Ok(Formula::dia(self.alphabet, self.unary()?)),
                "box" => Ok(Formula::box_all(self.alphabet, self.unary()?)),
                "true" => Ok(Formula::Bool(true)),
                "false" => Ok(Formula::Bool(false)),
                _ => Ok(Formula::Atom(word)),
            },
            Tok::Open => {
                let f = self.implication()?;
                let (close_at, close) = self.bump();
                if close != Tok::Close {
                    return Err(syntax(close_at, format!("expected `)`, found {}", describe(&close))));
                }
                Ok(f)
            }
            other => Err(syntax(
                position,
                format!("expected a formula, found {}", describe(&other)),
            )),
        }
    }
}

/// Parses `text` against the event alphabet used by `<e>`, `[e]`, `dia` and `box`.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        alphabet,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.position(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(f)
}
