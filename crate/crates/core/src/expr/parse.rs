//! Reader for the s-expression text form, e.g. `(sum (min (li 1) (ls 2)) (neg (li 3)))`.

use super::{AtomKind, Expression};
use crate::error::{Error, Result};

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                out.push((start, Token::Word(&text[start..i])));
            }
        }
    }
    out
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        let at = self.tokens.get(self.pos).map_or(self.len, |t| t.0);
        Error::Parse(format!("expression, column {}: {msg}", at + 1))
    }

    fn next(&mut self) -> Option<&Token<'a>> {
        let t = self.tokens.get(self.pos).map(|t| &t.1);
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expression> {
        match self.next() {
            Some(Token::Open) => {}
            _ => {
                self.pos -= 1;
                return Err(self.err("expected '('"));
            }
        }
        let head = match self.next() {
            Some(Token::Word(w)) => *w,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected an operator name"));
            }
        };
        let node = match head {
            "li" | "ls" => {
                let kind = if head == "li" { AtomKind::LimInf } else { AtomKind::LimSup };
                let dim = match self.next() {
                    Some(Token::Word(w)) => w.parse::<usize>().ok().filter(|d| *d >= 1),
                    _ => None,
                };
                match dim {
                    Some(d) => Expression::Atom(kind, d),
                    None => {
                        self.pos -= 1;
                        return Err(self.err("expected a dimension index >= 1"));
                    }
                }
            }
            "neg" | "min" | "max" | "sum" => {
                let mut children = Vec::new();
                while matches!(self.tokens.get(self.pos), Some((_, Token::Open))) {
                    children.push(self.expr()?);
                }
                match (head, children.len()) {
                    ("neg", 1) => Expression::Neg(Box::new(children.pop().unwrap())),
                    ("neg", _) => return Err(self.err("neg takes exactly one operand")),
                    (_, n) if n < 2 => return Err(self.err(&format!("{head} takes at least two operands"))),
                    ("min", _) => Expression::Min(children),
                    ("max", _) => Expression::Max(children),
                    _ => Expression::Sum(children),
                }
            }
            other => {
                self.pos -= 1;
                return Err(self.err(&format!("unknown operator {other:?}")));
            }
        };
        match self.next() {
            Some(Token::Close) => Ok(node),
            _ => {
                self.pos -= 1;
                Err(self.err("expected ')'"))
            }
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Expression> {
    let mut p = Parser { tokens: tokenize(text), pos: 0, len: text.len() };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
