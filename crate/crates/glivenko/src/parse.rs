//! Text syntax for formulas.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*            (left-assoc)
//! imp     := or ("->" imp)?              (right-assoc)
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "<" INT ">" unary | "[" INT "]" unary
//!          | "dia" unary | "box" unary | atom
//! atom    := "p" INT | "true" | "false" | "(" formula ")"
//! ```
//!
//! `dia`/`box` are aliases for `<0>`/`[0]`. Whitespace is insignificant.
//! Precedence: unary > `&` > `|` > `->` > `<->`.

use crate::formula::{Formula, Signature};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(usize),
    True,
    False,
    Dia(usize),
    Box(usize),
    DiaWord,
    BoxWord,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected a number");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<usize>()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "number out of range".into(),
            })
    }

    /// Next token with its starting position, or None at end of input.
    fn next_tok(&mut self) -> Result<Option<(usize, Tok)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'~' => {
                self.pos += 1;
                Tok::Not
            }
            b'&' => {
                self.pos += 1;
                Tok::And
            }
            b'|' => {
                self.pos += 1;
                Tok::Or
            }
            b'-' => {
                if self.src.get(self.pos + 1) == Some(&b'>') {
                    self.pos += 2;
                    Tok::Implies
                } else {
                    return self.err(start, "expected '->'");
                }
            }
            b'<' => {
                if self.src.get(self.pos + 1) == Some(&b'-') {
                    if self.src.get(self.pos + 2) == Some(&b'>') {
                        self.pos += 3;
                        Tok::Iff
                    } else {
                        return self.err(start, "expected '<->'");
                    }
                } else {
                    self.pos += 1;
                    let i = self.number()?;
                    if self.src.get(self.pos) != Some(&b'>') {
                        return self.err(self.pos, "expected '>' closing a diamond");
                    }
                    self.pos += 1;
                    Tok::Dia(i)
                }
            }
            b'[' => {
                self.pos += 1;
                let i = self.number()?;
                if self.src.get(self.pos) != Some(&b']') {
                    return self.err(self.pos, "expected ']' closing a box");
                }
                self.pos += 1;
                Tok::Box(i)
            }
            b'p' if self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit) => {
                self.pos += 1;
                Tok::Var(self.number()?)
            }
            _ if c.is_ascii_alphabetic() => {
                let ws = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                match &self.src[ws..self.pos] {
                    b"true" => Tok::True,
                    b"false" => Tok::False,
                    b"dia" => Tok::DiaWord,
                    b"box" => Tok::BoxWord,
                    w => {
                        return self.err(
                            ws,
                            format!("unknown word '{}'", String::from_utf8_lossy(w)),
                        )
                    }
                }
            }
            _ => return self.err(start, format!("unexpected character '{}'", c as char)),
        };
        Ok(Some((start, tok)))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    sig: Signature,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.idx += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                pos: self.pos(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut f = self.imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.idx += 1;
            let g = self.imp()?;
            f = Formula::iff(f, g);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula> {
        let f = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.idx += 1;
            let g = self.imp()?;
            Ok(Formula::implies(f, g))
        } else {
            Ok(f)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.idx += 1;
            let g = self.and()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.idx += 1;
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.idx += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Dia(i)) => {
                self.idx += 1;
                self.check_modality(i, pos)?;
                Ok(Formula::diamond(i, self.unary()?))
            }
            Some(Tok::Box(i)) => {
                self.idx += 1;
                self.check_modality(i, pos)?;
                Ok(Formula::box_(i, self.unary()?))
            }
            Some(Tok::DiaWord) => {
                self.idx += 1;
                Ok(Formula::diamond(0, self.unary()?))
            }
            Some(Tok::BoxWord) => {
                self.idx += 1;
                Ok(Formula::box_(0, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn check_modality(&self, i: usize, pos: usize) -> Result<()> {
        self.sig.check_modality(i).map_err(|_| Error::Parse {
            pos,
            msg: format!(
                "modality index {i} out of range (signature has n = {})",
                self.sig.n()
            ),
        })
    }

    fn atom(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Var(i)) => Ok(Formula::var(i)),
            Some(Tok::True) => Ok(Formula::top()),
            Some(Tok::False) => Ok(Formula::falsum()),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a formula".into(),
            }),
        }
    }
}

/// Parse a formula over the given signature.
pub fn parse(text: &str, sig: Signature) -> Result<Formula> {
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_tok()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        end: text.len(),
        sig,
    };
    let f = parser.formula()?;
    if parser.idx != parser.toks.len() {
        return Err(Error::Parse {
            pos: parser.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(f)
}
