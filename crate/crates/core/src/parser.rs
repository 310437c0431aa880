//! Recursive-descent parser for the concrete formula grammar.
//!
//! ```text
//! formula  := implies
//! implies  := or ( "=>" implies )?            right associative
//! or       := and ( "|" and )*
//! and      := unary ( "&" unary )*
//! unary    := "!" unary | "E_"ROLE unary | "Ex_"ROLE unary | postfix
//! postfix  := primary ( "^{" NAT "/" NAT "}" )*
//! primary  := "top" | "bot" | IDENT
//!           | "(" formula ")" | "(" formula "?" formula ":" formula ")"
//!           | "[" and "|" formula "]_" ROLE
//! ```
//!
//! The marginal target is parsed without a top-level `|`; parenthesise a
//! disjunction used as a target.

use crate::error::{Error, Result};
use crate::syntax::{name, Signature, Sugar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Expect(String),
    Exists(String),
    Top,
    Bot,
    LParen,
    RParen,
    LBrack,
    /// `]_` followed by a role name.
    RBrackRole(String),
    Question,
    Colon,
    Amp,
    Bar,
    Bang,
    Arrow,
    /// `^{n/m}`.
    Power(u32, u32),
    Eof,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    let err = |pos: usize, msg: &str| Error::Syntax { pos, msg: msg.to_string() };
    let read_ident = |k: &mut usize| -> String {
        let mut s = String::new();
        while *k < chars.len() && is_ident_char(chars[*k].1) {
            s.push(chars[*k].1);
            *k += 1;
        }
        s
    };
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            '?' => Some(Tok::Question),
            ':' => Some(Tok::Colon),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '!' => Some(Tok::Bang),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            k += 1;
            continue;
        }
        match c {
            '=' => {
                if k + 1 < chars.len() && chars[k + 1].1 == '>' {
                    out.push((Tok::Arrow, pos));
                    k += 2;
                } else {
                    return Err(err(pos, "expected `=>`"));
                }
            }
            ']' => {
                if k + 1 < chars.len() && chars[k + 1].1 == '_' {
                    k += 2;
                    let r = read_ident(&mut k);
                    if r.is_empty() {
                        return Err(err(pos, "expected role name after `]_`"));
                    }
                    out.push((Tok::RBrackRole(r), pos));
                } else {
                    return Err(err(pos, "expected `]_role`"));
                }
            }
            '^' => {
                let rest: String = chars[k..].iter().map(|(_, c)| *c).collect();
                let close = rest.find('}').ok_or_else(|| err(pos, "unterminated `^{`"))?;
                let body = rest
                    .strip_prefix("^{")
                    .ok_or_else(|| err(pos, "expected `^{n/m}`"))?;
                let inner = &body[..close - 2];
                let (n, m) = inner.split_once('/').ok_or_else(|| err(pos, "expected `n/m` in exponent"))?;
                let n: u32 = n.trim().parse().map_err(|_| err(pos, "bad exponent numerator"))?;
                let m: u32 = m.trim().parse().map_err(|_| err(pos, "bad exponent denominator"))?;
                out.push((Tok::Power(n, m), pos));
                k += rest[..=close].chars().count();
            }
            c if is_ident_start(c) => {
                let s = read_ident(&mut k);
                let tok = if let Some(r) = s.strip_prefix("Ex_") {
                    if r.is_empty() {
                        return Err(err(pos, "expected role after `Ex_`"));
                    }
                    Tok::Exists(r.to_string())
                } else if let Some(r) = s.strip_prefix("E_") {
                    if r.is_empty() {
                        return Err(err(pos, "expected role after `E_`"));
                    }
                    Tok::Expect(r.to_string())
                } else if s == "top" {
                    Tok::Top
                } else if s == "bot" {
                    Tok::Bot
                } else {
                    Tok::Ident(s)
                };
                out.push((tok, pos));
            }
            _ => return Err(err(pos, &format!("unexpected character `{c}`"))),
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    k: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.k].0
    }

    fn pos(&self) -> usize {
        self.toks[self.k].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.k].0.clone();
        if self.k + 1 < self.toks.len() {
            self.k += 1;
        }
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Sugar> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Sugar::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Sugar> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            lhs = Sugar::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Sugar> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Sugar::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Sugar> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Sugar::not(self.unary()?))
            }
            Tok::Expect(r) => {
                self.bump();
                Ok(Sugar::Expect(name(&r), Box::new(self.unary()?)))
            }
            Tok::Exists(r) => {
                self.bump();
                Ok(Sugar::Exists(name(&r), Box::new(self.unary()?)))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Sugar> {
        let mut f = self.primary()?;
        while let Tok::Power(n, m) = *self.peek() {
            self.bump();
            f = Sugar::at_least(n, m, f);
        }
        Ok(f)
    }

    fn primary(&mut self) -> Result<Sugar> {
        match self.bump() {
            Tok::Top => Ok(Sugar::Always),
            Tok::Bot => Ok(Sugar::Never),
            Tok::Ident(s) => Ok(Sugar::Atom(name(&s))),
            Tok::LParen => {
                let c = self.formula()?;
                if *self.peek() == Tok::Question {
                    self.bump();
                    let t = self.formula()?;
                    self.expect(Tok::Colon, "`:`")?;
                    let e = self.formula()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Sugar::ite(c, t, e))
                } else {
                    self.expect(Tok::RParen, "`)` or `?`")?;
                    Ok(c)
                }
            }
            Tok::LBrack => {
                let target = self.and()?;
                self.expect(Tok::Bar, "`|` in marginal")?;
                let given = self.formula()?;
                match self.bump() {
                    Tok::RBrackRole(r) => Ok(Sugar::marginal(target, given, &r)),
                    _ => {
                        self.k -= 1;
                        self.fail("expected `]_role`")
                    }
                }
            }
            _ => {
                self.k = self.k.saturating_sub(1);
                self.fail("expected a formula")
            }
        }
    }
}

/// Parses a formula. With `Some(sig)` every name must be declared.
pub fn parse_formula(text: &str, sig: Option<&Signature>) -> Result<Sugar> {
    let mut p = Parser { toks: lex(text)?, k: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.fail("unexpected trailing input");
    }
    if let Some(sig) = sig {
        f.check_signature(sig)?;
    }
    Ok(f)
}

/// Parses an ALC concept (`top bot ! & | => Ex_ρ` and atoms).
pub fn parse_concept(text: &str, sig: Option<&Signature>) -> Result<crate::syntax::Concept> {
    crate::syntax::Concept::from_sugar(&parse_formula(text, sig)?)
}
