//! Text form of classes: `M4-(2F+2G+N0)`, `-6K+2F+2G+N0`, `1/2*K`.
//!
//! Grammar: `expr := [±] term (± term)*`, `term := [coef [*]] atom`,
//! `atom := ident | ( expr )`, `coef := int [/ int]`. A bare coefficient is
//! only accepted when it is zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::space::{DivisorClass, IntersectionSpace};
use super::LatticeError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn err(src: &str, why: &str) -> LatticeError {
    LatticeError::Parse(src.to_string(), why.to_string())
}

fn lex(src: &str) -> Result<Vec<Tok>, LatticeError> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let st = *i;
        while *i < cs.len() && cs[*i].is_ascii_digit() {
            *i += 1;
        }
        cs[st..*i].iter().collect::<String>()
    };
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let n: BigInt = digits(&mut i).parse().map_err(|_| err(src, "bad integer"))?;
                let mut q = BigRational::from_integer(n);
                if i < cs.len() && cs[i] == '/' {
                    i += 1;
                    let den = digits(&mut i);
                    let den: BigInt = den.parse().map_err(|_| err(src, "bad denominator"))?;
                    if den.is_zero() {
                        return Err(err(src, "zero denominator"));
                    }
                    q /= BigRational::from_integer(den);
                }
                out.push(Tok::Num(q));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let st = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(cs[st..i].iter().collect()));
            }
            other => return Err(err(src, &format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
    space: &'a IntersectionSpace,
    resolve: &'a dyn Fn(&str) -> Option<DivisorClass>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<DivisorClass, LatticeError> {
        let mut sign = BigRational::one();
        match self.peek() {
            Some(Tok::Minus) => {
                sign = -sign;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale(&sign);
        loop {
            let s = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => break,
            };
            self.pos += 1;
            acc = acc.plus(&self.term()?.scale_int(s));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DivisorClass, LatticeError> {
        let mut coef = None;
        if let Some(Tok::Num(q)) = self.peek() {
            coef = Some(q.clone());
            self.pos += 1;
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            }
        }
        let atom = match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(c) = (self.resolve)(&name) {
                    c
                } else {
                    self.space.class(&name)?
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(err(self.src, "missing ')'"));
                }
                self.pos += 1;
                inner
            }
            _ => match coef {
                Some(q) if q.is_zero() => return Ok(DivisorClass::zero()),
                _ => return Err(err(self.src, "expected a symbol or '('")),
            },
        };
        Ok(match coef {
            Some(q) => atom.scale(&q),
            None => atom,
        })
    }
}

/// Parses a class expression. Identifiers are looked up with `resolve`
/// first (named derived classes), then as base symbols of `space`.
pub fn parse_class(
    src: &str,
    space: &IntersectionSpace,
    resolve: &dyn Fn(&str) -> Option<DivisorClass>,
) -> Result<DivisorClass, LatticeError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(err(src, "empty expression"));
    }
    let mut p = Parser { src, toks, pos: 0, space, resolve };
    let c = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(src, "trailing input"));
    }
    Ok(c)
}

fn split_index(s: &str) -> Option<(&str, u32)> {
    let cut = s.find(|c: char| c.is_ascii_digit())?;
    let (head, tail) = s.split_at(cut);
    Some((head, tail.parse().ok()?))
}

/// Splits a comma list at depth zero and expands ranges `N0..N8`
/// (or `N0..8`).
pub fn parse_class_list(src: &str) -> Result<Vec<String>, LatticeError> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            items.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    items.push(cur);
    let mut out = Vec::new();
    for it in items {
        let it = it.trim();
        if it.is_empty() {
            return Err(err(src, "empty list item"));
        }
        match it.split_once("..") {
            Some((a, b)) => {
                let (ha, lo) = split_index(a).ok_or_else(|| err(src, "bad range start"))?;
                let hi = match split_index(b) {
                    Some((hb, n)) if hb.is_empty() || hb == ha => n,
                    _ => return Err(err(src, "bad range end")),
                };
                if hi < lo {
                    return Err(err(src, "empty range"));
                }
                out.extend((lo..=hi).map(|i| format!("{ha}{i}")));
            }
            None => out.push(it.to_string()),
        }
    }
    Ok(out)
}
