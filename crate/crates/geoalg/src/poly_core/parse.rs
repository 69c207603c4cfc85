//! Recursive-descent parser for the expression text grammar.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Atom, PolyError, SymExpr};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), PolyError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<SymExpr, PolyError> {
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc += self.term()?;
            } else if self.eat(b'-') {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SymExpr, PolyError> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.power()?;
            } else if self.eat(b'/') {
                let d = self.power()?;
                acc = &acc * &d.inverse_monomial()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<SymExpr, PolyError> {
        if self.eat(b'-') {
            return Ok(-self.power()?);
        }
        let base = self.primary()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, PolyError> {
        let close = if self.eat(b'(') {
            Some(b')')
        } else if self.eat(b'{') {
            Some(b'}')
        } else {
            None
        };
        let neg = self.eat(b'-');
        let n = self.integer()?;
        if let Some(c) = close {
            self.expect(c)?;
        }
        let n: i32 = n
            .try_into()
            .map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -n } else { n })
    }

    fn integer(&mut self) -> Result<i64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn index_list(&mut self, count: usize) -> Result<Vec<i64>, PolyError> {
        self.expect(b'[')?;
        let mut out = Vec::new();
        for idx in 0..count {
            if idx > 0 {
                self.expect(b',')?;
            }
            let neg = self.eat(b'-');
            let v = self.integer()?;
            out.push(if neg { -v } else { v });
        }
        self.expect(b']')?;
        Ok(out)
    }

    fn primary(&mut self) -> Result<SymExpr, PolyError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().map_err(|_| self.err("bad number"))?;
                Ok(SymExpr::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                self.identifier(name)
            }
            Some(c) => Err(self.err(format!("unexpected character '{}'", c as char))),
        }
    }

    fn small(&self, v: i64) -> Result<usize, PolyError> {
        if (1..=u16::MAX as i64).contains(&v) {
            Ok(v as usize)
        } else {
            Err(self.err("index out of range"))
        }
    }

    fn identifier(&mut self, name: &str) -> Result<SymExpr, PolyError> {
        let atom = match name {
            "lam" => Atom::Lam,
            "h" => Atom::H,
            "Pi" => Atom::Pi,
            "hbar" => Atom::Hbar,
            "G" => {
                let v = self.index_list(3)?;
                let k: i32 = v[2].try_into().map_err(|_| self.err("level out of range"))?;
                Atom::g(self.small(v[0])?, self.small(v[1])?, k)
            }
            "Ghat" => {
                let v = self.index_list(2)?;
                Atom::ghat(self.small(v[0])?, self.small(v[1])?)
            }
            "TrH" => {
                let v = self.index_list(1)?;
                Atom::TrH(self.small(v[0])? as u32)
            }
            _ => {
                let (head, digits) = name.split_at(1);
                if (head == "s" || head == "t")
                    && !digits.is_empty()
                    && digits.bytes().all(|b| b.is_ascii_digit())
                {
                    let v: i64 = digits.parse().map_err(|_| self.err("bad index"))?;
                    let i = self.small(v)? as u16;
                    if head == "s" {
                        Atom::S(i)
                    } else {
                        Atom::T(i)
                    }
                } else {
                    Atom::sym(name)
                }
            }
        };
        Ok(SymExpr::atom(atom))
    }
}

/// Parse expression text such as `2*G[1,2,0]*G[3,4,0] - 3/2*s1^-2`.
pub fn parse_expr(text: &str) -> Result<SymExpr, PolyError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl FromStr for SymExpr {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}
