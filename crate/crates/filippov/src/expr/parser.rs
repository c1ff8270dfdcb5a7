//! Recursive-descent parser for the scalar expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base
//! base   := atom ('^' factor)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Precedence: `^` > unary `-` > `*` `/` > `+` `-`, with `^`
//! right-associative, so `-x^2` is `-(x^2)` and `x^-2` is accepted.
//! Errors carry the byte offset of the offending token.

use std::sync::Arc;

use super::{BinOp, Func, ScalarExpr, Var};
use crate::error::{ParseError, Result};

pub fn parse_scalar(src: &str) -> Result<ScalarExpr> {
    let mut p = Parser {
        bytes: src.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax_error("unexpected trailing input").into());
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn syntax_error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ScalarExpr::Bin(op, Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ScalarExpr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = ScalarExpr::Bin(op, Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ScalarExpr> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(ScalarExpr::Neg(Arc::new(inner)));
        }
        self.base()
    }

    fn base(&mut self) -> Result<ScalarExpr> {
        let atom = self.atom()?;
        if self.eat(b'^') {
            // Right-associative; the exponent may carry a unary minus.
            let exponent = self.factor()?;
            return Ok(ScalarExpr::Bin(BinOp::Pow, Arc::new(atom), Arc::new(exponent)));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<ScalarExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax_error("expected `)`").into());
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.syntax_error("expected expression").into()),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_digit() {
                return Err(self.syntax_error("expected digits after decimal point").into());
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.bytes.len() && (self.bytes[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.bytes.len() && (self.bytes[self.pos] == b'+' || self.bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `2e` without digits: the `e` was not an exponent marker.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("invalid numeric literal `{text}`"),
        })?;
        Ok(ScalarExpr::Num(value))
    }

    fn ident(&mut self) -> Result<ScalarExpr> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii identifier")
            .to_string();
        if self.peek() == Some(b'(') {
            let func = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                offset: start,
                name: name.clone(),
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax_error("expected `)` after function argument").into());
            }
            return Ok(ScalarExpr::Call(func, Arc::new(arg)));
        }
        match name.as_str() {
            "x" => Ok(ScalarExpr::Var(Var::X)),
            "y" => Ok(ScalarExpr::Var(Var::Y)),
            _ => Err(ParseError::UnknownVariable { offset: start, name }.into()),
        }
    }
}
