//! Recursive-descent parser for integer polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```

use std::sync::Arc;

use num_bigint::BigInt;

use super::poly::{IntPoly, Integers};
use super::DeltaError;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Arc<Vec<String>>,
}

pub fn parse_poly(text: &str, vars: &Arc<Vec<String>>) -> Result<IntPoly, DeltaError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> DeltaError {
        DeltaError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
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

    fn expr(&mut self) -> Result<IntPoly, DeltaError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntPoly, DeltaError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<IntPoly, DeltaError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<IntPoly, DeltaError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self
                .digits()
                .ok_or_else(|| self.error("expected exponent"))?;
            let e: u32 = e.parse().map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<IntPoly, DeltaError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().unwrap();
                let v: BigInt = d.parse().unwrap();
                Ok(IntPoly::constant(&Integers, self.vars, v))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i = self.vars.iter().position(|v| v == name).ok_or_else(|| {
                    DeltaError::UnknownVariable {
                        name: name.to_string(),
                        pos: start,
                    }
                })?;
                Ok(IntPoly::var(&Integers, self.vars, i))
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::poly::var_names;

    #[test]
    fn precedence_and_errors() {
        let v = var_names(&["x", "y", "c1", "c8"]);
        let p = parse_poly("2*x^2 - (x - y)*y + -3", &v).unwrap();
        assert_eq!(p.to_text(), "2*x^2 - x*y + y^2 - 3");
        assert_eq!(parse_poly("c8^3", &v).unwrap().len(), 1);
        assert_eq!(
            parse_poly("c1 +", &v).unwrap_err(),
            DeltaError::Syntax {
                pos: 4,
                msg: "unexpected end of input".into()
            }
        );
        assert!(matches!(
            parse_poly("x*w", &v),
            Err(DeltaError::UnknownVariable { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("x y", &v),
            Err(DeltaError::Syntax { .. })
        ));
    }
}
