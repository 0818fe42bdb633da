//! Expression grammar for scalar Young functions `V(s)`.
//!
//! The grammar is deliberately small: sums, positive scalar multiples,
//! `max(...)`, and powers `s^a` with `a >= 1`. Everything expressible here is
//! automatically convex, increasing, and vanishing at the origin, so radial
//! costs built from it need no further convexity analysis.
//!
//! Examples: `s^2`, `s^2 + s^4`, `0.5*s^1.5 + max(s^2, 3*s^6)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum YoungExpr {
    /// `s^a`, `a >= 1`
    Power(f64),
    /// `c * e`, `c > 0`
    Scale(f64, Box<YoungExpr>),
    Sum(Vec<YoungExpr>),
    Max(Vec<YoungExpr>),
}

impl YoungExpr {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            YoungExpr::Power(a) => s.powf(*a),
            YoungExpr::Scale(c, e) => c * e.eval(s),
            YoungExpr::Sum(es) => es.iter().map(|e| e.eval(s)).sum(),
            YoungExpr::Max(es) => es.iter().map(|e| e.eval(s)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Smallest and largest exponents appearing anywhere in the tree. These
    /// govern the growth of `V` at 0 and at infinity.
    pub fn exponent_range(&self) -> (f64, f64) {
        match self {
            YoungExpr::Power(a) => (*a, *a),
            YoungExpr::Scale(_, e) => e.exponent_range(),
            YoungExpr::Sum(es) | YoungExpr::Max(es) => es.iter().map(|e| e.exponent_range()).fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), (a, b)| (lo.min(a), hi.max(b)),
            ),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {}", self.pos))
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

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("malformed number"))
    }

    fn expr(&mut self) -> Result<YoungExpr> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            YoungExpr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<YoungExpr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let coef = self.number()?;
                if coef <= 0.0 || !coef.is_finite() {
                    return Err(self.err("scalar multiples must be positive"));
                }
                self.expect(b'*')?;
                Ok(YoungExpr::Scale(coef, Box::new(self.factor()?)))
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<YoungExpr> {
        match self.peek() {
            Some(b'm') => {
                for c in b"max" {
                    if self.bump() != Some(*c) {
                        return Err(self.err("expected 'max'"));
                    }
                }
                self.expect(b'(')?;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(b')')?;
                if args.len() < 2 {
                    return Err(self.err("max needs at least two arguments"));
                }
                Ok(YoungExpr::Max(args))
            }
            Some(b's') => {
                self.pos += 1;
                let a = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.number()?
                } else {
                    1.0
                };
                if !(a >= 1.0) || !a.is_finite() {
                    return Err(self.err("exponents must satisfy a >= 1"));
                }
                Ok(YoungExpr::Power(a))
            }
            _ => Err(self.err("expected 's', 's^a', a scalar multiple, or 'max('")),
        }
    }
}

/// Parse a Young-function expression such as `s^2 + s^4`.
pub fn parse_young(src: &str) -> Result<YoungExpr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sum_of_powers() {
        let v = parse_young("s^2 + s^4").unwrap();
        assert!((v.eval(2.0) - 20.0).abs() < 1e-12);
        assert_eq!(v.exponent_range(), (2.0, 4.0));
    }

    #[test]
    fn parses_scaled_max() {
        let v = parse_young("0.5*s^1.5 + max(s^2, 3*s^6)").unwrap();
        let s = 1.3f64;
        let want = 0.5 * s.powf(1.5) + (s * s).max(3.0 * s.powi(6));
        assert!((v.eval(s) - want).abs() < 1e-12);
        assert_eq!(v.exponent_range(), (1.5, 6.0));
    }

    #[test]
    fn bare_s_is_linear() {
        let v = parse_young("s").unwrap();
        assert_eq!(v.eval(3.0), 3.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_young("s^0.5").is_err());
        assert!(parse_young("-1*s^2").is_err());
        assert!(parse_young("s^2 -").is_err());
        assert!(parse_young("max(s^2)").is_err());
        assert!(parse_young("7").is_err());
    }
}
