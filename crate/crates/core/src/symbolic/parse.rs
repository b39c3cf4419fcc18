//! Text front end for generalized polynomials.
//!
//! ```text
//! poly     := [sign] term ( sign term )*
//! term     := factor ( '*' factor )*
//! factor   := (number | ident) [ '^' exponent ]
//! exponent := uint | udecimal | '(' [sign] ( int [ '/' int ] | decimal ) ')'
//! ```
//!
//! Integer and `a/b` exponents stay exact; decimal exponents become reals.

use super::exponent::Exponent;
use super::poly::{GenPoly, VarList};
use super::SymbolicError;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type RawTerm = (f64, Vec<(String, Exponent)>);

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SymbolicError> {
        Err(SymbolicError::Syntax { pos: self.pos, msg: msg.into() })
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

    fn poly(&mut self) -> Result<Vec<RawTerm>, SymbolicError> {
        if self.peek().is_none() {
            return self.err("empty expression");
        }
        let mut terms = Vec::new();
        let mut sign = if self.eat(b'-') {
            -1.0
        } else {
            self.eat(b'+');
            1.0
        };
        loop {
            let (c, f) = self.term()?;
            terms.push((sign * c, f));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                Some(c) => return self.err(format!("unexpected `{}`", c as char)),
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<RawTerm, SymbolicError> {
        let mut coeff = 1.0;
        let mut powers = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    let (text, _) = self.number()?;
                    let base: f64 = text.parse().map_err(|_| SymbolicError::Syntax { pos: self.pos, msg: format!("bad number `{text}`") })?;
                    let e = if self.eat(b'^') { self.exponent()? } else { Exponent::ONE };
                    coeff *= base.powf(e.value());
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let name = self.ident();
                    let e = if self.eat(b'^') { self.exponent()? } else { Exponent::ONE };
                    powers.push((name, e));
                }
                Some(c) => return self.err(format!("expected a number or variable, found `{}`", c as char)),
                None => return self.err("expected a number or variable, found end of input"),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((coeff, powers))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    /// Unsigned decimal literal; the flag reports whether it was a plain integer.
    fn number(&mut self) -> Result<(String, bool), SymbolicError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos > s
        };
        let mut integer = digits(self);
        let mut any = integer;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            any |= digits(self);
            integer = false;
        }
        if !any {
            self.pos = start;
            return self.err("expected digits");
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) {
                integer = false;
            } else {
                self.pos = save;
            }
        }
        Ok((String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(), integer))
    }

    fn exponent(&mut self) -> Result<Exponent, SymbolicError> {
        if self.eat(b'(') {
            let neg = if self.eat(b'-') {
                true
            } else {
                self.eat(b'+');
                false
            };
            let e = self.unsigned_exponent(true)?;
            if !self.eat(b')') {
                return self.err("expected `)`");
            }
            Ok(if neg { e.neg() } else { e })
        } else {
            let neg = self.eat(b'-');
            let e = self.unsigned_exponent(false)?;
            Ok(if neg { e.neg() } else { e })
        }
    }

    fn unsigned_exponent(&mut self, allow_ratio: bool) -> Result<Exponent, SymbolicError> {
        let at = self.pos;
        let (text, integer) = self.number()?;
        if integer {
            let n: i64 = text.parse().map_err(|_| SymbolicError::Syntax { pos: at, msg: format!("exponent `{text}` out of range") })?;
            if allow_ratio && self.eat(b'/') {
                let at = self.pos;
                let (dtext, dint) = self.number()?;
                let d: i64 = match (dint, dtext.parse::<i64>()) {
                    (true, Ok(d)) if d != 0 => d,
                    _ => return Err(SymbolicError::Syntax { pos: at, msg: format!("bad exponent denominator `{dtext}`") }),
                };
                return Ok(Exponent::ratio(n, d));
            }
            return Ok(Exponent::int(n));
        }
        let x: f64 = text.parse().map_err(|_| SymbolicError::Syntax { pos: at, msg: format!("bad exponent `{text}`") })?;
        Ok(Exponent::real(x))
    }
}

/// Parse `text` into a canonical polynomial.
///
/// With `declared`, every identifier must belong to that list and the result
/// lives over it; otherwise variables are collected in order of first use.
pub fn parse_poly(text: &str, declared: Option<&VarList>) -> Result<GenPoly, SymbolicError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let raw = p.poly()?;
    let vars = match declared {
        Some(vars) => {
            for (_, powers) in &raw {
                for (name, _) in powers {
                    if vars.index_of(name).is_none() {
                        return Err(SymbolicError::UnknownVariable(name.clone()));
                    }
                }
            }
            vars.clone()
        }
        None => {
            let mut names: Vec<&str> = Vec::new();
            for (_, powers) in &raw {
                for (name, _) in powers {
                    if !names.contains(&name.as_str()) {
                        names.push(name);
                    }
                }
            }
            VarList::new(&names)?
        }
    };
    let mut out = GenPoly::zero(&vars);
    for (coeff, powers) in raw {
        let powers: Vec<(&str, Exponent)> = powers.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        out = out.add(&GenPoly::monomial(&vars, coeff, &powers)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_terms() {
        let p = parse_poly("2*S^(1/2) - Q", None).unwrap();
        let coeffs: Vec<f64> = p.terms().iter().map(|t| t.coeff()).collect();
        assert_eq!(coeffs, vec![2.0, -1.0]);
        assert_eq!(p.terms()[0].exponents()[0], Exponent::ratio(1, 2));
    }

    #[test]
    fn empty_input_is_syntax_error() {
        assert!(matches!(parse_poly("", None), Err(SymbolicError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_poly("   ", None), Err(SymbolicError::Syntax { .. })));
    }

    #[test]
    fn error_positions() {
        match parse_poly("S + * Q", None) {
            Err(SymbolicError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly("S^(1/0)", None), Err(SymbolicError::Syntax { .. })));
        assert!(matches!(parse_poly("S^(1/2", None), Err(SymbolicError::Syntax { .. })));
        assert!(matches!(parse_poly("2 S", None), Err(SymbolicError::Syntax { .. })));
    }

    #[test]
    fn declared_variables_enforced() {
        let vars = VarList::new(&["S", "Q"]).unwrap();
        assert_eq!(parse_poly("a*S", Some(&vars)), Err(SymbolicError::UnknownVariable("a".into())));
        assert_eq!(parse_poly("S^2", Some(&vars)).unwrap().vars().names(), vec!["S", "Q"]);
    }

    #[test]
    fn exponent_forms() {
        let p = parse_poly("S^2*Q^(-1) + 3.5e-2*S^0.25 + S^-1 + 2^(1/2)", None).unwrap();
        let x = crate::symbolic::EvalPoint::new(&[("S", 2.0), ("Q", 4.0)]).unwrap();
        let expect = 4.0 / 4.0 + 0.035 * 2f64.powf(0.25) + 0.5 + 2f64.sqrt();
        assert!((p.eval(&x).unwrap() - expect).abs() < 1e-14);
        assert!(!parse_poly("S^0.25", None).unwrap().terms()[0].exponents()[0].is_rational());
    }

    #[test]
    fn display_reparses() {
        let p = parse_poly("-1e-7*S^(3/2)*Q + 0.125*Q^(-5/4) - 12345678.9 + S^(0.3)", None).unwrap();
        let back = parse_poly(&p.to_string(), Some(p.vars())).unwrap();
        assert_eq!(back, p);
    }
}
