//! Text grammar for expressions.
//!
//! Coordinates are written with one-based indices: `u[a]`, `u[a;i]`,
//! `u[a;i,j]` and `u[a;i,j,k]`. Curve parameters are `t[j]`. Operators are
//! `+ - * / ^` with the usual precedence; `^` is right associative and takes
//! an integer or half-integer exponent. Functions are `sqrt exp log sin cos`,
//! and `pi` is a named constant.

use num::{BigInt, One, Zero};

use super::coord::{Coord, Dimensions};
use super::expr::{Expr, Func};
use super::normal::Rational;
use crate::error::{Error, Result};

/// Which coordinate names an expression may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variables {
    /// Jet coordinates `u[..]`.
    Jet,
    /// Curve parameters `t[j]`, stored as `Coord::Base(j)`.
    Param,
}

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    pub variables: Variables,
    /// When set, indices outside the chart are rejected.
    pub dims: Option<Dimensions>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { variables: Variables::Jet, dims: None }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, opts };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    opts: ParseOptions,
}

impl Parser<'_> {
    fn error_at(&self, pos: usize, message: String) -> Error {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = pos - before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1) + 1;
        Error::Parse { line, column, message }
    }

    fn error(&self, message: String) -> Error {
        self.error_at(self.pos, message)
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = match (acc, rhs) {
                    (Expr::Product(mut xs), r) => {
                        xs.push(r);
                        Expr::Product(xs)
                    }
                    (l, r) => Expr::Product(vec![l, r]),
                };
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                acc = match (acc, rhs) {
                    (Expr::Const(a), Expr::Const(b)) if !b.is_zero() => Expr::Const(a / b),
                    (Expr::Product(mut xs), r) => {
                        xs.push(Expr::Pow(Box::new(r), -1));
                        Expr::Product(xs)
                    }
                    (l, r) => Expr::Product(vec![l, Expr::Pow(Box::new(r), -1)]),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(negate(self.unary()?));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let exponent = self.unary()?;
        let value = exponent
            .to_normal()
            .ok()
            .and_then(|n| n.as_constant())
            .ok_or_else(|| self.error_at(at, "exponent must be a rational constant".into()))?;
        let doubled = &value * Rational::from_integer(BigInt::from(2));
        if !doubled.is_integer() {
            return Err(self.error_at(at, "exponent must be an integer or half-integer".into()));
        }
        let twice: i32 = doubled
            .to_integer()
            .try_into()
            .map_err(|_| self.error_at(at, "exponent out of range".into()))?;
        Ok(if twice % 2 == 0 {
            Expr::Pow(Box::new(base), twice / 2)
        } else if twice == 1 {
            Expr::Func(Func::Sqrt, Box::new(base))
        } else {
            Expr::Pow(Box::new(Expr::Func(Func::Sqrt, Box::new(base))), twice)
        })
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut value = Rational::zero();
        let ten = Rational::from_integer(BigInt::from(10));
        let mut scale: Option<Rational> = None;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_digit() {
                let d = Rational::from_integer(BigInt::from(c - b'0'));
                match &mut scale {
                    None => value = value * &ten + d,
                    Some(s) => {
                        *s = &*s / &ten;
                        value += d * &*s;
                    }
                }
            } else if c == b'.' && scale.is_none() {
                scale = Some(Rational::one());
            } else {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start + 1 && self.src[start] == b'.' {
            return Err(self.error_at(start, "malformed number".into()));
        }
        Ok(Expr::Const(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        match name.as_str() {
            "u" | "t" if self.peek() == Some(b'[') => self.coordinate(&name, start),
            "pi" => Ok(Expr::Pi),
            _ if self.peek() == Some(b'(') => {
                let f = Func::from_name(&name)?;
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Func(f, Box::new(arg)))
            }
            _ => Err(self.error_at(start, format!("unknown identifier `{name}`"))),
        }
    }

    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an index".into()));
        }
        let i: usize = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error_at(start, "index out of range".into()))?;
        if i == 0 {
            return Err(self.error_at(start, "indices start at 1".into()));
        }
        Ok(i)
    }

    fn coordinate(&mut self, name: &str, start: usize) -> Result<Expr> {
        self.expect(b'[')?;
        let first = self.index()?;
        let mut counting = Vec::new();
        if name == "u" && self.eat(b';') {
            counting.push(self.index()?);
            while self.eat(b',') {
                counting.push(self.index()?);
            }
        }
        self.expect(b']')?;
        let dims = self.opts.dims;
        match (name, self.opts.variables) {
            ("u", Variables::Jet) => {
                if let Some(d) = dims {
                    if first > d.n {
                        return Err(self.error_at(start, format!("base index {first} exceeds n = {}", d.n)));
                    }
                    if let Some(i) = counting.iter().find(|&&i| i > d.m) {
                        return Err(self.error_at(start, format!("counting index {i} exceeds m = {}", d.m)));
                    }
                }
                let idx: Vec<usize> = counting.iter().map(|i| i - 1).collect();
                Coord::with_indices(first - 1, &idx)
                    .map(Expr::Coord)
                    .map_err(|_| self.error_at(start, "coordinates above third order are not supported".into()))
            }
            ("t", Variables::Param) => {
                if let Some(d) = dims {
                    if first > d.m {
                        return Err(self.error_at(start, format!("parameter index {first} exceeds m = {}", d.m)));
                    }
                }
                Ok(Expr::Coord(Coord::base(first - 1)))
            }
            _ => Err(self.error_at(start, format!("`{name}[..]` is not allowed here"))),
        }
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Product(mut xs) => {
            if let Some(Expr::Const(c)) = xs.first_mut() {
                *c = -c.clone();
            } else {
                xs.insert(0, Expr::int(-1));
            }
            Expr::Product(xs)
        }
        other => Expr::Product(vec![Expr::int(-1), other]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::normal::rat;

    #[test]
    fn coordinates_are_one_based() {
        assert_eq!(parse_expr("u[2;1,3]").unwrap(), Expr::Coord(Coord::acc(1, 0, 2)));
        assert_eq!(parse_expr("u[1;2,1]").unwrap(), parse_expr("u[1;1,2]").unwrap());
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-u[1]^2 + 2*u[2]/4").unwrap().to_normal().unwrap();
        let x = crate::symexpr::Normal::coord(Coord::base(0));
        let y = crate::symexpr::Normal::coord(Coord::base(1));
        assert_eq!(e, (y.scale(&rat(1, 2))) - x.mul(&x));
        assert_eq!(parse_expr("3/4").unwrap(), Expr::Const(rat(3, 4)));
        assert_eq!(parse_expr("0.25").unwrap(), Expr::Const(rat(1, 4)));
    }

    #[test]
    fn half_integer_exponent_is_a_root() {
        let a = parse_expr("(u[1;1]^2 + 1)^(1/2)").unwrap().to_normal().unwrap();
        let b = parse_expr("sqrt(u[1;1]^2 + 1)").unwrap().to_normal().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expr("u[1] +\n  * u[2]") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_expr("tanh(u[1])"), Err(Error::UnsupportedFunction("tanh".into())));
        assert!(parse_expr("u[0]").is_err());
        assert!(parse_expr("u[1]^u[2]").is_err());
    }

    #[test]
    fn indices_checked_against_dimensions() {
        let dims = Dimensions::new(2, 3, 1).unwrap();
        let opts = ParseOptions { variables: Variables::Jet, dims: Some(dims) };
        assert!(parse_with("u[3;2]", opts).is_ok());
        assert!(parse_with("u[4]", opts).is_err());
        assert!(parse_with("u[1;3]", opts).is_err());
        let params = ParseOptions { variables: Variables::Param, dims: Some(dims) };
        assert_eq!(parse_with("t[2]", params).unwrap(), Expr::Coord(Coord::base(1)));
        assert!(parse_with("u[1]", params).is_err());
    }
}
