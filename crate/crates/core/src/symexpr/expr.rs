use std::fmt;

use num::{One, Signed, ToPrimitive, Zero};

use super::coord::Coord;
use super::normal::{apply_transcendental, int, Normal, Rational, Transcendental};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            other => return Err(Error::UnsupportedFunction(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

impl From<Transcendental> for Func {
    fn from(t: Transcendental) -> Self {
        match t {
            Transcendental::Exp => Func::Exp,
            Transcendental::Log => Func::Log,
            Transcendental::Sin => Func::Sin,
            Transcendental::Cos => Func::Cos,
        }
    }
}

/// Expression tree as written by a user; [`Normal`] is the canonical form.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Coord(Coord),
    Pi,
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Const(int(n))
    }

    pub fn coord(c: Coord) -> Self {
        Expr::Coord(c)
    }

    pub fn to_normal(&self) -> Result<Normal> {
        Ok(match self {
            Expr::Const(c) => Normal::constant(c.clone()),
            Expr::Coord(c) => Normal::coord(*c),
            Expr::Pi => Normal::pi(),
            Expr::Sum(xs) => {
                let mut acc = Normal::zero();
                for x in xs {
                    acc = acc.add(&x.to_normal()?);
                }
                acc
            }
            Expr::Product(xs) => {
                let mut acc = Normal::one();
                for x in xs {
                    acc = acc.mul(&x.to_normal()?);
                }
                acc
            }
            Expr::Pow(b, k) => b.to_normal()?.pow_i(*k)?,
            Expr::Func(f, arg) => {
                let a = arg.to_normal()?;
                match f {
                    Func::Sqrt => a.sqrt(),
                    Func::Exp => Normal::func(Transcendental::Exp, a),
                    Func::Log => Normal::func(Transcendental::Log, a),
                    Func::Sin => Normal::func(Transcendental::Sin, a),
                    Func::Cos => Normal::func(Transcendental::Cos, a),
                }
            }
        })
    }

    /// Canonical expanded form, re-expressed as a tree.
    pub fn simplify(&self) -> Result<Expr> {
        Ok(self.to_normal()?.to_expr())
    }

    /// Tree-level derivative by the textbook rules, without simplification.
    pub fn partial(&self, c: Coord) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi => Expr::int(0),
            Expr::Coord(x) => Expr::int(i64::from(*x == c)),
            Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| x.partial(c)).collect()),
            Expr::Product(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for i in 0..xs.len() {
                    let mut factors = xs.clone();
                    factors[i] = xs[i].partial(c);
                    terms.push(Expr::Product(factors));
                }
                Expr::Sum(terms)
            }
            Expr::Pow(b, k) => Expr::Product(vec![
                Expr::int(i64::from(*k)),
                Expr::Pow(b.clone(), k - 1),
                b.partial(c),
            ]),
            Expr::Func(f, arg) => {
                let outer = match f {
                    Func::Sqrt => Expr::Product(vec![
                        Expr::Const(Rational::new(1.into(), 2.into())),
                        Expr::Pow(Box::new(self.clone()), -1),
                    ]),
                    Func::Exp => self.clone(),
                    Func::Log => Expr::Pow(arg.clone(), -1),
                    Func::Sin => Expr::Func(Func::Cos, arg.clone()),
                    Func::Cos => Expr::Product(vec![Expr::int(-1), Expr::Func(Func::Sin, arg.clone())]),
                };
                Expr::Product(vec![outer, arg.partial(c)])
            }
        }
    }

    pub fn eval_with(&self, lookup: &dyn Fn(Coord) -> Result<f64>) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => c.to_f64().unwrap_or(f64::NAN),
            Expr::Coord(c) => lookup(*c)?,
            Expr::Pi => std::f64::consts::PI,
            Expr::Sum(xs) => {
                let mut s = 0.0;
                for x in xs {
                    s += x.eval_with(lookup)?;
                }
                s
            }
            Expr::Product(xs) => {
                let mut p = 1.0;
                for x in xs {
                    p *= x.eval_with(lookup)?;
                }
                p
            }
            Expr::Pow(b, k) => {
                let x = b.eval_with(lookup)?;
                if *k < 0 && x == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                x.powi(*k)
            }
            Expr::Func(f, arg) => {
                let x = arg.eval_with(lookup)?;
                match f {
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::Domain(format!("sqrt of negative value {x}")));
                        }
                        x.sqrt()
                    }
                    Func::Exp => apply_transcendental(Transcendental::Exp, x)?,
                    Func::Log => apply_transcendental(Transcendental::Log, x)?,
                    Func::Sin => apply_transcendental(Transcendental::Sin, x)?,
                    Func::Cos => apply_transcendental(Transcendental::Cos, x)?,
                }
            }
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                let wrap = parent >= 4 && (c.is_negative() || !c.is_integer());
                if wrap {
                    write!(f, "({c})")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Coord(c) => write!(f, "{c}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Sum(xs) => {
                if xs.is_empty() {
                    return write!(f, "0");
                }
                let wrap = parent >= 2;
                if wrap {
                    write!(f, "(")?;
                }
                for (i, x) in xs.iter().enumerate() {
                    let s = Displayed(x, if matches!(x, Expr::Sum(_)) { 2 } else { 1 }).to_string();
                    match (i, s.strip_prefix('-')) {
                        (0, _) => write!(f, "{s}")?,
                        (_, Some(rest)) => write!(f, " - {rest}")?,
                        (_, None) => write!(f, " + {s}")?,
                    }
                }
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::Product(xs) => {
                if xs.is_empty() {
                    return write!(f, "1");
                }
                let wrap = parent >= 3;
                if wrap {
                    write!(f, "(")?;
                }
                let mut rest = &xs[..];
                if let [Expr::Const(c), tail @ ..] = xs.as_slice() {
                    if !tail.is_empty() && c == &-Rational::one() {
                        write!(f, "-")?;
                        rest = tail;
                    }
                }
                for (i, x) in rest.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    x.fmt_prec(f, if i == 0 { 2 } else { 3 })?;
                }
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::Pow(b, k) => {
                let wrap = parent >= 4;
                if wrap {
                    write!(f, "(")?;
                }
                b.fmt_prec(f, 4)?;
                if *k < 0 {
                    write!(f, "^({k})")?;
                } else {
                    write!(f, "^{k}")?;
                }
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::Func(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

struct Displayed<'a>(&'a Expr, u8);

impl fmt::Display for Displayed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_prec(f, self.1)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Default for Expr {
    fn default() -> Self {
        Expr::Const(Rational::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    #[test]
    fn tree_and_normal_derivatives_agree() {
        let e = parse_expr("sqrt(u[1;1]^2 + u[2;1]^2) * exp(u[1]) - log(u[2]^2 + 1) / u[1;1]").unwrap();
        for c in [Coord::vel(0, 0), Coord::vel(1, 0), Coord::base(0), Coord::base(1)] {
            let tree = e.partial(c).to_normal().unwrap();
            let direct = e.to_normal().unwrap().partial(c);
            assert!((tree - direct).is_zero(), "mismatch for {c}");
        }
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "u[1;1]*u[2;2] - u[2;1]*u[1;2]",
            "sqrt(u[1;1]^2 + u[2;1]^2)",
            "-3/4*u[1]^(-2) + sin(pi*u[2])",
            "(u[1] + 1)^(-3)",
        ] {
            let e = parse_expr(text).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e.to_normal().unwrap(), again.to_normal().unwrap(), "{text}");
            let canon = e.simplify().unwrap();
            let back = parse_expr(&canon.to_string()).unwrap();
            assert_eq!(canon.to_normal().unwrap(), back.to_normal().unwrap(), "{text}");
        }
    }

    #[test]
    fn unknown_function_name() {
        assert_eq!(Func::from_name("tanh"), Err(Error::UnsupportedFunction("tanh".into())));
    }
}
