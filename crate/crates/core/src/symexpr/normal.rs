//! Canonical sum-of-products form used for all exact symbolic work.
//!
//! A [`Normal`] is a finite sum of rational multiples of monomials. A monomial
//! is a product of atoms raised to integer powers, where an atom is a chart
//! coordinate, the constant `pi`, an elementary function of a normal form, or
//! a *root* `B^(1/2)` of a normal form `B`. Root exponents count half powers,
//! so `Root(B)^-2` is `1/B` and `Root(B)^1` is `sqrt(B)`.
//!
//! Zero testing is structural: two expressions are equal iff their difference
//! normalizes to the empty sum. For roots this relies on the reduction rules
//! in [`Normal::reduce`]: positive root powers are multiplied out, and all
//! negative powers of a given root and parity are brought over a common
//! denominator, after which exact polynomial division cancels every factor of
//! the base that divides the numerator.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::coord::Coord;
use super::expr::{Expr, Func};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Elementary functions kept as opaque atoms (square roots are [`Atom::Root`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transcendental {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Transcendental {
    pub fn name(self) -> &'static str {
        match self {
            Transcendental::Exp => "exp",
            Transcendental::Log => "log",
            Transcendental::Sin => "sin",
            Transcendental::Cos => "cos",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Coord(Coord),
    Pi,
    Func(Transcendental, Arc<Normal>),
    Root(Arc<Normal>),
}

impl Atom {
    fn is_root(&self) -> bool {
        matches!(self, Atom::Root(_))
    }
}

/// Product of atoms with nonzero integer exponents, sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), -e)).collect())
    }

    fn exponent(&self, atom: &Atom) -> i32 {
        self.0.iter().find(|(a, _)| a == atom).map_or(0, |(_, e)| *e)
    }

    fn with_exponent(&self, atom: &Atom, e: i32) -> Monomial {
        let mut out: Vec<(Atom, i32)> = self.0.iter().filter(|(a, _)| a != atom).cloned().collect();
        if e != 0 {
            let pos = out.partition_point(|(a, _)| a < atom);
            out.insert(pos, (atom.clone(), e));
        }
        Monomial(out)
    }

    fn degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| i64::from(*e)).sum()
    }

    /// `self / other` if the quotient has no negative exponents.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let q = self.mul(&other.inverse());
        if q.0.iter().all(|(_, e)| *e > 0) {
            Some(q)
        } else {
            None
        }
    }
}

/// Graded lexicographic order; the smallest atom is the most significant variable.
fn grlex(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        o => return o,
    }
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.0.get(i), b.0.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, ea)), None) => return ea.cmp(&0),
            (None, Some((_, eb))) => return 0.cmp(eb),
            (Some((x, ea)), Some((y, eb))) => match x.cmp(y) {
                Ordering::Equal => {
                    if ea != eb {
                        return ea.cmp(eb);
                    }
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return ea.cmp(&0),
                Ordering::Greater => return 0.cmp(eb),
            },
        }
    }
}

type Terms = BTreeMap<Monomial, Rational>;

fn add_term(terms: &mut Terms, mono: Monomial, coef: Rational) {
    if coef.is_zero() {
        return;
    }
    match terms.entry(mono) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coef);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get() + coef;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

fn raw_mul(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_term(&mut out, ma.mul(mb), ca * cb);
        }
    }
    out
}

fn raw_pow(a: &Terms, k: u32) -> Terms {
    let mut result: Terms = [(Monomial::one(), Rational::one())].into_iter().collect();
    let mut base = a.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = raw_mul(&result, &base);
        }
        k >>= 1;
        if k > 0 {
            base = raw_mul(&base, &base);
        }
    }
    result
}

fn leading(terms: &Terms) -> Option<(&Monomial, &Rational)> {
    terms.iter().max_by(|x, y| grlex(x.0, y.0))
}

/// Exact quotient `num / den` in the polynomial ring over all atoms, if it exists.
fn div_exact(num: &Terms, den: &Terms) -> Option<Terms> {
    if num.is_empty() {
        return Some(Terms::new());
    }
    let (lt_mono, lt_coef) = leading(den)?;
    if den.keys().any(|m| m.0.iter().any(|(_, e)| *e < 0)) {
        return None;
    }
    // Clear negative exponents in the numerator by a monomial shift.
    let mut shift: BTreeMap<Atom, i32> = BTreeMap::new();
    for m in num.keys() {
        for (a, e) in &m.0 {
            if *e < 0 {
                let s = shift.entry(a.clone()).or_insert(0);
                *s = (*s).min(*e);
            }
        }
    }
    let shift = Monomial(shift.into_iter().map(|(a, e)| (a, -e)).collect());
    let mut rem: Terms = num.iter().map(|(m, c)| (m.mul(&shift), c.clone())).collect();
    let mut quot = Terms::new();
    let mut guard = 0usize;
    while let Some((m, c)) = leading(&rem) {
        guard += 1;
        if guard > 200_000 {
            return None;
        }
        let qm = m.div(lt_mono).or_else(|| if m == lt_mono { Some(Monomial::one()) } else { None })?;
        let qc = c / lt_coef;
        for (dm, dc) in den {
            add_term(&mut rem, qm.mul(dm), -(&qc * dc));
        }
        add_term(&mut quot, qm, qc);
    }
    let unshift = shift.inverse();
    Some(quot.into_iter().map(|(m, c)| (m.mul(&unshift), c)).collect())
}

/// Canonical sum of rational multiples of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Normal {
    terms: Terms,
}

impl Normal {
    pub fn zero() -> Self {
        Normal { terms: Terms::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Monomial::one(), c);
        Normal { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn coord(c: Coord) -> Self {
        Self::from_monomial(Monomial::atom(Atom::Coord(c), 1), Rational::one())
    }

    pub fn pi() -> Self {
        Self::from_monomial(Monomial::atom(Atom::Pi, 1), Rational::one())
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, m, c);
        Normal { terms }
    }

    fn from_terms(terms: Terms) -> Self {
        Normal { terms }.reduce()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.0.iter().all(|(a, e)| matches!(a, Atom::Coord(_)) && *e > 0))
    }

    fn has_roots(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| a.is_root()))
    }

    pub fn scale(&self, c: &Rational) -> Normal {
        if c.is_zero() {
            return Normal::zero();
        }
        Normal {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn add(&self, other: &Normal) -> Normal {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Normal::from_terms(terms)
    }

    pub fn sub(&self, other: &Normal) -> Normal {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), -c.clone());
        }
        Normal::from_terms(terms)
    }

    pub fn neg(&self) -> Normal {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &Normal) -> Normal {
        Normal::from_terms(raw_mul(&self.terms, &other.terms))
    }

    /// Integer power. Negative powers of a non-monomial become root atoms.
    pub fn pow_i(&self, k: i32) -> Result<Normal> {
        if k >= 0 {
            return Ok(Normal::from_terms(raw_pow(&self.terms, k as u32)));
        }
        if self.is_zero() {
            return Err(Error::Domain("negative power of zero".into()));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let inv = Normal::from_monomial(m.inverse(), c.recip());
            return inv.pow_i(-k);
        }
        let (_, lc) = leading(&self.terms).unwrap();
        let lc = lc.clone();
        let base = self.scale(&lc.recip());
        let scale = pow_rational(&lc, k);
        Ok(Normal::from_terms(
            [(Monomial::atom(Atom::Root(Arc::new(base)), 2 * k), scale)].into_iter().collect(),
        ))
    }

    pub fn recip(&self) -> Result<Normal> {
        self.pow_i(-1)
    }

    pub fn div(&self, other: &Normal) -> Result<Normal> {
        Ok(self.mul(&other.recip()?))
    }

    /// Principal square root, kept as an atom unless the argument is a
    /// perfect-square constant.
    pub fn sqrt(&self) -> Normal {
        if self.is_zero() {
            return Normal::zero();
        }
        if let Some(c) = self.as_constant() {
            if let Some(r) = rational_sqrt(&c) {
                return Normal::constant(r);
            }
            return Normal::from_monomial(Monomial::atom(Atom::Root(Arc::new(self.clone())), 1), Rational::one());
        }
        let (_, lc) = leading(&self.terms).unwrap();
        let (base, outside) = match rational_sqrt(lc) {
            Some(r) if lc.is_positive() && !lc.is_one() => (self.scale(&lc.recip()), r),
            _ => (self.clone(), Rational::one()),
        };
        Normal::from_terms([(Monomial::atom(Atom::Root(Arc::new(base)), 1), outside)].into_iter().collect())
    }

    /// `base^(e/2)` for an arbitrary integer `e`.
    pub fn half_power(base: &Normal, e: i32) -> Result<Normal> {
        if e % 2 == 0 {
            base.pow_i(e / 2)
        } else {
            Ok(base.sqrt().mul(&base.pow_i((e - 1) / 2)?))
        }
    }

    pub fn func(f: Transcendental, arg: Normal) -> Normal {
        if let Some(c) = arg.as_constant() {
            match f {
                Transcendental::Exp | Transcendental::Cos if c.is_zero() => return Normal::one(),
                Transcendental::Sin if c.is_zero() => return Normal::zero(),
                Transcendental::Log if c.is_one() => return Normal::zero(),
                _ => {}
            }
        }
        Normal::from_monomial(Monomial::atom(Atom::Func(f, Arc::new(arg)), 1), Rational::one())
    }

    /// Chart coordinates occurring anywhere, including inside atoms.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    fn collect_coords(&self, out: &mut BTreeSet<Coord>) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                match a {
                    Atom::Coord(c) => {
                        out.insert(*c);
                    }
                    Atom::Pi => {}
                    Atom::Func(_, arg) | Atom::Root(arg) => arg.collect_coords(out),
                }
            }
        }
    }

    /// Highest jet order among the coordinates present (0 for constants).
    pub fn order(&self) -> usize {
        self.coords().iter().map(Coord::order).max().unwrap_or(0)
    }

    pub fn depends_on(&self, c: Coord) -> bool {
        self.terms.keys().any(|m| {
            m.0.iter().any(|(a, _)| match a {
                Atom::Coord(x) => *x == c,
                Atom::Pi => false,
                Atom::Func(_, arg) | Atom::Root(arg) => arg.depends_on(c),
            })
        })
    }

    /// Partial derivative treating the canonical coordinates as independent.
    pub fn partial(&self, c: Coord) -> Normal {
        let mut cache: HashMap<*const Normal, Option<Normal>> = HashMap::new();
        let mut plain = Terms::new();
        let mut other = Terms::new();
        for (mono, coef) in &self.terms {
            for (atom, e) in &mono.0 {
                match atom {
                    Atom::Coord(x) if *x == c => {
                        let m = mono.with_exponent(atom, e - 1);
                        add_term(&mut plain, m, coef * int(i64::from(*e)));
                    }
                    Atom::Coord(_) | Atom::Pi => {}
                    Atom::Func(f, arg) => {
                        let key = Arc::as_ptr(arg);
                        let d = cache.entry(key).or_insert_with(|| {
                            arg.depends_on(c).then(|| arg.partial(c).mul(&derivative_of(*f, arg)))
                        });
                        if let Some(d) = d {
                            let rest = Normal::from_monomial(mono.with_exponent(atom, e - 1), coef * int(i64::from(*e)));
                            for (m, k) in raw_mul(&rest.terms, &d.terms) {
                                add_term(&mut other, m, k);
                            }
                        }
                    }
                    Atom::Root(base) => {
                        let key = Arc::as_ptr(base);
                        let d = cache
                            .entry(key)
                            .or_insert_with(|| base.depends_on(c).then(|| base.partial(c)));
                        if let Some(d) = d {
                            let rest = Normal::from_monomial(mono.with_exponent(atom, e - 2), coef * rat(i64::from(*e), 2));
                            for (m, k) in raw_mul(&rest.terms, &d.terms) {
                                add_term(&mut other, m, k);
                            }
                        }
                    }
                }
            }
        }
        for (m, k) in other {
            add_term(&mut plain, m, k);
        }
        Normal::from_terms(plain)
    }

    /// Replaces coordinates by expressions; coordinates without an entry are kept.
    pub fn substitute(&self, map: &dyn Fn(Coord) -> Option<Normal>) -> Result<Normal> {
        let mut acc = Normal::zero();
        let mut atom_cache: HashMap<Atom, Normal> = HashMap::new();
        for (mono, coef) in &self.terms {
            let mut term = Normal::constant(coef.clone());
            for (atom, e) in &mono.0 {
                let value = match atom_cache.get(atom) {
                    Some(v) => v.clone(),
                    None => {
                        let v = match atom {
                            Atom::Coord(c) => map(*c).unwrap_or_else(|| Normal::coord(*c)),
                            Atom::Pi => Normal::pi(),
                            Atom::Func(f, arg) => Normal::func(*f, arg.substitute(map)?),
                            Atom::Root(base) => {
                                // keep the root itself; the exponent is applied below
                                let b = base.substitute(map)?;
                                atom_cache.insert(atom.clone(), b.clone());
                                b
                            }
                        };
                        atom_cache.insert(atom.clone(), v.clone());
                        v
                    }
                };
                let factor = match atom {
                    Atom::Root(_) => Normal::half_power(&value, *e)?,
                    _ => value.pow_i(*e)?,
                };
                term = term.mul(&factor);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Floating point evaluation; `lookup` supplies coordinate values.
    pub fn eval_with(&self, lookup: &dyn Fn(Coord) -> Result<f64>) -> Result<f64> {
        let mut cache: HashMap<*const Normal, f64> = HashMap::new();
        self.eval_cached(lookup, &mut cache)
    }

    fn eval_cached(&self, lookup: &dyn Fn(Coord) -> Result<f64>, cache: &mut HashMap<*const Normal, f64>) -> Result<f64> {
        let mut sum = 0.0;
        for (mono, coef) in &self.terms {
            let mut t = coef.to_f64().unwrap_or(f64::NAN);
            for (atom, e) in &mono.0 {
                let v = match atom {
                    Atom::Coord(c) => lookup(*c)?.powi(*e),
                    Atom::Pi => std::f64::consts::PI.powi(*e),
                    Atom::Func(f, arg) => {
                        let key = Arc::as_ptr(arg);
                        let x = match cache.get(&key) {
                            Some(x) => *x,
                            None => {
                                let x = arg.eval_cached(lookup, cache)?;
                                cache.insert(key, x);
                                x
                            }
                        };
                        apply_transcendental(*f, x)?.powi(*e)
                    }
                    Atom::Root(base) => {
                        let key = Arc::as_ptr(base);
                        let b = match cache.get(&key) {
                            Some(x) => *x,
                            None => {
                                let x = base.eval_cached(lookup, cache)?;
                                cache.insert(key, x);
                                x
                            }
                        };
                        if e % 2 != 0 && b < 0.0 {
                            return Err(Error::Domain(format!("sqrt of negative value {b}")));
                        }
                        if *e < 0 && b == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        if e % 2 == 0 {
                            b.powi(e / 2)
                        } else {
                            b.sqrt().powi(*e)
                        }
                    }
                };
                if !v.is_finite() {
                    return Err(Error::Domain("non-finite intermediate value".into()));
                }
                t *= v;
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Rebuilds an expression tree.
    pub fn to_expr(&self) -> Expr {
        let mut terms = Vec::new();
        for (mono, coef) in &self.terms {
            let mut factors = Vec::new();
            if !coef.is_one() || mono.is_one() {
                factors.push(Expr::Const(coef.clone()));
            }
            for (atom, e) in &mono.0 {
                let (base, exp) = match atom {
                    Atom::Coord(c) => (Expr::Coord(*c), *e),
                    Atom::Pi => (Expr::Pi, *e),
                    Atom::Func(f, arg) => (Expr::Func(Func::from(*f), Box::new(arg.to_expr())), *e),
                    Atom::Root(b) => {
                        if e % 2 == 0 {
                            (b.to_expr(), e / 2)
                        } else {
                            (Expr::Func(Func::Sqrt, Box::new(b.to_expr())), *e)
                        }
                    }
                };
                factors.push(if exp == 1 { base } else { Expr::Pow(Box::new(base), exp) });
            }
            terms.push(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) });
        }
        match terms.len() {
            0 => Expr::Const(Rational::zero()),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    /// Applies the root reduction rules until stable.
    fn reduce(self) -> Normal {
        if !self.has_roots() {
            return self;
        }
        let mut terms = self.terms;
        for _ in 0..4 {
            let before = terms.clone();
            terms = expand_positive_roots(terms);
            let roots: BTreeSet<Atom> = terms
                .keys()
                .flat_map(|m| m.0.iter().filter(|(a, e)| a.is_root() && *e < 0).map(|(a, _)| a.clone()))
                .collect();
            for root in roots {
                for parity in [0, 1] {
                    terms = combine_negative_class(terms, &root, parity);
                }
            }
            if terms == before {
                break;
            }
        }
        Normal { terms }
    }
}

fn expand_positive_roots(mut terms: Terms) -> Terms {
    loop {
        let mut changed = false;
        let mut out = Terms::new();
        for (mono, coef) in terms {
            let hit = mono.0.iter().find(|(a, e)| a.is_root() && *e >= 2).cloned();
            match hit {
                Some((atom, e)) => {
                    changed = true;
                    let base = match &atom {
                        Atom::Root(b) => b.clone(),
                        _ => unreachable!(),
                    };
                    let rest: Terms = [(mono.with_exponent(&atom, e % 2), coef)].into_iter().collect();
                    for (m, c) in raw_mul(&rest, &raw_pow(&base.terms, (e / 2) as u32)) {
                        add_term(&mut out, m, c);
                    }
                }
                None => add_term(&mut out, mono, coef),
            }
        }
        terms = out;
        if !changed {
            return terms;
        }
    }
}

/// Brings all terms with a negative power of `root` of the given parity over
/// the lowest such power, then divides out factors of the base.
fn combine_negative_class(terms: Terms, root: &Atom, parity: i32) -> Terms {
    let base = match root {
        Atom::Root(b) => b.clone(),
        _ => return terms,
    };
    let (group, mut rest): (Terms, Terms) = terms.into_iter().partition(|(m, _)| {
        let e = m.exponent(root);
        e < 0 && e.rem_euclid(2) == parity
    });
    if group.is_empty() {
        return rest;
    }
    let emin = group.keys().map(|m| m.exponent(root)).min().unwrap();
    let mut numer = Terms::new();
    for (m, c) in &group {
        let e = m.exponent(root);
        let lifted = raw_mul(
            &[(m.with_exponent(root, 0), c.clone())].into_iter().collect(),
            &raw_pow(&base.terms, ((e - emin) / 2) as u32),
        );
        for (mm, cc) in lifted {
            add_term(&mut numer, mm, cc);
        }
    }
    let mut e = emin;
    while e < 0 && !numer.is_empty() {
        match div_exact(&numer, &base.terms) {
            Some(q) => {
                numer = q;
                e += 2;
            }
            None => break,
        }
    }
    let r = Monomial::atom(root.clone(), e);
    for (m, c) in numer {
        add_term(&mut rest, m.mul(&r), c);
    }
    expand_positive_roots(rest)
}

fn derivative_of(f: Transcendental, arg: &Arc<Normal>) -> Normal {
    let a = (**arg).clone();
    match f {
        Transcendental::Exp => Normal::func(Transcendental::Exp, a),
        Transcendental::Log => a.recip().unwrap_or_else(|_| Normal::zero()),
        Transcendental::Sin => Normal::func(Transcendental::Cos, a),
        Transcendental::Cos => Normal::func(Transcendental::Sin, a).neg(),
    }
}

pub(crate) fn apply_transcendental(f: Transcendental, x: f64) -> Result<f64> {
    Ok(match f {
        Transcendental::Exp => x.exp(),
        Transcendental::Log => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("log of non-positive value {x}")));
            }
            x.ln()
        }
        Transcendental::Sin => x.sin(),
        Transcendental::Cos => x.cos(),
    })
}

fn pow_rational(c: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num::pow(c.clone(), k as usize)
    } else {
        num::pow(c.recip(), (-k) as usize)
    }
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| Rational::new(n, d))
}

impl fmt::Display for Normal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&Normal> for &Normal {
            type Output = Normal;
            fn $method(self, rhs: &Normal) -> Normal {
                Normal::$inner(self, rhs)
            }
        }
        impl std::ops::$tr<Normal> for Normal {
            type Output = Normal;
            fn $method(self, rhs: Normal) -> Normal {
                Normal::$inner(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Normal> for Normal {
            type Output = Normal;
            fn $method(self, rhs: &Normal) -> Normal {
                Normal::$inner(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for Normal {
    type Output = Normal;
    fn neg(self) -> Normal {
        Normal::neg(&self)
    }
}

impl std::ops::Neg for &Normal {
    type Output = Normal;
    fn neg(self) -> Normal {
        Normal::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(a: usize) -> Normal {
        Normal::coord(Coord::base(a))
    }

    fn v(a: usize, i: usize) -> Normal {
        Normal::coord(Coord::vel(a, i))
    }

    #[test]
    fn arithmetic_cancels() {
        let x = u(0);
        let y = u(1);
        let e = (&x + &y).mul(&(&x - &y)) - (&x * &x) + (&y * &y);
        assert!(e.is_zero());
    }

    #[test]
    fn reciprocal_of_sum_cancels() {
        let s = u(0) + u(1);
        let r = s.recip().unwrap();
        assert_eq!(s.mul(&r), Normal::one());
        let q = s.mul(&s).mul(&u(0)).mul(&r);
        assert!((q - s.mul(&u(0))).is_zero());
    }

    #[test]
    fn sqrt_squares_back() {
        let q = v(0, 0) * v(0, 0) + v(1, 0) * v(1, 0);
        let l = q.sqrt();
        assert!((l.mul(&l) - q.clone()).is_zero());
        // q / sqrt(q) == sqrt(q)
        let r = q.mul(&l.recip().unwrap());
        assert!((r - l).is_zero());
    }

    #[test]
    fn perfect_square_constants() {
        assert_eq!(Normal::constant(rat(9, 4)).sqrt(), Normal::constant(rat(3, 2)));
        let two = Normal::int(2).sqrt();
        assert_eq!(two.mul(&two), Normal::int(2));
    }

    #[test]
    fn hidden_cancellation_across_powers() {
        // a/sqrt(q) - a*q/sqrt(q)^3 == 0
        let q = v(0, 0) * v(0, 0) + v(1, 0) * v(1, 0) + Normal::one();
        let l = q.sqrt();
        let a = v(0, 0);
        let e1 = a.mul(&l.recip().unwrap());
        let e2 = a.mul(&q).mul(&l.pow_i(-3).unwrap());
        assert!((e1 - e2).is_zero());
    }

    #[test]
    fn partial_of_root() {
        let q = v(0, 0) * v(0, 0) + v(1, 0) * v(1, 0);
        let l = q.sqrt();
        let d = l.partial(Coord::vel(0, 0));
        let expected = v(0, 0).mul(&l.recip().unwrap());
        assert!((d - expected).is_zero());
    }

    #[test]
    fn exact_division() {
        let x = u(0);
        let y = u(1);
        let b = &x + &y;
        let p = b.mul(&(&x * &x + Normal::int(3)));
        let q = div_exact(&p.terms, &b.terms).unwrap();
        assert_eq!(Normal { terms: q }, &x * &x + Normal::int(3));
        assert!(div_exact(&(&x * &y + Normal::one()).terms, &b.terms).is_none());
    }

    #[test]
    fn eval_domain_errors() {
        let e = (u(0) - Normal::int(2)).sqrt();
        let err = e.eval_with(&|_| Ok(1.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let lg = Normal::func(Transcendental::Log, u(0));
        assert!(lg.eval_with(&|_| Ok(-1.0)).is_err());
    }
}
