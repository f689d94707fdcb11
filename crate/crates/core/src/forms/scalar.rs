use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symexpr::{Coord, Normal, Rational};

/// Sorts `v` in place and returns the permutation sign, or `None` on a repeat.
pub(crate) fn sort_with_sign<T: Ord>(v: &mut [T]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Exterior form with basis covectors `du^c` keyed by their coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarForm {
    degree: usize,
    terms: BTreeMap<Vec<Coord>, Normal>,
}

/// Coefficients of a vector field along a projection, paired with `du^c`.
pub type FieldAlong = BTreeMap<Coord, Normal>;

impl ScalarForm {
    pub fn zero(degree: usize) -> Self {
        ScalarForm { degree, terms: BTreeMap::new() }
    }

    pub fn function(f: Normal) -> Self {
        let mut out = Self::zero(0);
        out.add_term(vec![], f);
        out
    }

    /// The basis 1-form `du^c`.
    pub fn basis(c: Coord) -> Self {
        Self::monomial(vec![c], Normal::one())
    }

    /// `coef du^{c_1} ∧ … ∧ du^{c_r}` for covectors in any order.
    pub fn monomial(covectors: Vec<Coord>, coef: Normal) -> Self {
        let mut out = Self::zero(covectors.len());
        out.add_term(covectors, coef);
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Coord>, &Normal)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, covectors: &[Coord]) -> Normal {
        let mut key = covectors.to_vec();
        match sort_with_sign(&mut key) {
            Some(sign) => self.terms.get(&key).map_or_else(Normal::zero, |c| c.scale(&Rational::from_integer(sign.into()))),
            None => Normal::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest jet order among covectors and coefficients.
    pub fn order(&self) -> usize {
        self.terms
            .iter()
            .map(|(k, c)| k.iter().map(Coord::order).max().unwrap_or(0).max(c.order()))
            .max()
            .unwrap_or(0)
    }

    /// Adds `coef du^{covectors}`; the covectors need not be sorted.
    pub fn add_term(&mut self, mut covectors: Vec<Coord>, coef: Normal) {
        debug_assert_eq!(covectors.len(), self.degree);
        if coef.is_zero() {
            return;
        }
        let Some(sign) = sort_with_sign(&mut covectors) else {
            return;
        };
        let coef = if sign < 0 { coef.neg() } else { coef };
        match self.terms.entry(covectors) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&coef);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &ScalarForm) -> ScalarForm {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ScalarForm) -> ScalarForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ScalarForm {
        self.scale(&Rational::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Rational) -> ScalarForm {
        let mut out = Self::zero(self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.scale(c));
        }
        out
    }

    /// Multiplication by a function.
    pub fn mul_fn(&self, f: &Normal) -> ScalarForm {
        let mut out = Self::zero(self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.mul(f));
        }
        out
    }

    pub fn wedge(&self, other: &ScalarForm) -> ScalarForm {
        let mut out = Self::zero(self.degree + other.degree);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                out.add_term(key, ca.mul(cb));
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn ext_d(&self) -> ScalarForm {
        let mut out = Self::zero(self.degree + 1);
        for (k, coef) in &self.terms {
            for c in coef.coords() {
                let mut key = Vec::with_capacity(k.len() + 1);
                key.push(c);
                key.extend_from_slice(k);
                out.add_term(key, coef.partial(c));
            }
        }
        out
    }

    /// Interior product with a field along a projection.
    pub fn contract(&self, field: &FieldAlong) -> Result<ScalarForm> {
        if self.degree == 0 {
            return Err(Error::Degree("cannot contract a 0-form".into()));
        }
        let mut out = Self::zero(self.degree - 1);
        for (k, coef) in &self.terms {
            for (p, c) in k.iter().enumerate() {
                if let Some(v) = field.get(c) {
                    let mut key = k.clone();
                    key.remove(p);
                    let t = coef.mul(v);
                    out.add_term(key, if p % 2 == 1 { t.neg() } else { t });
                }
            }
        }
        Ok(out)
    }

    /// Applies the degree-zero derivation determined by its action on
    /// functions and on basis covectors (`cov_map` must return 1-forms).
    pub fn derivation(
        &self,
        on_fn: &dyn Fn(&Normal) -> Result<Normal>,
        on_cov: &dyn Fn(Coord) -> Result<ScalarForm>,
    ) -> Result<ScalarForm> {
        let mut images: BTreeMap<Coord, ScalarForm> = BTreeMap::new();
        let mut out = Self::zero(self.degree);
        for (k, coef) in &self.terms {
            out.add_term(k.clone(), on_fn(coef)?);
            for (p, c) in k.iter().enumerate() {
                if !images.contains_key(c) {
                    let img = on_cov(*c)?;
                    debug_assert!(img.degree == 1 || img.is_zero());
                    images.insert(*c, img);
                }
                for (dk, g) in &images[c].terms {
                    let mut key = k.clone();
                    key[p] = dk[0];
                    out.add_term(key, coef.mul(g));
                }
            }
        }
        Ok(out)
    }

    /// Substitutes coefficients through `coef_map` and replaces each basis
    /// covector by the 1-form `cov_map` assigns to it.
    pub fn pullback_basis(
        &self,
        coef_map: &dyn Fn(Coord) -> Option<Normal>,
        cov_map: &dyn Fn(Coord) -> Option<ScalarForm>,
    ) -> Result<ScalarForm> {
        let mut out: Option<ScalarForm> = None;
        for (k, coef) in &self.terms {
            if let Some(c) = coef.coords().into_iter().find(|c| coef_map(*c).is_none()) {
                return Err(Error::IncompleteMap(format!("coordinate {c}")));
            }
            let f = coef.substitute(coef_map)?;
            let mut piece = ScalarForm::function(f);
            for c in k {
                let img = cov_map(*c).ok_or_else(|| Error::IncompleteMap(format!("covector d{c}")))?;
                piece = piece.wedge(&img);
            }
            out = Some(match out {
                Some(acc) => acc.add(&piece),
                None => piece,
            });
        }
        Ok(out.unwrap_or_else(|| ScalarForm::zero(self.degree)))
    }
}

impl fmt::Display for ScalarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, coef)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({coef})")?;
            for c in k {
                write!(f, " d{c}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::normal;

    fn du(c: Coord) -> ScalarForm {
        ScalarForm::basis(c)
    }

    #[test]
    fn wedge_examples() {
        let (a, b) = (Coord::base(0), Coord::base(1));
        assert!(du(a).wedge(&du(b)).add(&du(b).wedge(&du(a))).is_zero());
        assert!(du(a).wedge(&du(a)).is_zero());
        let lhs = ScalarForm::monomial(vec![b], normal("u[1]").unwrap()).wedge(&du(Coord::vel(2, 0)));
        assert_eq!(lhs.coefficient(&[b, Coord::vel(2, 0)]), normal("u[1]").unwrap());
    }

    #[test]
    fn exterior_derivative_examples() {
        let f = ScalarForm::function(normal("u[1]").unwrap());
        assert_eq!(f.ext_d(), du(Coord::base(0)));
        let w = ScalarForm::monomial(vec![Coord::base(0)], normal("u[1;1]").unwrap());
        assert_eq!(w.ext_d(), ScalarForm::monomial(vec![Coord::vel(0, 0), Coord::base(0)], Normal::one()));
        let g = ScalarForm::function(normal("u[1]*u[2;1]").unwrap());
        assert!(g.ext_d().ext_d().is_zero());
    }

    #[test]
    fn contraction_examples() {
        let mut total = FieldAlong::new();
        total.insert(Coord::base(0), normal("u[1;1]").unwrap());
        assert_eq!(du(Coord::base(0)).contract(&total).unwrap(), ScalarForm::function(normal("u[1;1]").unwrap()));
        let mut e1 = FieldAlong::new();
        e1.insert(Coord::base(0), Normal::one());
        let two = du(Coord::base(0)).wedge(&du(Coord::base(1)));
        assert_eq!(two.contract(&e1).unwrap(), du(Coord::base(1)));
        assert!(matches!(ScalarForm::function(Normal::one()).contract(&e1), Err(Error::Degree(_))));
    }

    #[test]
    fn sort_sign() {
        let mut v = vec![3, 1, 2];
        assert_eq!(sort_with_sign(&mut v), Some(1));
        let mut v = vec![2, 1];
        assert_eq!(sort_with_sign(&mut v), Some(-1));
        let mut v = vec![2, 1, 2];
        assert_eq!(sort_with_sign(&mut v), None);
    }
}
