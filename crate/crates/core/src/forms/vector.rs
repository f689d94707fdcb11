use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use super::scalar::{sort_with_sign, ScalarForm};
use crate::error::{Error, Result};
use crate::symexpr::{parse_expr, Expr, Normal, Rational};

/// A form valued in `Λ^s R^{m*}`: components `χ_I` on increasing index
/// tuples `I`, standing for `Σ_I χ_I ⊗ dt^I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorForm {
    m: usize,
    r: usize,
    s: usize,
    comps: BTreeMap<Vec<u8>, ScalarForm>,
}

impl VectorForm {
    pub fn zero(m: usize, r: usize, s: usize) -> Self {
        assert!(s <= m, "weight {s} exceeds m = {m}");
        VectorForm { m, r, s, comps: BTreeMap::new() }
    }

    /// `χ ⊗ d^m t`.
    pub fn top(m: usize, chi: ScalarForm) -> Self {
        let mut out = Self::zero(m, chi.degree(), m);
        out.add_component(&(0..m).collect::<Vec<_>>(), chi);
        out
    }

    /// `χ ⊗ (∂/∂t^j ⌟ d^m t)`, written `χ ⊗ d^{m-1}t_j`.
    pub fn contracted_top(m: usize, j: usize, chi: ScalarForm) -> Self {
        let mut out = Self::zero(m, chi.degree(), m - 1);
        let idx: Vec<usize> = (0..m).filter(|&i| i != j).collect();
        let chi = if j % 2 == 1 { chi.neg() } else { chi };
        out.add_component(&idx, chi);
        out
    }

    /// `χ ⊗ 1` for a scalar-valued form.
    pub fn scalar(m: usize, chi: ScalarForm) -> Self {
        let mut out = Self::zero(m, chi.degree(), 0);
        out.add_component(&[], chi);
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn order(&self) -> usize {
        self.comps.values().map(ScalarForm::order).max().unwrap_or(0)
    }

    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &ScalarForm)> {
        self.comps.iter().map(|(k, v)| (k.iter().map(|&i| usize::from(i)).collect(), v))
    }

    /// Adds `χ ⊗ dt^{idx}` with `idx` in any order.
    pub fn add_component(&mut self, idx: &[usize], chi: ScalarForm) {
        assert_eq!(idx.len(), self.s, "index tuple length must equal the weight");
        assert_eq!(chi.degree(), self.r, "component degree mismatch");
        if chi.is_zero() {
            return;
        }
        let mut key: Vec<u8> = idx.iter().map(|&i| i as u8).collect();
        let Some(sign) = sort_with_sign(&mut key) else {
            return;
        };
        let chi = if sign < 0 { chi.neg() } else { chi };
        let sum = match self.comps.remove(&key) {
            Some(old) => old.add(&chi),
            None => chi,
        };
        if !sum.is_zero() {
            self.comps.insert(key, sum);
        }
    }

    /// Component `χ_{idx}` for any ordering of `idx`; repeated indices give zero.
    pub fn component(&self, idx: &[usize]) -> ScalarForm {
        let mut key: Vec<u8> = idx.iter().map(|&i| i as u8).collect();
        match sort_with_sign(&mut key) {
            Some(sign) => match self.comps.get(&key) {
                Some(c) if sign < 0 => c.neg(),
                Some(c) => c.clone(),
                None => ScalarForm::zero(self.r),
            },
            None => ScalarForm::zero(self.r),
        }
    }

    pub fn add(&self, other: &VectorForm) -> VectorForm {
        assert_eq!((self.m, self.r, self.s), (other.m, other.r, other.s), "bidegree mismatch");
        let mut out = self.clone();
        for (k, v) in other.components() {
            out.add_component(&k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &VectorForm) -> VectorForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> VectorForm {
        self.scale(&Rational::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Rational) -> VectorForm {
        self.map_same(|chi| Ok(chi.scale(c))).expect("scaling cannot fail")
    }

    pub fn mul_fn(&self, f: &Normal) -> VectorForm {
        self.map_same(|chi| Ok(chi.mul_fn(f))).expect("multiplication cannot fail")
    }

    /// Applies a degree-preserving map to every component.
    pub fn map_same(&self, f: impl Fn(&ScalarForm) -> Result<ScalarForm>) -> Result<VectorForm> {
        self.map_components(self.r, f)
    }

    /// Applies a map to every component; results must have degree `r`.
    pub fn map_components(&self, r: usize, f: impl Fn(&ScalarForm) -> Result<ScalarForm>) -> Result<VectorForm> {
        let mut out = VectorForm::zero(self.m, r, self.s);
        for (k, v) in self.components() {
            out.add_component(&k, f(v)?);
        }
        Ok(out)
    }

    /// Componentwise exterior derivative.
    pub fn vf_d(&self) -> VectorForm {
        self.map_components(self.r + 1, |chi| Ok(chi.ext_d())).expect("d cannot fail")
    }

    /// Serializes as `{m, r, s, components: {"[i,..]": [{covectors, coeff}]}}`
    /// with one-based indices.
    pub fn to_json(&self) -> Value {
        let mut comps = Map::new();
        for (k, chi) in self.components() {
            let key = format!("[{}]", k.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","));
            comps.insert(key, scalar_to_json(chi));
        }
        json!({ "m": self.m, "r": self.r, "s": self.s, "components": comps })
    }

    pub fn from_json(v: &Value) -> Result<VectorForm> {
        let bad = |msg: &str| Error::Precondition(format!("malformed vector form: {msg}"));
        let get = |k: &str| v.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| bad(k));
        let (m, r, s) = (get("m")?, get("r")?, get("s")?);
        if s > m {
            return Err(bad("weight exceeds m"));
        }
        let mut out = VectorForm::zero(m, r, s);
        let comps = v.get("components").and_then(Value::as_object).ok_or_else(|| bad("components"))?;
        for (key, terms) in comps {
            let inner = key.trim().strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(|| bad(key))?;
            let idx: Vec<usize> = inner
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<usize>().ok().filter(|&i| i >= 1 && i <= m).map(|i| i - 1))
                .collect::<Option<_>>()
                .ok_or_else(|| bad(key))?;
            if idx.len() != s {
                return Err(bad(key));
            }
            out.add_component(&idx, scalar_from_json(terms, r)?);
        }
        Ok(out)
    }
}

pub fn scalar_to_json(chi: &ScalarForm) -> Value {
    Value::Array(
        chi.terms()
            .map(|(k, c)| json!({ "covectors": k.iter().map(|c| c.to_string()).collect::<Vec<_>>(), "coeff": c.to_string() }))
            .collect(),
    )
}

pub fn scalar_from_json(v: &Value, degree: usize) -> Result<ScalarForm> {
    let bad = |msg: String| Error::Precondition(format!("malformed form term: {msg}"));
    let mut out = ScalarForm::zero(degree);
    for term in v.as_array().ok_or_else(|| bad("expected an array".into()))? {
        let coeff = term.get("coeff").and_then(Value::as_str).ok_or_else(|| bad("coeff".into()))?;
        let covs = term.get("covectors").and_then(Value::as_array).ok_or_else(|| bad("covectors".into()))?;
        let mut key = Vec::new();
        for c in covs {
            let text = c.as_str().ok_or_else(|| bad("covector".into()))?;
            match parse_expr(text)? {
                Expr::Coord(c) => key.push(c),
                _ => return Err(bad(format!("`{text}` is not a coordinate"))),
            }
        }
        if key.len() != degree {
            return Err(bad("wrong number of covectors".into()));
        }
        out.add_term(key, parse_expr(coeff)?.to_normal()?);
    }
    Ok(out)
}

impl fmt::Display for VectorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, chi)) in self.components().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            let dt: Vec<String> = k.iter().map(|i| format!("dt{}", i + 1)).collect();
            write!(f, "[{}] ⊗ {}", chi, if dt.is_empty() { "1".into() } else { dt.join("∧") })?;
        }
        Ok(())
    }
}

/// Index tuple of `dt^i ∧ dt^I` with its sign, or `None` when `i ∈ I`.
pub(crate) fn wedge_dt(i: usize, idx: &[usize]) -> Option<(i32, Vec<usize>)> {
    if idx.contains(&i) {
        return None;
    }
    let before = idx.iter().filter(|&&x| x < i).count();
    let mut out = idx.to_vec();
    out.insert(before, i);
    Some((if before % 2 == 0 { 1 } else { -1 }, out))
}

/// `∂/∂t^j ⌟ dt^I` for increasing `I`, as a sign and the remaining indices.
pub(crate) fn contract_dt(j: usize, idx: &[usize]) -> Option<(i32, Vec<usize>)> {
    let p = idx.iter().position(|&x| x == j)?;
    let mut out = idx.to_vec();
    out.remove(p);
    Some((if p % 2 == 0 { 1 } else { -1 }, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{normal, Coord};

    #[test]
    fn components_are_antisymmetric() {
        let mut xi = VectorForm::zero(3, 0, 2);
        xi.add_component(&[1, 0], ScalarForm::function(normal("u[1]").unwrap()));
        assert_eq!(xi.component(&[0, 1]), ScalarForm::function(normal("-u[1]").unwrap()));
        assert_eq!(xi.component(&[1, 0]), ScalarForm::function(normal("u[1]").unwrap()));
        assert!(xi.component(&[1, 1]).is_zero());
    }

    #[test]
    fn d_of_top_form() {
        let l = normal("u[1;1]*u[2;2] - u[2;1]*u[1;2]").unwrap();
        let lam = VectorForm::top(2, ScalarForm::function(l.clone()));
        assert_eq!(lam.vf_d(), VectorForm::top(2, ScalarForm::function(l).ext_d()));
        assert!(lam.vf_d().vf_d().is_zero());
    }

    #[test]
    fn contracted_top_signs() {
        // ∂/∂t^2 ⌟ dt^1∧dt^2 = -dt^1
        let one = ScalarForm::function(Normal::one());
        let v = VectorForm::contracted_top(2, 1, one.clone());
        assert_eq!(v.component(&[0]), one.neg());
        assert_eq!(contract_dt(1, &[0, 1]), Some((-1, vec![0])));
        assert_eq!(wedge_dt(0, &[1]), Some((1, vec![0, 1])));
        assert_eq!(wedge_dt(1, &[0]), Some((-1, vec![0, 1])));
    }

    #[test]
    fn json_round_trip() {
        let mut xi = VectorForm::zero(2, 1, 1);
        xi.add_component(&[1], ScalarForm::monomial(vec![Coord::base(0)], normal("sqrt(u[1;1]^2 + 1)/u[2]").unwrap()));
        xi.add_component(&[0], ScalarForm::monomial(vec![Coord::vel(1, 1)], normal("3/2*u[1]").unwrap()));
        let back = VectorForm::from_json(&xi.to_json()).unwrap();
        assert_eq!(back, xi);
    }
}
