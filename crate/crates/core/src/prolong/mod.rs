//! Prolongation of maps and vector fields, the exchange map on double
//! velocities, and contact forms.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::{FieldAlong, ScalarForm};
use crate::jetcalc::{total_d, total_field};
use crate::numeric::{random_curve, Prolonged};
use crate::symexpr::{Coord, Dimensions, JetPoint, Normal};

/// Substitution taking target coordinates to expressions in source coordinates.
pub type Substitution = BTreeMap<Coord, Normal>;

fn ensure_base_only(comps: &[Normal], what: &str) -> Result<()> {
    for c in comps {
        if c.order() > 0 {
            return Err(Error::Precondition(format!("{what} components must depend on base coordinates only")));
        }
    }
    Ok(())
}

/// A map `E₁ → E₂` given by target components in source base coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap {
    comps: Vec<Normal>,
}

impl SmoothMap {
    pub fn new(comps: Vec<Normal>) -> Result<Self> {
        ensure_base_only(&comps, "map")?;
        Ok(SmoothMap { comps })
    }

    pub fn identity(n: usize) -> Self {
        SmoothMap { comps: (0..n).map(|a| Normal::coord(Coord::base(a))).collect() }
    }

    pub fn components(&self) -> &[Normal] {
        &self.comps
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        let comps = self
            .comps
            .iter()
            .map(|f| f.substitute(&|c| match c {
                Coord::Base(a) => inner.comps.get(a as usize).cloned(),
                _ => None,
            }))
            .collect::<Result<Vec<_>>>()?;
        SmoothMap::new(comps)
    }
}

/// A vector field `X^a ∂/∂u^a` on `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldOnE {
    comps: Vec<Normal>,
}

impl VectorFieldOnE {
    pub fn new(comps: Vec<Normal>) -> Result<Self> {
        ensure_base_only(&comps, "vector field")?;
        Ok(VectorFieldOnE { comps })
    }

    pub fn components(&self) -> &[Normal] {
        &self.comps
    }

    /// The field as a map on base coordinates.
    pub fn as_field(&self) -> FieldAlong {
        let mut f = FieldAlong::new();
        for (a, x) in self.comps.iter().enumerate() {
            if !x.is_zero() {
                f.insert(Coord::base(a), x.clone());
            }
        }
        f
    }
}

/// `u^a ↦ f^a`, `u_i^a ↦ d_i f^a`.
pub fn prolong_map1(f: &SmoothMap, m: usize) -> Result<Substitution> {
    let mut out = Substitution::new();
    for (a, fa) in f.comps.iter().enumerate() {
        out.insert(Coord::base(a), fa.clone());
        for i in 0..m {
            out.insert(Coord::vel(a, i), total_d(fa, i)?);
        }
    }
    Ok(out)
}

/// [`prolong_map1`] plus `u_{ij}^a ↦ d_i d_j f^a`.
pub fn prolong_map2(f: &SmoothMap, m: usize) -> Result<Substitution> {
    let mut out = prolong_map1(f, m)?;
    for (a, fa) in f.comps.iter().enumerate() {
        for i in 0..m {
            let di = total_d(fa, i)?;
            for j in i..m {
                out.insert(Coord::acc(a, i, j), total_d(&di, j)?);
            }
        }
    }
    Ok(out)
}

/// Applies a substitution to an expression; every coordinate must be mapped.
pub fn substitute(e: &Normal, sub: &Substitution) -> Result<Normal> {
    if let Some(c) = e.coords().into_iter().find(|c| !sub.contains_key(c)) {
        return Err(Error::IncompleteMap(format!("coordinate {c}")));
    }
    e.substitute(&|c| sub.get(&c).cloned())
}

/// `outer ∘ inner` as substitutions: each entry of `outer` rewritten through `inner`.
pub fn compose_substitutions(outer: &Substitution, inner: &Substitution) -> Result<Substitution> {
    outer.iter().map(|(c, e)| Ok((*c, substitute(e, inner)?))).collect()
}

/// `X^a ∂/∂u^a + (d_i X^a) ∂/∂u_i^a`.
pub fn prolong_field1(x: &VectorFieldOnE, m: usize) -> Result<FieldAlong> {
    let mut out = x.as_field();
    for (a, xa) in x.comps.iter().enumerate() {
        for i in 0..m {
            let v = total_d(xa, i)?;
            if !v.is_zero() {
                out.insert(Coord::vel(a, i), v);
            }
        }
    }
    Ok(out)
}

/// [`prolong_field1`] plus `d_i d_j X^a` on each canonical `u_{ij}^a`.
pub fn prolong_field2(x: &VectorFieldOnE, m: usize) -> Result<FieldAlong> {
    let mut out = prolong_field1(x, m)?;
    for (a, xa) in x.comps.iter().enumerate() {
        for i in 0..m {
            let di = total_d(xa, i)?;
            for j in i..m {
                let v = total_d(&di, j)?;
                if !v.is_zero() {
                    out.insert(Coord::acc(a, i, j), v);
                }
            }
        }
    }
    Ok(out)
}

/// Derivative of a function along a field; coordinates the field omits count as zero.
pub fn apply_field(f: &Normal, field: &FieldAlong) -> Normal {
    let mut out = Normal::zero();
    for c in f.coords() {
        if let Some(v) = field.get(&c) {
            out = out.add(&f.partial(c).mul(v));
        }
    }
    out
}

/// A point of `T_{m'} T_m E` with coordinates `u^a, u_i^a, u_{;j}^a, u_{i;j}^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleJetPoint {
    pub m: usize,
    pub m_outer: usize,
    pub n: usize,
    pub x: Vec<f64>,
    /// `v[i][a] = u_i^a`
    pub v: Vec<Vec<f64>>,
    /// `v_outer[j][a] = u_{;j}^a`
    pub v_outer: Vec<Vec<f64>>,
    /// `vv[i][j][a] = u_{i;j}^a`
    pub vv: Vec<Vec<Vec<f64>>>,
}

impl DoubleJetPoint {
    pub fn random<R: Rng>(rng: &mut R, m: usize, m_outer: usize, n: usize) -> Self {
        let mut row = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect() };
        let x = row(n);
        let v = (0..m).map(|_| row(n)).collect();
        let v_outer = (0..m_outer).map(|_| row(n)).collect();
        let vv = (0..m).map(|_| (0..m_outer).map(|_| row(n)).collect()).collect();
        DoubleJetPoint { m, m_outer, n, x, v, v_outer, vv }
    }

    /// `u_i = u_{;i}` and `u_{i;j} = u_{j;i}`.
    pub fn is_holonomic(&self) -> bool {
        self.m == self.m_outer
            && self.v == self.v_outer
            && (0..self.m).all(|i| (0..self.m).all(|j| self.vv[i][j] == self.vv[j][i]))
    }

    /// The base projection `τ_{m(T_{m'}E)}`, as a point of `T_{m'}E`.
    pub fn outer_base(&self) -> JetPoint {
        JetPoint::first_order(self.x.clone(), self.v_outer.clone())
    }

    /// The first-velocity part, as a point of `T_m E`.
    pub fn inner_base(&self) -> JetPoint {
        JetPoint::first_order(self.x.clone(), self.v.clone())
    }
}

/// The exchange map: `u_i ↔ u_{;i}`, `u_{i;j} ↦ u_{j;i}`.
pub fn exchange(p: &DoubleJetPoint) -> DoubleJetPoint {
    let vv = (0..p.m_outer).map(|j| (0..p.m).map(|i| p.vv[i][j].clone()).collect()).collect();
    DoubleJetPoint {
        m: p.m_outer,
        m_outer: p.m,
        n: p.n,
        x: p.x.clone(),
        v: p.v_outer.clone(),
        v_outer: p.v.clone(),
        vv,
    }
}

/// The embedding of second-order velocities as holonomic double velocities.
pub fn holonomic_embed(q: &JetPoint) -> Result<DoubleJetPoint> {
    let v = q.v.clone().ok_or(Error::IncompletePoint(Coord::vel(0, 0)))?;
    let mut vv = vec![vec![vec![0.0; q.n]; q.m]; q.m];
    for i in 0..q.m {
        for j in 0..q.m {
            for a in 0..q.n {
                vv[i][j][a] = q.get(Coord::acc(a, i, j))?;
            }
        }
    }
    Ok(DoubleJetPoint { m: q.m, m_outer: q.m, n: q.n, x: q.x.clone(), v_outer: v.clone(), v, vv })
}

/// Left inverse of [`holonomic_embed`].
pub fn holonomic_extract(p: &DoubleJetPoint) -> Result<JetPoint> {
    if !p.is_holonomic() {
        return Err(Error::Precondition("double velocity is not holonomic".into()));
    }
    let mut q = JetPoint::zeros(p.m, p.n, 2);
    q.x = p.x.clone();
    q.v = Some(p.v.clone());
    for i in 0..p.m {
        for j in i..p.m {
            for a in 0..p.n {
                q.set(Coord::acc(a, i, j), p.vv[i][j][a])?;
            }
        }
    }
    Ok(q)
}

/// All permutations of `0..k` with their signs.
fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let k = used.len();
        if prefix.len() == k {
            let inversions = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| prefix[i] > prefix[j]).count();
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for x in 0..k {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Determinant of a square matrix of expressions by the Leibniz formula.
pub fn symbolic_det(rows: &[Vec<Normal>]) -> Normal {
    let k = rows.len();
    let mut out = Normal::zero();
    for (perm, sign) in permutations_with_sign(k) {
        let mut t = Normal::int(sign);
        for (i, &p) in perm.iter().enumerate() {
            t = t.mul(&rows[i][p]);
        }
        out = out.add(&t);
    }
    out
}

/// The determinant 1-form `θ^{a₁…a_{m+1}}` with rows `(u_i^{a_k})` and a last
/// row `(du^{a_k})`, expanded along the last row.
pub fn contact_det_form(dims: &Dimensions, indices: &[usize]) -> Result<ScalarForm> {
    let m = dims.m;
    if indices.len() != m + 1 {
        return Err(Error::Precondition(format!("need m + 1 = {} indices", m + 1)));
    }
    if let Some(&a) = indices.iter().find(|&&a| a >= dims.n) {
        return Err(Error::Precondition(format!("index {} exceeds n = {}", a + 1, dims.n)));
    }
    for (p, a) in indices.iter().enumerate() {
        if indices[..p].contains(a) {
            return Err(Error::DegenerateForm(format!("index {} is repeated", a + 1)));
        }
    }
    let mut out = ScalarForm::zero(1);
    for k in 0..=m {
        let minor: Vec<Vec<Normal>> = (0..m)
            .map(|i| {
                indices.iter().enumerate().filter(|&(q, _)| q != k).map(|(_, &a)| Normal::coord(Coord::vel(a, i))).collect()
            })
            .collect();
        let sign = if (m + k).is_multiple_of(2) { 1 } else { -1 };
        out.add_term(vec![Coord::base(indices[k])], symbolic_det(&minor).scale(&crate::symexpr::int(sign)));
    }
    Ok(out)
}

/// `⟨ω, d_k⟩` for each `k`; all zero for a form annihilating the total derivatives.
pub fn pair_with_totals(omega: &ScalarForm, m: usize) -> Result<Vec<ScalarForm>> {
    (0..m).map(|k| omega.contract(&total_field(omega, k)?)).collect()
}

/// The contact 2-form `(u₁¹du² − u₁²du¹)∧du₂³ − (u₂¹du² − u₂²du¹)∧du₁³` (m = 2, n ≥ 3).
pub fn mixed_contact_two_form() -> ScalarForm {
    let part = |i: usize| {
        let mut f = ScalarForm::zero(1);
        f.add_term(vec![Coord::base(1)], Normal::coord(Coord::vel(0, i)));
        f.add_term(vec![Coord::base(0)], Normal::coord(Coord::vel(1, i)).neg());
        f
    };
    part(0)
        .wedge(&ScalarForm::basis(Coord::vel(2, 1)))
        .sub(&part(1).wedge(&ScalarForm::basis(Coord::vel(2, 0))))
}

/// Numeric rank of the forms `θ^{1…m, m+k}`, `k = 1..n−m`, at a point.
pub fn contact_span_rank(dims: &Dimensions, p: &JetPoint) -> Result<usize> {
    let (m, n) = (dims.m, dims.n);
    let mut mat = nalgebra::DMatrix::zeros(n - m, n);
    for k in 0..n - m {
        let mut idx: Vec<usize> = (0..m).collect();
        idx.push(m + k);
        let theta = contact_det_form(dims, &idx)?;
        for a in 0..n {
            mat[(k, a)] = p.eval(&theta.coefficient(&[Coord::base(a)]))?;
        }
    }
    let sv = mat.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > 1e-10 * largest.max(1e-300)).count())
}

/// Pullback `(j̄γ)*ω` evaluated at `t`: coefficients on increasing `dt^K`.
pub fn pullback_along(omega: &ScalarForm, jets: &Prolonged, m: usize, t: &[f64]) -> Result<Vec<f64>> {
    let r = omega.degree();
    let subsets = increasing_subsets(m, r);
    let mut out = vec![0.0; subsets.len()];
    let point = jets.point(t)?;
    let mut cache: BTreeMap<Coord, Vec<f64>> = BTreeMap::new();
    for (key, coef) in omega.terms() {
        let c = point.eval(coef)?;
        if c == 0.0 {
            continue;
        }
        let mut rows = Vec::with_capacity(r);
        for cov in key {
            if !cache.contains_key(cov) {
                let grads = (0..m)
                    .map(|k| crate::numeric::eval_param(&jets.coordinate_derivative(*cov, k)?, t))
                    .collect::<Result<Vec<_>>>()?;
                cache.insert(*cov, grads);
            }
            rows.push(cache[cov].clone());
        }
        for (s, set) in subsets.iter().enumerate() {
            let mat = nalgebra::DMatrix::from_fn(r, r, |p, q| rows[p][set[q]]);
            out[s] += c * if r == 0 { 1.0 } else { mat.determinant() };
        }
    }
    Ok(out)
}

fn increasing_subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    if r > m {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 0..m {
        for rest in increasing_subsets(m, r - 1) {
            if rest.first().is_none_or(|&x| x > first) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactReport {
    pub trials: usize,
    pub max_residual: f64,
}

/// Pulls `ω` back along random prolonged polynomial curves and reports the
/// largest coefficient seen.
pub fn is_contact_numeric<R: Rng>(omega: &ScalarForm, dims: &Dimensions, trials: usize, rng: &mut R) -> Result<ContactReport> {
    let mut worst: f64 = 0.0;
    let order = omega.order() + 1;
    for _ in 0..trials {
        let curve = random_curve(rng, dims.m, dims.n, 4);
        let jets = curve.prolong(order.min(3));
        let t: Vec<f64> = (0..dims.m).map(|_| rng.gen_range(0.0..1.0)).collect();
        for v in pullback_along(omega, &jets, dims.m, &t)? {
            worst = worst.max(v.abs());
        }
    }
    Ok(ContactReport { trials, max_residual: worst })
}
