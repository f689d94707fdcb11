//! Lagrangians, the Euler form, the Euler-form tower and the Hilbert,
//! Carathéodory and fundamental equivalents.

mod check;

use serde::Serialize;

pub use check::{compare_forms, CheckReport, Status};

use crate::error::{Error, Result};
use crate::forms::{contract_dt, ScalarForm, VectorForm};
use crate::jetcalc::{d_t, homotopy_p1, homotopy_p2, i_t, vertical_s_vector};
use crate::jetgroup::check_equivariant;
use crate::symexpr::{int, rat, Coord, Dimensions, Normal, ParseOptions, Rational, Variables};

/// A first-order Lagrangian `Λ = L d^m t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    l: Normal,
    dims: Dimensions,
}

impl Lagrangian {
    pub fn new(l: Normal, dims: Dimensions) -> Result<Self> {
        let dims = Dimensions { order: 1, ..dims };
        if let Some(c) = l.coords().into_iter().find(|c| !dims.admits(*c)) {
            return Err(Error::Precondition(format!("Lagrangian uses {c}, outside a first-order chart with m = {}, n = {}", dims.m, dims.n)));
        }
        Ok(Lagrangian { l, dims })
    }

    pub fn parse(text: &str, m: usize, n: usize) -> Result<Self> {
        let dims = Dimensions::new(m, n, 1)?;
        let e = crate::symexpr::parse_with(text, ParseOptions { variables: Variables::Jet, dims: Some(dims) })?;
        Self::new(e.to_normal()?, dims)
    }

    /// `sqrt(Σ_a (u_1^a)²)` with `m = 1`.
    pub fn length(n: usize) -> Result<Self> {
        let sum: Vec<String> = (1..=n).map(|a| format!("u[{a};1]^2")).collect();
        Self::parse(&format!("sqrt({})", sum.join(" + ")), 1, n)
    }

    /// Square root of the Gram determinant of `u_1, u_2` with `m = 2`.
    pub fn area(n: usize) -> Result<Self> {
        let dot = |i: usize, j: usize| (1..=n).map(|a| format!("u[{a};{i}]*u[{a};{j}]")).collect::<Vec<_>>().join(" + ");
        Self::parse(&format!("sqrt(({})*({}) - ({})^2)", dot(1, 1), dot(2, 2), dot(1, 2)), 2, n)
    }

    /// The minor `u_1^1 u_2^2 − u_1^2 u_2^1` with `m = 2`.
    pub fn minor(n: usize) -> Result<Self> {
        Self::parse("u[1;1]*u[2;2] - u[2;1]*u[1;2]", 2, n)
    }

    pub fn l(&self) -> &Normal {
        &self.l
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    pub fn m(&self) -> usize {
        self.dims.m
    }

    pub fn lambda(&self) -> VectorForm {
        VectorForm::top(self.m(), ScalarForm::function(self.l.clone()))
    }

    /// Symbolic check of `Δ_j^i L = δ_j^i L`.
    pub fn is_homogeneous(&self) -> Result<bool> {
        Ok(check_equivariant(&self.lambda())?.passed())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Hilbert,
    Caratheodory,
    Fundamental,
    User,
}

/// `Θ_0 = Λ, Θ_1, …, Θ_m` with `Θ_r ∈ Ω₁^{r, m−r}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalentChain {
    pub thetas: Vec<VectorForm>,
    pub provenance: Provenance,
}

impl EquivalentChain {
    pub fn top(&self) -> &VectorForm {
        self.thetas.last().expect("chain is never empty")
    }
}

/// `ℰ_0, …, ℰ_m` with `ℰ_r ∈ Ω₂^{r+1, m−r}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTower {
    pub forms: Vec<VectorForm>,
}

/// `Θ₁ = S dΛ`.
pub fn hilbert_theta1(lag: &Lagrangian) -> Result<VectorForm> {
    vertical_s_vector(&lag.lambda().vf_d())
}

/// The Hilbert forms `ϑ^i = ∂L/∂u_i^a du^a`, so that `Θ₁ = ϑ^i ⊗ d^{m−1}t_i`.
pub fn hilbert_forms(lag: &Lagrangian) -> Vec<ScalarForm> {
    (0..lag.m())
        .map(|i| {
            let mut f = ScalarForm::zero(1);
            for a in 0..lag.dims.n {
                f.add_term(vec![Coord::base(a)], lag.l.partial(Coord::vel(a, i)));
            }
            f
        })
        .collect()
}

/// `ℰ₀ = dΛ − d_T Θ₁`.
pub fn euler_form(lag: &Lagrangian) -> Result<VectorForm> {
    let theta1 = hilbert_theta1(lag)?;
    Ok(lag.lambda().vf_d().sub(&d_t(&theta1)?))
}

/// Euler–Lagrange expressions `∂L/∂u^a − d_k(∂L/∂u_k^a)`, one per `a`.
pub fn euler_lagrange(lag: &Lagrangian) -> Result<Vec<Normal>> {
    (0..lag.dims.n)
        .map(|a| {
            let mut e = lag.l.partial(Coord::base(a));
            for k in 0..lag.m() {
                e = e.sub(&crate::jetcalc::total_d(&lag.l.partial(Coord::vel(a, k)), k)?);
            }
            Ok(e)
        })
        .collect()
}

/// First-order coefficients and covectors, i.e. horizontal over `T_m E`.
fn first_order(xi: &VectorForm) -> bool {
    xi.order() <= 1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LepageanReport {
    pub lepagean: bool,
    /// Present when Lepagean: whether `Θ̃₁ − Θ₁ = d_T P₁ Θ̃₁` and the Euler forms agree.
    pub unique_euler: Option<bool>,
}

/// Tests `S ℰ̃₀ = 0` for `ℰ̃₀ = dΛ − d_T Θ̃₁`, and when it holds compares with
/// the Hilbert equivalent.
pub fn lepagean_check(candidate: &VectorForm, lag: &Lagrangian) -> Result<LepageanReport> {
    let m = lag.m();
    if candidate.m() != m || candidate.r() != 1 || candidate.s() != m - 1 {
        return Err(Error::Precondition("candidate must be a vector 1-form of weight m − 1".into()));
    }
    if !first_order(candidate) {
        return Err(Error::Precondition("candidate is not a first-order form".into()));
    }
    let e_tilde = lag.lambda().vf_d().sub(&d_t(candidate)?);
    if !vertical_s_vector(&e_tilde)?.is_zero() {
        return Ok(LepageanReport { lepagean: false, unique_euler: None });
    }
    let theta1 = hilbert_theta1(lag)?;
    let difference = candidate.sub(&theta1);
    let exact = if m == 1 { difference.is_zero() } else { difference == d_t(&homotopy_p1(candidate)?)? };
    Ok(LepageanReport { lepagean: true, unique_euler: Some(exact && e_tilde == euler_form(lag)?) })
}

/// `Θ̃_m = L^{−(m−1)} ϑ¹ ∧ … ∧ ϑ^m`; for `m = 1` this is `ϑ¹`.
pub fn caratheodory(lag: &Lagrangian) -> Result<ScalarForm> {
    let forms = hilbert_forms(lag);
    let mut out = ScalarForm::function(lag.l.pow_i(1 - lag.m() as i32)?);
    for f in &forms {
        out = out.wedge(f);
    }
    Ok(out)
}

/// `Θ_{r+1} = ((−1)^r/(r+1)²) S dΘ_r` from `Θ_0 = Λ`.
pub fn fundamental(lag: &Lagrangian) -> Result<EquivalentChain> {
    let m = lag.m();
    let mut thetas = vec![lag.lambda()];
    for r in 0..m {
        let next = vertical_s_vector(&thetas[r].vf_d())?;
        let sign = if r % 2 == 0 { 1 } else { -1 };
        thetas.push(next.scale(&rat(sign, ((r + 1) * (r + 1)) as i64)));
    }
    Ok(EquivalentChain { thetas, provenance: Provenance::Fundamental })
}

fn ordered_tuples(len: usize, range: usize) -> Vec<Vec<usize>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|t| (0..range).map(move |x| {
                let mut t = t.clone();
                t.push(x);
                t
            }))
            .collect()
    })
}

/// Coordinate formula
/// `Θ_r = (1/(r!)²) ∂^rL/∂u_{i₁}^{a₁}⋯∂u_{i_r}^{a_r} du^{a₁}∧⋯∧du^{a_r} ⊗ (∂_{i_r} ⌟ ⋯ ⌟ ∂_{i₁} ⌟ d^m t)`.
pub fn fundamental_closed_form(lag: &Lagrangian, r: usize) -> Result<VectorForm> {
    let (m, n) = (lag.m(), lag.dims.n);
    if r > m {
        return Err(Error::Degree(format!("no equivalent of degree {r} for m = {m}")));
    }
    let fact: i64 = (1..=r as i64).product();
    let c = rat(1, fact * fact);
    let mut out = VectorForm::zero(m, r, m - r);
    for is in ordered_tuples(r, m) {
        let mut idx: Vec<usize> = (0..m).collect();
        let mut sign = 1;
        let mut alive = true;
        for &i in &is {
            match contract_dt(i, &idx) {
                Some((s, rest)) => {
                    sign *= s;
                    idx = rest;
                }
                None => alive = false,
            }
        }
        if !alive {
            continue;
        }
        let mut chi = ScalarForm::zero(r);
        for as_ in ordered_tuples(r, n) {
            let d = is.iter().zip(&as_).fold(lag.l.clone(), |f, (&i, &a)| f.partial(Coord::vel(a, i)));
            if !d.is_zero() {
                chi.add_term(as_.iter().map(|&a| Coord::base(a)).collect(), d);
            }
        }
        out.add_component(&idx, chi.scale(&(c.clone() * int(sign as i64))));
    }
    Ok(out)
}

/// Builds `Θ_r = ((−1)^r/(m−r)) i_T Θ_{r+1}` down from a top form.
pub fn descend(top: &ScalarForm, m: usize, provenance: Provenance) -> Result<EquivalentChain> {
    if top.degree() != m {
        return Err(Error::Degree(format!("top form must have degree m = {m}")));
    }
    let mut thetas = vec![VectorForm::scalar(m, top.clone())];
    for r in (0..m).rev() {
        let sign = if r % 2 == 0 { 1 } else { -1 };
        let next = i_t(thetas.last().unwrap())?.scale(&rat(sign, (m - r) as i64));
        thetas.push(next);
    }
    thetas.reverse();
    Ok(EquivalentChain { thetas, provenance })
}

/// The Carathéodory chain, descended from `Θ̃_m`.
pub fn caratheodory_chain(lag: &Lagrangian) -> Result<EquivalentChain> {
    descend(&caratheodory(lag)?, lag.m(), Provenance::Caratheodory)
}

/// `i_T^k`.
pub fn i_t_power(xi: &VectorForm, k: usize) -> Result<VectorForm> {
    (0..k).try_fold(xi.clone(), |acc, _| i_t(&acc))
}

/// `(−1)^{m(m−1)/2} m!`.
pub fn top_sign_factorial(m: usize) -> Rational {
    let f: i64 = (1..=m as i64).product();
    int(if (m * (m.saturating_sub(1)) / 2).is_multiple_of(2) { f } else { -f })
}

/// `(−1)^{m(m−1)/2} (m−1)!`, the factor in `i_T^{m−1} Θ̃_m = c Θ₁`.
pub fn caratheodory_descent_factor(m: usize) -> Rational {
    let f: i64 = (1..m as i64).product();
    int(if (m * (m.saturating_sub(1)) / 2).is_multiple_of(2) { f } else { -f })
}

/// `ℰ_r = dΘ_r − (−1)^r d_T Θ_{r+1}` and `ℰ_m = dΘ_m`.
pub fn euler_tower(chain: &EquivalentChain) -> Result<EulerTower> {
    let m = chain.thetas[0].m();
    if chain.thetas.len() != m + 1 {
        return Err(Error::Precondition(format!("chain has {} forms, expected {}", chain.thetas.len(), m + 1)));
    }
    let mut forms = Vec::with_capacity(m + 1);
    for r in 0..m {
        let dt = d_t(&chain.thetas[r + 1])?;
        let dt = if r % 2 == 0 { dt } else { dt.neg() };
        forms.push(chain.thetas[r].vf_d().sub(&dt));
    }
    forms.push(chain.thetas[m].vf_d());
    Ok(EulerTower { forms })
}

/// Residuals of `ℰ_r = ((−1)^{r+1}/(m−r)) i_T ℰ_{r+1}`, `r = 0..m−1`.
pub fn descent_recurrence_residuals(tower: &EulerTower) -> Result<Vec<VectorForm>> {
    let m = tower.forms.len() - 1;
    (0..m)
        .map(|r| {
            let sign = if r % 2 == 0 { -1 } else { 1 };
            let rhs = i_t(&tower.forms[r + 1])?.scale(&rat(sign, (m - r) as i64));
            Ok(tower.forms[r].sub(&rhs))
        })
        .collect()
}

/// Residuals of `ℰ_{r+1} = (−1)^{r+1} P₂ dℰ_r`, `r = 0..m−1`.
pub fn homotopy_recurrence_residuals(tower: &EulerTower) -> Result<Vec<VectorForm>> {
    let m = tower.forms.len() - 1;
    (0..m)
        .map(|r| {
            let rhs = homotopy_p2(&tower.forms[r].vf_d())?;
            let rhs = if r % 2 == 0 { rhs.neg() } else { rhs };
            Ok(tower.forms[r + 1].sub(&rhs))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::normal;

    fn n(s: &str) -> Normal {
        normal(s).unwrap()
    }

    #[test]
    fn hilbert_examples() {
        let lin = Lagrangian::parse("u[1;1]", 1, 2).unwrap();
        assert_eq!(hilbert_theta1(&lin).unwrap(), VectorForm::scalar(1, ScalarForm::basis(Coord::base(0))));
        let len = Lagrangian::length(2).unwrap();
        let theta = hilbert_theta1(&len).unwrap();
        let mut expected = ScalarForm::zero(1);
        expected.add_term(vec![Coord::base(0)], n("u[1;1]/sqrt(u[1;1]^2 + u[2;1]^2)"));
        expected.add_term(vec![Coord::base(1)], n("u[2;1]/sqrt(u[1;1]^2 + u[2;1]^2)"));
        assert_eq!(theta, VectorForm::scalar(1, expected.clone()));
        assert_eq!(hilbert_forms(&len), vec![expected]);
        assert_eq!(i_t(&theta).unwrap(), len.lambda());
    }

    #[test]
    fn hilbert_contracts_to_m_lambda_for_area() {
        let area = Lagrangian::area(3).unwrap();
        let theta = hilbert_theta1(&area).unwrap();
        assert_eq!(i_t(&theta).unwrap(), area.lambda().scale(&int(2)));
    }

    #[test]
    fn euler_examples() {
        let lin = Lagrangian::parse("u[1;1]", 1, 2).unwrap();
        assert!(euler_form(&lin).unwrap().is_zero());
        assert!(euler_form(&Lagrangian::minor(3).unwrap()).unwrap().is_zero());
        let len = Lagrangian::length(2).unwrap();
        let e0 = euler_form(&len).unwrap();
        let mut p = crate::symexpr::JetPoint::zeros(1, 2, 2);
        p.set(Coord::vel(0, 0), 1.0).unwrap();
        p.set(Coord::acc(1, 0, 0), 1.0).unwrap();
        let chi = e0.component(&[0]);
        assert_eq!(p.eval(&chi.coefficient(&[Coord::base(1)])).unwrap(), -1.0);
        assert_eq!(p.eval(&chi.coefficient(&[Coord::base(0)])).unwrap(), 0.0);
        let el = euler_lagrange(&len).unwrap();
        for a in 0..2 {
            assert_eq!(chi.coefficient(&[Coord::base(a)]), el[a]);
        }
    }

    #[test]
    fn lepagean_examples() {
        let area = Lagrangian::area(3).unwrap();
        let theta = hilbert_theta1(&area).unwrap();
        assert_eq!(lepagean_check(&theta, &area).unwrap(), LepageanReport { lepagean: true, unique_euler: Some(true) });
        // Θ₁ + d_T Φ with Φ of weight m − 2 = 0
        let phi = VectorForm::scalar(2, ScalarForm::monomial(vec![Coord::base(2)], n("u[1]*u[2]")));
        let shifted = theta.add(&d_t(&phi).unwrap());
        assert_eq!(lepagean_check(&shifted, &area).unwrap(), LepageanReport { lepagean: true, unique_euler: Some(true) });
        let len = Lagrangian::length(2).unwrap();
        let bump = VectorForm::scalar(1, ScalarForm::monomial(vec![Coord::base(0)], n("u[1;1]")));
        let perturbed = hilbert_theta1(&len).unwrap().add(&bump);
        assert!(!lepagean_check(&perturbed, &len).unwrap().lepagean);
        let vertical = VectorForm::scalar(1, ScalarForm::basis(Coord::acc(0, 0, 0)));
        assert!(matches!(lepagean_check(&vertical, &len), Err(Error::Precondition(_))));
    }

    #[test]
    fn fundamental_of_minor_is_constant() {
        let minor = Lagrangian::minor(3).unwrap();
        let chain = fundamental(&minor).unwrap();
        let top = VectorForm::scalar(2, ScalarForm::monomial(vec![Coord::base(0), Coord::base(1)], Normal::one()));
        assert_eq!(chain.top(), &top);
        assert!(chain.top().vf_d().is_zero());
        for r in 0..=2 {
            assert_eq!(fundamental_closed_form(&minor, r).unwrap(), chain.thetas[r]);
        }
        assert_eq!(i_t_power(chain.top(), 2).unwrap(), minor.lambda().scale(&top_sign_factorial(2)));
    }

    #[test]
    fn fundamental_of_area_matches_closed_form() {
        let area = Lagrangian::area(3).unwrap();
        let chain = fundamental(&area).unwrap();
        for r in 0..=2 {
            assert_eq!(fundamental_closed_form(&area, r).unwrap(), chain.thetas[r], "r = {r}");
        }
        let down = descend(&chain.top().component(&[]), 2, Provenance::Fundamental).unwrap();
        assert_eq!(down.thetas, chain.thetas);
    }

    #[test]
    fn caratheodory_examples() {
        let area = Lagrangian::area(3).unwrap();
        let car = VectorForm::scalar(2, caratheodory(&area).unwrap());
        assert_eq!(i_t_power(&car, 2).unwrap(), area.lambda().scale(&int(-2)));
        assert_eq!(i_t(&car).unwrap(), hilbert_theta1(&area).unwrap().neg());
    }

    #[test]
    fn tower_recurrences() {
        for lag in [Lagrangian::area(3).unwrap(), Lagrangian::minor(2).unwrap(), Lagrangian::length(3).unwrap()] {
            let tower = euler_tower(&fundamental(&lag).unwrap()).unwrap();
            assert!(descent_recurrence_residuals(&tower).unwrap().iter().all(VectorForm::is_zero));
            assert!(homotopy_recurrence_residuals(&tower).unwrap().iter().all(VectorForm::is_zero));
            assert_eq!(tower.forms[0], euler_form(&lag).unwrap());
        }
        let incomplete = EquivalentChain { thetas: vec![Lagrangian::minor(2).unwrap().lambda()], provenance: Provenance::User };
        assert!(matches!(euler_tower(&incomplete), Err(Error::Precondition(_))));
    }
}
