//! Total derivatives, vertical endomorphisms, the horizontal operators
//! `i_T` and `d_T`, and the homotopy operators `P₁`, `P₂`.

use crate::error::{Error, Result};
use crate::forms::{contract_dt, wedge_dt, FieldAlong, ScalarForm, VectorForm};
use crate::symexpr::{rat, Coord, Normal};

/// Total derivative `d_k f = Σ_c (∂f/∂c) d_k(c)`; raises order by one.
pub fn total_d(f: &Normal, k: usize) -> Result<Normal> {
    let mut out = Normal::zero();
    for c in f.coords() {
        let up = Normal::coord(c.raise(k)?);
        out = out.add(&f.partial(c).mul(&up));
    }
    Ok(out)
}

/// Lie derivative of a form along the field whose component on `c` is `field(c)`.
/// Covectors transform by `L du^c = d(field(c))`.
pub fn lie_derivative(omega: &ScalarForm, field: &dyn Fn(Coord) -> Result<Normal>) -> Result<ScalarForm> {
    omega.derivation(
        &|f| {
            let mut out = Normal::zero();
            for c in f.coords() {
                let v = field(c)?;
                if !v.is_zero() {
                    out = out.add(&f.partial(c).mul(&v));
                }
            }
            Ok(out)
        },
        &|c| Ok(ScalarForm::function(field(c)?).ext_d()),
    )
}

/// Total derivative acting on a form: coefficients by [`total_d`], covectors
/// `du^a → du_k^a`, `du_i^a → du_{ik}^a`, `du_{ij}^a → du_{ijk}^a`.
pub fn total_d_form(omega: &ScalarForm, k: usize) -> Result<ScalarForm> {
    omega.derivation(&|f| total_d(f, k), &|c| Ok(ScalarForm::basis(c.raise(k)?)))
}

/// The field `d_k` restricted to the covectors of `omega`, for contractions.
pub fn total_field(omega: &ScalarForm, k: usize) -> Result<FieldAlong> {
    let mut field = FieldAlong::new();
    for (key, _) in omega.terms() {
        for c in key {
            if !field.contains_key(c) {
                field.insert(*c, Normal::coord(c.raise(k)?));
            }
        }
    }
    Ok(field)
}

/// Image of a basis covector under the vertical endomorphism `S^j`.
fn vertical_covector(c: Coord, j: usize) -> Result<ScalarForm> {
    let j = j as u8;
    let mut out = ScalarForm::zero(1);
    match c {
        Coord::Base(_) => {}
        Coord::Vel(a, i) => {
            if i == j {
                out.add_term(vec![Coord::Base(a)], Normal::one());
            }
        }
        Coord::Acc(a, p, q) => {
            if q == j {
                out.add_term(vec![Coord::Vel(a, p)], Normal::one());
            }
            if p == j {
                out.add_term(vec![Coord::Vel(a, q)], Normal::one());
            }
        }
        Coord::Jerk(..) => return Err(Error::UnsupportedOrder(3)),
    }
    Ok(out)
}

/// Vertical endomorphism `S^j` as a degree-zero derivation acting on covectors only.
pub fn vertical_s(omega: &ScalarForm, j: usize) -> Result<ScalarForm> {
    omega.derivation(&|_| Ok(Normal::zero()), &|c| vertical_covector(c, j))
}

/// The field `Δ_i^j` (second-order part included for acceleration coordinates).
pub fn delta_field(i: usize, j: usize) -> impl Fn(Coord) -> Result<Normal> {
    let (i8, j8) = (i as u8, j as u8);
    move |c| {
        Ok(match c {
            Coord::Base(_) => Normal::zero(),
            Coord::Vel(a, k) => {
                if k == j8 {
                    Normal::coord(Coord::Vel(a, i8))
                } else {
                    Normal::zero()
                }
            }
            Coord::Acc(a, p, q) => {
                let mut v = Normal::zero();
                if p == j8 {
                    v = v.add(&Normal::coord(Coord::acc(a as usize, i, q as usize)));
                }
                if q == j8 {
                    v = v.add(&Normal::coord(Coord::acc(a as usize, i, p as usize)));
                }
                v
            }
            Coord::Jerk(..) => return Err(Error::UnsupportedOrder(3)),
        })
    }
}

/// `Δ_i^j f`.
pub fn delta_fn(f: &Normal, i: usize, j: usize) -> Result<Normal> {
    let field = delta_field(i, j);
    let mut out = Normal::zero();
    for c in f.coords() {
        let v = field(c)?;
        if !v.is_zero() {
            out = out.add(&f.partial(c).mul(&v));
        }
    }
    Ok(out)
}

/// Lie derivative of a form along `Δ_i^j`.
pub fn lie_along_delta(omega: &ScalarForm, i: usize, j: usize) -> Result<ScalarForm> {
    lie_derivative(omega, &delta_field(i, j))
}

fn check_horizontal_step(xi: &VectorForm) -> Result<()> {
    if xi.s() >= xi.m() {
        return Err(Error::WeightOverflow { weight: xi.s(), m: xi.m() });
    }
    Ok(())
}

/// `i_T(χ ⊗ dt^I) = Σ_i (d_i ⌟ χ) ⊗ dt^i ∧ dt^I`.
pub fn i_t(xi: &VectorForm) -> Result<VectorForm> {
    if xi.r() == 0 {
        return Err(Error::Degree("i_T needs a form of degree at least 1".into()));
    }
    check_horizontal_step(xi)?;
    let mut out = VectorForm::zero(xi.m(), xi.r() - 1, xi.s() + 1);
    for (idx, chi) in xi.components() {
        for i in 0..xi.m() {
            if let Some((sign, new_idx)) = wedge_dt(i, &idx) {
                let c = chi.contract(&total_field(chi, i)?)?;
                out.add_component(&new_idx, if sign < 0 { c.neg() } else { c });
            }
        }
    }
    Ok(out)
}

/// `d_T(χ ⊗ dt^I) = Σ_i d_iχ ⊗ dt^i ∧ dt^I`.
pub fn d_t(xi: &VectorForm) -> Result<VectorForm> {
    check_horizontal_step(xi)?;
    let mut out = VectorForm::zero(xi.m(), xi.r(), xi.s() + 1);
    for (idx, chi) in xi.components() {
        for i in 0..xi.m() {
            if let Some((sign, new_idx)) = wedge_dt(i, &idx) {
                let c = total_d_form(chi, i)?;
                out.add_component(&new_idx, if sign < 0 { c.neg() } else { c });
            }
        }
    }
    Ok(out)
}

/// `Σ_j S^j χ_I ⊗ (∂/∂t^j ⌟ dt^I)`, lowering the weight by one.
pub fn vertical_s_vector(xi: &VectorForm) -> Result<VectorForm> {
    contract_sum(xi, vertical_s)
}

fn contract_sum(xi: &VectorForm, op: impl Fn(&ScalarForm, usize) -> Result<ScalarForm>) -> Result<VectorForm> {
    if xi.s() == 0 {
        return Err(Error::Degree("vector weight 0 has no dt factor to contract".into()));
    }
    let mut out = VectorForm::zero(xi.m(), xi.r(), xi.s() - 1);
    for (idx, chi) in xi.components() {
        for &j in &idx {
            let (sign, rest) = contract_dt(j, &idx).expect("index present");
            let c = op(chi, j)?;
            out.add_component(&rest, if sign < 0 { c.neg() } else { c });
        }
    }
    Ok(out)
}

/// `P₁`: `Ω₁^{r,s+1} → Ω₁^{r,s}`, `1/(r(m−s)) S^j χ ⊗ ∂/∂t^j ⌟ (…)`.
pub fn homotopy_p1(xi: &VectorForm) -> Result<VectorForm> {
    if xi.r() == 0 {
        return Err(Error::Degree("P1 needs a form of degree at least 1".into()));
    }
    if xi.s() == 0 {
        return Ok(VectorForm::zero(xi.m(), xi.r(), 0));
    }
    let s = xi.s() - 1;
    let c = rat(1, (xi.r() * (xi.m() - s)) as i64);
    Ok(vertical_s_vector(xi)?.scale(&c))
}

/// `P₂`: `Ω₂^{r,s+2} → Ω^{r,s+1}`,
/// `(1/(r(m−s−1)) S^j η − 1/(r²(m−s)(m−s−1)) d_l S^l S^j η) ⊗ ∂/∂t^j ⌟ (…)`.
pub fn homotopy_p2(eta: &VectorForm) -> Result<VectorForm> {
    let r = eta.r();
    if r == 0 {
        return Err(Error::Degree("P2 needs a form of degree at least 1".into()));
    }
    if eta.s() == 0 {
        return Err(Error::Degree("P2 needs vector weight at least 1".into()));
    }
    // weight s + 2; weight 1 is the formal case s = -1
    let (m, w) = (eta.m() as i64, eta.s() as i64);
    let r = r as i64;
    let c1 = rat(1, r * (m - w + 1));
    let c2 = rat(1, r * r * (m - w + 2) * (m - w + 1));
    let (m, r) = (eta.m(), eta.r());
    contract_sum(eta, |chi, j| {
        let sj = vertical_s(chi, j)?;
        let mut second = ScalarForm::zero(r);
        for l in 0..m {
            second = second.add(&total_d_form(&vertical_s(&sj, l)?, l)?);
        }
        Ok(sj.scale(&c1).sub(&second.scale(&c2)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::normal;

    fn n(s: &str) -> Normal {
        normal(s).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(total_d(&n("u[1]"), 1).unwrap(), n("u[1;2]"));
        assert_eq!(total_d(&n("u[1]*u[2]"), 0).unwrap(), n("u[1;1]*u[2] + u[1]*u[2;1]"));
        assert_eq!(total_d_form(&ScalarForm::basis(Coord::base(0)), 0).unwrap(), ScalarForm::basis(Coord::vel(0, 0)));
        assert_eq!(total_d(&n("u[1;1,1,1]"), 0), Err(Error::OrderOverflow));
    }

    #[test]
    fn vertical_examples() {
        assert_eq!(vertical_s(&ScalarForm::basis(Coord::vel(0, 0)), 0).unwrap(), ScalarForm::basis(Coord::base(0)));
        assert!(vertical_s(&ScalarForm::basis(Coord::base(0)), 0).unwrap().is_zero());
        // Σ θ^{ij} du_{ij} with θ symmetric maps to 2 θ^{ik} du_i
        let mut theta = ScalarForm::zero(1);
        theta.add_term(vec![Coord::acc(0, 0, 0)], n("u[1]"));
        theta.add_term(vec![Coord::acc(0, 0, 1)], n("2*u[2]"));
        theta.add_term(vec![Coord::acc(0, 1, 1)], n("u[3]"));
        let mut expected = ScalarForm::zero(1);
        expected.add_term(vec![Coord::vel(0, 0)], n("2*u[2]"));
        expected.add_term(vec![Coord::vel(0, 1)], n("2*u[3]"));
        assert_eq!(vertical_s(&theta, 1).unwrap(), expected);
        assert_eq!(vertical_s(&ScalarForm::basis(Coord::jerk(0, 0, 0, 0)), 0), Err(Error::UnsupportedOrder(3)));
    }

    #[test]
    fn delta_examples() {
        let l = n("u[1;1]*u[2;2] - u[2;1]*u[1;2]");
        assert_eq!(delta_fn(&l, 0, 0).unwrap(), l);
        assert!(delta_fn(&l, 0, 1).unwrap().is_zero());
        assert!(delta_fn(&n("u[1]"), 0, 1).unwrap().is_zero());
    }

    #[test]
    fn horizontal_operator_examples() {
        let xi = VectorForm::scalar(1, ScalarForm::basis(Coord::base(0)));
        assert_eq!(i_t(&xi).unwrap(), VectorForm::top(1, ScalarForm::function(n("u[1;1]"))));
        let f = VectorForm::scalar(1, ScalarForm::function(n("u[1]")));
        assert_eq!(d_t(&f).unwrap(), VectorForm::top(1, ScalarForm::function(n("u[1;1]"))));
        let top = VectorForm::top(1, ScalarForm::basis(Coord::base(0)));
        assert_eq!(d_t(&top), Err(Error::WeightOverflow { weight: 1, m: 1 }));
        assert!(matches!(i_t(&f), Err(Error::Degree(_))));
    }

    #[test]
    fn p1_example() {
        // m = 2: P1(du_1^1 ⊗ dt^1∧dt^2) = du^1 ⊗ dt^2
        let xi = VectorForm::top(2, ScalarForm::basis(Coord::vel(0, 0)));
        let mut expected = VectorForm::zero(2, 1, 1);
        expected.add_component(&[1], ScalarForm::basis(Coord::base(0)));
        assert_eq!(homotopy_p1(&xi).unwrap(), expected);
        let horizontal = VectorForm::top(2, ScalarForm::basis(Coord::base(1)));
        assert!(homotopy_p1(&horizontal).unwrap().is_zero());
    }
}
