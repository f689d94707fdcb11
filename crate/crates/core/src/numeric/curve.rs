use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::symexpr::{is_regular, parse_with, rat, Coord, JetPoint, Normal, ParseOptions, Variables};

/// An `m`-curve `t ↦ γ(t)` in `R^n` with components in the parameters
/// `t[j]` (stored as `Coord::Base(j)`). Jets are exact derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    m: usize,
    comps: Vec<Normal>,
}

impl PolyCurve {
    pub fn new(m: usize, comps: Vec<Normal>) -> Result<Self> {
        for c in &comps {
            for x in c.coords() {
                match x {
                    Coord::Base(j) if (j as usize) < m => {}
                    other => {
                        return Err(Error::Precondition(format!("curve component uses {other}, expected t[1..{m}]")))
                    }
                }
            }
        }
        Ok(PolyCurve { m, comps })
    }

    /// Parses each component in the `t[j]` grammar.
    pub fn parse(m: usize, comps: &[&str]) -> Result<Self> {
        let opts = ParseOptions { variables: Variables::Param, dims: None };
        let comps = comps
            .iter()
            .map(|s| parse_with(s, opts)?.to_normal())
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, comps)
    }

    /// The identity `t ↦ t` on `R^m`.
    pub fn identity(m: usize) -> Self {
        PolyCurve { m, comps: (0..m).map(|j| Normal::coord(Coord::base(j))).collect() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Normal] {
        &self.comps
    }

    /// `∂_I γ^a` for a multi-index of parameter directions.
    pub fn derivative(&self, a: usize, idx: &[usize]) -> Normal {
        idx.iter().fold(self.comps[a].clone(), |f, &j| f.partial(Coord::base(j)))
    }

    /// `γ ∘ φ` for a map `φ: R^m → R^m` given as a curve with `n = m`.
    pub fn compose(&self, phi: &PolyCurve) -> Result<PolyCurve> {
        if phi.n() != self.m {
            return Err(Error::Precondition("reparametrization must map R^m to R^m".into()));
        }
        let comps = self
            .comps
            .iter()
            .map(|c| c.substitute(&|x| match x {
                Coord::Base(j) => phi.comps.get(j as usize).cloned(),
                _ => None,
            }))
            .collect::<Result<Vec<_>>>()?;
        PolyCurve::new(phi.m, comps)
    }

    /// Precomputes the prolongation up to `order`.
    pub fn prolong(&self, order: usize) -> Prolonged {
        let mut jets = BTreeMap::new();
        let (m, n) = (self.m, self.n());
        for a in 0..n {
            jets.insert(Coord::base(a), self.comps[a].clone());
            for i in 0..m {
                if order >= 1 {
                    jets.insert(Coord::vel(a, i), self.derivative(a, &[i]));
                }
                for j in i..m {
                    if order >= 2 {
                        jets.insert(Coord::acc(a, i, j), self.derivative(a, &[i, j]));
                    }
                    for k in j..m {
                        if order >= 3 {
                            jets.insert(Coord::jerk(a, i, j, k), self.derivative(a, &[i, j, k]));
                        }
                    }
                }
            }
        }
        Prolonged { m, n, order, jets }
    }

    pub fn eval(&self, t: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| eval_at(c, t)).collect()
    }

    /// Jacobian determinant `det ∂γ^a/∂t^j` for a map `R^m → R^m`.
    pub fn jacobian_det(&self, t: &[f64]) -> Result<f64> {
        let m = self.m;
        let mut mat = nalgebra::DMatrix::zeros(m, m);
        for a in 0..m {
            for j in 0..m {
                mat[(a, j)] = eval_at(&self.derivative(a, &[j]), t)?;
            }
        }
        Ok(mat.determinant())
    }
}

fn eval_at(e: &Normal, t: &[f64]) -> Result<f64> {
    e.eval_with(&|c| match c {
        Coord::Base(j) => t.get(j as usize).copied().ok_or(Error::IncompletePoint(c)),
        _ => Err(Error::IncompletePoint(c)),
    })
}

/// Exact jets `j̄^k γ` as expressions in `t`.
#[derive(Clone, Debug)]
pub struct Prolonged {
    m: usize,
    n: usize,
    order: usize,
    jets: BTreeMap<Coord, Normal>,
}

impl Prolonged {
    /// `u_I^a ∘ j̄γ` as an expression in `t`.
    pub fn coordinate(&self, c: Coord) -> Option<&Normal> {
        self.jets.get(&c)
    }

    /// `∂/∂t^k (u_I^a ∘ j̄γ)`; needs one order more than `c` itself.
    pub fn coordinate_derivative(&self, c: Coord, k: usize) -> Result<Normal> {
        let expr = self.jets.get(&c).ok_or(Error::IncompletePoint(c))?;
        Ok(expr.partial(Coord::base(k)))
    }

    pub fn point(&self, t: &[f64]) -> Result<JetPoint> {
        let mut p = JetPoint::zeros(self.m, self.n, self.order);
        for (c, e) in &self.jets {
            p.set(*c, eval_at(e, t)?)?;
        }
        Ok(p)
    }
}

/// Evaluates an expression in the curve parameters.
pub fn eval_param(e: &Normal, t: &[f64]) -> Result<f64> {
    eval_at(e, t)
}

/// Random polynomial curve of degree at most 3 with rational coefficients,
/// an immersion at `checks` random parameter values in the unit cube.
pub fn random_curve<R: Rng>(rng: &mut R, m: usize, n: usize, checks: usize) -> PolyCurve {
    let params: Vec<Coord> = (0..m).map(Coord::base).collect();
    loop {
        let comps = (0..n)
            .map(|_| {
                let terms = rng.gen_range(2..=5);
                crate::random::poly(rng, &params, terms, 3).scale(&rat(1, 4))
            })
            .collect();
        let curve = PolyCurve { m, comps };
        let jets = curve.prolong(1);
        let ok = (0..checks).all(|_| {
            let t: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            jets.point(&t).map(|p| is_regular(&p)).unwrap_or(false)
        });
        if ok {
            return curve;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_of_a_parabola() {
        let c = PolyCurve::parse(1, &["t[1]", "t[1]^2"]).unwrap();
        let p = c.prolong(2).point(&[3.0]).unwrap();
        assert_eq!(p.x, vec![3.0, 9.0]);
        assert_eq!(p.get(Coord::vel(1, 0)).unwrap(), 6.0);
        assert_eq!(p.get(Coord::acc(1, 0, 0)).unwrap(), 2.0);
    }

    #[test]
    fn composition_and_jacobian() {
        let c = PolyCurve::parse(1, &["3*t[1]", "4*t[1]"]).unwrap();
        let phi = PolyCurve::parse(1, &["t[1]^2*(3 - 2*t[1])"]).unwrap();
        let g = c.compose(&phi).unwrap();
        assert_eq!(g.eval(&[1.0]).unwrap(), vec![3.0, 4.0]);
        assert!((phi.jacobian_det(&[0.5]).unwrap() - 1.5).abs() < 1e-15);
        assert!(PolyCurve::parse(1, &["t[2]"]).is_err());
    }

    #[test]
    fn random_curves_are_immersions() {
        let mut rng = crate::random::rng(5);
        let c = random_curve(&mut rng, 2, 3, 10);
        let p = c.prolong(1).point(&[0.3, 0.7]).unwrap();
        assert_eq!(p.m, 2);
    }
}
