//! Quadrature over the unit cube, action integrals, the first variation and
//! reparametrization checks.

mod curve;

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

pub use curve::{eval_param, random_curve, PolyCurve, Prolonged};

use crate::error::{Error, Result};
use crate::forms::ScalarForm;
use crate::prolong::{apply_field, prolong_field1, pullback_along, VectorFieldOnE};
use crate::symexpr::{is_regular, Coord, JetPoint, Normal};
use crate::variational::{euler_lagrange, Lagrangian};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Rule {
    /// Composite trapezoid with `N` intervals per axis.
    Trapezoid,
    /// `g`-point Gauss–Legendre on each of `N` cells per axis.
    Gauss { g: usize },
}

/// Tensor-product quadrature on `[0,1]^m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub rule: Rule,
}

impl Grid {
    pub fn new(m: usize, n: usize, rule: Rule) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Precondition("grid needs at least one cell and one axis".into()));
        }
        if let Rule::Gauss { g: 0 } = rule {
            return Err(Error::Precondition("Gauss rule needs at least one point per cell".into()));
        }
        Ok(Grid { m, n, rule })
    }

    pub fn gauss(m: usize, n: usize) -> Self {
        Grid { m, n, rule: Rule::Gauss { g: 4 } }
    }

    pub fn trapezoid(m: usize, n: usize) -> Self {
        Grid { m, n, rule: Rule::Trapezoid }
    }

    /// Nodes and weights on `[0,1]`.
    pub fn axis(&self) -> Vec<(f64, f64)> {
        let h = 1.0 / self.n as f64;
        match self.rule {
            Rule::Trapezoid => (0..=self.n)
                .map(|k| (k as f64 * h, if k == 0 || k == self.n { h / 2.0 } else { h }))
                .collect(),
            Rule::Gauss { g } => {
                let rule = GaussLegendre::new(NonZeroUsize::new(g).expect("g checked at construction"));
                let base: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
                (0..self.n)
                    .flat_map(|c| {
                        let left = c as f64 * h;
                        base.iter().map(move |&(x, w)| (left + (x + 1.0) * h / 2.0, w * h / 2.0))
                    })
                    .collect()
            }
        }
    }

    /// Tensor-product nodes on `[0,1]^dim`.
    pub fn nodes_in(&self, dim: usize) -> Vec<(Vec<f64>, f64)> {
        let axis = self.axis();
        (0..dim).fold(vec![(vec![], 1.0)], |acc, _| {
            acc.into_iter()
                .flat_map(|(t, w)| {
                    axis.iter().map(move |&(x, v)| {
                        let mut t = t.clone();
                        t.push(x);
                        (t, w * v)
                    })
                })
                .collect()
        })
    }

    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        self.nodes_in(self.m)
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `Σ w f(t)` over the given nodes, evaluated in parallel and summed pairwise.
pub fn integrate(nodes: &[(Vec<f64>, f64)], f: impl Fn(&[f64]) -> Result<f64> + Sync) -> Result<f64> {
    let values = nodes.par_iter().map(|(t, w)| Ok(w * f(t)?)).collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&values))
}

fn regular_point(jets: &Prolonged, t: &[f64]) -> Result<JetPoint> {
    let p = jets.point(t)?;
    if !is_regular(&p) {
        return Err(Error::Regularity(t.to_vec()));
    }
    Ok(p)
}

fn check_curve(lag: &Lagrangian, curve: &PolyCurve) -> Result<()> {
    let d = lag.dims();
    if curve.m() != d.m || curve.n() != d.n {
        return Err(Error::Precondition(format!(
            "curve maps R^{} to R^{}, Lagrangian expects m = {}, n = {}",
            curve.m(),
            curve.n(),
            d.m,
            d.n
        )));
    }
    Ok(())
}

/// `∫_C L ∘ j̄¹γ d^m t`.
pub fn action(lag: &Lagrangian, curve: &PolyCurve, grid: &Grid) -> Result<f64> {
    check_curve(lag, curve)?;
    let jets = curve.prolong(1);
    integrate(&grid.nodes(), |t| regular_point(&jets, t)?.eval(lag.l()))
}

/// `∫_C (j̄¹γ)* ω` for a scalar `m`-form.
pub fn integrate_form(omega: &ScalarForm, curve: &PolyCurve, grid: &Grid) -> Result<f64> {
    if omega.degree() != curve.m() {
        return Err(Error::Degree(format!("can only integrate an {}-form over an {}-curve", curve.m(), curve.m())));
    }
    let jets = curve.prolong((omega.order() + 1).min(3));
    integrate(&grid.nodes(), |t| {
        regular_point(&jets, t)?;
        Ok(pullback_along(omega, &jets, curve.m(), t)?[0])
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstVariationReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub boundary: f64,
    pub residual: f64,
    pub grid: Grid,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares `∫ (j̄¹γ)* L_{X¹}Λ` with `∫ (j̄²γ)* i_X ℰ₀` plus the boundary term
/// `∫_{∂C} (j̄¹γ)* i_X Θ₁`.
pub fn first_variation(lag: &Lagrangian, curve: &PolyCurve, x: &VectorFieldOnE, grid: &Grid, tolerance: f64) -> Result<FirstVariationReport> {
    check_curve(lag, curve)?;
    let (m, n) = (lag.m(), lag.dims().n);
    if x.components().len() != n {
        return Err(Error::Precondition(format!("variation field needs {n} components")));
    }
    let lifted = apply_field(lag.l(), &prolong_field1(x, m)?);
    let el = euler_lagrange(lag)?;
    let paired = x.components().iter().zip(&el).fold(Normal::zero(), |acc, (xa, ea)| acc.add(&xa.mul(ea)));
    // boundary fluxes F_j = X^a ∂L/∂u_j^a
    let flux: Vec<Normal> = (0..m)
        .map(|j| {
            x.components()
                .iter()
                .enumerate()
                .fold(Normal::zero(), |acc, (a, xa)| acc.add(&xa.mul(&lag.l().partial(Coord::vel(a, j)))))
        })
        .collect();
    let jets = curve.prolong(2);
    let nodes = grid.nodes();
    let lhs = integrate(&nodes, |t| regular_point(&jets, t)?.eval(&lifted))?;
    let rhs = integrate(&nodes, |t| regular_point(&jets, t)?.eval(&paired))?;
    let face_nodes = grid.nodes_in(m - 1);
    let mut boundary = 0.0;
    for (j, f) in flux.iter().enumerate() {
        let at = |side: f64, s: &[f64]| -> Vec<f64> {
            let mut t = s.to_vec();
            t.insert(j, side);
            t
        };
        let upper = integrate(&face_nodes, |s| regular_point(&jets, &at(1.0, s))?.eval(f))?;
        let lower = integrate(&face_nodes, |s| regular_point(&jets, &at(0.0, s))?.eval(f))?;
        boundary += upper - lower;
    }
    let residual = (lhs - rhs - boundary).abs();
    Ok(FirstVariationReport {
        check: "first-variation".into(),
        lhs,
        rhs,
        boundary,
        residual,
        grid: grid.clone(),
        tolerance,
        pass: residual < tolerance,
    })
}

/// `X^a = c^a Π_i sin(π u^i)` over the first `m` coordinates; vanishes on
/// the boundary image of a graph curve over the unit cube.
pub fn boundary_vanishing_field(m: usize, c: &[Normal]) -> Result<VectorFieldOnE> {
    let mut bump = Normal::one();
    for i in 0..m {
        let arg = Normal::pi().mul(&Normal::coord(Coord::base(i)));
        bump = bump.mul(&Normal::func(crate::symexpr::Transcendental::Sin, arg));
    }
    VectorFieldOnE::new(c.iter().map(|ca| ca.mul(&bump)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReparamReport {
    pub original: f64,
    pub reparametrized: f64,
    pub difference: f64,
    pub grid: Grid,
}

/// Actions of `γ` and `γ ∘ φ` over the unit cube for a reparametrization
/// `φ` of the cube onto itself.
pub fn reparam_invariance(lag: &Lagrangian, curve: &PolyCurve, phi: &PolyCurve, grid: &Grid) -> Result<ReparamReport> {
    if phi.m() != curve.m() || phi.n() != curve.m() {
        return Err(Error::Precondition("reparametrization must map R^m to R^m".into()));
    }
    for (t, _) in grid.nodes() {
        if !(phi.jacobian_det(&t)? > 0.0) {
            return Err(Error::Orientation(t));
        }
    }
    let original = action(lag, curve, grid)?;
    let reparametrized = action(lag, &curve.compose(phi)?, grid)?;
    Ok(ReparamReport { original, reparametrized, difference: (original - reparametrized).abs(), grid: grid.clone() })
}

/// The per-axis smoothstep `φ(t) = t²(3 − 2t)`, strictly increasing inside the cube.
pub fn smoothstep(m: usize) -> PolyCurve {
    let comps: Vec<String> = (1..=m).map(|j| format!("t[{j}]^2*(3 - 2*t[{j}])")).collect();
    let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
    PolyCurve::parse(m, &refs).expect("fixed reparametrization parses")
}

/// Central difference of `e` in coordinate `c` at `p`, step `1e-5·max(1, |p_c|)`.
pub fn finite_diff_oracle(e: &Normal, c: Coord, p: &JetPoint) -> Result<f64> {
    let x = p.get(c)?;
    let h = 1e-5 * x.abs().max(1.0);
    let mut q = p.clone();
    q.set(c, x + h)?;
    let up = q.eval(e)?;
    q.set(c, x - h)?;
    let down = q.eval(e)?;
    Ok((up - down) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::normal;

    #[test]
    fn weights_sum_to_one() {
        for grid in [Grid::trapezoid(2, 7), Grid::gauss(2, 5), Grid::gauss(1, 3)] {
            let total: f64 = grid.nodes().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn action_examples() {
        let len = Lagrangian::length(2).unwrap();
        let grid = Grid::gauss(1, 8);
        let seg = PolyCurve::parse(1, &["t[1]", "0"]).unwrap();
        assert!((action(&len, &seg, &grid).unwrap() - 1.0).abs() < 1e-14);
        let diag = PolyCurve::parse(1, &["3*t[1]", "4*t[1]"]).unwrap();
        assert!((action(&len, &diag, &grid).unwrap() - 5.0).abs() < 1e-13);
        let area = Lagrangian::area(3).unwrap();
        let square = PolyCurve::parse(2, &["t[1]", "t[2]", "0"]).unwrap();
        assert!((action(&area, &square, &Grid::gauss(2, 4)).unwrap() - 1.0).abs() < 1e-13);
        let stalled = PolyCurve::parse(1, &["t[1]^2", "0"]).unwrap();
        assert!(matches!(action(&len, &stalled, &Grid::trapezoid(1, 4)), Err(Error::Regularity(_))));
    }

    #[test]
    fn reparametrization_of_a_segment() {
        let len = Lagrangian::length(2).unwrap();
        let curve = PolyCurve::parse(1, &["t[1]", "t[1]^2"]).unwrap();
        let grid = Grid::gauss(1, 200);
        let same = reparam_invariance(&len, &curve, &PolyCurve::identity(1), &grid).unwrap();
        assert_eq!(same.difference, 0.0);
        let report = reparam_invariance(&len, &curve, &smoothstep(1), &grid).unwrap();
        assert!(report.difference < 1e-8, "{report:?}");
        let sq = Lagrangian::parse("u[1;1]^2", 1, 2).unwrap();
        assert!(reparam_invariance(&sq, &curve, &smoothstep(1), &grid).unwrap().difference > 1e-2);
        let backwards = PolyCurve::parse(1, &["1 - t[1]"]).unwrap();
        assert!(matches!(reparam_invariance(&len, &curve, &backwards, &grid), Err(Error::Orientation(_))));
    }

    #[test]
    fn finite_difference_examples() {
        let mut p = JetPoint::zeros(1, 2, 1);
        p.set(Coord::vel(0, 0), 3.0).unwrap();
        assert!((finite_diff_oracle(&normal("u[1;1]^2").unwrap(), Coord::vel(0, 0), &p).unwrap() - 6.0).abs() < 1e-6);
    }

    #[test]
    fn straight_line_is_extremal() {
        let len = Lagrangian::length(2).unwrap();
        let line = PolyCurve::parse(1, &["1 + 2*t[1]", "3*t[1]"]).unwrap();
        let x = VectorFieldOnE::new(vec![normal("u[1]*u[2]").unwrap(), normal("cos(u[1])").unwrap()]).unwrap();
        let r = first_variation(&len, &line, &x, &Grid::gauss(1, 16), 1e-10).unwrap();
        assert!(r.rhs.abs() < 1e-12 && r.pass, "{r:?}");
    }
}
