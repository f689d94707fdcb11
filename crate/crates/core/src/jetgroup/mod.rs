//! The jet groups `L¹_m`, `L²_m`, their right actions on velocities and
//! their infinitesimal generators.
//!
//! Conventions: `A[h][i] = A^h_i = ∂φ^h/∂t^i` and `B[h][i][j] = B^h_{ij}`.
//! Group elements are generic over the scalar so that exact rationals and
//! floats share one implementation.

use num::traits::{Num, Signed};
use num::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::{FieldAlong, VectorForm};
use crate::jetcalc::lie_along_delta;
use crate::symexpr::{is_regular, Coord, Dimensions, JetPoint, Normal, Rational};

pub trait Scalar: Clone + Num + Signed + PartialOrd {}
impl<T: Clone + Num + Signed + PartialOrd> Scalar for T {}

pub type Matrix<T> = Vec<Vec<T>>;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement1<T> {
    pub a: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement2<T> {
    pub a: Matrix<T>,
    /// `b[h][i][j] = B^h_{ij}`, symmetric in `i, j`.
    pub b: Vec<Matrix<T>>,
}

pub fn identity_matrix<T: Scalar>(m: usize) -> Matrix<T> {
    (0..m).map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

pub fn mat_mul<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Matrix<T> {
    let m = x.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..m).fold(T::zero(), |acc, l| acc + x[i][l].clone() * y[l][j].clone()))
                .collect()
        })
        .collect()
}

/// Determinant by Gaussian elimination with largest-magnitude pivoting.
pub fn det<T: Scalar>(x: &Matrix<T>) -> T {
    let m = x.len();
    let mut a = x.clone();
    let mut d = T::one();
    for col in 0..m {
        let Some(p) = (col..m).filter(|&r| !a[r][col].is_zero()).max_by(|&r, &s| {
            a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            return T::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        let pivot = a[col][col].clone();
        d = d * pivot.clone();
        for r in col + 1..m {
            let f = a[r][col].clone() / pivot.clone();
            for c in col..m {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    d
}

pub fn mat_inverse<T: Scalar>(x: &Matrix<T>) -> Result<Matrix<T>> {
    let m = x.len();
    let mut a = x.clone();
    let mut inv = identity_matrix::<T>(m);
    for col in 0..m {
        let p = (col..m)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .ok_or(Error::NotInvertible)?;
        a.swap(p, col);
        inv.swap(p, col);
        let pivot = a[col][col].clone();
        for c in 0..m {
            a[col][c] = a[col][c].clone() / pivot.clone();
            inv[col][c] = inv[col][c].clone() / pivot.clone();
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..m {
                    let (u, v) = (a[col][c].clone() * f.clone(), inv[col][c].clone() * f.clone());
                    a[r][c] = a[r][c].clone() - u;
                    inv[r][c] = inv[r][c].clone() - v;
                }
            }
        }
    }
    Ok(inv)
}

impl<T: Scalar> GroupElement1<T> {
    pub fn identity(m: usize) -> Self {
        GroupElement1 { a: identity_matrix(m) }
    }

    pub fn compose(&self, other: &Self) -> Self {
        GroupElement1 { a: mat_mul(&self.a, &other.a) }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GroupElement1 { a: mat_inverse(&self.a)? })
    }

    pub fn is_oriented(&self) -> bool {
        det(&self.a) > T::zero()
    }
}

impl<T: Scalar> GroupElement2<T> {
    pub fn identity(m: usize) -> Self {
        GroupElement2 { a: identity_matrix(m), b: vec![vec![vec![T::zero(); m]; m]; m] }
    }

    pub fn new(a: Matrix<T>, b: Vec<Matrix<T>>) -> Result<Self> {
        let m = a.len();
        for h in 0..m {
            for i in 0..m {
                for j in 0..m {
                    if b[h][i][j] != b[h][j][i] {
                        return Err(Error::Precondition("B must be symmetric in its lower indices".into()));
                    }
                }
            }
        }
        Ok(GroupElement2 { a, b })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// Product `(A, B)(Â, B̂) = (AÂ, A B̂ + B(Â, Â))`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = self.m();
        let a = mat_mul(&self.a, &other.a);
        let mut b = vec![vec![vec![T::zero(); m]; m]; m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut acc = T::zero();
                    for l in 0..m {
                        acc = acc + self.a[i][l].clone() * other.b[l][j][k].clone();
                        for h in 0..m {
                            acc = acc + self.b[i][h][l].clone() * other.a[h][j].clone() * other.a[l][k].clone();
                        }
                    }
                    b[i][j][k] = acc;
                }
            }
        }
        GroupElement2 { a, b }
    }

    /// `(A, B)⁻¹ = (A⁻¹, −A⁻¹ B(A⁻¹, A⁻¹))`.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.m();
        let ai = mat_inverse(&self.a)?;
        let mut b = vec![vec![vec![T::zero(); m]; m]; m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut acc = T::zero();
                    for l in 0..m {
                        for p in 0..m {
                            for q in 0..m {
                                acc = acc
                                    + ai[i][l].clone() * self.b[l][p][q].clone() * ai[p][j].clone() * ai[q][k].clone();
                            }
                        }
                    }
                    b[i][j][k] = -acc;
                }
            }
        }
        Ok(GroupElement2 { a: ai, b })
    }

    pub fn is_oriented(&self) -> bool {
        det(&self.a) > T::zero()
    }

    pub fn first(&self) -> GroupElement1<T> {
        GroupElement1 { a: self.a.clone() }
    }
}

fn to_f64<T: Scalar + ToPrimitive>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `u_i^a ↦ u_h^a A^h_i`.
pub fn act1<T: Scalar + ToPrimitive>(g: &GroupElement1<T>, p: &JetPoint) -> JetPoint {
    let mut out = p.clone();
    if let (Some(v), Some(vo)) = (p.v.as_ref(), out.v.as_mut()) {
        for i in 0..p.m {
            for a in 0..p.n {
                vo[i][a] = (0..p.m).map(|h| v[h][a] * to_f64(&g.a[h][i])).sum();
            }
        }
    }
    out
}

/// `u_{ij}^a ↦ u_{hk}^a A^h_i A^k_j + u_h^a B^h_{ij}` on top of [`act1`].
pub fn act2<T: Scalar + ToPrimitive>(g: &GroupElement2<T>, p: &JetPoint) -> Result<JetPoint> {
    let m = p.m;
    let mut out = act1(&g.first(), p);
    if p.w.is_none() {
        return Ok(out);
    }
    for i in 0..m {
        for j in i..m {
            for a in 0..p.n {
                let mut acc = 0.0;
                for h in 0..m {
                    for k in 0..m {
                        acc += p.get(Coord::acc(a, h, k))? * to_f64(&g.a[h][i]) * to_f64(&g.a[k][j]);
                    }
                    acc += p.get(Coord::vel(a, h))? * to_f64(&g.b[h][i][j]);
                }
                out.set(Coord::acc(a, i, j), acc)?;
            }
        }
    }
    Ok(out)
}

/// Generator `a^h_j u_h^c ∂/∂u_j^c` of the first-order action.
pub fn infinitesimal1(dims: &Dimensions, a: &Matrix<Rational>) -> FieldAlong {
    let mut field = FieldAlong::new();
    for c in 0..dims.n {
        for j in 0..dims.m {
            let mut v = Normal::zero();
            for h in 0..dims.m {
                v = v.add(&Normal::coord(Coord::vel(c, h)).scale(&a[h][j]));
            }
            if !v.is_zero() {
                field.insert(Coord::vel(c, j), v);
            }
        }
    }
    field
}

/// Generator of the second-order action; the canonical `u_{jk}^c` component is
/// `a^h_j u_{hk}^c + a^h_k u_{hj}^c + b^h_{jk} u_h^c`.
pub fn infinitesimal2(dims: &Dimensions, a: &Matrix<Rational>, b: &[Matrix<Rational>]) -> FieldAlong {
    let mut field = infinitesimal1(dims, a);
    for c in 0..dims.n {
        for j in 0..dims.m {
            for k in j..dims.m {
                let mut v = Normal::zero();
                for h in 0..dims.m {
                    v = v.add(&Normal::coord(Coord::acc(c, h, k)).scale(&a[h][j]));
                    v = v.add(&Normal::coord(Coord::acc(c, h, j)).scale(&a[h][k]));
                    v = v.add(&Normal::coord(Coord::vel(c, h)).scale(&b[h][j][k]));
                }
                if !v.is_zero() {
                    field.insert(Coord::acc(c, j, k), v);
                }
            }
        }
    }
    field
}

/// Per-`(i, j)` outcome of the infinitesimal equivariance identity.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceReport {
    pub failures: Vec<(usize, usize)>,
    pub checked: usize,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `L_{Δ_i^j} χ_I ⊗ dt^I = χ_I ⊗ L_{t^j ∂/∂t^i} dt^I` for all `i, j`.
pub fn check_equivariant(xi: &VectorForm) -> Result<EquivarianceReport> {
    let m = xi.m();
    let mut failures = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let lhs = xi.map_same(|chi| lie_along_delta(chi, i, j))?;
            let mut rhs = VectorForm::zero(m, xi.r(), xi.s());
            for (idx, chi) in xi.components() {
                for p in 0..idx.len() {
                    if idx[p] == i {
                        let mut new_idx = idx.clone();
                        new_idx[p] = j;
                        rhs.add_component(&new_idx, chi.clone());
                    }
                }
            }
            if !lhs.sub(&rhs).is_zero() {
                failures.push((i, j));
            }
        }
    }
    Ok(EquivarianceReport { failures, checked: m * m })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneityReport {
    pub trials: usize,
    pub failures: usize,
    pub max_rel_error: f64,
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Random matrix with positive determinant, kept away from singular.
pub fn random_oriented<R: Rng>(rng: &mut R, m: usize) -> Matrix<f64> {
    loop {
        let a: Matrix<f64> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let d = det(&a);
        if d > 0.1 {
            return a;
        }
    }
}

/// Compares `L(u·A)` with `det(A) L(u)` at random regular points.
pub fn check_homogeneous_finite<R: Rng>(l: &Normal, dims: &Dimensions, trials: usize, rng: &mut R) -> Result<HomogeneityReport> {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = loop {
            let p = crate::random::jet_point(rng, dims.m, dims.n, 1);
            if is_regular(&p) {
                break p;
            }
        };
        let g = GroupElement1 { a: random_oriented(rng, dims.m) };
        let lhs = act1(&g, &p).eval(l)?;
        let rhs = det(&g.a) * p.eval(l)?;
        let err = (lhs - rhs).abs() / rhs.abs().max(lhs.abs()).max(1e-300);
        let err = if lhs == rhs { 0.0 } else { err };
        worst = worst.max(err);
        if !(err < 1e-9) {
            failures += 1;
        }
    }
    Ok(HomogeneityReport { trials, failures, max_rel_error: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ScalarForm;
    use crate::symexpr::{int, normal};

    fn r(n: i64) -> Rational {
        int(n)
    }

    #[test]
    fn one_dimensional_products() {
        let g = GroupElement2 { a: vec![vec![r(2)]], b: vec![vec![vec![r(3)]]] };
        let h = GroupElement2 { a: vec![vec![r(5)]], b: vec![vec![vec![r(7)]]] };
        let gh = g.compose(&h);
        assert_eq!((gh.a[0][0].clone(), gh.b[0][0][0].clone()), (r(10), r(89)));
        let gi = g.inverse().unwrap();
        assert_eq!(gi.a[0][0], crate::symexpr::rat(1, 2));
        assert_eq!(gi.b[0][0][0], crate::symexpr::rat(-3, 8));
        assert_eq!(g.compose(&gi), GroupElement2::identity(1));
    }

    #[test]
    fn singular_has_no_inverse() {
        let g = GroupElement2 { a: vec![vec![r(1), r(2)], vec![r(2), r(4)]], b: vec![vec![vec![r(0); 2]; 2]; 2] };
        assert_eq!(g.inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn action_examples() {
        let p = JetPoint::first_order(vec![0.0, 0.0], vec![vec![1.0, 0.0]]);
        let g = GroupElement1 { a: vec![vec![2.0]] };
        assert_eq!(act1(&g, &p).v.unwrap(), vec![vec![2.0, 0.0]]);
        let mut q = JetPoint::zeros(1, 2, 2);
        q.set(Coord::vel(0, 0), 1.0).unwrap();
        let g2 = GroupElement2 { a: vec![vec![1.0]], b: vec![vec![vec![0.75]]] };
        let out = act2(&g2, &q).unwrap();
        assert_eq!(out.get(Coord::acc(0, 0, 0)).unwrap(), 0.75);
        assert_eq!(out.get(Coord::acc(1, 0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn generator_examples() {
        let dims = Dimensions::new(2, 3, 1).unwrap();
        assert!(infinitesimal1(&dims, &vec![vec![r(0); 2]; 2]).is_empty());
        let mut e = vec![vec![r(0); 2]; 2];
        e[0][0] = r(1);
        let f = infinitesimal1(&dims, &e);
        assert_eq!(f.get(&Coord::vel(2, 0)), Some(&normal("u[3;1]").unwrap()));
        assert_eq!(f.len(), 3);
        let dims1 = Dimensions::new(1, 2, 2).unwrap();
        let f2 = infinitesimal2(&dims1, &vec![vec![r(0)]], &[vec![vec![r(1)]]]);
        assert_eq!(f2.get(&Coord::acc(1, 0, 0)), Some(&normal("u[2;1]").unwrap()));
    }

    #[test]
    fn equivariance_examples() {
        let minor = normal("u[1;1]*u[2;2] - u[2;1]*u[1;2]").unwrap();
        assert!(check_equivariant(&VectorForm::top(2, ScalarForm::function(minor))).unwrap().passed());
        let lin = VectorForm::top(1, ScalarForm::function(normal("u[1;1]").unwrap()));
        assert!(check_equivariant(&lin).unwrap().passed());
        let sq = VectorForm::top(1, ScalarForm::function(normal("u[1;1]^2").unwrap()));
        assert_eq!(check_equivariant(&sq).unwrap().failures, vec![(0, 0)]);
    }

    #[test]
    fn finite_homogeneity() {
        let mut rng = crate::random::rng(3);
        let area = normal("sqrt((u[1;1]^2+u[2;1]^2+u[3;1]^2)*(u[1;2]^2+u[2;2]^2+u[3;2]^2) - (u[1;1]*u[1;2]+u[2;1]*u[2;2]+u[3;1]*u[3;2])^2)").unwrap();
        let dims = Dimensions::new(2, 3, 1).unwrap();
        assert!(check_homogeneous_finite(&area, &dims, 100, &mut rng).unwrap().passed());
        let one = Normal::one();
        assert!(!check_homogeneous_finite(&one, &dims, 5, &mut rng).unwrap().passed());
        let len = normal("sqrt(u[1;1]^2 + u[2;1]^2)").unwrap();
        let p = JetPoint::first_order(vec![0.0, 0.0], vec![vec![0.6, 0.8]]);
        let g = GroupElement1 { a: vec![vec![3.0]] };
        assert!((act1(&g, &p).eval(&len).unwrap() - 3.0).abs() < 1e-12);
    }
}
