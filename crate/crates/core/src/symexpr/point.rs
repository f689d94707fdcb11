use nalgebra::DMatrix;

use super::coord::{Coord, Dimensions};
use super::normal::Normal;
use crate::error::{Error, Result};

/// Numeric point of a velocity manifold, carrying coordinates up to `order`.
///
/// Second and third order blocks are stored once per sorted index tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub m: usize,
    pub n: usize,
    pub x: Vec<f64>,
    /// `v[i][a] = u_i^a`
    pub v: Option<Vec<Vec<f64>>>,
    /// `w[pair_index(i, j)][a] = u_{ij}^a`
    pub w: Option<Vec<Vec<f64>>>,
    /// `z[triple_index(i, j, k)][a] = u_{ijk}^a`
    pub z: Option<Vec<Vec<f64>>>,
}

/// Position of the sorted pair `(i, j)` among all pairs `i <= j < m`.
pub fn pair_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * m - i * i.saturating_sub(1) / 2 + j - i
}

/// Position of the sorted triple among all `i <= j <= k < m`.
pub fn triple_index(m: usize, i: usize, j: usize, k: usize) -> usize {
    let mut idx = [i, j, k];
    idx.sort_unstable();
    let mut pos = 0;
    for a in 0..m {
        for b in a..m {
            for c in b..m {
                if [a, b, c] == idx {
                    return pos;
                }
                pos += 1;
            }
        }
    }
    pos
}

impl JetPoint {
    /// All-zero point with blocks present up to `order`.
    pub fn zeros(m: usize, n: usize, order: usize) -> Self {
        let pairs = m * (m + 1) / 2;
        let triples = m * (m + 1) * (m + 2) / 6;
        JetPoint {
            m,
            n,
            x: vec![0.0; n],
            v: (order >= 1).then(|| vec![vec![0.0; n]; m]),
            w: (order >= 2).then(|| vec![vec![0.0; n]; pairs]),
            z: (order >= 3).then(|| vec![vec![0.0; n]; triples]),
        }
    }

    pub fn first_order(x: Vec<f64>, v: Vec<Vec<f64>>) -> Self {
        let m = v.len();
        let n = x.len();
        JetPoint { m, n, x, v: Some(v), w: None, z: None }
    }

    pub fn order(&self) -> usize {
        if self.z.is_some() {
            3
        } else if self.w.is_some() {
            2
        } else if self.v.is_some() {
            1
        } else {
            0
        }
    }

    pub fn dims(&self) -> Result<Dimensions> {
        Dimensions::new(self.m, self.n, self.order())
    }

    pub fn get(&self, c: Coord) -> Result<f64> {
        let missing = || Error::IncompletePoint(c);
        let slot = match c {
            Coord::Base(a) => self.x.get(a as usize),
            Coord::Vel(a, i) => self.v.as_ref().and_then(|v| v.get(i as usize)).and_then(|r| r.get(a as usize)),
            Coord::Acc(a, i, j) => {
                if (j as usize) >= self.m {
                    return Err(missing());
                }
                let p = pair_index(self.m, i as usize, j as usize);
                self.w.as_ref().and_then(|w| w.get(p)).and_then(|r| r.get(a as usize))
            }
            Coord::Jerk(a, i, j, k) => {
                if (k as usize) >= self.m {
                    return Err(missing());
                }
                let p = triple_index(self.m, i as usize, j as usize, k as usize);
                self.z.as_ref().and_then(|z| z.get(p)).and_then(|r| r.get(a as usize))
            }
        };
        slot.copied().ok_or_else(missing)
    }

    pub fn set(&mut self, c: Coord, value: f64) -> Result<()> {
        let m = self.m;
        let slot = match c {
            Coord::Base(a) => self.x.get_mut(a as usize),
            Coord::Vel(a, i) => self.v.as_mut().and_then(|v| v.get_mut(i as usize)).and_then(|r| r.get_mut(a as usize)),
            Coord::Acc(a, i, j) if (j as usize) < m => {
                let p = pair_index(m, i as usize, j as usize);
                self.w.as_mut().and_then(|w| w.get_mut(p)).and_then(|r| r.get_mut(a as usize))
            }
            Coord::Jerk(a, i, j, k) if (k as usize) < m => {
                let p = triple_index(m, i as usize, j as usize, k as usize);
                self.z.as_mut().and_then(|z| z.get_mut(p)).and_then(|r| r.get_mut(a as usize))
            }
            _ => None,
        };
        match slot {
            Some(s) => {
                *s = value;
                Ok(())
            }
            None => Err(Error::IncompletePoint(c)),
        }
    }

    pub fn eval(&self, e: &Normal) -> Result<f64> {
        e.eval_with(&|c| self.get(c))
    }

    /// The `m x n` velocity matrix with rows `u_i`.
    pub fn velocity_matrix(&self) -> Option<DMatrix<f64>> {
        let v = self.v.as_ref()?;
        Some(DMatrix::from_fn(self.m, self.n, |i, a| v[i][a]))
    }
}

/// Rank test for the velocity block: singular values above `1e-10` of the largest.
pub fn is_regular(p: &JetPoint) -> bool {
    let Some(mat) = p.velocity_matrix() else {
        return false;
    };
    let sv = mat.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return false;
    }
    sv.iter().filter(|&&s| s > 1e-10 * largest).count() == p.m
}
