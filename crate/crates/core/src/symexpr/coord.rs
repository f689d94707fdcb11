use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest jet order that coordinates may carry.
pub const ORDER_CAP: usize = 3;

/// Parameter dimension `m`, base dimension `n` and the jet order in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dimensions {
    pub m: usize,
    pub n: usize,
    pub order: usize,
}

impl Dimensions {
    pub fn new(m: usize, n: usize, order: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("m must be at least 1".into()));
        }
        if m > n {
            return Err(Error::Dimension(format!("need m <= n, got m = {m}, n = {n}")));
        }
        if order > ORDER_CAP {
            return Err(Error::Dimension(format!("order {order} exceeds the cap {ORDER_CAP}")));
        }
        // indices are stored as u8
        if n > 64 {
            return Err(Error::Dimension("n above 64 is not supported".into()));
        }
        Ok(Self { m, n, order })
    }

    /// All coordinates of order exactly `k`, in canonical order.
    pub fn coords_of_order(&self, k: usize) -> Vec<Coord> {
        let (m, n) = (self.m as u8, self.n as u8);
        let mut out = Vec::new();
        match k {
            0 => out.extend((0..n).map(Coord::Base)),
            1 => {
                for a in 0..n {
                    out.extend((0..m).map(|i| Coord::Vel(a, i)));
                }
            }
            2 => {
                for a in 0..n {
                    for i in 0..m {
                        out.extend((i..m).map(|j| Coord::Acc(a, i, j)));
                    }
                }
            }
            3 => {
                for a in 0..n {
                    for i in 0..m {
                        for j in i..m {
                            out.extend((j..m).map(|k| Coord::Jerk(a, i, j, k)));
                        }
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Every coordinate up to and including order `k`.
    pub fn coords_up_to(&self, k: usize) -> Vec<Coord> {
        (0..=k.min(ORDER_CAP)).flat_map(|o| self.coords_of_order(o)).collect()
    }

    /// Whether `c` is a coordinate of this chart (indices in range, order allowed).
    pub fn admits(&self, c: Coord) -> bool {
        let (a, idx) = c.indices();
        (a as usize) < self.n && idx.iter().all(|&i| (i as usize) < self.m) && c.order() <= self.order
    }
}

/// A chart coordinate on the velocity manifolds: `u^a`, `u_i^a`, `u_{ij}^a`, `u_{ijk}^a`.
///
/// Indices are zero based. Symmetric counting indices are stored sorted, so
/// `u_{21}^a` and `u_{12}^a` are the same value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Base(u8),
    Vel(u8, u8),
    Acc(u8, u8, u8),
    Jerk(u8, u8, u8, u8),
}

impl Coord {
    pub fn base(a: usize) -> Self {
        Coord::Base(a as u8)
    }

    pub fn vel(a: usize, i: usize) -> Self {
        Coord::Vel(a as u8, i as u8)
    }

    pub fn acc(a: usize, i: usize, j: usize) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Coord::Acc(a as u8, i as u8, j as u8)
    }

    pub fn jerk(a: usize, i: usize, j: usize, k: usize) -> Self {
        let mut idx = [i, j, k];
        idx.sort_unstable();
        Coord::Jerk(a as u8, idx[0] as u8, idx[1] as u8, idx[2] as u8)
    }

    /// Builds the coordinate with base index `a` and the given counting indices.
    pub fn with_indices(a: usize, idx: &[usize]) -> Result<Self> {
        match *idx {
            [] => Ok(Coord::base(a)),
            [i] => Ok(Coord::vel(a, i)),
            [i, j] => Ok(Coord::acc(a, i, j)),
            [i, j, k] => Ok(Coord::jerk(a, i, j, k)),
            _ => Err(Error::OrderOverflow),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Coord::Base(..) => 0,
            Coord::Vel(..) => 1,
            Coord::Acc(..) => 2,
            Coord::Jerk(..) => 3,
        }
    }

    pub fn base_index(&self) -> usize {
        self.indices().0 as usize
    }

    /// Base index and the (sorted) counting indices.
    pub fn indices(&self) -> (u8, Vec<u8>) {
        match *self {
            Coord::Base(a) => (a, vec![]),
            Coord::Vel(a, i) => (a, vec![i]),
            Coord::Acc(a, i, j) => (a, vec![i, j]),
            Coord::Jerk(a, i, j, k) => (a, vec![i, j, k]),
        }
    }

    pub fn counting(&self) -> Vec<usize> {
        self.indices().1.into_iter().map(usize::from).collect()
    }

    /// The coordinate one order up obtained by appending counting index `k`,
    /// i.e. the value of the total derivative `d_k` on this coordinate.
    pub fn raise(&self, k: usize) -> Result<Self> {
        let mut idx = self.counting();
        idx.push(k);
        Coord::with_indices(self.base_index(), &idx)
    }

    /// Removes one occurrence of counting index `j`, if present.
    pub fn lower(&self, j: usize) -> Option<Self> {
        let mut idx = self.counting();
        let pos = idx.iter().position(|&x| x == j)?;
        idx.remove(pos);
        Coord::with_indices(self.base_index(), &idx).ok()
    }

    /// Number of distinct orderings of the counting indices (`#(ij)` at order 2).
    pub fn multiplicity(&self) -> usize {
        match *self {
            Coord::Base(_) | Coord::Vel(..) => 1,
            Coord::Acc(_, i, j) => {
                if i == j {
                    1
                } else {
                    2
                }
            }
            Coord::Jerk(_, i, j, k) => {
                if i == j && j == k {
                    1
                } else if i == j || j == k {
                    3
                } else {
                    6
                }
            }
        }
    }
}

/// `#(ij)`: 1 on the diagonal, 2 otherwise.
pub fn pair_count(i: usize, j: usize) -> usize {
    if i == j {
        1
    } else {
        2
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, idx) = self.indices();
        write!(f, "u[{}", a + 1)?;
        if !idx.is_empty() {
            let list: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, ";{}", list.join(","))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_indices_are_canonical() {
        assert_eq!(Coord::acc(0, 1, 0), Coord::acc(0, 0, 1));
        assert_eq!(Coord::jerk(2, 1, 0, 1), Coord::Jerk(2, 0, 1, 1));
        assert_eq!(Coord::acc(0, 0, 1).to_string(), "u[1;1,2]");
    }

    #[test]
    fn raise_and_lower() {
        let c = Coord::vel(1, 0);
        assert_eq!(c.raise(1).unwrap(), Coord::acc(1, 0, 1));
        assert_eq!(Coord::acc(1, 0, 1).lower(0), Some(Coord::vel(1, 1)));
        assert_eq!(Coord::jerk(0, 0, 0, 0).raise(0), Err(Error::OrderOverflow));
    }

    #[test]
    fn dimension_bounds() {
        assert!(Dimensions::new(3, 2, 1).is_err());
        assert!(Dimensions::new(2, 2, 1).is_ok());
        assert!(Dimensions::new(1, 2, 4).is_err());
        let d = Dimensions::new(2, 3, 2).unwrap();
        assert_eq!(d.coords_of_order(2).len(), 9);
        assert!(d.admits(Coord::acc(2, 1, 1)));
        assert!(!d.admits(Coord::vel(3, 0)));
    }

    #[test]
    fn basis_order_is_order_then_base_then_counting() {
        let mut cs = vec![Coord::acc(0, 0, 0), Coord::vel(1, 0), Coord::base(2), Coord::vel(0, 1)];
        cs.sort();
        assert_eq!(cs, vec![Coord::base(2), Coord::vel(0, 1), Coord::vel(1, 0), Coord::acc(0, 0, 0)]);
    }
}
