//! Exact symbolic expressions over jet coordinates.

mod coord;
mod expr;
mod normal;
mod parse;
mod point;

pub use coord::{pair_count, Coord, Dimensions, ORDER_CAP};
pub use expr::{Expr, Func};
pub use normal::{int, rat, Atom, Monomial, Normal, Rational, Transcendental};
pub use parse::{parse_expr, parse_with, ParseOptions, Variables};
pub use point::{is_regular, pair_index, triple_index, JetPoint};

/// `(1/#(ij)) ∂e/∂u_{ij}^a`, the derivative normalized so that pairing
/// `∂/∂u_{ij}^a` with `du_{ij}^a` counts both orderings of an off-diagonal pair.
pub fn sym_partial(e: &Normal, a: usize, i: usize, j: usize) -> Normal {
    e.partial(Coord::acc(a, i, j)).scale(&rat(1, pair_count(i, j) as i64))
}

/// Parses and normalizes in one step.
pub fn normal(text: &str) -> crate::Result<Normal> {
    parse_expr(text)?.to_normal()
}
