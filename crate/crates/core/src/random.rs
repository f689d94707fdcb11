//! Seeded generators for random expressions, forms and points.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::forms::{ScalarForm, VectorForm};
use crate::symexpr::{rat, Coord, Dimensions, JetPoint, Monomial, Normal, Transcendental};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial with small integer coefficients in the given coordinates.
pub fn poly<R: Rng>(rng: &mut R, coords: &[Coord], terms: usize, max_degree: usize) -> Normal {
    let mut out = Normal::zero();
    for _ in 0..terms {
        let coef = loop {
            let c = rng.gen_range(-4i64..=4);
            if c != 0 {
                break c;
            }
        };
        let mut t = Normal::constant(rat(coef, 1));
        let degree = rng.gen_range(0..=max_degree);
        for _ in 0..degree {
            if let Some(c) = coords.choose(rng) {
                t = t.mul(&Normal::coord(*c));
            }
        }
        out = out.add(&t);
    }
    out
}

/// Polynomial that may also carry an opaque transcendental factor.
pub fn coefficient<R: Rng>(rng: &mut R, coords: &[Coord]) -> Normal {
    let terms = rng.gen_range(1..=3);
    let p = poly(rng, coords, terms, 2);
    if !coords.is_empty() && rng.gen_bool(0.15) {
        let c = *coords.choose(rng).unwrap();
        let f = [Transcendental::Exp, Transcendental::Sin, Transcendental::Cos].choose(rng).copied().unwrap();
        let atom = Normal::from_monomial(
            Monomial::atom(crate::symexpr::Atom::Func(f, std::sync::Arc::new(Normal::coord(c))), 1),
            rat(1, 1),
        );
        p.mul(&atom)
    } else {
        p
    }
}

/// Random `r`-form whose covectors are drawn from `covectors` and whose
/// coefficients are polynomials in `coords`.
pub fn scalar_form<R: Rng>(rng: &mut R, covectors: &[Coord], coords: &[Coord], r: usize, terms: usize) -> ScalarForm {
    let mut out = ScalarForm::zero(r);
    if covectors.len() < r {
        return out;
    }
    for _ in 0..terms {
        let key: Vec<Coord> = covectors.choose_multiple(rng, r).copied().collect();
        out.add_term(key, coefficient(rng, coords));
    }
    out
}

/// Random `r`-form on the order-`k` velocity space (covectors and
/// coefficients up to order `k`).
pub fn form_of_order<R: Rng>(rng: &mut R, dims: &Dimensions, r: usize, k: usize, terms: usize) -> ScalarForm {
    let coords = dims.coords_up_to(k);
    scalar_form(rng, &coords, &coords, r, terms)
}

/// Random vector form in `Ω_k^{r,s}`.
pub fn vector_form<R: Rng>(rng: &mut R, dims: &Dimensions, r: usize, s: usize, k: usize, terms: usize) -> VectorForm {
    let mut out = VectorForm::zero(dims.m, r, s);
    let all: Vec<usize> = (0..dims.m).collect();
    let pieces = rng.gen_range(1..=2);
    for _ in 0..pieces {
        let idx: Vec<usize> = all.choose_multiple(rng, s).copied().collect();
        out.add_component(&idx, form_of_order(rng, dims, r, k, terms));
    }
    out
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Random point carrying coordinates up to `order`, with a regular velocity block.
pub fn jet_point<R: Rng>(rng: &mut R, m: usize, n: usize, order: usize) -> JetPoint {
    loop {
        let mut p = JetPoint::zeros(m, n, order);
        let dims = Dimensions { m, n, order };
        for c in dims.coords_up_to(order) {
            p.set(c, rng.gen_range(-1.5..1.5)).expect("coordinate in range");
        }
        if order == 0 || crate::symexpr::is_regular(&p) {
            return p;
        }
    }
}
