//! Randomized invariants. Each property draws a seed and builds its inputs
//! with the crate's seeded generators.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use homvar::forms::{FieldAlong, ScalarForm, VectorForm};
use homvar::jetcalc::{d_t, homotopy_p1, total_d};
use homvar::numeric::{action, finite_diff_oracle, integrate, integrate_form, random_curve, Grid};
use homvar::prolong::{apply_field, compose_substitutions, prolong_field1, prolong_field2, prolong_map2, SmoothMap, VectorFieldOnE};
use homvar::random::{self, coefficient, jet_point, poly, scalar_form, vector_form};
use homvar::suites::run_suite;
use homvar::symexpr::{normal, rat, Coord, Dimensions, Expr, Func};
use homvar::variational::{caratheodory, compare_forms, descend, fundamental, hilbert_theta1, lepagean_check, Lagrangian, Provenance};
use homvar::Error;

const D23: Dimensions = Dimensions { m: 2, n: 3, order: 2 };

fn rand_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    let coords = D23.coords_up_to(2);
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.3) {
            Expr::Const(rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
        } else {
            Expr::Coord(*coords.choose(rng).unwrap())
        };
    }
    match rng.gen_range(0..5) {
        0 => Expr::Sum((0..rng.gen_range(2..=3)).map(|_| rand_expr(rng, depth - 1)).collect()),
        1 => Expr::Product((0..rng.gen_range(2..=3)).map(|_| rand_expr(rng, depth - 1)).collect()),
        2 => Expr::Pow(Box::new(rand_expr(rng, depth - 1)), rng.gen_range(0..=3)),
        3 => {
            let f = *[Func::Exp, Func::Sin, Func::Cos].choose(rng).unwrap();
            Expr::Func(f, Box::new(rand_expr(rng, depth - 1)))
        }
        _ => {
            let inner = rand_expr(rng, depth - 1);
            Expr::Func(Func::Sqrt, Box::new(Expr::Sum(vec![Expr::int(2), Expr::Pow(Box::new(inner), 2)])))
        }
    }
}

fn rand_field(rng: &mut ChaCha8Rng, coords: &[Coord]) -> FieldAlong {
    let mut field = FieldAlong::new();
    for c in coords {
        if rng.gen_bool(0.5) {
            field.insert(*c, poly(rng, coords, 2, 1));
        }
    }
    field
}

fn base_map(rng: &mut ChaCha8Rng, n: usize) -> SmoothMap {
    let base: Vec<Coord> = (0..n).map(Coord::base).collect();
    SmoothMap::new((0..n).map(|_| poly(rng, &base, 2, 2)).collect()).unwrap()
}

fn base_field(rng: &mut ChaCha8Rng, n: usize) -> VectorFieldOnE {
    let base: Vec<Coord> = (0..n).map(Coord::base).collect();
    VectorFieldOnE::new((0..n).map(|_| coefficient(rng, &base)).collect()).unwrap()
}

mod symexpr {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn mixed_partials_commute(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let coords = D23.coords_up_to(2);
            let e = poly(&mut rng, &coords, 4, 4);
            let (c, d) = (*coords.choose(&mut rng).unwrap(), *coords.choose(&mut rng).unwrap());
            prop_assert_eq!(e.partial(c).partial(d), e.partial(d).partial(c));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn partial_matches_central_difference(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let coords = D23.coords_up_to(2);
            let e = coefficient(&mut rng, &coords).mul(&coefficient(&mut rng, &coords));
            let p = jet_point(&mut rng, 2, 3, 2);
            for c in coords {
                let exact = p.eval(&e.partial(c)).unwrap();
                let fd = finite_diff_oracle(&e, c, &p).unwrap();
                prop_assert!((exact - fd).abs() <= 1e-5 * exact.abs().max(1.0), "{e} by {c}: {exact} vs {fd}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn simplify_is_idempotent(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let e = rand_expr(&mut rng, 3);
            let once = e.simplify().unwrap();
            prop_assert_eq!(once.simplify().unwrap(), once.clone());
            prop_assert_eq!(normal(&once.to_string()).unwrap(), e.to_normal().unwrap());
        }
    }
}

mod forms {
    use super::*;

    fn form(rng: &mut ChaCha8Rng, r: usize) -> ScalarForm {
        let d = Dimensions { m: 2, n: 2, order: 1 };
        scalar_form(rng, &d.coords_up_to(1), &d.coords_up_to(1), r, 3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn wedge_graded_commutative_and_associative(seed in any::<u64>(), ra in 0usize..3, rb in 0usize..3, rc in 0usize..2) {
            let mut rng = random::rng(seed);
            let (a, b, c) = (form(&mut rng, ra), form(&mut rng, rb), form(&mut rng, rc));
            let sign = rat(if (ra * rb) % 2 == 0 { 1 } else { -1 }, 1);
            prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign));
            prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        }

        #[test]
        fn exterior_derivative_squares_to_zero(seed in any::<u64>(), r in 0usize..4) {
            let mut rng = random::rng(seed);
            prop_assert!(form(&mut rng, r).ext_d().ext_d().is_zero());
        }

        #[test]
        fn contraction_is_an_antiderivation(seed in any::<u64>(), ra in 1usize..3, rb in 1usize..3) {
            let mut rng = random::rng(seed);
            let (a, b) = (form(&mut rng, ra), form(&mut rng, rb));
            let v = rand_field(&mut rng, &Dimensions { m: 2, n: 2, order: 1 }.coords_up_to(1));
            let sign = rat(if ra % 2 == 0 { 1 } else { -1 }, 1);
            let rhs = a.contract(&v).unwrap().wedge(&b).add(&a.wedge(&b.contract(&v).unwrap()).scale(&sign));
            prop_assert_eq!(a.wedge(&b).contract(&v).unwrap(), rhs);
        }

        #[test]
        fn components_are_antisymmetric(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let d = Dimensions { m: 3, n: 3, order: 1 };
            let xi = vector_form(&mut rng, &d, 1, 2, 1, 2);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(xi.component(&[i, j]), xi.component(&[j, i]).neg());
                }
            }
        }
    }
}

mod jetcalc {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        /// A horizontally exact form is recovered from its first homotopy.
        #[test]
        fn exact_forms_are_recovered(seed in any::<u64>(), m in 2usize..4, r in 1usize..3) {
            let mut rng = random::rng(seed);
            let dims = Dimensions { m, n: m + 1, order: 0 };
            let s = rng.gen_range(0..m - 1);
            let eta = vector_form(&mut rng, &dims, r, s, 0, 2);
            let xi = d_t(&eta).unwrap();
            prop_assert!(d_t(&xi).unwrap().is_zero());
            prop_assert_eq!(d_t(&homotopy_p1(&xi).unwrap()).unwrap(), xi);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn seeded_identity_suites_hold(seed in any::<u64>()) {
            for name in ["lemma19", "lemma21", "bicomplex", "exchange", "group"] {
                let report = run_suite(name, seed, 4).unwrap();
                prop_assert!(report.passed(), "{name}: {:?}", report.failures.first());
            }
        }

        #[test]
        fn homotopy_formula_holds_on_one_forms(seed in any::<u64>(), m in 2usize..4) {
            let mut rng = random::rng(seed);
            let dims = Dimensions { m, n: m + 1, order: 1 };
            let w = rng.gen_range(1..m);
            let xi = vector_form(&mut rng, &dims, 1, w, 1, 3);
            let lhs = homvar::jetcalc::homotopy_p2(&d_t(&xi).unwrap()).unwrap().add(&d_t(&homotopy_p1(&xi).unwrap()).unwrap());
            prop_assert_eq!(lhs, xi);
        }
    }
}

mod prolong {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn map_prolongation_is_functorial(seed in any::<u64>(), m in 1usize..3) {
            let mut rng = random::rng(seed);
            let (f, g) = (base_map(&mut rng, 2), base_map(&mut rng, 2));
            let lhs = prolong_map2(&f.after(&g).unwrap(), m).unwrap();
            let rhs = compose_substitutions(&prolong_map2(&f, m).unwrap(), &prolong_map2(&g, m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn field_prolongations_commute_with_totals(seed in any::<u64>(), m in 1usize..3) {
            let mut rng = random::rng(seed);
            let x = base_field(&mut rng, 2);
            let dims = Dimensions { m, n: 2, order: 1 };
            let (x1, x2) = (prolong_field1(&x, m).unwrap(), prolong_field2(&x, m).unwrap());
            let f0 = coefficient(&mut rng, &dims.coords_up_to(0));
            let f1 = coefficient(&mut rng, &dims.coords_up_to(1));
            for i in 0..m {
                let lhs = total_d(&apply_field(&f0, &x.as_field()), i).unwrap();
                prop_assert_eq!(lhs, apply_field(&total_d(&f0, i).unwrap(), &x1));
                let lhs = total_d(&apply_field(&f1, &x1), i).unwrap();
                prop_assert_eq!(lhs, apply_field(&total_d(&f1, i).unwrap(), &x2));
            }
        }
    }
}

mod variational {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        /// Adding `d_T Φ` to the Hilbert form keeps it Lepagean with the same Euler form.
        #[test]
        fn lepagean_equivalents_share_the_euler_form(seed in any::<u64>(), minor in any::<bool>()) {
            let mut rng = random::rng(seed);
            let lag = if minor { Lagrangian::minor(3).unwrap() } else { Lagrangian::area(3).unwrap() };
            let base = lag.dims().coords_of_order(0);
            let phi = VectorForm::scalar(2, scalar_form(&mut rng, &base, &base, 1, 2));
            let candidate = hilbert_theta1(&lag).unwrap().add(&d_t(&phi).unwrap());
            let report = lepagean_check(&candidate, &lag).unwrap();
            prop_assert!(report.lepagean);
            prop_assert_eq!(report.unique_euler, Some(true));
        }

        /// `∫Λ` and `∫Θ_m` agree along random polynomial curves.
        #[test]
        fn top_equivalents_integrate_to_the_action(seed in any::<u64>(), surface in any::<bool>()) {
            let mut rng = random::rng(seed);
            let (lag, m) = if surface { (Lagrangian::area(3).unwrap(), 2) } else { (Lagrangian::length(3).unwrap(), 1) };
            let curve = random_curve(&mut rng, m, 3, 10);
            let grid = Grid::gauss(m, 3);
            let base = match action(&lag, &curve, &grid) {
                Err(Error::Regularity(_)) => return Ok(()),
                other => other.unwrap(),
            };
            let mut tops = vec![fundamental(&lag).unwrap().top().component(&[])];
            if m >= 2 {
                tops.push(caratheodory(&lag).unwrap());
            }
            for top in tops {
                let value = integrate_form(&top, &curve, &grid).unwrap();
                prop_assert!((value - base).abs() < 1e-10 * base.abs().max(1.0), "{value} vs {base}");
            }
        }
    }

    #[test]
    fn descent_from_either_top_reaches_lambda() {
        let mut rng = random::rng(5);
        for lag in [Lagrangian::area(3).unwrap(), Lagrangian::minor(3).unwrap(), Lagrangian::length(2).unwrap()] {
            let m = lag.m();
            let mut tops = vec![(fundamental(&lag).unwrap().top().component(&[]), Provenance::Fundamental)];
            if m >= 2 {
                tops.push((caratheodory(&lag).unwrap(), Provenance::Caratheodory));
            }
            for (top, provenance) in tops {
                let chain = descend(&top, m, provenance).unwrap();
                let report = compare_forms("descent", &chain.thetas[0], &lag.lambda(), &lag.dims(), &mut rng).unwrap();
                assert!(report.status.ok(), "{provenance:?}: {report:?}");
            }
        }
    }
}

mod numeric {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn quadrature_is_reproducible(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let e = coefficient(&mut rng, &[Coord::base(0), Coord::base(1)]);
            let grid = Grid::gauss(2, 6);
            let f = |t: &[f64]| homvar::numeric::eval_param(&e, t);
            let a = integrate(&grid.nodes(), f).unwrap();
            let b = integrate(&grid.nodes(), f).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
