//! Seeded randomized identity suites. Each suite owns its generator, so a
//! seed reproduces the same cases and counterexamples.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{ScalarForm, VectorForm};
use crate::jetcalc::{d_t, homotopy_p1, homotopy_p2, i_t, total_d_form, vertical_s};
use crate::jetgroup::{
    act1, act2, check_homogeneous_finite, det, infinitesimal1, infinitesimal2, GroupElement1, GroupElement2, Matrix,
};
use crate::numeric::{
    action, boundary_vanishing_field, first_variation, integrate_form, reparam_invariance, smoothstep,
    Grid, PolyCurve,
};
use crate::prolong::{
    contact_det_form, contact_span_rank, exchange, holonomic_embed, holonomic_extract, is_contact_numeric,
    mixed_contact_two_form, pair_with_totals, DoubleJetPoint, VectorFieldOnE,
};
use crate::random::{self, jet_point};
use crate::symexpr::{rat, Coord, Dimensions, JetPoint, Normal, Rational};
use crate::variational::{
    caratheodory, caratheodory_chain, caratheodory_descent_factor, compare_forms, euler_form, euler_lagrange,
    euler_tower, fundamental, fundamental_closed_form, hilbert_theta1, homotopy_recurrence_residuals, i_t_power,
    lepagean_check, top_sign_factorial, Lagrangian, Status,
};

/// `(m, n)` pairs cycled through by the randomized suites.
pub const DIMS_CYCLE: [(usize, usize); 5] = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)];

pub const DEFAULT_TRIALS: usize = 100;

/// Suites reachable by name.
pub const SUITES: [&str; 13] = [
    "lemma19",
    "lemma21",
    "theorem22",
    "bicomplex",
    "group",
    "exchange",
    "contact",
    "lemma26",
    "theorem33",
    "firstvariation",
    "variational",
    "nulllagrangian",
    "reparam",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub case: usize,
    pub input: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<Counterexample>,
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Recorder {
    cases: usize,
    failures: Vec<Counterexample>,
    notes: Vec<String>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { cases: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, input: impl FnOnce() -> String, detail: impl FnOnce() -> String) {
        let case = self.cases;
        self.cases += 1;
        if !ok {
            self.failures.push(Counterexample { case, input: input(), detail: detail() });
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

/// Runs the named suite with `trials` random instances per family.
pub fn run_suite(name: &str, seed: u64, trials: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = random::rng(seed);
    let mut rec = Recorder::new();
    match name {
        "lemma19" => lemma19(&mut rng, trials, &mut rec)?,
        "lemma21" => lemma21(&mut rng, trials, &mut rec)?,
        "theorem22" => theorem22(&mut rng, trials.div_ceil(2), &mut rec)?,
        "bicomplex" => bicomplex(&mut rng, trials, &mut rec)?,
        "group" => group(&mut rng, trials, &mut rec)?,
        "exchange" => exchange_suite(&mut rng, trials, &mut rec)?,
        "contact" => contact(&mut rng, &mut rec)?,
        "lemma26" => lemma26(&mut rng, &mut rec)?,
        "theorem33" => theorem33(&mut rec)?,
        "firstvariation" => first_variation_suite(&mut rng, &mut rec)?,
        "variational" => variational_identities(&mut rng, &mut rec)?,
        "nulllagrangian" => null_lagrangian(&mut rec)?,
        "reparam" => reparam(&mut rec)?,
        other => return Err(Error::Precondition(format!("unknown suite `{other}`; known: {}", SUITES.join(", ")))),
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        cases: rec.cases,
        failures: rec.failures,
        notes: rec.notes,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn dims_with_m(m: usize, i: usize, order: usize) -> Dimensions {
    let options: Vec<_> = DIMS_CYCLE.iter().filter(|d| d.0 == m).collect();
    let (m, n) = *options[i % options.len()];
    Dimensions { m, n, order }
}

fn dims_at(i: usize, order: usize) -> Dimensions {
    let (m, n) = DIMS_CYCLE[i % DIMS_CYCLE.len()];
    Dimensions { m, n, order }
}

fn nonzero_form<R: Rng>(rng: &mut R, covectors: &[Coord], coords: &[Coord], r: usize) -> ScalarForm {
    loop {
        let terms = rng.gen_range(1..=3);
        let f = random::scalar_form(rng, covectors, coords, r, terms);
        if !f.is_zero() {
            return f;
        }
    }
}

fn nonzero_vector<R: Rng>(rng: &mut R, dims: &Dimensions, r: usize, s: usize, k: usize) -> VectorForm {
    loop {
        let terms = rng.gen_range(1..=3);
        let xi = random::vector_form(rng, dims, r, s, k, terms);
        if !xi.is_zero() {
            return xi;
        }
    }
}

/// `S^j d_k ω = r δ_k^j ω` for forms on `E`.
fn lemma19<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) -> Result<()> {
    for m in 1..=3 {
        for r in 1..=2 {
            for i in 0..trials {
                let dims = dims_with_m(m, i, 1);
                let base = dims.coords_of_order(0);
                let omega = nonzero_form(rng, &base, &base, r);
                for j in 0..m {
                    for k in 0..m {
                        let lhs = vertical_s(&total_d_form(&omega, k)?, j)?;
                        let rhs = if j == k { omega.scale(&rat(r as i64, 1)) } else { ScalarForm::zero(r) };
                        let residual = lhs.sub(&rhs);
                        rec.check(residual.is_zero(), || format!("m={m} r={r} j={} k={} ω={omega}", j + 1, k + 1), || format!("residual {residual}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `S^j d_k ω − d_k S^j ω = r δ_k^j ω` for first-order forms.
fn lemma21<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) -> Result<()> {
    for m in 1..=3 {
        for r in 1..=2 {
            for i in 0..trials {
                let dims = dims_with_m(m, i, 1);
                let coords = dims.coords_up_to(1);
                let omega = nonzero_form(rng, &coords, &coords, r);
                for j in 0..m {
                    for k in 0..m {
                        let lhs = vertical_s(&total_d_form(&omega, k)?, j)?.sub(&total_d_form(&vertical_s(&omega, j)?, k)?);
                        let rhs = if j == k { omega.scale(&rat(r as i64, 1)) } else { ScalarForm::zero(r) };
                        let residual = lhs.sub(&rhs);
                        rec.check(residual.is_zero(), || format!("m={m} r={r} j={} k={} ω={omega}", j + 1, k + 1), || format!("residual {residual}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `P₂ d_T Ξ + d_T P₁ Ξ = Ξ` on random first-order `Ξ ∈ Ω₁^{r,s+1}`,
/// `r ∈ {1, 2}`, over every weight `1 ≤ s + 1 ≤ m − 1`, `m ∈ {2, 3}`.
fn theorem22<R: Rng>(rng: &mut R, per_family: usize, rec: &mut Recorder) -> Result<()> {
    for m in 2..=3 {
        for r in 1..=2 {
            for w in 1..m {
                let before = rec.failures.len();
                for i in 0..per_family {
                    let dims = dims_with_m(m, i, 1);
                    let xi = nonzero_vector(rng, &dims, r, w, 1);
                    let lhs = homotopy_p2(&d_t(&xi)?)?.add(&d_t(&homotopy_p1(&xi)?)?);
                    let residual = lhs.sub(&xi);
                    rec.check(residual.is_zero(), || xi.to_json().to_string(), || {
                        format!("m={m} r={r} s={} maxvel={} residual {residual}", w - 1, max_velocity_covectors(&xi))
                    });
                }
                rec.note(format!("m={m} r={r} s={}: {} of {per_family} failed", w - 1, rec.failures.len() - before));
            }
        }
    }
    Ok(())
}

/// Largest number of first-order covectors `du_i^a` in a single term.
pub fn max_velocity_covectors(xi: &VectorForm) -> usize {
    xi.components()
        .flat_map(|(_, chi)| chi.terms().map(|(key, _)| key.iter().filter(|c| c.order() == 1).count()).collect::<Vec<_>>())
        .max()
        .unwrap_or(0)
}

/// `d² = 0`, `d_T² = 0`, `d d_T = d_T d` and `d_T = d i_T + i_T d`.
fn bicomplex<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) -> Result<()> {
    for i in 0..trials {
        let dims = dims_at(i, 1);
        let r = rng.gen_range(0..=2);
        let s = rng.gen_range(0..=dims.m);
        let xi = nonzero_vector(rng, &dims, r, s, 1);
        let dd = xi.vf_d().vf_d();
        rec.check(dd.is_zero(), || xi.to_json().to_string(), || format!("d² residual {dd}"));
    }
    for i in 0..trials {
        let dims = dims_with_m(2 + i % 2, i, 1);
        let r = rng.gen_range(0..=2);
        let s = rng.gen_range(0..=dims.m - 2);
        let xi = nonzero_vector(rng, &dims, r, s, 1);
        let tt = d_t(&d_t(&xi)?)?;
        rec.check(tt.is_zero(), || xi.to_json().to_string(), || format!("d_T² residual {tt}"));
    }
    for i in 0..trials {
        let dims = dims_at(i, 1);
        let r = rng.gen_range(0..=2);
        let s = rng.gen_range(0..dims.m);
        let xi = nonzero_vector(rng, &dims, r, s, 1);
        let comm = d_t(&xi)?.vf_d().sub(&d_t(&xi.vf_d())?);
        rec.check(comm.is_zero(), || xi.to_json().to_string(), || format!("d d_T − d_T d = {comm}"));
    }
    for i in 0..trials {
        let dims = dims_at(i, 1);
        let r = rng.gen_range(1..=2);
        let s = rng.gen_range(0..dims.m);
        let xi = nonzero_vector(rng, &dims, r, s, 1);
        let cartan = i_t(&xi)?.vf_d().add(&i_t(&xi.vf_d())?);
        let residual = d_t(&xi)?.sub(&cartan);
        rec.check(residual.is_zero(), || xi.to_json().to_string(), || format!("d_T − (d i_T + i_T d) = {residual}"));
    }
    Ok(())
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-8..=8), 4)
}

fn random_group2<R: Rng>(rng: &mut R, m: usize) -> GroupElement2<Rational> {
    let a = loop {
        let a: Matrix<Rational> = (0..m).map(|_| (0..m).map(|_| random_rational(rng)).collect()).collect();
        if det(&a) > rat(1, 8) {
            break a;
        }
    };
    let mut b = vec![vec![vec![rat(0, 1); m]; m]; m];
    for h in 0..m {
        for i in 0..m {
            for j in i..m {
                let x = random_rational(rng);
                b[h][i][j] = x.clone();
                b[h][j][i] = x;
            }
        }
    }
    GroupElement2 { a, b }
}

fn max_rel_diff(p: &JetPoint, q: &JetPoint, dims: &Dimensions) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for c in dims.coords_up_to(dims.order) {
        let (x, y) = (p.get(c)?, q.get(c)?);
        worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(1.0));
    }
    Ok(worst)
}

fn to_f64_group(g: &GroupElement2<Rational>) -> GroupElement2<f64> {
    use num::ToPrimitive;
    let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
    GroupElement2 {
        a: g.a.iter().map(|r| r.iter().map(f).collect()).collect(),
        b: g.b.iter().map(|m| m.iter().map(|r| r.iter().map(f).collect()).collect()).collect(),
    }
}

/// Group axioms, the right-action law, generator/finite-difference
/// agreement, freeness, finite homogeneity and the connecting path.
fn group<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) -> Result<()> {
    for i in 0..trials {
        let m = 1 + i % 3;
        let (g, h, k) = (random_group2(rng, m), random_group2(rng, m), random_group2(rng, m));
        let e = GroupElement2::identity(m);
        let assoc = g.compose(&h).compose(&k) == g.compose(&h.compose(&k));
        let unit = e.compose(&g) == g && g.compose(&e) == g;
        let gi = g.inverse()?;
        let inv = g.compose(&gi) == e && gi.compose(&g) == e;
        rec.check(assoc && unit && inv, || format!("{g:?}"), || format!("associative {assoc}, identity {unit}, inverse {inv}"));
    }
    for i in 0..trials {
        let dims = dims_at(i, 2);
        let (g, h) = (random_group2(rng, dims.m), random_group2(rng, dims.m));
        let p = jet_point(rng, dims.m, dims.n, 2);
        let lhs = act2(&g.compose(&h), &p)?;
        let rhs = act2(&h, &act2(&g, &p)?)?;
        let err = max_rel_diff(&lhs, &rhs, &dims)?;
        rec.check(err < 1e-9, || format!("g={g:?} h={h:?} p={p:?}"), || format!("right action law off by {err:e}"));
        let (g1, h1) = (GroupElement1 { a: g.a.clone() }, GroupElement1 { a: h.a.clone() });
        let err = max_rel_diff(&act1(&g1.compose(&h1), &p), &act1(&h1, &act1(&g1, &p)), &Dimensions { order: 1, ..dims })?;
        rec.check(err < 1e-9, || format!("g={g1:?} h={h1:?} p={p:?}"), || format!("first-order right action law off by {err:e}"));
        let back = act2(&g, &act2(&g.inverse()?, &p)?)?;
        let err = max_rel_diff(&back, &p, &dims)?;
        rec.check(err < 1e-9, || format!("g={g:?} p={p:?}"), || format!("g·g⁻¹ action off by {err:e}"));
    }
    for i in 0..trials {
        let dims = dims_at(i, 2);
        let m = dims.m;
        let a: Matrix<Rational> = (0..m).map(|_| (0..m).map(|_| random_rational(rng)).collect()).collect();
        let bg = random_group2(rng, m).b;
        let p = jet_point(rng, m, dims.n, 2);
        let step = 1e-5;
        let moved = |s: f64| -> Result<JetPoint> {
            use num::ToPrimitive;
            let g = GroupElement2 {
                a: (0..m)
                    .map(|x| (0..m).map(|y| if x == y { 1.0 } else { 0.0 } + s * a[x][y].to_f64().unwrap()).collect())
                    .collect(),
                b: bg.iter().map(|mm| mm.iter().map(|r| r.iter().map(|v| s * v.to_f64().unwrap()).collect()).collect()).collect(),
            };
            act2(&g, &p)
        };
        let (up, down) = (moved(step)?, moved(-step)?);
        let f1 = infinitesimal1(&dims, &a);
        let f2 = infinitesimal2(&dims, &a, &bg);
        let mut worst: f64 = 0.0;
        for c in dims.coords_up_to(2).into_iter().filter(|c| c.order() >= 1) {
            let fd = (up.get(c)? - down.get(c)?) / (2.0 * step);
            let field = if c.order() == 1 { &f1 } else { &f2 };
            let exact = match field.get(&c) {
                Some(v) => p.eval(v)?,
                None => 0.0,
            };
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
        rec.check(worst < 1e-6, || format!("a={a:?} b={bg:?} p={p:?}"), || format!("generator vs finite difference {worst:e}"));
    }
    for i in 0..trials {
        let dims = dims_at(i, 2);
        let g = random_group2(rng, dims.m);
        let gf = to_f64_group(&g);
        let distance = gf.a.iter().enumerate().flat_map(|(x, r)| r.iter().enumerate().map(move |(y, v)| (v - if x == y { 1.0 } else { 0.0 }).abs())).chain(gf.b.iter().flatten().flatten().map(|v| v.abs())).fold(0.0, f64::max);
        if distance <= 1e-6 {
            continue;
        }
        let p = jet_point(rng, dims.m, dims.n, 2);
        let moved = act2(&g, &p)?;
        let err = max_rel_diff(&moved, &p, &dims)?;
        rec.check(err > 1e-9, || format!("g={g:?} p={p:?}"), || "non-identity element fixed a regular point".into());
        // s ↦ (A, sB) stays in the oriented component
        let on_path = (0..=10).all(|k| {
            let s = rat(k, 10);
            let gs = GroupElement2 { a: g.a.clone(), b: g.b.iter().map(|mm| mm.iter().map(|r| r.iter().map(|v| v * &s).collect()).collect()).collect() };
            gs.is_oriented()
        });
        rec.check(on_path, || format!("g={g:?}"), || "path (A, sB) left det A > 0".into());
    }
    let lags = [Lagrangian::length(2)?, Lagrangian::length(3)?, Lagrangian::area(3)?, Lagrangian::minor(3)?];
    for lag in &lags {
        let symbolic = lag.is_homogeneous()?;
        let finite = check_homogeneous_finite(lag.l(), &lag.dims(), trials, rng)?;
        rec.check(symbolic && finite.passed(), || format!("L = {}", lag.l()), || format!("symbolic {symbolic}, finite {finite:?}"));
    }
    Ok(())
}

/// Involution, the block identity and the holonomic fixed-point set.
fn exchange_suite<R: Rng>(rng: &mut R, trials: usize, rec: &mut Recorder) -> Result<()> {
    for i in 0..trials {
        let (m, n) = DIMS_CYCLE[i % DIMS_CYCLE.len()];
        let m_outer = if i % 2 == 0 { m } else { 1 + (m % 3) };
        let p = DoubleJetPoint::random(rng, m, m_outer, n);
        let e = exchange(&p);
        rec.check(exchange(&e) == p, || format!("{p:?}"), || "exchange is not an involution".into());
        rec.check(e.inner_base() == p.outer_base(), || format!("{p:?}"), || "first-velocity block of the exchange differs from the outer block".into());
        rec.check(e != p && !p.is_holonomic(), || format!("{p:?}"), || "generic point fixed or holonomic".into());
        let q = jet_point(rng, m, n, 2);
        let h = holonomic_embed(&q)?;
        let round = holonomic_extract(&h)?;
        rec.check(h.is_holonomic() && exchange(&h) == h && round == q, || format!("{q:?}"), || "holonomic embedding not fixed or not recovered".into());
        // same velocity blocks but an asymmetric mixed block: neither fixed nor holonomic
        let mut skew = h.clone();
        if m >= 2 {
            skew.vv[0][1][0] += 1.0;
            rec.check(exchange(&skew) != skew && !skew.is_holonomic(), || format!("{skew:?}"), || "asymmetric mixed block treated as holonomic".into());
        }
    }
    Ok(())
}

fn increasing_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|first| {
            increasing_subsets(n, k - 1).into_iter().filter(move |rest| rest.first().is_none_or(|&x| x > first)).map(move |rest| {
                let mut v = vec![first];
                v.extend(rest);
                v
            })
        })
        .collect()
}

/// Determinant forms annihilate the total derivatives; the mixed 2-form pulls
/// back to zero; the determinant forms span a rank `n − m` system.
fn contact<R: Rng>(rng: &mut R, rec: &mut Recorder) -> Result<()> {
    for (m, n) in [(1, 2), (1, 3), (2, 3), (2, 4)] {
        let dims = Dimensions { m, n, order: 1 };
        for idx in increasing_subsets(n, m + 1) {
            let theta = contact_det_form(&dims, &idx)?;
            let pairs = pair_with_totals(&theta, m)?;
            rec.check(pairs.iter().all(ScalarForm::is_zero), || format!("m={m} n={n} indices {idx:?}"), || format!("⟨θ, d_k⟩ = {pairs:?}"));
        }
    }
    let d23 = Dimensions { m: 2, n: 3, order: 1 };
    let report = is_contact_numeric(&mixed_contact_two_form(), &d23, 20, rng)?;
    rec.check(report.max_residual < 1e-10, || "mixed contact 2-form".into(), || format!("pullback residual {:e}", report.max_residual));
    let control = is_contact_numeric(&ScalarForm::basis(Coord::base(0)), &Dimensions { m: 1, n: 2, order: 1 }, 20, rng)?;
    rec.check(control.max_residual > 1e-3, || "du¹".into(), || "non-contact form reported as contact".into());
    for i in 0..20 {
        let dims = dims_at(i, 1);
        let p = jet_point(rng, dims.m, dims.n, 1);
        if dims.n > dims.m {
            let rank = contact_span_rank(&dims, &p)?;
            rec.check(rank == dims.n - dims.m, || format!("{p:?}"), || format!("rank {rank}, expected {}", dims.n - dims.m));
        }
    }
    Ok(())
}

/// The Lagrangians used by the variational suites.
pub fn test_lagrangians() -> Result<Vec<(&'static str, Lagrangian)>> {
    Ok(vec![
        ("length n=2", Lagrangian::length(2)?),
        ("length n=3", Lagrangian::length(3)?),
        ("area n=3", Lagrangian::area(3)?),
        ("minor n=2", Lagrangian::minor(2)?),
        ("minor n=3", Lagrangian::minor(3)?),
        ("minor n=4", Lagrangian::minor(4)?),
    ])
}

fn record_status(rec: &mut Recorder, name: &str, what: &str, status: Status, residual: f64) {
    if status == Status::NumericPass {
        rec.note(format!("{name}: {what} numeric-pass (residual {residual:e})"));
    }
    rec.check(status.ok(), || name.to_string(), || format!("{what}: residual {residual:e}"));
}

/// Euler-form recurrence `ℰ_r = ((−1)^{r+1}/(m−r)) i_T ℰ_{r+1}` on the
/// fundamental and Carathéodory chains, and the vanishing of the whole tower
/// once the top form is closed.
fn lemma26<R: Rng>(rng: &mut R, rec: &mut Recorder) -> Result<()> {
    for (name, lag) in test_lagrangians()? {
        let mut chains = vec![fundamental(&lag)?];
        if lag.m() >= 2 {
            chains.push(caratheodory_chain(&lag)?);
        }
        for chain in chains {
            let tower = euler_tower(&chain)?;
            let m = lag.m();
            for r in 0..m {
                let sign = if r % 2 == 0 { -1 } else { 1 };
                let rhs = i_t(&tower.forms[r + 1])?.scale(&rat(sign, (m - r) as i64));
                let report = compare_forms("lemma26", &tower.forms[r], &rhs, &lag.dims(), rng)?;
                record_status(rec, name, &format!("{:?} recurrence r={r}", chain.provenance), report.status, report.residual);
            }
            if tower.forms[m].is_zero() {
                let all = tower.forms.iter().all(VectorForm::is_zero);
                rec.check(all, || name.to_string(), || "top Euler form vanishes but a lower one does not".into());
            }
        }
    }
    Ok(())
}

/// `ℰ_{r+1} = (−1)^{r+1} P₂ dℰ_r` on fundamental chains, and `ℰ₀ = 0 ⇔ dΘ_m = 0`.
fn theorem33(rec: &mut Recorder) -> Result<()> {
    for (name, lag) in test_lagrangians()? {
        let chain = fundamental(&lag)?;
        let tower = euler_tower(&chain)?;
        for (r, res) in homotopy_recurrence_residuals(&tower)?.iter().enumerate() {
            rec.check(res.is_zero(), || name.to_string(), || format!("recurrence r={r} residual {res}"));
        }
        let e0 = tower.forms[0].is_zero();
        let closed = chain.top().vf_d().is_zero();
        rec.check(e0 == closed, || name.to_string(), || format!("ℰ₀ = 0 is {e0} but dΘ_m = 0 is {closed}"));
    }
    let minor = fundamental(&Lagrangian::minor(3)?)?;
    rec.check(minor.top().vf_d().is_zero(), || "minor n=3".into(), || "dΘ₂ of the minor is not zero".into());
    let area = fundamental(&Lagrangian::area(3)?)?;
    rec.check(!area.top().vf_d().is_zero(), || "area n=3".into(), || "dΘ₂ of the area vanishes".into());
    Ok(())
}

/// Identities for the Hilbert, Carathéodory and fundamental equivalents.
fn variational_identities<R: Rng>(rng: &mut R, rec: &mut Recorder) -> Result<()> {
    for (name, lag) in test_lagrangians()? {
        let m = lag.m();
        let dims = lag.dims();
        let lambda = lag.lambda();
        let theta1 = hilbert_theta1(&lag)?;
        let r = compare_forms("i_T Θ₁ = mΛ", &i_t(&theta1)?, &lambda.scale(&rat(m as i64, 1)), &dims, rng)?;
        record_status(rec, name, "i_T Θ₁ = mΛ", r.status, r.residual);
        let s_e0 = crate::jetcalc::vertical_s_vector(&euler_form(&lag)?)?;
        let zero = VectorForm::zero(m, 1, m - 1);
        let r = compare_forms("S ℰ₀ = 0", &s_e0, &zero, &dims, rng)?;
        record_status(rec, name, "S ℰ₀ = 0", r.status, r.residual);
        let lep = lepagean_check(&theta1, &lag)?;
        rec.check(lep.lepagean && lep.unique_euler == Some(true), || name.to_string(), || format!("Hilbert equivalent {lep:?}"));
        let target = lambda.scale(&top_sign_factorial(m));
        let fund = fundamental(&lag)?;
        let r = compare_forms("fundamental i_T^m", &i_t_power(fund.top(), m)?, &target, &dims, rng)?;
        record_status(rec, name, "fundamental i_T^m Θ_m", r.status, r.residual);
        for k in 0..=m {
            let closed = fundamental_closed_form(&lag, k)?;
            rec.check(closed == fund.thetas[k], || name.to_string(), || format!("fundamental closed form differs at r={k}"));
        }
        if m >= 2 {
            let car = VectorForm::scalar(m, caratheodory(&lag)?);
            let r = compare_forms("Carathéodory i_T^m", &i_t_power(&car, m)?, &target, &dims, rng)?;
            record_status(rec, name, "Carathéodory i_T^m Θ̃_m", r.status, r.residual);
            let sign_fact = caratheodory_descent_factor(m);
            let r = compare_forms("Carathéodory i_T^{m-1}", &i_t_power(&car, m - 1)?, &theta1.scale(&sign_fact), &dims, rng)?;
            record_status(rec, name, "Carathéodory i_T^{m−1} Θ̃_m", r.status, r.residual);
        }
    }
    Ok(())
}

/// `ℰ₀(L_minor) = 0`, `dΘ₂(L_minor) = 0`, and `ℰ₀(L_area) ≠ 0`.
fn null_lagrangian(rec: &mut Recorder) -> Result<()> {
    for n in 2..=4 {
        let minor = Lagrangian::minor(n)?;
        let e0 = euler_form(&minor)?;
        rec.check(e0.is_zero(), || format!("minor n={n}"), || format!("ℰ₀ = {e0}"));
        let top = fundamental(&minor)?.top().vf_d();
        rec.check(top.is_zero(), || format!("minor n={n}"), || format!("dΘ₂ = {top}"));
    }
    let area = euler_form(&Lagrangian::area(3)?)?;
    rec.check(!area.is_zero(), || "area n=3".into(), || "ℰ₀ of the area Lagrangian vanished".into());
    Ok(())
}

/// Graph surface used by the first-variation checks.
pub fn graph_surface() -> Result<PolyCurve> {
    PolyCurve::parse(2, &["t[1]", "t[2]", "1/2*t[1]^2 - 1/3*t[1]*t[2] + 1/4*t[2]^3"])
}

/// Field `(0, 0, (1 + u³)Π sin(πu^i))`, vanishing on the boundary of the graph surface.
pub fn boundary_field() -> Result<VectorFieldOnE> {
    let c = [Normal::zero(), Normal::zero(), crate::symexpr::normal("1 + u[3]")?];
    boundary_vanishing_field(2, &c)
}

/// First-variation residuals of the area Lagrangian over the graph surface
/// with [`boundary_field`], at each grid size in `sizes`.
pub fn first_variation_residuals(sizes: &[usize], gauss: bool) -> Result<Vec<f64>> {
    let area = Lagrangian::area(3)?;
    let surface = graph_surface()?;
    let x = boundary_field()?;
    sizes
        .iter()
        .map(|&n| {
            let grid = if gauss { Grid::gauss(2, n) } else { Grid::trapezoid(2, n) };
            Ok(first_variation(&area, &surface, &x, &grid, 1e-8)?.residual)
        })
        .collect()
}

/// Grid sizes above the roundoff floor of the Gauss rule, used for refinement.
pub const REFINEMENT_SIZES: [usize; 4] = [2, 4, 8, 16];

fn general_field() -> Result<VectorFieldOnE> {
    VectorFieldOnE::new(vec![
        crate::symexpr::normal("u[3]*u[1]")?,
        crate::symexpr::normal("1 + u[2]^2")?,
        crate::symexpr::normal("exp(u[1]) - u[2]*u[3]")?,
    ])
}

/// First variation with boundary-vanishing and general fields, refinement,
/// and extremal certification for lines and planes.
fn first_variation_suite<R: Rng>(rng: &mut R, rec: &mut Recorder) -> Result<()> {
    let area = Lagrangian::area(3)?;
    let surface = graph_surface()?;
    let x = boundary_field()?;
    let report = first_variation(&area, &surface, &x, &Grid::gauss(2, 64), 1e-8)?;
    let gap = (report.lhs - report.rhs).abs();
    rec.check(gap < 1e-8 && report.boundary.abs() < 1e-12, || "graph surface, boundary-vanishing field".into(), || format!("{report:?}"));
    rec.note(format!("Gauss N=64: |lhs − rhs| = {gap:e}"));
    let residuals = first_variation_residuals(&REFINEMENT_SIZES, true)?;
    for (w, n) in residuals.windows(2).zip(REFINEMENT_SIZES) {
        rec.check(w[0] >= 4.0 * w[1], || format!("Gauss N={n} → {}", 2 * n), || format!("residuals {:e} → {:e}", w[0], w[1]));
    }
    rec.note(format!("Gauss refinement over N = {REFINEMENT_SIZES:?}: {residuals:?}"));
    let trap = first_variation_residuals(&[16, 32], false)?;
    rec.note(format!("trapezoid N=16 → 32: {:e} → {:e} (ratio {:.4})", trap[0], trap[1], trap[0] / trap[1]));
    let general = first_variation(&area, &surface, &general_field()?, &Grid::gauss(2, 64), 1e-8)?;
    rec.check(general.pass, || "graph surface, general field".into(), || format!("{general:?}"));

    let len = Lagrangian::length(3)?;
    let line = PolyCurve::parse(1, &["1 + 2*t[1]", "-t[1]", "3*t[1] - 1/2"])?;
    let plane = PolyCurve::parse(2, &["t[1] + t[2]", "2*t[2] - t[1]", "1 + 3*t[1] - t[2]"])?;
    for (name, lag, curve) in [("line", &len, &line), ("plane", &area, &plane)] {
        let el = euler_lagrange(lag)?;
        let jets = curve.prolong(2);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let t: Vec<f64> = (0..curve.m()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let p = jets.point(&t)?;
            for e in &el {
                worst = worst.max(p.eval(e)?.abs());
            }
        }
        rec.check(worst < 1e-12, || name.to_string(), || format!("max |ℰ₀| = {worst:e}"));
    }
    Ok(())
}

/// Action invariance under the smoothstep reparametrization, the
/// agreement of `∫Λ` and `∫Θ_m`, and a non-homogeneous control.
fn reparam(rec: &mut Recorder) -> Result<()> {
    let len = Lagrangian::length(2)?;
    let curve = PolyCurve::parse(1, &["t[1] + 1/2*t[1]^2", "t[1]^3 - t[1]"])?;
    let r1 = reparam_invariance(&len, &curve, &smoothstep(1), &Grid::gauss(1, 200))?;
    rec.check(r1.difference < 1e-8, || "length".into(), || format!("{r1:?}"));
    let area = Lagrangian::area(3)?;
    let surface = graph_surface()?;
    let r2 = reparam_invariance(&area, &surface, &smoothstep(2), &Grid::gauss(2, 64))?;
    rec.check(r2.difference < 1e-8, || "area".into(), || format!("{r2:?}"));
    let control = Lagrangian::parse("u[1;1]^2", 1, 2)?;
    let r3 = reparam_invariance(&control, &curve, &smoothstep(1), &Grid::gauss(1, 200))?;
    rec.check(r3.difference > 1e-2, || "(u[1;1])²".into(), || format!("{r3:?}"));
    rec.note(format!("length {:e}, area {:e}, control {:e}", r1.difference, r2.difference, r3.difference));
    let grid = Grid::gauss(2, 16);
    let base = action(&area, &surface, &grid)?;
    for (kind, top) in [("fundamental", fundamental(&area)?.top().component(&[])), ("Carathéodory", caratheodory(&area)?)] {
        let value = integrate_form(&top, &surface, &grid)?;
        rec.check((value - base).abs() < 1e-10, || kind.to_string(), || format!("∫Θ_m = {value}, ∫Λ = {base}"));
    }
    Ok(())
}
