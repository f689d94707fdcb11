use std::fmt::Write as _;

use homvar::forms::VectorForm;
use homvar::jetgroup::{check_equivariant, check_homogeneous_finite};
use homvar::numeric::{action, first_variation, reparam_invariance, smoothstep, Rule};
use homvar::random;
use homvar::suites::{run_suite, SuiteReport, DEFAULT_TRIALS, SUITES};
use homvar::symexpr::Coord;
use homvar::variational::{
    caratheodory, caratheodory_descent_factor, compare_forms, descend, euler_lagrange, fundamental, hilbert_theta1,
    i_t_power, lepagean_check, top_sign_factorial, CheckReport, Lagrangian, Provenance,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::problem::Problem;

/// Result of a command: pass/fail, human text, and the JSON report.
pub struct Outcome {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

pub const FINITE_TRIALS: usize = 100;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

pub fn check(p: &Problem, seed: u64) -> Result<Outcome, CliError> {
    let lag = &p.lagrangian;
    let m = lag.m();
    let symbolic = check_equivariant(&lag.lambda())?;
    let mut rng = random::rng(seed);
    let finite = check_homogeneous_finite(lag.l(), &lag.dims(), FINITE_TRIALS, &mut rng)?;
    let ok = symbolic.passed() && finite.passed();

    let mut text = format!("L = {}\nsymbolic Δ_j^i L = δ_j^i L:\n", lag.l());
    let mut table = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let pass = !symbolic.failures.contains(&(i, j));
            writeln!(text, "  (i={}, j={}) {}", i + 1, j + 1, if pass { "pass" } else { "FAIL" }).unwrap();
            table.push(json!({"i": i + 1, "j": j + 1, "pass": pass}));
        }
    }
    writeln!(
        text,
        "finite L(u·A) = det(A) L(u): {}/{} points within 1e-9 (max rel. error {:.3e})",
        finite.trials - finite.failures,
        finite.trials,
        finite.max_rel_error
    )
    .unwrap();
    writeln!(text, "{}", if ok { "homogeneous" } else { "NOT homogeneous" }).unwrap();
    let json = json!({
        "check": "homogeneity",
        "lagrangian": p.source,
        "symbolic": table,
        "finite": {"trials": finite.trials, "failures": finite.failures, "max_rel_error": finite.max_rel_error, "seed": seed},
        "pass": ok,
    });
    Ok(Outcome { ok, text, json })
}

pub fn euler(p: &Problem, curve: Option<&str>) -> Result<Outcome, CliError> {
    let lag = &p.lagrangian;
    let (m, n) = (lag.m(), lag.dims().n);
    let el = euler_lagrange(lag)?;
    let mut text = String::new();
    let mut coefficients = Vec::new();
    for (a, e) in el.iter().enumerate() {
        let base = lag.l().partial(Coord::base(a));
        let velocity: Vec<String> = (0..m).map(|k| lag.l().partial(Coord::vel(a, k)).to_string()).collect();
        writeln!(text, "E_{} = {}", a + 1, e).unwrap();
        writeln!(text, "    ∂L/∂u^{} = {}", a + 1, base).unwrap();
        for (k, v) in velocity.iter().enumerate() {
            writeln!(text, "    ∂L/∂u_{}^{} = {}", k + 1, a + 1, v).unwrap();
        }
        coefficients.push(json!({"a": a + 1, "raw": e.to_string(), "base_partial": base.to_string(), "velocity_partials": velocity}));
    }
    let names: Vec<&str> = match curve {
        Some(name) => vec![p.curve(Some(name))?.0],
        None => p.curves.keys().map(String::as_str).collect(),
    };
    let mut along = serde_json::Map::new();
    for name in names {
        let (_, c) = p.curve(Some(name))?;
        if c.m() != m {
            return Err(CliError::Usage(format!("curve `{name}` has m = {}, the Lagrangian m = {m}", c.m())));
        }
        let jets = c.prolong(2);
        let mut samples = Vec::new();
        let mut worst: f64 = 0.0;
        for t in sample_points(m) {
            let q = jets.point(&t)?;
            let values = el.iter().map(|e| q.eval(e)).collect::<homvar::Result<Vec<f64>>>()?;
            worst = values.iter().fold(worst, |w, v| w.max(v.abs()));
            samples.push(json!({"t": t, "values": values}));
        }
        writeln!(text, "along `{name}`: max |E_a| = {worst:.3e} over {} samples (n = {n})", samples.len()).unwrap();
        along.insert(name.to_string(), json!({"samples": samples, "max_abs": worst}));
    }
    let json = json!({"check": "euler", "lagrangian": p.source, "coefficients": coefficients, "curves": along});
    Ok(Outcome { ok: true, text, json })
}

fn sample_points(m: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..5).map(|k| (k as f64 + 0.5) / 5.0).collect();
    (0..m).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|t| axis.iter().map(move |&x| [t.clone(), vec![x]].concat())).collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Hilbert,
    Caratheodory,
    Fundamental,
}

pub fn equivalents(p: &Problem, kind: Kind, seed: u64) -> Result<Outcome, CliError> {
    let lag = &p.lagrangian;
    if !lag.is_homogeneous()? {
        return Err(homvar::Error::Precondition("the Lagrangian is not homogeneous; run `check`".into()).into());
    }
    let m = lag.m();
    let dims = lag.dims();
    let mut rng = random::rng(seed);
    let lambda = lag.lambda();
    let mut checks: Vec<CheckReport> = Vec::new();
    let mut extra = serde_json::Map::new();
    let forms: Vec<VectorForm> = match kind {
        Kind::Hilbert => {
            let theta = hilbert_theta1(lag)?;
            let target = lambda.scale(&homvar::symexpr::int(m as i64));
            checks.push(compare_forms("i_T Θ₁ = mΛ", &homvar::jetcalc::i_t(&theta)?, &target, &dims, &mut rng)?);
            let lep = lepagean_check(&theta, lag)?;
            extra.insert("lepagean".into(), json!(lep.lepagean));
            extra.insert("unique_euler".into(), json!(lep.unique_euler));
            vec![theta]
        }
        Kind::Fundamental => {
            let chain = fundamental(lag)?;
            let top = chain.top();
            checks.push(compare_forms("i_T^m Θ_m", &i_t_power(top, m)?, &lambda.scale(&top_sign_factorial(m)), &dims, &mut rng)?);
            let descended = descend(&top.component(&[]), m, Provenance::Fundamental)?;
            for (r, (a, b)) in descended.thetas.iter().zip(&chain.thetas).enumerate() {
                checks.push(compare_forms(&format!("descent Θ_{r}"), a, b, &dims, &mut rng)?);
            }
            extra.insert("closed".into(), json!(top.vf_d().is_zero()));
            chain.thetas
        }
        Kind::Caratheodory => {
            if m < 2 {
                return Err(homvar::Error::Precondition("the Carathéodory form needs m ≥ 2".into()).into());
            }
            ensure_nonvanishing(lag, seed)?;
            let top = VectorForm::scalar(m, caratheodory(lag)?);
            checks.push(compare_forms("i_T^m Θ̃_m", &i_t_power(&top, m)?, &lambda.scale(&top_sign_factorial(m)), &dims, &mut rng)?);
            let theta1 = hilbert_theta1(lag)?;
            let target = theta1.scale(&caratheodory_descent_factor(m));
            checks.push(compare_forms("i_T^{m−1} Θ̃_m", &i_t_power(&top, m - 1)?, &target, &dims, &mut rng)?);
            vec![top]
        }
    };
    let lepagean_ok = extra.get("lepagean").and_then(Value::as_bool).unwrap_or(true)
        && extra.get("unique_euler").is_none_or(|v| v.as_bool() != Some(false));
    let ok = checks.iter().all(|c| c.status.ok()) && lepagean_ok;

    let mut text = String::new();
    for (r, f) in forms.iter().enumerate() {
        let label = if forms.len() == 1 { format!("{kind:?}") } else { format!("Θ_{r}") };
        writeln!(text, "{label} (r = {}, weight {}):", f.r(), f.s()).unwrap();
        for (idx, chi) in f.components() {
            let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(text, "  [{}] {}", idx.join(","), chi).unwrap();
        }
    }
    for c in &checks {
        writeln!(text, "{}: {:?} (residual {:.3e})", c.check, c.status, c.residual).unwrap();
    }
    for (k, v) in &extra {
        writeln!(text, "{k}: {v}").unwrap();
    }
    let mut json = json!({
        "check": "equivalents",
        "kind": format!("{kind:?}").to_lowercase(),
        "lagrangian": p.source,
        "forms": forms.iter().map(VectorForm::to_json).collect::<Vec<_>>(),
        "residuals": checks,
        "pass": ok,
    });
    json.as_object_mut().unwrap().extend(extra);
    Ok(Outcome { ok, text, json })
}

/// Samples 50 regular points and rejects a Lagrangian that vanishes at one.
fn ensure_nonvanishing(lag: &Lagrangian, seed: u64) -> Result<(), CliError> {
    let dims = lag.dims();
    let mut rng = random::rng(seed);
    for _ in 0..50 {
        let q = random::jet_point(&mut rng, dims.m, dims.n, 1);
        let v = q.eval(lag.l())?;
        if v.abs() < 1e-12 {
            return Err(homvar::Error::Domain(format!("L vanishes at the sample point {q:?}")).into());
        }
    }
    Ok(())
}

pub fn verify(name: &str, seed: u64, trials: Option<usize>) -> Result<Outcome, CliError> {
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(CliError::Usage(format!("unknown suite `{bad}`; known: all, {}", SUITES.join(", "))));
    }
    let reports: Vec<SuiteReport> =
        names.iter().map(|n| run_suite(n, seed, trials.unwrap_or(DEFAULT_TRIALS))).collect::<homvar::Result<_>>()?;
    let mut text = String::new();
    for r in &reports {
        let status = if r.passed() { "pass" } else { "FAIL" };
        writeln!(text, "{}: {status}, {} cases, {} failures, seed {}, {} ms", r.suite, r.cases, r.failures.len(), r.seed, r.elapsed_ms).unwrap();
        for note in &r.notes {
            writeln!(text, "    {note}").unwrap();
        }
        for f in &r.failures {
            writeln!(text, "    case {}: {}\n        {}", f.case, f.input, f.detail).unwrap();
        }
    }
    let ok = reports.iter().all(SuiteReport::passed);
    Ok(Outcome { ok, text, json: json!({"check": "verify", "suites": reports, "pass": ok}) })
}

pub fn first_variation_cmd(
    p: &Problem,
    curve: Option<&str>,
    field: Option<&str>,
    grid: Option<usize>,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let (curve_name, c) = p.curve(curve)?;
    let (field_name, x) = p.field(field)?;
    let tol = tol.or(p.options.tol).unwrap_or(DEFAULT_TOLERANCE);
    let report = first_variation(&p.lagrangian, c, x, &p.grid(grid), tol)?;
    let text = format!(
        "curve `{curve_name}`, field `{field_name}`, {}, N = {}\n  lhs      {:.15e}\n  rhs      {:.15e}\n  boundary {:.15e}\n  residual {:.3e} (tolerance {tol:e}) {}\n",
        rule_name(&report.grid.rule),
        report.grid.n,
        report.lhs,
        report.rhs,
        report.boundary,
        report.residual,
        if report.pass { "pass" } else { "FAIL" }
    );
    let mut json = serde_json::to_value(&report).expect("report serializes");
    json["curve"] = json!(curve_name);
    json["field"] = json!(field_name);
    Ok(Outcome { ok: report.pass, text, json })
}

fn rule_name(rule: &Rule) -> String {
    match rule {
        Rule::Trapezoid => "trapezoid".into(),
        Rule::Gauss { g } => format!("Gauss {g}-point"),
    }
}

pub fn action_cmd(p: &Problem, curve: Option<&str>, grid: Option<usize>, reparam: bool, tol: Option<f64>) -> Result<Outcome, CliError> {
    let (name, c) = p.curve(curve)?;
    let grid = p.grid(grid);
    if !reparam {
        let value = action(&p.lagrangian, c, &grid)?;
        let text = format!("action along `{name}` ({}, N = {}): {value:.15e}\n", rule_name(&grid.rule), grid.n);
        return Ok(Outcome { ok: true, text, json: json!({"check": "action", "curve": name, "action": value, "grid": grid}) });
    }
    let tol = tol.or(p.options.tol).unwrap_or(DEFAULT_TOLERANCE);
    let report = reparam_invariance(&p.lagrangian, c, &smoothstep(c.m()), &grid)?;
    let ok = report.difference < tol;
    let text = format!(
        "action along `{name}`: {:.15e}\nafter t ↦ t²(3 − 2t): {:.15e}\ndifference {:.3e} (tolerance {tol:e}) {}\n",
        report.original,
        report.reparametrized,
        report.difference,
        if ok { "invariant" } else { "NOT invariant" }
    );
    let mut json = serde_json::to_value(&report).expect("report serializes");
    json["check"] = json!("reparametrization");
    json["curve"] = json!(name);
    json["tolerance"] = json!(tol);
    json["pass"] = json!(ok);
    Ok(Outcome { ok, text, json })
}
