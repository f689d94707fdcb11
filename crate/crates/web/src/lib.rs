//! Browser bindings: Euler–Lagrange forms, action under reparametrization,
//! and the first-variation identity. Results are JSON text; errors throw a
//! message string.

use homvar::numeric::{first_variation as first_variation_report, reparam_invariance, smoothstep, Grid, PolyCurve};
use homvar::prolong::VectorFieldOnE;
use homvar::symexpr::{normal, Coord};
use homvar::variational::{euler_lagrange as euler_coefficients, Lagrangian};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: homvar::Error) -> String {
    e.to_string()
}

/// Components separated by newlines or `;`.
fn split(text: &str) -> Vec<&str> {
    text.split(['\n', ';']).map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn curve(m: usize, n: usize, text: &str) -> Result<PolyCurve, String> {
    let comps = split(text);
    if comps.len() != n {
        return Err(format!("the curve needs {n} components, got {}", comps.len()));
    }
    PolyCurve::parse(m, &comps).map_err(err)
}

/// Euler–Lagrange coefficients of `L`, with the partials they are built from.
#[wasm_bindgen]
pub fn euler_lagrange(lagrangian: &str, m: usize, n: usize) -> Result<String, String> {
    let lag = Lagrangian::parse(lagrangian, m, n).map_err(err)?;
    let homogeneous = lag.is_homogeneous().map_err(err)?;
    let coefficients: Vec<_> = euler_coefficients(&lag)
        .map_err(err)?
        .iter()
        .enumerate()
        .map(|(a, e)| {
            let velocity: Vec<String> = (0..m).map(|k| lag.l().partial(Coord::vel(a, k)).to_string()).collect();
            json!({"a": a + 1, "raw": e.to_string(), "base_partial": lag.l().partial(Coord::base(a)).to_string(), "velocity_partials": velocity})
        })
        .collect();
    Ok(json!({"homogeneous": homogeneous, "coefficients": coefficients}).to_string())
}

/// Action along a polynomial curve before and after `t ↦ t²(3 − 2t)` on each axis.
#[wasm_bindgen]
pub fn reparametrization(lagrangian: &str, m: usize, n: usize, components: &str, intervals: usize) -> Result<String, String> {
    let lag = Lagrangian::parse(lagrangian, m, n).map_err(err)?;
    let c = curve(m, n, components)?;
    let report = reparam_invariance(&lag, &c, &smoothstep(m), &Grid::gauss(m, intervals.max(1))).map_err(err)?;
    Ok(json!({
        "original": report.original,
        "reparametrized": report.reparametrized,
        "difference": report.difference,
        "homogeneous": lag.is_homogeneous().map_err(err)?,
    })
    .to_string())
}

/// Both sides of the first-variation identity and the boundary term.
#[wasm_bindgen]
pub fn first_variation(
    lagrangian: &str,
    m: usize,
    n: usize,
    components: &str,
    field: &str,
    intervals: usize,
) -> Result<String, String> {
    let lag = Lagrangian::parse(lagrangian, m, n).map_err(err)?;
    let c = curve(m, n, components)?;
    let comps = split(field);
    if comps.len() != n {
        return Err(format!("the field needs {n} components, got {}", comps.len()));
    }
    let x = comps.iter().map(|s| normal(s)).collect::<homvar::Result<Vec<_>>>().map_err(err)?;
    let x = VectorFieldOnE::new(x).map_err(err)?;
    let report = first_variation_report(&lag, &c, &x, &Grid::gauss(m, intervals.max(1)), 1e-8).map_err(err)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn euler_of_the_minor_vanishes() {
        let out = parse(&euler_lagrange("u[1;1]*u[2;2] - u[2;1]*u[1;2]", 2, 2).unwrap());
        assert_eq!(out["homogeneous"], true);
        assert!(out["coefficients"].as_array().unwrap().iter().all(|c| c["raw"] == "0"));
        assert!(euler_lagrange("u[1;1] +", 1, 2).unwrap_err().contains("parse error"));
    }

    #[test]
    fn arc_length_is_reparametrization_invariant() {
        let out = parse(&reparametrization("sqrt(u[1;1]^2 + u[2;1]^2)", 1, 2, "t[1] + 1/2*t[1]^2; t[1]^3 - t[1]", 50).unwrap());
        assert!(out["difference"].as_f64().unwrap() < 1e-8);
        let control = parse(&reparametrization("u[1;1]^2", 1, 2, "t[1]\n2*t[1]", 50).unwrap());
        assert!(control["difference"].as_f64().unwrap() > 1e-2);
        assert!(reparametrization("u[1;1]^2", 1, 2, "t[1]", 50).is_err());
    }

    #[test]
    fn first_variation_balances() {
        let area = "sqrt((u[1;1]^2 + u[2;1]^2 + u[3;1]^2)*(u[1;2]^2 + u[2;2]^2 + u[3;2]^2) - (u[1;1]*u[1;2] + u[2;1]*u[2;2] + u[3;1]*u[3;2])^2)";
        let out = parse(&first_variation(area, 2, 3, "t[1]; t[2]; 1/2*t[1]^2 + 1/4*t[2]^3", "0; 0; sin(pi*u[1])*sin(pi*u[2])", 8).unwrap());
        assert_eq!(out["pass"], true);
    }
}
