use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::VectorForm;
use crate::symexpr::Dimensions;

/// Number of random points used when exact reduction does not reach zero.
pub const NUMERIC_POINTS: usize = 50;
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    NumericPass,
    Fail,
}

impl Status {
    pub fn ok(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub residual: f64,
    pub trials: usize,
}

/// Compares two vector forms exactly, falling back to evaluation at random
/// regular points with relative tolerance [`NUMERIC_TOLERANCE`].
pub fn compare_forms<R: Rng>(check: &str, lhs: &VectorForm, rhs: &VectorForm, dims: &Dimensions, rng: &mut R) -> Result<CheckReport> {
    let report = |status, residual, trials| CheckReport { check: check.to_string(), status, residual, trials };
    if (lhs.m(), lhs.r(), lhs.s()) != (rhs.m(), rhs.r(), rhs.s()) {
        return Err(Error::Degree(format!("{check}: bidegree mismatch")));
    }
    let diff = lhs.sub(rhs);
    if diff.is_zero() {
        return Ok(report(Status::Pass, 0.0, 0));
    }
    let order = lhs.order().max(rhs.order()).min(3);
    let mut worst: f64 = 0.0;
    let mut trials = 0;
    let mut attempts = 0;
    while trials < NUMERIC_POINTS && attempts < 20 * NUMERIC_POINTS {
        attempts += 1;
        let p = crate::random::jet_point(rng, dims.m, dims.n, order);
        let mut local: f64 = 0.0;
        let mut ok = true;
        'terms: for (idx, chi) in diff.components() {
            let (l, r) = (lhs.component(&idx), rhs.component(&idx));
            for (key, coef) in chi.terms() {
                let values = (p.eval(coef), p.eval(&l.coefficient(key)), p.eval(&r.coefficient(key)));
                let (Ok(d), Ok(a), Ok(b)) = values else {
                    ok = false;
                    break 'terms;
                };
                local = local.max(d.abs() / a.abs().max(b.abs()).max(1.0));
            }
        }
        if ok {
            trials += 1;
            worst = worst.max(local);
        }
    }
    if trials < NUMERIC_POINTS {
        return Ok(report(Status::Fail, f64::INFINITY, trials));
    }
    let status = if worst < NUMERIC_TOLERANCE { Status::NumericPass } else { Status::Fail };
    Ok(report(status, worst, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ScalarForm;
    use crate::symexpr::normal;

    #[test]
    fn exact_and_numeric_outcomes() {
        let dims = Dimensions::new(1, 2, 1).unwrap();
        let mut rng = crate::random::rng(0);
        let f = |s: &str| VectorForm::top(1, ScalarForm::function(normal(s).unwrap()));
        let same = compare_forms("same", &f("u[1;1]"), &f("u[1;1]"), &dims, &mut rng).unwrap();
        assert_eq!((same.status, same.trials), (Status::Pass, 0));
        let differ = compare_forms("differ", &f("u[1;1]"), &f("u[1;1] + 1"), &dims, &mut rng).unwrap();
        assert_eq!(differ.status, Status::Fail);
        let json = serde_json::to_value(&differ).unwrap();
        assert_eq!(json["status"], "fail");
    }
}
