//! Problem files: a TOML document with a Lagrangian, dimensions, and named
//! curves and variation fields.

use std::collections::BTreeMap;
use std::ops::Range;

use homvar::numeric::{Grid, PolyCurve};
use homvar::prolong::VectorFieldOnE;
use homvar::symexpr::{parse_with, Dimensions, Normal, ParseOptions, Variables};
use homvar::variational::Lagrangian;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    lagrangian: Spanned<String>,
    dims: RawDims,
    #[serde(default)]
    curves: BTreeMap<String, RawComponents>,
    #[serde(default)]
    fields: BTreeMap<String, RawComponents>,
    #[serde(default)]
    options: Options,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDims {
    m: usize,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponents {
    components: Vec<Spanned<String>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleName {
    #[default]
    Gauss,
    Trapezoid,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub grid: Option<usize>,
    pub rule: Option<RuleName>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

pub struct Problem {
    pub lagrangian: Lagrangian,
    pub source: String,
    pub curves: BTreeMap<String, PolyCurve>,
    pub fields: BTreeMap<String, VectorFieldOnE>,
    pub options: Options,
}

impl Problem {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        let raw: RawProblem = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            CliError::Parse { path: path.to_string(), line, column, message: e.message().to_string() }
        })?;
        let (m, n) = (raw.dims.m, raw.dims.n);
        let dims = Dimensions::new(m, n, 1)?;
        let at = |span: Range<usize>, e: homvar::Error| locate(text, path, span, e);

        let jet = ParseOptions { variables: Variables::Jet, dims: Some(dims) };
        let l = parse_with(raw.lagrangian.get_ref(), jet)
            .and_then(|e| e.to_normal())
            .map_err(|e| at(raw.lagrangian.span(), e))?;
        let lagrangian = Lagrangian::new(l, dims)?;

        let mut curves = BTreeMap::new();
        for (name, raw) in raw.curves {
            let comps = parse_components(&raw, ParseOptions { variables: Variables::Param, dims: None }, &at)?;
            if comps.len() != n {
                return Err(CliError::Usage(format!("curve `{name}` has {} components, expected n = {n}", comps.len())));
            }
            let curve = PolyCurve::new(m, comps).map_err(|e| CliError::Usage(format!("curve `{name}`: {e}")))?;
            curves.insert(name, curve);
        }

        let mut fields = BTreeMap::new();
        for (name, raw) in raw.fields {
            let comps = parse_components(&raw, jet, &at)?;
            if comps.len() != n {
                return Err(CliError::Usage(format!("field `{name}` has {} components, expected n = {n}", comps.len())));
            }
            let field = VectorFieldOnE::new(comps).map_err(|e| CliError::Usage(format!("field `{name}`: {e}")))?;
            fields.insert(name, field);
        }

        Ok(Problem { lagrangian, source: raw.lagrangian.into_inner(), curves, fields, options: raw.options })
    }

    pub fn curve(&self, name: Option<&str>) -> Result<(&str, &PolyCurve), CliError> {
        pick(&self.curves, name, "curve")
    }

    pub fn field(&self, name: Option<&str>) -> Result<(&str, &VectorFieldOnE), CliError> {
        pick(&self.fields, name, "field")
    }

    /// Grid from the command line, then the file, then the defaults
    /// (`N = 200` for curves, `N = 64` per axis otherwise).
    pub fn grid(&self, n_override: Option<usize>) -> Grid {
        let m = self.lagrangian.m();
        let n = n_override.or(self.options.grid).unwrap_or(if m == 1 { 200 } else { 64 });
        match self.options.rule.unwrap_or_default() {
            RuleName::Gauss => Grid::gauss(m, n),
            RuleName::Trapezoid => Grid::trapezoid(m, n),
        }
    }
}

fn parse_components(
    raw: &RawComponents,
    opts: ParseOptions,
    at: &dyn Fn(Range<usize>, homvar::Error) -> CliError,
) -> Result<Vec<Normal>, CliError> {
    raw.components
        .iter()
        .map(|c| parse_with(c.get_ref(), opts).and_then(|e| e.to_normal()).map_err(|e| at(c.span(), e)))
        .collect()
}

fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, what: &str) -> Result<(&'a str, &'a T), CliError> {
    match name {
        Some(name) => map
            .get_key_value(name)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| CliError::Usage(format!("no {what} named `{name}`"))),
        None => {
            let mut it = map.iter();
            match (it.next(), it.next()) {
                (Some((k, v)), None) => Ok((k.as_str(), v)),
                (None, _) => Err(CliError::Usage(format!("the problem file defines no {what}"))),
                _ => Err(CliError::Usage(format!("several {what}s defined; pick one with --{what}"))),
            }
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Maps an expression parse error to a file position; `span` covers the
/// quoted string, so the expression starts one byte in.
fn locate(text: &str, path: &str, span: Range<usize>, e: homvar::Error) -> CliError {
    match e {
        homvar::Error::Parse { line: 1, column, message } => {
            let (line, start) = line_column(text, span.start + 1);
            CliError::Parse { path: path.to_string(), line, column: start + column - 1, message }
        }
        homvar::Error::Parse { line, column, message } => {
            let (base, _) = line_column(text, span.start);
            CliError::Parse { path: path.to_string(), line: base + line - 1, column, message }
        }
        other => {
            let (line, column) = line_column(text, span.start);
            CliError::Parse { path: path.to_string(), line, column, message: other.to_string() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LENGTH: &str = "lagrangian = \"sqrt(u[1;1]^2 + u[2;1]^2)\"\n[dims]\nm = 1\nn = 2\n";

    #[test]
    fn positions_are_one_based() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }

    #[test]
    fn curves_fields_and_defaults() {
        let text = format!("{LENGTH}[curves.line]\ncomponents = [\"t[1]\", \"2*t[1]\"]\n[fields.x]\ncomponents = [\"u[2]\", \"0\"]\n");
        let p = Problem::parse(&text, "p.toml").unwrap();
        assert_eq!(p.curve(None).unwrap().0, "line");
        assert_eq!(p.field(Some("x")).unwrap().1.components().len(), 2);
        assert_eq!(p.grid(None), Grid::gauss(1, 200));
        assert!(matches!(p.curve(Some("nope")), Err(CliError::Usage(_))));
    }

    #[test]
    fn wrong_component_count_and_unknown_keys() {
        let text = format!("{LENGTH}[curves.line]\ncomponents = [\"t[1]\"]\n");
        assert!(matches!(Problem::parse(&text, "p.toml"), Err(CliError::Usage(_))));
        let text = format!("{LENGTH}colour = 3\n");
        assert!(matches!(Problem::parse(&text, "p.toml"), Err(CliError::Parse { .. })));
    }

    #[test]
    fn expression_errors_on_later_lines() {
        let text = format!("{LENGTH}[fields.x]\ncomponents = [\"u[1]\", \"u[1;1]\"]\n");
        match Problem::parse(&text, "p.toml") {
            Err(CliError::Usage(msg)) => assert!(msg.contains("field `x`")),
            other => panic!("{:?}", other.err()),
        }
        let text = format!("{LENGTH}[fields.x]\ncomponents = [\"u[1]\", \"u[1] +\"]\n");
        match Problem::parse(&text, "p.toml") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{:?}", other.err()),
        }
    }
}
