//! Parametrized surface families: JSON templates whose counts, slot indices
//! and lengths are arithmetic expressions in the family parameter.
//!
//! ```json
//! { "param": {"name": "n", "range": [2, 20]},
//!   "pieces": "n+2",
//!   "gluings": [{"a": ["i", 1], "b": ["i+1", 0], "length": 1,
//!                "repeat": {"var": "i", "from": 0, "to": "n"}}],
//!   "cusps": [[0, 0], {"at": ["i", 2], "repeat": {"var": "i", "from": 1, "to": "n"}}],
//!   "window": {"from": 1, "to": "n"} }
//! ```
//!
//! Expressions accept numbers, the parameter and repeat variables, `+ - * / ^`,
//! `exp` and `ln` (plus `floor`); `·` and `−` are read as `*` and `-`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Gluing, SlotRef, SurfaceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("cannot parse expression `{expr}`: {reason}")]
    Parse { expr: String, reason: String },
    #[error("cannot evaluate `{expr}`: {reason}")]
    Eval { expr: String, reason: String },
    #[error("`{expr}` = {value} is not a non-negative integer")]
    NotIndex { expr: String, value: f64 },
    #[error("parameter {value} outside family range [{lo}, {hi}]")]
    OutOfRange { value: i64, lo: i64, hi: i64 },
}

/// A number or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expr {
    Number(f64),
    Text(String),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Self {
        Expr::Number(x)
    }
}

impl From<&str> for Expr {
    fn from(s: &str) -> Self {
        Expr::Text(s.to_string())
    }
}

type Bindings<'a> = [(&'a str, f64)];

impl Expr {
    pub fn eval(&self, vars: &Bindings<'_>) -> Result<f64, FamilyError> {
        let text = match self {
            Expr::Number(x) => return Ok(*x),
            Expr::Text(s) => s,
        };
        let normalized = text.replace('·', "*").replace('−', "-");
        let parsed: meval::Expr = normalized.parse().map_err(|e: meval::Error| FamilyError::Parse {
            expr: text.clone(),
            reason: e.to_string(),
        })?;
        let mut ctx = meval::Context::new();
        for &(name, value) in vars {
            ctx.var(name, value);
        }
        let value = parsed.eval_with_context(ctx).map_err(|e| FamilyError::Eval {
            expr: text.clone(),
            reason: e.to_string(),
        })?;
        if !value.is_finite() {
            return Err(FamilyError::Eval {
                expr: text.clone(),
                reason: format!("non-finite value {value}"),
            });
        }
        Ok(value)
    }

    fn eval_index(&self, vars: &Bindings<'_>) -> Result<usize, FamilyError> {
        let value = self.eval(vars)?;
        let rounded = value.round();
        if rounded < 0.0 || (value - rounded).abs() > 1e-9 {
            return Err(FamilyError::NotIndex {
                expr: self.to_string(),
                value,
            });
        }
        Ok(rounded as usize)
    }

    fn eval_int(&self, vars: &Bindings<'_>) -> Result<i64, FamilyError> {
        let value = self.eval(vars)?;
        let rounded = value.round();
        if (value - rounded).abs() > 1e-9 {
            return Err(FamilyError::NotIndex {
                expr: self.to_string(),
                value,
            });
        }
        Ok(rounded as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub range: [i64; 2],
}

/// Inclusive integer range bound to `var`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repeat {
    pub var: String,
    pub from: Expr,
    pub to: Expr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingTemplate {
    pub a: [Expr; 2],
    pub b: [Expr; 2],
    pub length: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat: Option<Repeat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CuspTemplate {
    Single([Expr; 2]),
    Repeated { at: [Expr; 2], repeat: Repeat },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowTemplate {
    Range { from: Expr, to: Expr },
    List(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub param: Param,
    pub pieces: Expr,
    #[serde(default)]
    pub gluings: Vec<GluingTemplate>,
    #[serde(default)]
    pub cusps: Vec<CuspTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowTemplate>,
    /// Domain size cap for isoperimetric searches on each instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_pieces: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub param: i64,
    pub spec: SurfaceSpec,
    pub max_pieces: Option<usize>,
}

fn expand<T>(
    repeat: Option<&Repeat>,
    outer: &Bindings<'_>,
    mut emit: impl FnMut(&Bindings<'_>) -> Result<T, FamilyError>,
) -> Result<Vec<T>, FamilyError> {
    match repeat {
        None => Ok(vec![emit(outer)?]),
        Some(r) => {
            let from = r.from.eval_int(outer)?;
            let to = r.to.eval_int(outer)?;
            let mut out = Vec::new();
            for i in from..=to {
                let mut vars = outer.to_vec();
                vars.push((r.var.as_str(), i as f64));
                out.push(emit(&vars)?);
            }
            Ok(out)
        }
    }
}

fn slot(at: &[Expr; 2], vars: &Bindings<'_>) -> Result<SlotRef, FamilyError> {
    Ok(SlotRef(at[0].eval_index(vars)?, at[1].eval_index(vars)?))
}

impl FamilySpec {
    pub fn range(&self) -> (i64, i64) {
        (self.param.range[0], self.param.range[1])
    }

    /// Instantiates the template at parameter value `n`. The result is not
    /// validated; pass it through [`super::Surface::new`].
    pub fn instantiate(&self, n: i64) -> Result<FamilyInstance, FamilyError> {
        let (lo, hi) = self.range();
        if n < lo || n > hi {
            return Err(FamilyError::OutOfRange { value: n, lo, hi });
        }
        let base = [(self.param.name.as_str(), n as f64)];
        let pieces = self.pieces.eval_index(&base)?;
        let mut gluings = Vec::new();
        for t in &self.gluings {
            gluings.extend(expand(t.repeat.as_ref(), &base, |vars| {
                Ok(Gluing {
                    a: slot(&t.a, vars)?,
                    b: slot(&t.b, vars)?,
                    length: t.length.eval(vars)?,
                })
            })?);
        }
        let mut cusps = Vec::new();
        for c in &self.cusps {
            match c {
                CuspTemplate::Single(at) => cusps.push(slot(at, &base)?),
                CuspTemplate::Repeated { at, repeat } => {
                    cusps.extend(expand(Some(repeat), &base, |vars| slot(at, vars))?)
                }
            }
        }
        let window = match &self.window {
            None => None,
            Some(WindowTemplate::Range { from, to }) => {
                let (a, b) = (from.eval_index(&base)?, to.eval_index(&base)?);
                Some((a..=b).collect())
            }
            Some(WindowTemplate::List(items)) => Some(
                items
                    .iter()
                    .map(|e| e.eval_index(&base))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let max_pieces = self
            .max_pieces
            .as_ref()
            .map(|e| e.eval_index(&base))
            .transpose()?;
        Ok(FamilyInstance {
            param: n,
            spec: SurfaceSpec {
                pieces,
                gluings,
                cusps,
                window,
            },
            max_pieces,
        })
    }

    /// All instances over `lo..=hi` (defaults to the declared range).
    pub fn instances(&self, range: Option<(i64, i64)>) -> Result<Vec<FamilyInstance>, FamilyError> {
        let (lo, hi) = range.unwrap_or_else(|| self.range());
        (lo..=hi).map(|n| self.instantiate(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::validate;

    #[test]
    fn expression_grammar() {
        let vars = [("n", 4.0)];
        let e = |s: &str| Expr::from(s).eval(&vars).unwrap();
        assert_eq!(e("n+1"), 5.0);
        assert_eq!(e("2·n − 3"), 5.0);
        assert_eq!(e("n^2/8"), 2.0);
        assert!((e("exp(ln(n))") - 4.0).abs() < 1e-12);
        assert_eq!(Expr::Number(0.5).eval(&vars).unwrap(), 0.5);
        assert!(Expr::from("n+").eval(&vars).is_err());
        assert!(Expr::from("m").eval(&vars).is_err());
        assert!(Expr::from("ln(0)").eval(&vars).is_err());
    }

    #[test]
    fn ring_template() {
        let text = r#"{
            "param": {"name": "n", "range": [3, 9]},
            "pieces": "n",
            "gluings": [
                {"a": ["i", 1], "b": ["i+1", 0], "length": "1/n",
                 "repeat": {"var": "i", "from": 0, "to": "n-2"}},
                {"a": ["n-1", 1], "b": [0, 0], "length": "1/n"}
            ],
            "cusps": [{"at": ["i", 2], "repeat": {"var": "i", "from": 0, "to": "n-1"}}],
            "max_pieces": "n-1"
        }"#;
        let fam: FamilySpec = serde_json::from_str(text).unwrap();
        let inst = fam.instantiate(5).unwrap();
        assert_eq!(inst.spec.pieces, 5);
        assert_eq!(inst.spec.gluings.len(), 5);
        assert_eq!(inst.spec.gluings[4].a, SlotRef(4, 1));
        assert!((inst.spec.gluings[0].length - 0.2).abs() < 1e-15);
        assert_eq!(inst.max_pieces, Some(4));
        assert!(validate(&inst.spec).is_ok());
        assert_eq!(fam.instances(None).unwrap().len(), 7);
        assert!(matches!(fam.instantiate(10), Err(FamilyError::OutOfRange { .. })));
        let back: FamilySpec = serde_json::from_str(&serde_json::to_string(&fam).unwrap()).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn non_integer_index_rejected() {
        let fam = FamilySpec {
            param: Param { name: "n".into(), range: [1, 2] },
            pieces: "n/2".into(),
            gluings: vec![],
            cusps: vec![],
            window: None,
            max_pieces: None,
        };
        assert!(matches!(fam.instantiate(1), Err(FamilyError::NotIndex { .. })));
        assert!(fam.instantiate(2).is_ok());
    }
}
