//! Textual forms used by configs and the command line.
//!
//! ```text
//! distribution  exp:<rate> | q:<expr in p> | hazard:<expr in x> | distort(<distribution>, h=<distortion>)
//! distortion    identity | power:<k> | dualpower:<k> | h:<expr in p> | <expr in p>
//! copula        durante:f=<expr>,n=<int> | diagonal:d=<expr>,n=<int> | product:<n> | comonotone:<n>
//!               | cuadras-auge:theta=<v> | frechet:gamma=<v>
//! ```

use thiserror::Error;

use crate::copulas::{CopulaError, CopulaHandle, Diagonal, DuranteGenerator};
use crate::distortions::{Distortion, DistortionError};
use crate::distributions::{build, Distribution, DistributionError, DistributionSpec};
use crate::funcalc::{Expr, ParseError};
use crate::numerics::Grid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Expr(#[from] ParseError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
}

fn syntax(msg: impl Into<String>) -> FormError {
    FormError::Syntax(msg.into())
}

/// Splits on commas outside parentheses.
fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts
}

fn number(text: &str, what: &str) -> Result<f64, FormError> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    // allow constant expressions such as 1/3
    let e = Expr::parse_in(t, "p").map_err(|_| syntax(format!("{what}: `{t}` is not a number")))?;
    if e.uses_variable() {
        return Err(syntax(format!("{what}: `{t}` must be a constant")));
    }
    e.eval(0.0).map_err(|_| syntax(format!("{what}: `{t}` does not evaluate")))
}

fn integer(text: &str, what: &str) -> Result<usize, FormError> {
    text.trim().parse().map_err(|_| syntax(format!("{what}: `{}` is not a positive integer", text.trim())))
}

pub fn parse_distribution_spec(text: &str) -> Result<DistributionSpec, FormError> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("distort(").and_then(|r| r.strip_suffix(')')) {
        let parts = split_top(inner);
        let [base, h] = parts.as_slice() else {
            return Err(syntax(format!("distort(...) takes a distribution and h=..., got `{t}`")));
        };
        let h = h.strip_prefix("h=").ok_or_else(|| syntax(format!("expected h=<distortion>, got `{h}`")))?;
        return Ok(DistributionSpec::Distorted { base: Box::new(parse_distribution_spec(base)?), h: parse_distortion(h)? });
    }
    let (kind, body) = t.split_once(':').ok_or_else(|| syntax(format!("unknown distribution `{t}`")))?;
    match kind.trim() {
        "exp" => Ok(DistributionSpec::Exponential { rate: number(body, "exp rate")? }),
        "q" => Ok(DistributionSpec::Quantile(Expr::parse_in(body, "p")?)),
        "hazard" => Ok(DistributionSpec::Hazard(Expr::parse_in(body, "x")?)),
        other => Err(syntax(format!("unknown distribution kind `{other}`"))),
    }
}

pub fn parse_distribution(text: &str) -> Result<Distribution, FormError> {
    Ok(build(&parse_distribution_spec(text)?)?)
}

pub fn parse_distortion(text: &str) -> Result<Distortion, FormError> {
    let t = text.trim();
    if t == "identity" {
        return Ok(Distortion::identity());
    }
    if let Some(k) = t.strip_prefix("power:") {
        return Ok(Distortion::power(number(k, "power")?)?);
    }
    if let Some(k) = t.strip_prefix("dualpower:") {
        return Ok(Distortion::dual_power(number(k, "dualpower")?)?);
    }
    let body = t.strip_prefix("h:").unwrap_or(t);
    Ok(Distortion::from_expr(Expr::parse_in(body, "p")?)?)
}

/// Parses a copula; `default_n` fills a missing `n=` (typically the
/// signature length). Generators and diagonals are validated on `grid`.
pub fn parse_copula(text: &str, default_n: Option<usize>, grid: &Grid) -> Result<CopulaHandle, FormError> {
    let t = text.trim();
    let (kind, body) = t.split_once(':').unwrap_or((t, ""));
    let need_n = |n: Option<usize>| n.or(default_n).ok_or_else(|| syntax(format!("`{t}` needs a dimension")));
    match kind.trim() {
        "product" | "comonotone" => {
            let n = if body.trim().is_empty() { need_n(None)? } else { integer(body, kind)? };
            Ok(if kind == "product" { CopulaHandle::product(n)? } else { CopulaHandle::comonotone(n)? })
        }
        "durante" | "diagonal" => {
            let key = if kind == "durante" { "f" } else { "d" };
            let (mut func, mut n) = (None, None);
            for part in split_top(body) {
                let (k, v) = part.split_once('=').ok_or_else(|| syntax(format!("expected key=value, got `{part}`")))?;
                match k.trim() {
                    "n" => n = Some(integer(v, "n")?),
                    k if k == key => func = Some(Expr::parse_in(v, "p")?),
                    other => return Err(syntax(format!("unknown {kind} parameter `{other}`"))),
                }
            }
            let func = func.ok_or_else(|| syntax(format!("{kind} needs {key}=<expr>")))?;
            let n = need_n(n)?;
            Ok(if kind == "durante" {
                CopulaHandle::Durante(DuranteGenerator::from_expr(func, n, grid)?)
            } else {
                CopulaHandle::Jaworski(Diagonal::from_expr(func, n, grid)?)
            })
        }
        "cuadras-auge" | "frechet" => {
            let key = if kind == "frechet" { "gamma" } else { "theta" };
            let v = body
                .trim()
                .strip_prefix(key)
                .and_then(|r| r.trim_start().strip_prefix('='))
                .ok_or_else(|| syntax(format!("{kind} needs {key}=<value>")))?;
            let v = number(v, key)?;
            Ok(if kind == "frechet" { CopulaHandle::frechet(v)? } else { CopulaHandle::cuadras_auge(v)? })
        }
        other => Err(syntax(format!("unknown copula `{other}`"))),
    }
}
