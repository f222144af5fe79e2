//! Coherent systems with exchangeable components: distortion functions from
//! minimal signatures, closed-form shape classification, and advice on which
//! orders a system distortion preserves.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::copulas::{CopulaError, CopulaHandle, Diagonal, DuranteGenerator};
use crate::distortions::{Distortion, DistortionError, Provenance, ShapeReport};
use crate::funcalc::{Expr, RealFn};
use crate::numerics::{sign_scan, Grid, Sign, Tolerance};
use crate::orders::OrderKind;

/// Largest deviation allowed between a closed form and the generic sum.
pub const CLOSED_FORM_TOL: f64 = 1e-12;
/// Tolerance on Σaᵢ = 1 for signatures given in floating point.
const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error("signature entry `{0}` is not a number")]
    Entry(String),
    #[error("signature needs at least 2 entries, got {0}")]
    Length(usize),
    #[error("signature entries sum to {0}, expected 1")]
    Sum(String),
    #[error("signature has {signature} entries but the copula has dimension {copula}")]
    DimensionMismatch { signature: usize, copula: usize },
    #[error("this classification needs {expected} components, got {got}")]
    Components { expected: usize, got: usize },
    #[error("closed form {closed} differs from generic value {generic} at p = {p}")]
    ClosedFormMismatch { p: f64, closed: f64, generic: f64 },
}

/// A number that stays exact as long as its inputs are.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    /// `(a ± sqrt(d)) / b` with rational `a, b, d`; `text` spells it out.
    Surd { text: String, value: f64 },
    Real(f64),
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(v.into()))
    }

    pub fn value(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Surd { value, .. } | Scalar::Real(value) => *value,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// Compares with an integer; exact when the scalar is.
    pub fn cmp_int(&self, c: i64) -> Ordering {
        match self {
            Scalar::Exact(q) => q.cmp(&BigRational::from_integer(c.into())),
            _ => self.value().total_cmp(&(c as f64)),
        }
    }

    fn is_zero(&self) -> bool {
        self.cmp_int(0) == Ordering::Equal
    }

    fn binary(&self, other: &Scalar, q: impl Fn(&BigRational, &BigRational) -> BigRational, r: impl Fn(f64, f64) -> f64) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(q(a, b)),
            _ => Scalar::Real(r(self.value(), other.value())),
        }
    }

    fn add(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a + b, |a, b| a + b)
    }

    fn sub(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a - b, |a, b| a - b)
    }

    fn mul(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a * b, |a, b| a * b)
    }

    fn div(&self, o: &Scalar) -> Scalar {
        self.binary(o, |a, b| a / b, |a, b| a / b)
    }

    fn neg(&self) -> Scalar {
        Scalar::int(0).sub(self)
    }

    fn ge(&self, c: i64) -> bool {
        self.cmp_int(c) != Ordering::Less
    }

    fn le(&self, c: i64) -> bool {
        self.cmp_int(c) != Ordering::Greater
    }

    fn in_unit_open(&self) -> bool {
        self.cmp_int(0) == Ordering::Greater && self.cmp_int(1) == Ordering::Less
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Surd { text, .. } => f.write_str(text),
            Scalar::Real(v) => write!(f, "{v:?}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            value: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            exact: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            surd: Option<&'a str>,
        }
        let repr = match self {
            Scalar::Exact(_) => Repr { value: self.value(), exact: Some(self.to_string()), surd: None },
            Scalar::Surd { text, value } => Repr { value: *value, exact: None, surd: Some(text) },
            Scalar::Real(v) => Repr { value: *v, exact: None, surd: None },
        };
        repr.serialize(s)
    }
}

/// Parses `3`, `-2`, `3/4`, `0.25` or `1e-3` as an exact rational.
fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac_part.chars().any(|c| !c.is_ascii_digit()) || (int_part.trim_start_matches(['-', '+']).is_empty() && frac_part.is_empty()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(q)
}

/// Minimal signature `(a₁, …, aₙ)`: the system survival function is
/// `Σ aᵢ F̄_{1:i}`, a signed mixture of series systems.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalSignature {
    exact: Option<Vec<BigRational>>,
    values: Vec<f64>,
}

impl MinimalSignature {
    pub fn exact(coeffs: Vec<BigRational>) -> Result<Self, SystemError> {
        if coeffs.len() < 2 {
            return Err(SystemError::Length(coeffs.len()));
        }
        let sum: BigRational = coeffs.iter().sum();
        if !sum.is_one() {
            return Err(SystemError::Sum(format!("{}/{}", sum.numer(), sum.denom())));
        }
        let values = coeffs.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(MinimalSignature { exact: Some(coeffs), values })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self, SystemError> {
        Self::exact(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Floating-point signature; derived constants are floating point too.
    pub fn from_f64(values: Vec<f64>) -> Result<Self, SystemError> {
        if values.len() < 2 {
            return Err(SystemError::Length(values.len()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(SystemError::Entry(bad.to_string()));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(SystemError::Sum(sum.to_string()));
        }
        Ok(MinimalSignature { exact: None, values })
    }

    /// Comma-separated entries; integers, fractions and decimals stay exact.
    pub fn parse(text: &str) -> Result<Self, SystemError> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let exact: Option<Vec<BigRational>> = parts.iter().map(|p| parse_rational(p)).collect();
        match exact {
            Some(coeffs) => Self::exact(coeffs),
            None => {
                let values = parts
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|_| SystemError::Entry(p.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                Self::from_f64(values)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `aᵢ`, 1-based.
    pub fn coeff(&self, i: usize) -> Scalar {
        match &self.exact {
            Some(q) => Scalar::Exact(q[i - 1].clone()),
            None => Scalar::Real(self.values[i - 1]),
        }
    }
}

impl fmt::Display for MinimalSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match &self.exact {
            Some(q) => q.iter().map(|c| if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) }).collect(),
            None => self.values.iter().map(|v| format!("{v:?}")).collect(),
        };
        f.write_str(&parts.join(","))
    }
}

/// A system distortion `h_T(p) = Σ aᵢ C(p, …(i)…, p, 1, …, 1)`.
#[derive(Clone, Debug)]
pub struct SystemDistortion {
    pub h: Distortion,
    pub signature: MinimalSignature,
    pub copula: CopulaHandle,
    pub closed_form: Option<Expr>,
}

fn coefficient_text(c: &Scalar) -> String {
    format!("({c})")
}

fn generator_expr(handle: &CopulaHandle) -> Option<Expr> {
    let text = match handle {
        CopulaHandle::Durante(g) => return g.expr().filter(|e| e.variable() == "p").cloned(),
        CopulaHandle::Product(_) => "p".to_string(),
        CopulaHandle::CuadrasAuge(theta) => format!("p^({:?})", 1.0 - theta),
        CopulaHandle::Frechet(gamma) => format!("({gamma:?})*p + ({:?})", 1.0 - gamma),
        _ => return None,
    };
    Expr::parse_in(&text, "p").ok()
}

/// `Σ a_k p f^{k−1}` or `α p + β 𝔡` as an expression in `p`.
fn closed_form(sig: &MinimalSignature, copula: &CopulaHandle) -> Option<Expr> {
    let text = if let Some(f) = generator_expr(copula) {
        let f = f.render();
        let terms: Vec<String> = (1..=sig.len())
            .filter(|&k| !sig.coeff(k).is_zero())
            .map(|k| match k {
                1 => format!("{}*p", coefficient_text(&sig.coeff(k))),
                _ => format!("{}*p*({f})^{}", coefficient_text(&sig.coeff(k)), k - 1),
            })
            .collect();
        terms.join(" + ")
    } else {
        let d = copula.as_diagonal()?;
        let d_text = match d.expr() {
            Some(e) if e.variable() == "p" => e.render(),
            Some(_) => return None,
            None => "p".to_string(),
        };
        let params = diag_system_params(sig);
        format!("{}*p + {}*({d_text})", coefficient_text(&params.alpha), coefficient_text(&params.beta))
    };
    Expr::parse_in(&text, "p").ok()
}

/// Builds `h_T` from the copula's boundary sections and validates it as a
/// distortion. When a closed form exists it must match the generic copula
/// evaluation to within [`CLOSED_FORM_TOL`] on `grid`.
pub fn system_distortion_on(sig: &MinimalSignature, copula: &CopulaHandle, grid: &Grid) -> Result<SystemDistortion, SystemError> {
    let n = copula.dimension();
    if sig.len() != n {
        return Err(SystemError::DimensionMismatch { signature: sig.len(), copula: n });
    }
    let generic = {
        let (a, c) = (sig.values.clone(), copula.clone());
        move |p: f64| a.iter().enumerate().map(|(i, ai)| ai * c.boundary_section_generic(p, i + 1)).sum::<f64>()
    };
    let closed = closed_form(sig, copula);
    let label = format!("system[{sig}; {copula}]");
    let f = match &closed {
        Some(expr) => {
            for &p in grid.points() {
                let (c, g) = (expr.eval(p).unwrap_or(f64::NAN), generic(p));
                if !((c - g).abs() <= CLOSED_FORM_TOL) {
                    return Err(SystemError::ClosedFormMismatch { p, closed: c, generic: g });
                }
            }
            RealFn::from(expr.clone())
        }
        None => {
            let (a, c) = (sig.values.clone(), copula.clone());
            RealFn::native(move |p| a.iter().enumerate().map(|(i, ai)| ai * c.boundary_section(p, i + 1)).sum())
        }
    };
    let h = Distortion::validate(f, Provenance::SystemDerived, label)?;
    Ok(SystemDistortion { h, signature: sig.clone(), copula: copula.clone(), closed_form: closed })
}

pub fn system_distortion(sig: &MinimalSignature, copula: &CopulaHandle) -> Result<SystemDistortion, SystemError> {
    system_distortion_on(sig, copula, &Grid::unit())
}

/// `Σ a_k p f^{k−1}`, cross-validated against the generic copula sum.
pub fn durante_system_distortion(sig: &MinimalSignature, f: &DuranteGenerator) -> Result<SystemDistortion, SystemError> {
    system_distortion(sig, &CopulaHandle::Durante(f.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeVerdict {
    StarshapedAnyF,
    AntistarshapedAnyF,
    /// Starshaped whenever `f(0) ≥ threshold`.
    StarshapedIf,
    /// Antistarshaped whenever `f(0) ≥ threshold`.
    AntistarshapedIf,
    Starshaped,
    Antistarshaped,
    /// `h_T(p) = p`, both shapes at once.
    Identity,
    Inconclusive,
}

impl ShapeVerdict {
    pub fn name(self) -> &'static str {
        match self {
            ShapeVerdict::StarshapedAnyF => "starshaped-any-f",
            ShapeVerdict::AntistarshapedAnyF => "antistarshaped-any-f",
            ShapeVerdict::StarshapedIf => "starshaped-if",
            ShapeVerdict::AntistarshapedIf => "antistarshaped-if",
            ShapeVerdict::Starshaped => "starshaped",
            ShapeVerdict::Antistarshaped => "antistarshaped",
            ShapeVerdict::Identity => "identity",
            ShapeVerdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_starshaped(self) -> bool {
        matches!(self, ShapeVerdict::StarshapedAnyF | ShapeVerdict::Starshaped | ShapeVerdict::Identity)
    }

    pub fn is_antistarshaped(self) -> bool {
        matches!(self, ShapeVerdict::AntistarshapedAnyF | ShapeVerdict::Antistarshaped | ShapeVerdict::Identity)
    }

    pub fn is_decisive(self) -> bool {
        self.is_starshaped() || self.is_antistarshaped()
    }

    fn mirrored(self) -> Self {
        match self {
            ShapeVerdict::StarshapedAnyF => ShapeVerdict::AntistarshapedAnyF,
            ShapeVerdict::AntistarshapedAnyF => ShapeVerdict::StarshapedAnyF,
            ShapeVerdict::StarshapedIf => ShapeVerdict::AntistarshapedIf,
            ShapeVerdict::AntistarshapedIf => ShapeVerdict::StarshapedIf,
            ShapeVerdict::Starshaped => ShapeVerdict::Antistarshaped,
            ShapeVerdict::Antistarshaped => ShapeVerdict::Starshaped,
            other => other,
        }
    }
}

impl fmt::Display for ShapeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeClassification {
    pub verdict: ShapeVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Scalar>,
    /// The branch that produced the verdict.
    pub rule: String,
    pub parameters: BTreeMap<String, Scalar>,
    /// Grid classification of `h_T`, attached where the closed-form rule is silent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct: Option<ShapeReport>,
}

impl ShapeClassification {
    fn new(verdict: ShapeVerdict, rule: impl Into<String>) -> Self {
        ShapeClassification { verdict, threshold: None, rule: rule.into(), parameters: BTreeMap::new(), direct: None }
    }

    fn conditional(verdict: ShapeVerdict, threshold: Scalar, rule: impl Into<String>) -> Self {
        ShapeClassification { threshold: Some(threshold), ..Self::new(verdict, rule) }
    }

    fn with(mut self, name: &str, value: Scalar) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    /// Settles a conditional verdict for a generator with the given `f(0)`.
    pub fn resolve(&self, f0: f64) -> ShapeVerdict {
        let met = self.threshold.as_ref().is_some_and(|t| f0 >= t.value());
        match self.verdict {
            ShapeVerdict::StarshapedIf if met => ShapeVerdict::Starshaped,
            ShapeVerdict::AntistarshapedIf if met => ShapeVerdict::Antistarshaped,
            ShapeVerdict::StarshapedIf | ShapeVerdict::AntistarshapedIf => ShapeVerdict::Inconclusive,
            v => v,
        }
    }

    fn mirrored(mut self) -> Self {
        self.verdict = self.verdict.mirrored();
        self
    }
}

fn check_components(sig: &MinimalSignature, n: usize) -> Result<(), SystemError> {
    if sig.len() == n {
        Ok(())
    } else {
        Err(SystemError::Components { expected: n, got: sig.len() })
    }
}

/// Sign of `Σ_{k=1}^{n−1} k a_{k+1} f^{k−1}(p)` over the grid: nonnegative
/// means `h_T` is starshaped, nonpositive antistarshaped.
pub fn durante_shape_condition(sig: &MinimalSignature, f: &DuranteGenerator, grid: &Grid) -> Result<ShapeClassification, SystemError> {
    let n = f.dimension();
    if sig.len() != n {
        return Err(SystemError::DimensionMismatch { signature: sig.len(), copula: n });
    }
    let a = sig.values();
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&p| {
            let fp = f.f(p);
            (1..n).map(|k| k as f64 * a[k] * fp.powi(k as i32 - 1)).sum()
        })
        .collect();
    let scan = sign_scan(&values, Tolerance::SCAN);
    let verdict = match scan.sign {
        Sign::Zero => ShapeVerdict::Identity,
        Sign::Nonnegative => ShapeVerdict::Starshaped,
        Sign::Nonpositive => ShapeVerdict::Antistarshaped,
        Sign::Mixed => ShapeVerdict::Inconclusive,
    };
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    Ok(ShapeClassification::new(verdict, "sign of sum k a_(k+1) f^(k-1) on the grid")
        .with("condition_min", Scalar::Real(lo))
        .with("condition_max", Scalar::Real(hi)))
}

/// Branch table for three components with `ω = −a₂/(2a₃)`.
pub fn classify_3component(sig: &MinimalSignature) -> Result<ShapeClassification, SystemError> {
    check_components(sig, 3)?;
    Ok(three_component_scheme(&sig.coeff(2), &sig.coeff(3)))
}

fn three_component_scheme(a2: &Scalar, a3: &Scalar) -> ShapeClassification {
    use ShapeVerdict::*;
    if a3.is_zero() {
        let c = match a2.cmp_int(0) {
            Ordering::Greater => ShapeClassification::new(StarshapedAnyF, "a3 = 0, a2 > 0"),
            Ordering::Less => ShapeClassification::new(AntistarshapedAnyF, "a3 = 0, a2 < 0"),
            Ordering::Equal => ShapeClassification::new(Identity, "a2 = a3 = 0"),
        };
        return c;
    }
    let omega = a2.neg().div(&Scalar::int(2).mul(a3));
    let positive = a3.cmp_int(0) == Ordering::Greater;
    let c = if omega.ge(1) {
        ShapeClassification::new(AntistarshapedAnyF, "omega >= 1")
    } else if omega.in_unit_open() {
        ShapeClassification::conditional(StarshapedIf, omega.clone(), "omega in (0,1), f(0) >= omega")
    } else {
        ShapeClassification::new(StarshapedAnyF, "omega <= 0")
    };
    let c = if positive { c } else { c.mirrored() };
    ShapeClassification { rule: format!("a3 {} 0, {}", if positive { ">" } else { "<" }, c.rule), ..c }.with("omega", omega)
}

/// Branch table for four components with `Δ = a₃² − 3a₂a₄` and the roots
/// `x_[1] ≤ x_[2]` of `3a₄x² + 2a₃x + a₂`. With `a₄ = 0` the three-component
/// scheme applies.
pub fn classify_4component(sig: &MinimalSignature) -> Result<ShapeClassification, SystemError> {
    use ShapeVerdict::*;
    check_components(sig, 4)?;
    let (a2, a3, a4) = (sig.coeff(2), sig.coeff(3), sig.coeff(4));
    if a4.is_zero() {
        let c = three_component_scheme(&a2, &a3);
        return Ok(ShapeClassification { rule: format!("a4 = 0; {}", c.rule), ..c });
    }
    let delta = a3.mul(&a3).sub(&Scalar::int(3).mul(&a2).mul(&a4));
    let positive = a4.cmp_int(0) == Ordering::Greater;
    let sign = if positive { ">" } else { "<" };
    if delta.le(0) {
        let c = ShapeClassification::new(StarshapedAnyF, format!("a4 {sign} 0, delta <= 0")).with("delta", delta);
        return Ok(if positive { c } else { c.mirrored() });
    }
    let (x1, x2) = quadratic_roots(&a3, &a4, &delta);
    let c = if x2.le(0) {
        ShapeClassification::new(StarshapedAnyF, "x[2] <= 0")
    } else if x1.ge(1) {
        ShapeClassification::new(StarshapedAnyF, "x[1] >= 1")
    } else if x1.le(0) && x2.ge(1) {
        ShapeClassification::new(AntistarshapedAnyF, "x[1] <= 0, x[2] >= 1")
    } else if x2.in_unit_open() {
        ShapeClassification::conditional(StarshapedIf, x2.clone(), "x[2] in (0,1), f(0) >= x[2]")
    } else {
        ShapeClassification::conditional(AntistarshapedIf, x1.clone(), "x[1] in (0,1), x[2] >= 1, f(0) >= x[1]")
    };
    let c = if positive { c } else { c.mirrored() };
    Ok(ShapeClassification { rule: format!("a4 {sign} 0, delta > 0, {}", c.rule), ..c }
        .with("delta", delta)
        .with("x1", x1)
        .with("x2", x2))
}

/// Roots `(−a₃ ± √Δ)/(3a₄)`, ordered, exact when `Δ` is a rational square.
fn quadratic_roots(a3: &Scalar, a4: &Scalar, delta: &Scalar) -> (Scalar, Scalar) {
    let den = Scalar::int(3).mul(a4);
    let minus_b = a3.neg();
    let (lo, hi) = match delta.exact().and_then(rational_sqrt) {
        Some(r) => {
            let r = Scalar::Exact(r);
            (minus_b.sub(&r).div(&den), minus_b.add(&r).div(&den))
        }
        None => {
            let r = delta.value().sqrt();
            let (b, d) = (minus_b.value(), den.value());
            let surd = |s: char, v: f64| match (&minus_b, &den, delta) {
                (Scalar::Exact(_), Scalar::Exact(_), Scalar::Exact(_)) => {
                    Scalar::Surd { text: format!("({minus_b} {s} sqrt({delta}))/({den})"), value: v }
                }
                _ => Scalar::Real(v),
            };
            (surd('-', (b - r) / d), surd('+', (b + r) / d))
        }
    };
    if lo.value() <= hi.value() {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// `h_T(p) = α p + β 𝔡(p)` for a copula with diagonal `𝔡`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagParams {
    pub alpha: Scalar,
    pub beta: Scalar,
}

/// `α = Σ aᵢ(n−i)/(n−1)`, `β = Σ aᵢ(i−1)/(n−1)`.
pub fn diag_system_params(sig: &MinimalSignature) -> DiagParams {
    let n = sig.len() as i64;
    let mut alpha = Scalar::int(0);
    let mut beta = Scalar::int(0);
    for i in 1..=sig.len() {
        let a = sig.coeff(i);
        alpha = alpha.add(&a.mul(&Scalar::int(n - i as i64)));
        beta = beta.add(&a.mul(&Scalar::int(i as i64 - 1)));
    }
    let scale = Scalar::int(n - 1);
    let params = DiagParams { alpha: alpha.div(&scale), beta: beta.div(&scale) };
    debug_assert!(match (&params.alpha, &params.beta) {
        (Scalar::Exact(a), Scalar::Exact(b)) => (a + b).is_one(),
        (a, b) => (a.value() + b.value() - 1.0).abs() < 1e-12,
    });
    params
}

fn diagonal_distortion(d: &Diagonal) -> Result<Distortion, SystemError> {
    let f = match d.expr() {
        Some(e) => RealFn::from(e.clone()),
        None => {
            let d = d.clone();
            RealFn::native(move |p| d.d(p))
        }
    };
    Ok(Distortion::validate(f, Provenance::Derived, d.label().to_string())?)
}

/// `h_T = αp + β𝔡` is starshaped [antistarshaped] when `𝔡` is starshaped
/// and `β > 0` [`β < 0`]; `β = 0` gives the identity. Otherwise the grid
/// classification of `h_T` is attached and the verdict is inconclusive.
pub fn classify_diag(sig: &MinimalSignature, d: &Diagonal, grid: &Grid) -> Result<ShapeClassification, SystemError> {
    if sig.len() != d.dimension() {
        return Err(SystemError::DimensionMismatch { signature: sig.len(), copula: d.dimension() });
    }
    let params = diag_system_params(sig);
    let d_shape = diagonal_distortion(d)?.classify(grid);
    let c = match params.beta.cmp_int(0) {
        Ordering::Equal => ShapeClassification::new(ShapeVerdict::Identity, "beta = 0"),
        Ordering::Greater if d_shape.starshaped => ShapeClassification::new(ShapeVerdict::Starshaped, "d starshaped, beta > 0"),
        Ordering::Less if d_shape.starshaped => ShapeClassification::new(ShapeVerdict::Antistarshaped, "d starshaped, beta < 0"),
        _ => {
            let sys = system_distortion_on(sig, &CopulaHandle::Jaworski(d.clone()), grid)?;
            ShapeClassification { direct: Some(sys.h.classify(grid)), ..ShapeClassification::new(ShapeVerdict::Inconclusive, "d not starshaped") }
        }
    };
    Ok(c.with("alpha", params.alpha).with("beta", params.beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preservation {
    Preserved,
    NotGuaranteed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Advice {
    pub order: OrderKind,
    pub result: Preservation,
    pub hypothesis: &'static str,
}

/// Whether distorting both variables by `h` preserves `order`, per the
/// hypothesis each preservation result needs.
pub fn preservation_advice(order: OrderKind, shape: &ShapeReport) -> Advice {
    let (met, hypothesis) = match order {
        OrderKind::Ttt => (shape.starshaped, "h starshaped"),
        OrderKind::Ew | OrderKind::Dmrl => {
            (shape.antistarshaped && shape.strictly_increasing, "h antistarshaped and strictly increasing")
        }
        OrderKind::Qmit => {
            (shape.dual_antistarshaped && shape.strictly_increasing, "dual of h antistarshaped, h strictly increasing")
        }
        OrderKind::ConvexTransform | OrderKind::Star => (true, "any distortion"),
    };
    Advice { order, result: if met { Preservation::Preserved } else { Preservation::NotGuaranteed }, hypothesis }
}

pub fn all_advice(shape: &ShapeReport) -> Vec<Advice> {
    OrderKind::ALL.iter().map(|&k| preservation_advice(k, shape)).collect()
}

/// `h(p) = 1 − Ĉ(1−p, …, 1−p)` for a parallel system whose distributional copula is `Ĉ`.
pub fn parallel_distortion(dist_copula: &CopulaHandle) -> Result<Distortion, SystemError> {
    let c = dist_copula.clone();
    let label = format!("parallel[{dist_copula}]");
    Ok(Distortion::validate(RealFn::native(move |p| 1.0 - c.diagonal_section(1.0 - p)), Provenance::SystemDerived, label)?)
}

/// `g(p) = C(p, …, p)` for a series system with survival copula `C`.
pub fn series_distortion(surv_copula: &CopulaHandle) -> Result<Distortion, SystemError> {
    let c = surv_copula.clone();
    let label = format!("series[{surv_copula}]");
    Ok(Distortion::validate(RealFn::native(move |p| c.diagonal_section(p)), Provenance::SystemDerived, label)?)
}

/// Everything the closed-form rules and the grid say about a system distortion.
#[derive(Clone, Debug, Serialize)]
pub struct SystemClassification {
    pub signature: String,
    pub copula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<String>,
    /// Most specific decisive verdict, e.g. `antistarshaped-any-f`.
    pub verdict: ShapeVerdict,
    /// `starshaped`, `antistarshaped`, `identity`, `dual-antistarshaped` or `neither`.
    pub shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corollary: Option<ShapeClassification>,
    pub theorem: ShapeClassification,
    pub direct: ShapeReport,
    /// The decisive verdict agrees with the grid classification.
    pub consistent: bool,
    pub advice: Vec<Advice>,
}

impl SystemClassification {
    /// Parameters from the corollary and the theorem, corollary first.
    pub fn parameter(&self, name: &str) -> Option<&Scalar> {
        self.corollary.as_ref().and_then(|c| c.parameters.get(name)).or_else(|| self.theorem.parameters.get(name))
    }
}

pub fn classify_system(sys: &SystemDistortion, grid: &Grid) -> Result<SystemClassification, SystemError> {
    let direct = sys.h.classify(grid);
    let (corollary, theorem) = if let Some(gen) = sys.copula.as_durante() {
        let corollary = match sys.signature.len() {
            3 => Some(classify_3component(&sys.signature)?),
            4 => Some(classify_4component(&sys.signature)?),
            _ => None,
        };
        let mut theorem = durante_shape_condition(&sys.signature, &gen, grid)?;
        if !theorem.verdict.is_decisive() {
            theorem.direct = Some(direct.clone());
        }
        let corollary = corollary.map(|mut c| {
            if c.threshold.is_some() && !c.verdict.is_decisive() {
                c.parameters.insert("f0".into(), Scalar::Real(gen.f(0.0)));
            }
            c
        });
        (corollary, theorem)
    } else if let Some(d) = sys.copula.as_diagonal() {
        (None, classify_diag(&sys.signature, &d, grid)?)
    } else {
        let mut t = ShapeClassification::new(ShapeVerdict::Inconclusive, "no closed-form rule for this copula");
        t.direct = Some(direct.clone());
        (None, t)
    };

    let f0 = sys.copula.as_durante().map(|g| g.f(0.0));
    let resolved = corollary.as_ref().map(|c| f0.map_or(c.verdict, |f0| c.resolve(f0)));
    let verdict = match resolved {
        Some(v) if v.is_decisive() => v,
        _ => theorem.verdict,
    };
    let shape = if verdict == ShapeVerdict::Identity {
        "identity"
    } else if verdict.is_starshaped() {
        "starshaped"
    } else if verdict.is_antistarshaped() {
        "antistarshaped"
    } else if direct.starshaped && !direct.antistarshaped {
        "starshaped"
    } else if direct.antistarshaped && !direct.starshaped {
        "antistarshaped"
    } else if direct.dual_antistarshaped {
        "dual-antistarshaped"
    } else {
        "neither"
    };
    let consistent = (!verdict.is_starshaped() || direct.starshaped) && (!verdict.is_antistarshaped() || direct.antistarshaped);
    Ok(SystemClassification {
        signature: sys.signature.to_string(),
        copula: sys.copula.to_string(),
        closed_form: sys.closed_form.as_ref().map(|e| e.source().to_string()),
        verdict,
        shape: shape.to_string(),
        corollary,
        theorem,
        advice: all_advice(&direct),
        direct,
        consistent,
    })
}
