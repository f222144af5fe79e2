//! Distortion functions and their shape.
//!
//! A distortion acts on survival functions: the distorted survival is
//! `h(F̄(x))`, so the distorted cdf is `h*(F(x))` with the dual
//! `h*(p) = 1 - h(1 - p)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcalc::{Expr, RealFn};
use crate::numerics::{self, monotone_scan, sign_scan, Grid, GridSpec, Tolerance};

/// Values this close to the required endpoint values are accepted.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistortionError {
    #[error("h(0) = {value}, expected 0")]
    LowerEndpoint { value: f64 },
    #[error("h(1) = {value}, expected 1")]
    UpperEndpoint { value: f64 },
    #[error("h is not increasing: h({p}) = {value} is below an earlier value {previous}")]
    NotIncreasing { p: f64, value: f64, previous: f64 },
    #[error("h is not finite at p = {p}")]
    NonFinite { p: f64 },
    #[error("invalid distortion parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Expression,
    BuiltIn,
    SystemDerived,
    Derived,
}

#[derive(Clone)]
enum Form {
    Identity,
    Power(f64),
    DualPower(f64),
    General(RealFn),
    Dual(Arc<Form>),
    /// `outer(inner(p))`
    Composed(Arc<Form>, Arc<Form>),
}

impl Form {
    fn eval(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            Form::Identity => p,
            Form::Power(k) => p.powf(*k),
            Form::DualPower(k) => -(k * (-p).ln_1p()).exp_m1(),
            Form::General(f) => f.eval(p),
            Form::Dual(h) => 1.0 - h.eval(1.0 - p),
            Form::Composed(inner, outer) => outer.eval(inner.eval(p)),
        }
    }

    fn derivative(&self, p: f64) -> f64 {
        match self {
            Form::Identity => 1.0,
            Form::Power(k) => k * p.powf(k - 1.0),
            Form::DualPower(k) => k * (1.0 - p).powf(k - 1.0),
            Form::General(_) => {
                let step = numerics::DEFAULT_STEP;
                numerics::derivative_within(|u| self.eval(u), p, step, 0.0, 1.0)
            }
            Form::Dual(h) => h.derivative(1.0 - p),
            Form::Composed(inner, outer) => outer.derivative(inner.eval(p)) * inner.derivative(p),
        }
    }

    /// `inf { p : h(p) >= y }`
    fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let y = y.min(1.0);
        match self {
            Form::Identity => y,
            Form::Power(k) => y.powf(1.0 / k),
            Form::DualPower(k) => -((-y).ln_1p() / k).exp_m1(),
            Form::Dual(h) => h.co_inverse(y),
            Form::Composed(inner, outer) => inner.inverse(outer.inverse(y)),
            Form::General(_) => bisect(|p| self.eval(p), y),
        }
    }

    /// `1 - h⁻¹(1 - p)`, the inverse of the dual, computed without the
    /// cancellation of the naive formula where the closed form allows.
    fn co_inverse(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        let p = p.min(1.0);
        match self {
            Form::Identity => p,
            Form::Power(k) => -((-p).ln_1p() / k).exp_m1(),
            Form::DualPower(k) => p.powf(1.0 / k),
            Form::Dual(h) => h.inverse(p),
            Form::General(_) => bisect(|u| 1.0 - self.eval(1.0 - u), p),
            Form::Composed(..) => 1.0 - self.inverse(1.0 - p),
        }
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, y: f64) -> f64 {
    // the endpoint values were validated, so the target is always bracketed
    numerics::monotone_inverse(f, y, 0.0, 1.0, Tolerance::QUADRATURE).unwrap_or(f64::NAN)
}

/// A validated distortion function.
#[derive(Clone)]
pub struct Distortion {
    form: Arc<Form>,
    strictly_increasing: bool,
    provenance: Provenance,
    label: String,
}

impl fmt::Debug for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distortion")
            .field("label", &self.label)
            .field("strictly_increasing", &self.strictly_increasing)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl Distortion {
    /// Validates an arbitrary function on the default grid.
    pub fn validate(f: RealFn, provenance: Provenance, label: impl Into<String>) -> Result<Self, DistortionError> {
        Self::from_form(Form::General(f), provenance, label.into())
    }

    pub fn from_expr(expr: Expr) -> Result<Self, DistortionError> {
        let label = expr.source().to_string();
        Self::validate(expr.into(), Provenance::Expression, label)
    }

    pub fn identity() -> Self {
        Distortion { form: Arc::new(Form::Identity), strictly_increasing: true, provenance: Provenance::BuiltIn, label: "identity".into() }
    }

    /// `p^k`, k > 0.
    pub fn power(k: f64) -> Result<Self, DistortionError> {
        check_exponent(k)?;
        Self::from_form(Form::Power(k), Provenance::BuiltIn, format!("power:{k}"))
    }

    /// `1 - (1-p)^k`, k > 0.
    pub fn dual_power(k: f64) -> Result<Self, DistortionError> {
        check_exponent(k)?;
        Self::from_form(Form::DualPower(k), Provenance::BuiltIn, format!("dualpower:{k}"))
    }

    fn from_form(form: Form, provenance: Provenance, label: String) -> Result<Self, DistortionError> {
        let strictly_increasing = check(&form)?;
        Ok(Distortion { form: Arc::new(form), strictly_increasing, provenance, label })
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.form.eval(p)
    }

    /// `h'(p)`, in closed form for the built-in families.
    pub fn derivative(&self, p: f64) -> f64 {
        self.form.derivative(p)
    }

    /// Generalized left-continuous inverse; `y` is clamped to `[0, 1]`.
    pub fn inverse(&self, y: f64) -> f64 {
        self.form.inverse(y)
    }

    /// Inverse of the dual at `p`, i.e. `1 - h⁻¹(1 - p)`.
    pub fn dual_inverse(&self, p: f64) -> f64 {
        self.form.co_inverse(p)
    }

    pub fn dual(&self) -> Distortion {
        let form = match &*self.form {
            Form::Identity => Form::Identity,
            Form::Power(k) => Form::DualPower(*k),
            Form::DualPower(k) => Form::Power(*k),
            Form::Dual(inner) => (**inner).clone(),
            _ => Form::Dual(self.form.clone()),
        };
        let label = match &*self.form {
            Form::Identity => "identity".to_string(),
            Form::Power(k) => format!("dualpower:{k}"),
            Form::DualPower(k) => format!("power:{k}"),
            _ => match self.label.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
                Some(inner) => inner.to_string(),
                None => format!("dual({})", self.label),
            },
        };
        Distortion { form: Arc::new(form), strictly_increasing: self.strictly_increasing, provenance: Provenance::Derived, label }
    }

    /// `p ↦ outer(self(p))`: distorting by `self` and then by `outer`.
    pub fn compose_on_survival(&self, outer: &Distortion) -> Result<Distortion, DistortionError> {
        let form = Form::Composed(self.form.clone(), outer.form.clone());
        Self::from_form(form, Provenance::Derived, format!("{} then {}", self.label, outer.label))
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.strictly_increasing
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn classify(&self, grid: &Grid) -> ShapeReport {
        classify(self, grid)
    }
}

fn check_exponent(k: f64) -> Result<(), DistortionError> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(DistortionError::InvalidParameter(format!("exponent must be positive and finite, got {k}")))
    }
}

/// Endpoint and monotonicity checks; returns grid strictness.
fn check(form: &Form) -> Result<bool, DistortionError> {
    let grid = Grid::unit();
    let mut points = Vec::with_capacity(grid.count() + 2);
    points.push(0.0);
    points.extend_from_slice(grid.points());
    points.push(1.0);
    let mut values = Vec::with_capacity(points.len());
    for &p in &points {
        let v = form.eval(p);
        if !v.is_finite() {
            return Err(DistortionError::NonFinite { p });
        }
        values.push(v);
    }
    let (h0, h1) = (values[0], values[values.len() - 1]);
    if h0.abs() > ENDPOINT_TOL {
        return Err(DistortionError::LowerEndpoint { value: h0 });
    }
    if (h1 - 1.0).abs() > ENDPOINT_TOL {
        return Err(DistortionError::UpperEndpoint { value: h1 });
    }
    let tol = Tolerance::SCAN;
    let mut running = values[0];
    let mut strict = true;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < running - tol.threshold(v, running) {
            return Err(DistortionError::NotIncreasing { p: points[i], value: v, previous: running });
        }
        let prev = values[i - 1];
        if v - prev <= 4.0 * f64::EPSILON * v.abs().max(prev.abs()) {
            strict = false;
        }
        running = running.max(v);
    }
    Ok(strict)
}

/// Shape flags of a distortion on a grid.
///
/// Every flag is "for all grid points", with ties allowed, so the identity
/// is reported as convex, concave, starshaped and antistarshaped at once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub convex: bool,
    pub concave: bool,
    pub starshaped: bool,
    pub antistarshaped: bool,
    pub strictly_increasing: bool,
    /// Whether `h*(p)/p` is decreasing.
    pub dual_antistarshaped: bool,
    /// Failed property name to the grid point where it failed.
    pub witnesses: BTreeMap<String, f64>,
    pub grid: GridSpec,
}

impl ShapeReport {
    /// Convex must imply starshaped and concave antistarshaped.
    pub fn is_consistent(&self) -> bool {
        (!self.convex || self.starshaped) && (!self.concave || self.antistarshaped)
    }
}

/// Tie tolerance for second divided differences (an estimate of `h''`).
const CURVATURE_TOL: f64 = 1e-7;

pub fn classify(h: &Distortion, grid: &Grid) -> ShapeReport {
    let pts = grid.points();
    let values = grid.sample(|p| h.eval(p));
    let mut witnesses = BTreeMap::new();

    let ratio: Vec<f64> = pts.iter().zip(&values).map(|(p, v)| v / p).collect();
    let scan = monotone_scan(&ratio, Tolerance::SCAN);
    let starshaped = scan.is_increasing();
    let antistarshaped = scan.is_decreasing();
    if let Some(i) = scan.witness {
        witnesses.insert("starshaped".to_string(), pts[i]);
        witnesses.insert("antistarshaped".to_string(), pts[i]);
    } else if !starshaped {
        witnesses.insert("starshaped".to_string(), pts[first_drop(&ratio)]);
    } else if !antistarshaped {
        witnesses.insert("antistarshaped".to_string(), pts[first_rise(&ratio)]);
    }

    let curvature: Vec<f64> = (1..pts.len() - 1)
        .map(|i| {
            let left = (values[i] - values[i - 1]) / (pts[i] - pts[i - 1]);
            let right = (values[i + 1] - values[i]) / (pts[i + 1] - pts[i]);
            2.0 * (right - left) / (pts[i + 1] - pts[i - 1])
        })
        .collect();
    let curv_tol = Tolerance { abs_tol: CURVATURE_TOL, rel_tol: Tolerance::SCAN.rel_tol };
    let signs = sign_scan(&curvature, curv_tol);
    let convex = signs.is_nonnegative();
    let concave = signs.is_nonpositive();
    if let Some(i) = signs.first_negative {
        witnesses.insert("convex".to_string(), pts[i + 1]);
    }
    if let Some(i) = signs.first_positive {
        witnesses.insert("concave".to_string(), pts[i + 1]);
    }

    let dual = h.dual();
    let dual_ratio: Vec<f64> = pts.iter().map(|&p| dual.eval(p) / p).collect();
    let dual_scan = monotone_scan(&dual_ratio, Tolerance::SCAN);
    let dual_antistarshaped = dual_scan.is_decreasing();
    if !dual_antistarshaped {
        let i = dual_scan.witness.unwrap_or_else(|| first_rise(&dual_ratio));
        witnesses.insert("dual_antistarshaped".to_string(), pts[i]);
    }

    ShapeReport {
        convex,
        concave,
        starshaped,
        antistarshaped,
        strictly_increasing: h.is_strictly_increasing(),
        dual_antistarshaped,
        witnesses,
        grid: grid.spec(),
    }
}

fn first_drop(v: &[f64]) -> usize {
    let tol = Tolerance::SCAN;
    let mut run = v[0];
    for (i, &x) in v.iter().enumerate() {
        if x < run - tol.threshold(x, run) {
            return i;
        }
        run = run.max(x);
    }
    0
}

fn first_rise(v: &[f64]) -> usize {
    let tol = Tolerance::SCAN;
    let mut run = v[0];
    for (i, &x) in v.iter().enumerate() {
        if x > run + tol.threshold(x, run) {
            return i;
        }
        run = run.min(x);
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(text: &str) -> Distortion {
        Distortion::from_expr(Expr::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(expr("p^5").is_strictly_increasing());
        assert!(expr("1-(1-p)^5").is_strictly_increasing());
        let err = Distortion::from_expr(Expr::parse("p^2 - 0.1").unwrap()).unwrap_err();
        assert!(matches!(err, DistortionError::LowerEndpoint { .. }));
        let err = Distortion::from_expr(Expr::parse("0.9*p").unwrap()).unwrap_err();
        assert!(matches!(err, DistortionError::UpperEndpoint { .. }));
        let err = Distortion::from_expr(Expr::parse("4*p*(1-p) + p^9").unwrap()).unwrap_err();
        assert!(matches!(err, DistortionError::NotIncreasing { .. }));
        assert!(Distortion::power(0.0).is_err());
    }

    #[test]
    fn flat_at_zero_is_valid_but_not_strict() {
        let h = expr("max(0, (p - 0.3)/0.7)");
        assert!(!h.is_strictly_increasing());
        assert_eq!(h.inverse(0.0), 0.0);
        assert!((h.inverse(0.5) - 0.65).abs() < 1e-12);
    }

    #[test]
    fn dual_examples() {
        let h = Distortion::power(5.0).unwrap();
        let d = h.dual();
        let oracle = |p: f64| 1.0 - (1.0 - p).powi(5);
        for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!((d.eval(p) - oracle(p)).abs() < 1e-15);
        }
        assert_eq!(Distortion::identity().dual().eval(0.3), 0.3);
        let g = expr("2/3*p + 1/3*(1 - 7/4*(1-p) + 3/2*(1-p)^2 - 3/4*(1-p)^3)");
        let gd = g.dual();
        let dd = |p: f64| 1.0 - 7.0 / 4.0 * (1.0 - p) + 1.5 * (1.0 - p).powi(2) - 0.75 * (1.0 - p).powi(3);
        for p in [0.2, 0.6] {
            let expect = 1.0 - 2.0 / 3.0 * (1.0 - p) - dd(1.0 - p) / 3.0;
            assert!((gd.eval(p) - expect).abs() < 1e-15);
        }
        assert_eq!(gd.dual().label(), g.label());
    }

    #[test]
    fn inverse_examples() {
        let p5 = Distortion::power(5.0).unwrap();
        assert!((p5.inverse(0.5) - 0.870_550_563_296_124).abs() < 1e-14);
        assert!((expr("p^5").inverse(0.5) - 0.5f64.powf(0.2)).abs() < 1e-14);
        assert_eq!(Distortion::identity().inverse(0.3), 0.3);
        let oracle = 1.0 - 0.5f64.powf(0.2);
        assert!((Distortion::dual_power(5.0).unwrap().inverse(0.5) - oracle).abs() < 1e-15);
        assert!((expr("1-(1-p)^5").inverse(0.5) - oracle).abs() < 1e-14);
        assert!((oracle - 0.129_449).abs() < 1e-6);
    }

    #[test]
    fn dual_inverse_inverts_the_dual() {
        for h in [Distortion::power(5.0).unwrap(), expr("p^5"), expr("1-(1-p)^3"), Distortion::dual_power(2.5).unwrap()] {
            let d = h.dual();
            for p in [1e-6, 0.01, 0.3, 0.9, 0.999] {
                let u = h.dual_inverse(p);
                assert!((d.eval(u) - p).abs() < 1e-12 * p.max(1e-3), "{} at {p}", h.label());
            }
        }
    }

    #[test]
    fn builtin_derivatives() {
        let h = Distortion::power(5.0).unwrap();
        assert!((h.derivative(0.5) - 5.0 * 0.0625).abs() < 1e-15);
        let g = expr("p^5");
        assert!((g.derivative(0.5) - 0.3125).abs() < 1e-8);
        let d = h.dual();
        assert!((d.derivative(0.5) - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let sq = expr("p^2");
        let cube = expr("p^3");
        let c = sq.compose_on_survival(&cube).unwrap();
        assert!((c.eval(0.7) - 0.7f64.powi(6)).abs() < 1e-15);
        let c = Distortion::identity().compose_on_survival(&sq).unwrap();
        assert_eq!(c.eval(0.3), sq.eval(0.3));
        let c = Distortion::power(5.0).unwrap().compose_on_survival(&Distortion::dual_power(5.0).unwrap()).unwrap();
        assert!((c.eval(0.5) - (1.0 - (1.0 - 0.03125f64).powi(5))).abs() < 1e-15);
        assert!((c.eval(0.5) - 0.146_784_812_211_990).abs() < 1e-14);
        assert!((c.inverse(c.eval(0.4)) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let g = Grid::unit();
        let r = Distortion::power(5.0).unwrap().classify(&g);
        assert!(r.convex && r.starshaped && !r.antistarshaped && !r.concave);
        assert!(r.witnesses.contains_key("antistarshaped"));
        let r = Distortion::dual_power(5.0).unwrap().classify(&g);
        assert!(r.concave && r.antistarshaped && !r.starshaped);
        let r = expr("3/4*p + 1/4*(2*p^2 - p^3)").classify(&g);
        assert!(r.starshaped && !r.convex, "{r:?}");
        let w = r.witnesses["convex"];
        assert!((w - 2.0 / 3.0).abs() < 0.01, "{w}");
        let r = Distortion::identity().classify(&g);
        assert!(r.convex && r.concave && r.starshaped && r.antistarshaped);
        assert!(r.is_consistent());
    }

    #[test]
    fn dual_shape_of_the_qmit_system() {
        let h = expr("2/3*p + 1/3*(1 - 7/4*(1-p) + 3/2*(1-p)^2 - 3/4*(1-p)^3)");
        let r = h.classify(&Grid::unit());
        assert!(r.dual_antistarshaped && !r.starshaped && !r.antistarshaped, "{r:?}");
        let d = h.dual().classify(&Grid::unit());
        assert!(d.antistarshaped && !d.concave);
    }
}
