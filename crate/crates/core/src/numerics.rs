//! Shared numerical kernel.
//!
//! Everything in here works on plain `Fn(f64) -> f64` closures so the
//! distribution and copula layers can feed it whatever they evaluate.
//! Statements that hold "for all p in (0,1)" are only ever checked on a
//! [`Grid`]; a passing scan certifies the grid, not the continuum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum bisection depth of the adaptive Simpson rule.
pub const MAX_QUAD_DEPTH: u32 = 40;
/// Hard cap on integrand evaluations for a single quadrature call.
pub const MAX_QUAD_EVALS: usize = 1 << 22;
/// Iteration cap for bisection.
pub const MAX_BISECTION_ITERS: usize = 200;
/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-6;

// Half-width of the tanh-sinh window used by `integrate_open`. At 3.5 the
// substitution weights are below 1e-20 and the abscissae have collapsed onto
// the endpoints in double precision.
const OPEN_WINDOW: f64 = 3.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("quadrature on [{a}, {b}] did not converge (last estimate {estimate})")]
    Quadrature { a: f64, b: f64, estimate: f64 },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("target {y} lies outside [{lo_value}, {hi_value}]")]
    Range { y: f64, lo_value: f64, hi_value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("tolerances must be positive and finite (abs {abs_tol}, rel {rel_tol})")]
    InvalidTolerance { abs_tol: f64, rel_tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    /// Quadrature default.
    pub const QUADRATURE: Tolerance = Tolerance { abs_tol: 1e-10, rel_tol: 1e-12 };
    /// Tie tolerance for monotonicity and sign scans.
    pub const SCAN: Tolerance = Tolerance { abs_tol: 1e-9, rel_tol: 1e-12 };

    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, NumericsError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(abs_tol) && ok(rel_tol) {
            Ok(Tolerance { abs_tol, rel_tol })
        } else {
            Err(NumericsError::InvalidTolerance { abs_tol, rel_tol })
        }
    }

    /// Slack allowed when comparing `a` against `b`.
    pub fn threshold(&self, a: f64, b: f64) -> f64 {
        self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::SCAN
    }
}

/// Strictly increasing sample points inside an interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    edge_margin: f64,
    uniform: bool,
    points: Vec<f64>,
}

/// Serializable summary of a [`Grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub edge_margin: f64,
    pub uniform: bool,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;
    pub const DEFAULT_COUNT: usize = 512;
    pub const DEFAULT_MARGIN: f64 = 1e-3;

    /// `count` equally spaced points on `[lo + edge_margin, hi - edge_margin]`.
    pub fn uniform(lo: f64, hi: f64, count: usize, edge_margin: f64) -> Result<Self, NumericsError> {
        if count < Self::MIN_POINTS {
            return Err(NumericsError::InvalidGrid(format!(
                "need at least {} points, got {count}",
                Self::MIN_POINTS
            )));
        }
        let (first, last) = (lo + edge_margin, hi - edge_margin);
        if !(edge_margin > 0.0 && first < last && lo.is_finite() && hi.is_finite()) {
            return Err(NumericsError::InvalidGrid(format!(
                "empty interior for [{lo}, {hi}] with margin {edge_margin}"
            )));
        }
        let step = (last - first) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| first + step * i as f64).collect();
        points[count - 1] = last;
        Ok(Grid { lo, hi, edge_margin, uniform: true, points })
    }

    /// The default grid on the unit interval: 512 points on `[1e-3, 1 - 1e-3]`.
    pub fn unit() -> Self {
        Self::unit_with(Self::DEFAULT_COUNT).expect("default grid is valid")
    }

    pub fn unit_with(count: usize) -> Result<Self, NumericsError> {
        Self::uniform(0.0, 1.0, count, Self::DEFAULT_MARGIN)
    }

    /// Arbitrary points; they must be strictly increasing and inside `(lo, hi)`.
    pub fn from_points(points: Vec<f64>, lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if points.len() < Self::MIN_POINTS {
            return Err(NumericsError::InvalidGrid(format!(
                "need at least {} points, got {}",
                Self::MIN_POINTS,
                points.len()
            )));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(NumericsError::InvalidGrid("points are not strictly increasing".into()));
        }
        let (first, last) = (points[0], points[points.len() - 1]);
        if !(first > lo && last < hi) {
            return Err(NumericsError::InvalidGrid(format!("points leave ({lo}, {hi})")));
        }
        let edge_margin = (first - lo).min(hi - last);
        Ok(Grid { lo, hi, edge_margin, uniform: false, points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_margin(&self) -> f64 {
        self.edge_margin
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            lo: self.lo,
            hi: self.hi,
            count: self.points.len(),
            edge_margin: self.edge_margin,
            uniform: self.uniform,
        }
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.points.iter().map(|&p| f(p)).collect()
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

/// Adaptive Simpson quadrature of `f` over the closed interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64, NumericsError> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(NumericsError::Quadrature { a, b, estimate: f64::NAN });
    }
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite { at: x })
        }
    };

    const INITIAL: usize = 4;
    let width = (b - a) / INITIAL as f64;
    let mut stack = Vec::with_capacity(2 * MAX_QUAD_DEPTH as usize + INITIAL);
    let mut f_left = eval(a)?;
    let mut rough = 0.0;
    for i in 0..INITIAL {
        let pa = a + width * i as f64;
        let pb = if i + 1 == INITIAL { b } else { a + width * (i + 1) as f64 };
        let pm = 0.5 * (pa + pb);
        let fm = eval(pm)?;
        let fb = eval(pb)?;
        let whole = (pb - pa) / 6.0 * (f_left + 4.0 * fm + fb);
        rough += whole;
        stack.push(Panel { a: pa, m: pm, b: pb, fa: f_left, fm, fb, whole, depth: 0 });
        f_left = fb;
    }
    stack.reverse();

    let budget = tol.abs_tol.max(tol.rel_tol * rough.abs());
    // corrections below a few ulps of the whole integral cannot matter
    let floor = 4.0 * f64::EPSILON * rough.abs();
    let total = b - a;
    let mut sum = 0.0;
    let mut carry = 0.0;
    let mut failed = false;
    let add = |v: f64, sum: &mut f64, carry: &mut f64| {
        // Neumaier summation
        let t = *sum + v;
        if sum.abs() >= v.abs() {
            *carry += (*sum - t) + v;
        } else {
            *carry += (v - t) + *sum;
        }
        *sum = t;
    };

    while let Some(p) = stack.pop() {
        let lm = 0.5 * (p.a + p.m);
        let rm = 0.5 * (p.m + p.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        let left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        let local = budget * (p.b - p.a) / total;
        let mass = (p.b - p.a) / 6.0 * (p.fa.abs() + 4.0 * p.fm.abs() + p.fb.abs());
        let noise = 64.0 * f64::EPSILON * mass;
        let refined = left + right + delta / 15.0;
        if delta.abs() <= 15.0 * local.max(floor) || delta.abs() <= noise {
            add(refined, &mut sum, &mut carry);
        } else if p.depth >= MAX_QUAD_DEPTH || lm <= p.a || rm >= p.b {
            failed = true;
            add(refined, &mut sum, &mut carry);
        } else {
            stack.push(Panel { a: p.m, m: rm, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, depth: p.depth + 1 });
            stack.push(Panel { a: p.a, m: lm, b: p.m, fa: p.fa, fm: flm, fb: p.fm, whole: left, depth: p.depth + 1 });
        }
        if evals.get() > MAX_QUAD_EVALS {
            let pending: f64 = stack.iter().map(|p| p.whole).sum();
            return Err(NumericsError::Quadrature { a, b, estimate: sum + carry + pending });
        }
    }
    let estimate = sum + carry;
    if failed {
        Err(NumericsError::Quadrature { a, b, estimate })
    } else {
        Ok(estimate)
    }
}

/// Quadrature over the open interval `(a, b)`.
///
/// The integrand is never evaluated at `a` or `b`. A tanh-sinh change of
/// variables moves the endpoints to infinity where the transformed integrand
/// decays double-exponentially, so integrable endpoint singularities (the
/// logarithmic blow-up of an exponential quantile at 1, say) cost nothing
/// extra. The transformed integral is then handed to [`integrate`].
pub fn integrate_open<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64, NumericsError> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(NumericsError::Quadrature { a, b, estimate: f64::NAN });
    }
    let len = b - a;
    let g = |x: f64| {
        let s = PI * x.sinh();
        let t = if x >= 0.0 {
            b - len / (1.0 + s.exp())
        } else {
            a + len / (1.0 + (-s).exp())
        };
        if !(t > a && t < b) {
            return 0.0;
        }
        let weight = len * PI * x.cosh() / (2.0 + 2.0 * s.cosh());
        if weight == 0.0 {
            return 0.0;
        }
        f(t) * weight
    };
    integrate(g, -OPEN_WINDOW, OPEN_WINDOW, tol).map_err(|e| match e {
        NumericsError::Quadrature { estimate, .. } => NumericsError::Quadrature { a, b, estimate },
        NumericsError::NonFinite { at } => {
            let s = PI * at.sinh();
            NumericsError::NonFinite { at: a + len / (1.0 + (-s).exp()) }
        }
        other => other,
    })
}

/// Generalized inverse of an increasing `f` on `[lo, hi]` by bisection.
///
/// Returns the left-continuous inverse `inf { x : f(x) >= y }`, which for a
/// continuous `f` satisfies `|f(x) - y| <= tol.abs_tol`. Bisection runs until
/// the bracket can no longer shrink in double precision (or the iteration cap).
pub fn monotone_inverse<F: Fn(f64) -> f64>(
    f: F,
    y: f64,
    lo: f64,
    hi: f64,
    tol: Tolerance,
) -> Result<f64, NumericsError> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(y >= flo - tol.abs_tol && y <= fhi + tol.abs_tol) {
        return Err(NumericsError::Range { y, lo_value: flo, hi_value: fhi });
    }
    if y <= flo {
        return Ok(lo);
    }
    if y > fhi {
        return Ok(hi);
    }
    // ITP steps (interpolate, truncate towards the midpoint, project into a
    // shrinking ball around it): superlinear on smooth f, never worse than
    // bisection plus one step. The bracket keeps f(a) < y <= f(b) throughout,
    // so flat stretches still resolve to their left end.
    // Once the projection radius is exhausted at the scale of the bracket,
    // the schedule restarts at the new scale, so roots near 0 still converge
    // superlinearly to full relative precision.
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (flo - y, fhi - y);
    let schedule = |a: f64, b: f64| {
        let eps = 0.5 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        let n_max = ((b - a) / (2.0 * eps)).log2().ceil().max(0.0) as i32 + 1;
        (eps, n_max, 0.2 / (b - a))
    };
    let (mut eps, mut n_max, mut kappa) = schedule(a, b);
    let mut j = 0;
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let width = b - a;
        let mut radius = (eps * 2f64.powi(n_max - j) - 0.5 * width).max(0.0);
        if radius == 0.0 {
            (eps, n_max, kappa) = schedule(a, b);
            j = 0;
            radius = (eps * 2f64.powi(n_max) - 0.5 * width).max(0.0);
        }
        j += 1;
        let mut x = mid;
        if radius > 0.0 && gb > ga && ga.is_finite() && gb.is_finite() {
            let falsi = (gb * a - ga * b) / (gb - ga);
            let sigma = (mid - falsi).signum();
            let delta = kappa * width * width;
            let trunc = if delta <= (mid - falsi).abs() { falsi + sigma * delta } else { mid };
            x = if (trunc - mid).abs() <= radius { trunc } else { mid - sigma * radius };
            if !(x > a && x < b) {
                x = mid;
            }
        }
        let g = f(x) - y;
        if g < 0.0 {
            (a, ga) = (x, g);
        } else {
            (b, gb) = (x, g);
        }
    }
    Ok(b)
}

/// Grows `hi` geometrically from `start` until `f(hi) >= y`.
pub fn expand_bracket<F: Fn(f64) -> f64>(f: F, y: f64, start: f64) -> Option<f64> {
    let mut hi = start.max(f64::MIN_POSITIVE);
    for _ in 0..1100 {
        let v = f(hi);
        if v >= y {
            return Some(hi);
        }
        if v.is_nan() {
            return None;
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    None
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> f64 {
    (f(x + step) - f(x - step)) / (2.0 * step)
}

/// Central difference with one Richardson step, `(4 D(h/2) - D(h)) / 3`.
///
/// Fourth order, so a comparatively wide step keeps round-off small.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> f64 {
    let wide = derivative(&f, x, step);
    let narrow = derivative(&f, x, 0.5 * step);
    (4.0 * narrow - wide) / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Second-order one-sided difference.
pub fn one_sided_derivative<F: Fn(f64) -> f64>(f: F, x: f64, step: f64, side: Side) -> f64 {
    match side {
        Side::Right => (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step),
        Side::Left => (3.0 * f(x) - 4.0 * f(x - step) + f(x - 2.0 * step)) / (2.0 * step),
    }
}

/// Derivative restricted to `[lo, hi]`: central in the interior, one-sided
/// within a step of either edge.
pub fn derivative_within<F: Fn(f64) -> f64>(f: F, x: f64, step: f64, lo: f64, hi: f64) -> f64 {
    if x - step < lo {
        one_sided_derivative(f, x, step, Side::Right)
    } else if x + step > hi {
        one_sided_derivative(f, x, step, Side::Left)
    } else {
        derivative(f, x, step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneScan {
    pub trend: Trend,
    /// For [`Trend::Neither`]: the pair `(i, i + 1)` at which the sequence is
    /// known to have moved both ways.
    pub witness: Option<usize>,
}

impl MonotoneScan {
    /// Non-decreasing within tolerance (ties count).
    pub fn is_increasing(&self) -> bool {
        matches!(self.trend, Trend::Increasing | Trend::Constant)
    }

    pub fn is_decreasing(&self) -> bool {
        matches!(self.trend, Trend::Decreasing | Trend::Constant)
    }
}

/// Classifies a sequence as increasing, decreasing, constant or neither.
///
/// Each value is compared against the running extremum, not only its
/// neighbour, so a slow drift made of sub-tolerance steps is still caught.
pub fn monotone_scan(values: &[f64], tol: Tolerance) -> MonotoneScan {
    let mut first_drop = None;
    let mut first_rise = None;
    if let Some(&v0) = values.first() {
        let (mut run_max, mut run_min) = (v0, v0);
        for (j, &v) in values.iter().enumerate().skip(1) {
            if first_drop.is_none() && v < run_max - tol.threshold(v, run_max) {
                first_drop = Some(j);
            }
            if first_rise.is_none() && v > run_min + tol.threshold(v, run_min) {
                first_rise = Some(j);
            }
            run_max = run_max.max(v);
            run_min = run_min.min(v);
        }
    }
    match (first_drop, first_rise) {
        (None, None) => MonotoneScan { trend: Trend::Constant, witness: None },
        (None, Some(_)) => MonotoneScan { trend: Trend::Increasing, witness: None },
        (Some(_), None) => MonotoneScan { trend: Trend::Decreasing, witness: None },
        (Some(d), Some(r)) => MonotoneScan { trend: Trend::Neither, witness: Some(d.max(r) - 1) },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Nonnegative,
    Nonpositive,
    /// Every value is within tolerance of zero.
    Zero,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignScan {
    pub sign: Sign,
    pub first_negative: Option<usize>,
    pub first_positive: Option<usize>,
}

impl SignScan {
    pub fn is_nonnegative(&self) -> bool {
        matches!(self.sign, Sign::Nonnegative | Sign::Zero)
    }

    pub fn is_nonpositive(&self) -> bool {
        matches!(self.sign, Sign::Nonpositive | Sign::Zero)
    }

    /// For mixed sequences, the first value whose sign contradicts the
    /// first significant value.
    pub fn witness(&self) -> Option<usize> {
        match (self.first_negative, self.first_positive) {
            (Some(n), Some(p)) => Some(n.max(p)),
            _ => None,
        }
    }
}

pub fn sign_scan(values: &[f64], tol: Tolerance) -> SignScan {
    let first_negative = values.iter().position(|&v| v < -tol.abs_tol);
    let first_positive = values.iter().position(|&v| v > tol.abs_tol);
    let sign = match (first_negative, first_positive) {
        (None, None) => Sign::Zero,
        (None, Some(_)) => Sign::Nonnegative,
        (Some(_), None) => Sign::Nonpositive,
        (Some(_), Some(_)) => Sign::Mixed,
    };
    SignScan { sign, first_negative, first_positive }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Tolerance = Tolerance::QUADRATURE;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|t| t, 0.0, 1.0, Q).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        // hand antiderivative: 17/8 t - 25/16 t^2 + t^3/3 on [0,1] = 43/48
        let v = integrate(|t| (17.0 / 8.0 - t) * (1.0 - t), 0.0, 1.0, Q).unwrap();
        assert!((v - 43.0 / 48.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn exponential_ttt_integrand_is_flat() {
        let v = integrate(|t| (1.0 - t) * (1.0 / (1.0 - t)), 0.0, 0.3, Q).unwrap();
        assert!((v - 0.3).abs() < 1e-14);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|t| t, 0.4, 0.4, Q).unwrap(), 0.0);
    }

    #[test]
    fn open_quadrature_handles_log_singularity() {
        // ∫_0^1 -ln(1-t) dt = 1
        let v = integrate_open(|t| -(-t).ln_1p(), 0.0, 1.0, Q).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        // ∫_0^1 t^{-1/2} dt = 2
        let v = integrate_open(|t| 1.0 / t.sqrt(), 0.0, 1.0, Q).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn open_quadrature_tolerates_endpoint_rounding() {
        let tight = Tolerance::new(1e-13, 1e-13).unwrap();
        let v = integrate_open(|t| 1.0 / (1.0 - t).sqrt(), 0.0, 1.0, tight).unwrap();
        // abscissae near 1 are rounded, which caps the accuracy here
        assert!((v - 2.0).abs() < 1e-7, "{v}");
        let v = integrate_open(|t| -(-t).ln_1p(), 0.0, 1.0, tight).unwrap();
        assert!((v - 1.0).abs() < 1e-13, "{v}");
        let v = integrate_open(|t| t, 0.0, 1.0, tight).unwrap();
        assert!((v - 0.5).abs() < 1e-14, "{v}");
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|t| if t > 0.5 { f64::NAN } else { t }, 0.0, 1.0, Q).unwrap_err();
        assert!(matches!(err, NumericsError::NonFinite { .. }));
    }

    #[test]
    fn noisy_integrand_fails_with_estimate() {
        // sin(1/x) near 0 never settles at 1e-14
        let tol = Tolerance::new(1e-14, 1e-14).unwrap();
        match integrate(|x| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, tol) {
            Err(NumericsError::Quadrature { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn inverse_examples() {
        let id = monotone_inverse(|p| p, 0.7, 0.0, 1.0, Q).unwrap();
        assert!((id - 0.7).abs() < 1e-15);
        let r = monotone_inverse(|p| p.powi(5), 0.5, 0.0, 1.0, Q).unwrap();
        assert!((r - 0.5f64.powf(0.2)).abs() < 1e-14);
        let r = monotone_inverse(|x| 1.0 - (-x).exp(), 0.5, 0.0, 10.0, Q).unwrap();
        assert!((r - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn inverse_range_error() {
        let err = monotone_inverse(|p| p, 1.5, 0.0, 1.0, Q).unwrap_err();
        assert!(matches!(err, NumericsError::Range { .. }));
    }

    #[test]
    fn inverse_of_flat_function_is_left_continuous() {
        // zero on [0, 0.3], then linear
        let h = |p: f64| ((p - 0.3) / 0.7).max(0.0);
        assert_eq!(monotone_inverse(h, 0.0, 0.0, 1.0, Q).unwrap(), 0.0);
        let r = monotone_inverse(h, 0.5, 0.0, 1.0, Q).unwrap();
        assert!((r - 0.65).abs() < 1e-14);
    }

    #[test]
    fn derivative_examples() {
        assert!((derivative(|p| p * p, 0.5, 1e-3) - 1.0).abs() < 1e-12);
        assert!((derivative(|p| -(-p).ln_1p(), 0.5, 1e-5) - 2.0).abs() < 1e-9);
        let right = one_sided_derivative(|p| p * p, 1.0, 1e-3, Side::Right);
        let left = one_sided_derivative(|p| p * p, 1.0, 1e-3, Side::Left);
        assert!((right - 2.0).abs() < 1e-10 && (left - 2.0).abs() < 1e-10);
        // near the left edge the forward formula is used
        let d = derivative_within(|p: f64| p.sqrt(), 1e-9, 1e-6, 0.0, 1.0);
        assert!(d.is_finite());
        let r = richardson_derivative(|p: f64| -(-p).ln_1p(), 0.5, 1e-3);
        assert!((r - 2.0).abs() < 1e-10, "{r}");
    }

    #[test]
    fn monotone_scan_examples() {
        let t = Tolerance::SCAN;
        assert_eq!(monotone_scan(&[1.0, 1.0, 2.0, 3.0], t).trend, Trend::Increasing);
        assert_eq!(monotone_scan(&[3.0, 2.0, 2.0, 1.0], t).trend, Trend::Decreasing);
        assert_eq!(monotone_scan(&[2.0, 2.0, 2.0], t).trend, Trend::Constant);
        let s = monotone_scan(&[3.0, 2.0, 1.0, 2.0], t);
        assert_eq!(s, MonotoneScan { trend: Trend::Neither, witness: Some(2) });
    }

    #[test]
    fn monotone_scan_catches_slow_drift() {
        let v: Vec<f64> = (0..1000).map(|i| -(i as f64) * 5e-10).collect();
        assert_eq!(monotone_scan(&v, Tolerance::SCAN).trend, Trend::Decreasing);
    }

    #[test]
    fn convex_transform_ratio_turns_at_one_eighth() {
        let grid = Grid::unit();
        let s = grid.sample(|p| 1.0 / ((17.0 / 8.0 - p) * (15.0 / 8.0 + p)));
        let scan = monotone_scan(&s, Tolerance::SCAN);
        assert_eq!(scan.trend, Trend::Neither);
        let p = grid.points()[scan.witness.unwrap()];
        assert!((p - 0.125).abs() < 0.002, "{p}");
    }

    #[test]
    fn sign_scan_examples() {
        let t = Tolerance::SCAN;
        assert_eq!(sign_scan(&[0.0, 0.1, 0.2], t).sign, Sign::Nonnegative);
        assert_eq!(sign_scan(&[-0.1, 0.0, -0.2], t).sign, Sign::Nonpositive);
        assert_eq!(sign_scan(&[0.0, 1e-12], t).sign, Sign::Zero);
        let m = sign_scan(&[-1.0, -0.5, 0.5], t);
        assert_eq!(m.sign, Sign::Mixed);
        assert_eq!(m.witness(), Some(2));
    }

    #[test]
    fn grid_invariants() {
        let g = Grid::unit();
        assert_eq!(g.count(), 512);
        assert_eq!(g.points()[0], 1e-3);
        assert_eq!(g.points()[511], 1.0 - 1e-3);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert!(Grid::unit_with(8).is_err());
        assert!(Grid::from_points(vec![0.5; 20], 0.0, 1.0).is_err());
        assert!(Tolerance::new(0.0, 1e-9).is_err());
    }
}
