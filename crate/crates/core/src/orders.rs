//! Order transforms and order verdicts, computed in quantile space.
//!
//! With `q` the quantile function of X and `C(p) = ∫₀ᵖ q`:
//!
//! ```text
//! ttt(p) = ∫₀^{q(p)} F̄(x) dx = (1-p) q(p) + C(p)
//! ew(p)  = ∫_{q(p)}^∞ F̄(x) dx = (mean - C(p)) - (1-p) q(p)
//! mit(p) = ∫₀^{q(p)} F(x) dx  = p q(p) - C(p)
//! ```
//!
//! These are the integrated-by-parts forms of `∫(1-t)q'(t)dt` and
//! `∫t q'(t)dt`, so no derivative of `q` ever enters a quadrature.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{Distribution, DistributionError};
use crate::numerics::{self, monotone_scan, sign_scan, Grid, GridSpec, NumericsError, Side, Tolerance};

/// Tolerance of each piece of a cumulative quantile table.
const TABLE_TOL: Tolerance = Tolerance { abs_tol: 1e-18, rel_tol: 1e-12 };
/// Tolerance of the x-space qmit integral; `α'` carries finite-difference noise near 1e-11.
const XSPACE_TOL: Tolerance = Tolerance { abs_tol: 1e-10, rel_tol: 1e-9 };
/// Relative finite-difference step for `α'` in the x-space qmit integral.
const ALPHA_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrderError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("p = {0} is outside (0, 1)")]
    OutOfRange(f64),
    #[error("grid must lie inside (0, 1), got [{lo}, {hi}]")]
    GridBounds { lo: f64, hi: f64 },
    #[error("t = {t} must exceed the lower end of the support {support_low}")]
    BelowSupport { t: f64, support_low: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Ttt,
    Ew,
    Dmrl,
    Qmit,
    ConvexTransform,
    Star,
}

impl OrderKind {
    pub const ALL: [OrderKind; 6] =
        [OrderKind::Ttt, OrderKind::Ew, OrderKind::Dmrl, OrderKind::Qmit, OrderKind::ConvexTransform, OrderKind::Star];

    pub fn name(self) -> &'static str {
        match self {
            OrderKind::Ttt => "ttt",
            OrderKind::Ew => "ew",
            OrderKind::Dmrl => "dmrl",
            OrderKind::Qmit => "qmit",
            OrderKind::ConvexTransform => "convex_transform",
            OrderKind::Star => "star",
        }
    }

    /// Name of the functional compared on the grid.
    pub fn functional(self) -> &'static str {
        match self {
            OrderKind::Ttt => "ttt_y - ttt_x",
            OrderKind::Ew => "ew_y - ew_x",
            OrderKind::Dmrl => "ew_y / ew_x",
            OrderKind::Qmit => "mit_x / mit_y",
            OrderKind::ConvexTransform => "f_x(q_x) / f_y(q_y)",
            OrderKind::Star => "q_y / q_x",
        }
    }
}

impl std::fmt::Display for OrderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for OrderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ttt" => Ok(OrderKind::Ttt),
            "ew" | "excess_wealth" => Ok(OrderKind::Ew),
            "dmrl" => Ok(OrderKind::Dmrl),
            "qmit" => Ok(OrderKind::Qmit),
            "convex_transform" | "convex" | "c" => Ok(OrderKind::ConvexTransform),
            "star" => Ok(OrderKind::Star),
            other => Err(format!("unknown order `{other}`")),
        }
    }
}

/// A grid point where the order fails; `margin` is negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub p: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub value_x: f64,
    pub value_y: f64,
    pub functional: f64,
}

/// Sign check of an integral criterion equivalent to the ratio form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub functional: String,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    /// Whether the integral criterion and the ratio verdict agree.
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub kind: OrderKind,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub grid: GridSpec,
    pub tolerance: Tolerance,
    pub curve: Vec<CurvePoint>,
    /// Grid points dropped because the ratio was degenerate there.
    pub excluded: Vec<f64>,
    pub cross_check: Option<CrossCheck>,
}

impl OrderVerdict {
    /// The witness with the most negative margin.
    pub fn worst(&self) -> Option<Witness> {
        self.witnesses.iter().copied().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    /// Curve as CSV with header `p,value_x,value_y,functional`, 17 significant digits.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("p,value_x,value_y,functional\n");
        for c in &self.curve {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", c.p, c.value_x, c.value_y, c.functional);
        }
        out
    }
}

/// Quantiles on a grid together with `∫₀ᵖ q` at every grid point.
///
/// The running integral is accumulated panel by panel, so a whole curve of
/// transforms costs one pass over the grid.
#[derive(Clone, Debug)]
pub struct QuantileTable {
    points: Vec<f64>,
    quantiles: Vec<f64>,
    head: Option<Vec<f64>>,
    ew: Option<Vec<f64>>,
    mit: Option<Vec<f64>>,
}

/// Which transforms [`QuantileTable::build_for`] tabulates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tabulate {
    pub ttt: bool,
    pub ew: bool,
    pub mit: bool,
}

impl Tabulate {
    pub const ALL: Tabulate = Tabulate { ttt: true, ew: true, mit: true };
}

impl QuantileTable {
    pub fn build(x: &Distribution, points: &[f64]) -> Result<Self, OrderError> {
        Self::build_for(x, points, Tabulate::ALL)
    }

    /// Panels are accumulated so that every term is nonnegative: ew and mit
    /// stay accurate where they are many orders below the mean.
    pub fn build_for(x: &Distribution, points: &[f64], what: Tabulate) -> Result<Self, OrderError> {
        check_points(points)?;
        let q = |p: f64| x.quantile(p);
        let quantiles: Vec<f64> = points.iter().map(|&p| q(p)).collect();
        let n = points.len();
        let head = if what.ttt {
            let mut acc = numerics::integrate_open(q, 0.0, points[0], TABLE_TOL)?;
            let mut head = vec![acc];
            for w in points.windows(2) {
                acc += numerics::integrate(q, w[0], w[1], TABLE_TOL)?;
                head.push(acc);
            }
            Some(head)
        } else {
            None
        };
        let mit = if what.mit {
            let mut acc = numerics::integrate_open(|s| quantiles[0] - q(s), 0.0, points[0], TABLE_TOL)?;
            let mut mit = vec![acc];
            for i in 0..n - 1 {
                let qn = quantiles[i + 1];
                acc += points[i] * (qn - quantiles[i])
                    + numerics::integrate(|s| qn - q(s), points[i], points[i + 1], TABLE_TOL)?;
                mit.push(acc);
            }
            Some(mit)
        } else {
            None
        };
        let ew = if what.ew {
            x.check_finite_mean()?;
            // the last stretch runs in the complement c = 1 - s, which resolves the tail
            let last = quantiles[n - 1];
            let mut acc = numerics::integrate_open(|c| x.upper_quantile(c) - last, 0.0, 1.0 - points[n - 1], TABLE_TOL)?;
            let mut ew = vec![0.0; n];
            ew[n - 1] = acc;
            for i in (0..n - 1).rev() {
                let qi = quantiles[i];
                acc += (1.0 - points[i + 1]) * (quantiles[i + 1] - qi)
                    + numerics::integrate(|s| q(s) - qi, points[i], points[i + 1], TABLE_TOL)?;
                ew[i] = acc;
            }
            Some(ew)
        } else {
            None
        };
        Ok(QuantileTable { points: points.to_vec(), quantiles, head, ew, mit })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn quantile(&self, i: usize) -> f64 {
        self.quantiles[i]
    }

    /// Panics if the table was built without ttt.
    pub fn ttt(&self, i: usize) -> f64 {
        let head = self.head.as_ref().expect("table built without ttt");
        (1.0 - self.points[i]) * self.quantiles[i] + head[i]
    }

    /// Panics if the table was built without ew.
    pub fn ew(&self, i: usize) -> f64 {
        self.ew.as_ref().expect("table built without ew")[i]
    }

    /// Panics if the table was built without mit.
    pub fn mit(&self, i: usize) -> f64 {
        self.mit.as_ref().expect("table built without mit")[i]
    }
}

fn check_points(points: &[f64]) -> Result<(), OrderError> {
    match (points.first(), points.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 && hi < 1.0 => Ok(()),
        (Some(&lo), Some(&hi)) => Err(OrderError::GridBounds { lo, hi }),
        _ => Err(OrderError::GridBounds { lo: f64::NAN, hi: f64::NAN }),
    }
}

fn check_p(p: f64) -> Result<(), OrderError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(OrderError::OutOfRange(p))
    }
}

/// `∫₀ᵖ q`.
fn head_integral(x: &Distribution, p: f64) -> Result<f64, OrderError> {
    Ok(numerics::integrate_open(|t| x.quantile(t), 0.0, p, TABLE_TOL)?)
}

/// Total time on test transform `∫₀^{q(p)} F̄(x) dx`.
pub fn ttt_transform(x: &Distribution, p: f64) -> Result<f64, OrderError> {
    check_p(p)?;
    Ok((1.0 - p) * x.quantile(p) + head_integral(x, p)?)
}

/// Excess wealth transform `∫_{q(p)}^∞ F̄(x) dx`.
pub fn excess_wealth(x: &Distribution, p: f64) -> Result<f64, OrderError> {
    check_p(p)?;
    x.check_finite_mean()?;
    let qp = x.quantile(p);
    Ok(numerics::integrate_open(|c| x.upper_quantile(c) - qp, 0.0, 1.0 - p, TABLE_TOL)?)
}

/// Quantile mean inactivity transform `∫₀^{q(p)} F(x) dx`.
pub fn mit_transform(x: &Distribution, p: f64) -> Result<f64, OrderError> {
    check_p(p)?;
    let qp = x.quantile(p);
    Ok(numerics::integrate_open(|t| qp - x.quantile(t), 0.0, p, TABLE_TOL)?)
}

/// `q_Y'(p) / q_X'(p)`, which is `f(F⁻¹(p)) / g(G⁻¹(p))`.
fn derivative_ratio(x: &Distribution, y: &Distribution, p: f64) -> f64 {
    y.quantile_derivative(p) / x.quantile_derivative(p)
}

/// The dmrl integral `I(p) = ∫_p^1 (1-t)[q_Y'(t) - r(p) q_X'(t)] dt` with
/// `r(p) = q_Y'(p)/q_X'(p)`, evaluated as `ew_Y(p) - r(p) ew_X(p)`.
/// X ≤_dmrl Y iff it is nonnegative on (0, 1).
pub fn dmrl_integral(x: &Distribution, y: &Distribution, p: f64) -> Result<f64, OrderError> {
    Ok(excess_wealth(y, p)? - derivative_ratio(x, y, p) * excess_wealth(x, p)?)
}

/// [`dmrl_integral`] over a grid, from cumulative tables.
pub fn dmrl_integral_curve(x: &Distribution, y: &Distribution, grid: &Grid) -> Result<Vec<f64>, OrderError> {
    let (tx, ty) = tables(x, y, grid, Tabulate { ew: true, ..Default::default() })?;
    Ok((0..grid.count()).map(|i| ty.ew(i) - derivative_ratio(x, y, grid.points()[i]) * tx.ew(i)).collect())
}

/// Quantile-space qmit criterion `J(p) = r(p) mit_X(p) - mit_Y(p)`;
/// X ≤_qmit Y iff it is nonnegative on (0, 1).
pub fn qmit_integral(x: &Distribution, y: &Distribution, p: f64) -> Result<f64, OrderError> {
    Ok(derivative_ratio(x, y, p) * mit_transform(x, p)? - mit_transform(y, p)?)
}

/// [`qmit_integral`] over a grid, from cumulative tables.
pub fn qmit_integral_curve(x: &Distribution, y: &Distribution, grid: &Grid) -> Result<Vec<f64>, OrderError> {
    let (tx, ty) = tables(x, y, grid, Tabulate { mit: true, ..Default::default() })?;
    Ok((0..grid.count()).map(|i| derivative_ratio(x, y, grid.points()[i]) * tx.mit(i) - ty.mit(i)).collect())
}

/// The x-space qmit integral `Î(t) = ∫₀ᵗ [α'(t) - α'(x)] F(x) dx` with
/// `α = G⁻¹∘F`, evaluated directly with finite-difference `α'`.
pub fn qmit_xspace_integral(x: &Distribution, y: &Distribution, t: f64) -> Result<f64, OrderError> {
    let lo = x.support_low();
    if !(t > lo) {
        return Err(OrderError::BelowSupport { t, support_low: lo });
    }
    let alpha = |s: f64| y.quantile(x.cdf(s));
    let alpha_prime = |s: f64| {
        let step = ALPHA_STEP * s.abs().max(1e-2);
        if s - step <= lo {
            numerics::one_sided_derivative(alpha, s, step, Side::Right)
        } else {
            numerics::richardson_derivative(alpha, s, step)
        }
    };
    let at_t = alpha_prime(t);
    let integrand = |s: f64| (at_t - alpha_prime(s)) * x.cdf(s);
    Ok(numerics::integrate(integrand, lo, t, XSPACE_TOL)?)
}

/// `Î(t)` through the quantile-space identity `Î(t) = J(F(t))`.
pub fn qmit_xspace_cross_check(x: &Distribution, y: &Distribution, t: f64) -> Result<f64, OrderError> {
    qmit_integral(x, y, x.cdf(t))
}

/// Two-parameter form of the dmrl criterion on a triangular grid:
/// `ew_Y(q) q_X'(p) - ew_X(q) q_Y'(p) >= 0` for all `p <= q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointScan {
    pub size: usize,
    pub pairs: usize,
    pub violations: usize,
    /// `(p, q, value)` at the most negative value.
    pub worst: Option<(f64, f64, f64)>,
}

impl TwoPointScan {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub fn dmrl_two_point_scan(x: &Distribution, y: &Distribution, size: usize, tol: Tolerance) -> Result<TwoPointScan, OrderError> {
    let grid = Grid::unit_with(size.max(Grid::MIN_POINTS))?;
    let (tx, ty) = tables(x, y, &grid, Tabulate { ew: true, ..Default::default() })?;
    let pts = grid.points();
    let dx: Vec<f64> = pts.iter().map(|&p| x.quantile_derivative(p)).collect();
    let dy: Vec<f64> = pts.iter().map(|&p| y.quantile_derivative(p)).collect();
    let mut scan = TwoPointScan { size: pts.len(), pairs: 0, violations: 0, worst: None };
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let (ex, ey) = (tx.ew(j), ty.ew(j));
            // normalise by q_X'(p) q_Y'(p) so the tolerance is on the ratio scale
            let v = (ey * dx[i] - ex * dy[i]) / (dx[i] * dy[i]);
            scan.pairs += 1;
            if v < -tol.abs_tol {
                scan.violations += 1;
            }
            if scan.worst.is_none_or(|(_, _, w)| v < w) {
                scan.worst = Some((pts[i], pts[j], v));
            }
        }
    }
    Ok(scan)
}

fn tables(x: &Distribution, y: &Distribution, grid: &Grid, what: Tabulate) -> Result<(QuantileTable, QuantileTable), OrderError> {
    Ok((QuantileTable::build_for(x, grid.points(), what)?, QuantileTable::build_for(y, grid.points(), what)?))
}

pub fn check_order(x: &Distribution, y: &Distribution, kind: OrderKind, grid: &Grid) -> Result<OrderVerdict, OrderError> {
    check_order_with(x, y, kind, grid, Tolerance::SCAN)
}

pub fn check_order_with(
    x: &Distribution,
    y: &Distribution,
    kind: OrderKind,
    grid: &Grid,
    tol: Tolerance,
) -> Result<OrderVerdict, OrderError> {
    let pts = grid.points();
    check_points(pts)?;
    let mut verdict = OrderVerdict {
        kind,
        holds: true,
        witnesses: Vec::new(),
        grid: grid.spec(),
        tolerance: tol,
        curve: Vec::with_capacity(pts.len()),
        excluded: Vec::new(),
        cross_check: None,
    };
    match kind {
        OrderKind::Ttt | OrderKind::Ew => {
            let what = Tabulate { ttt: kind == OrderKind::Ttt, ew: kind == OrderKind::Ew, mit: false };
            let (tx, ty) = tables(x, y, grid, what)?;
            for (i, &p) in pts.iter().enumerate() {
                let (vx, vy) = if kind == OrderKind::Ttt { (tx.ttt(i), ty.ttt(i)) } else { (tx.ew(i), ty.ew(i)) };
                let margin = vy - vx;
                if margin < -tol.threshold(vx, vy) {
                    verdict.witnesses.push(Witness { p, margin });
                }
                verdict.curve.push(CurvePoint { p, value_x: vx, value_y: vy, functional: margin });
            }
        }
        OrderKind::Dmrl | OrderKind::Qmit => {
            let what = Tabulate { ew: kind == OrderKind::Dmrl, mit: kind == OrderKind::Qmit, ttt: false };
            let (tx, ty) = tables(x, y, grid, what)?;
            let mut integral = Vec::with_capacity(pts.len());
            let mut noise = Vec::with_capacity(pts.len());
            for (i, &p) in pts.iter().enumerate() {
                let r = derivative_ratio(x, y, p);
                let (vx, vy, ratio, crit) = if kind == OrderKind::Dmrl {
                    let (ex, ey) = (tx.ew(i), ty.ew(i));
                    (ex, ey, ey / ex, ey - r * ex)
                } else {
                    let (mx, my) = (tx.mit(i), ty.mit(i));
                    (mx, my, mx / my, r * mx - my)
                };
                let width = if kind == OrderKind::Dmrl { 1.0 - p } else { p };
                let (ux, uy) = (rounding(tx.quantile(i), width, vx), rounding(ty.quantile(i), width, vy));
                noise.push(ratio.abs() * (ux + uy));
                verdict.curve.push(CurvePoint { p, value_x: vx, value_y: vy, functional: ratio });
                integral.push((p, crit));
            }
            let increasing = kind == OrderKind::Dmrl;
            ratio_witnesses(&mut verdict, increasing, tol, Some(&noise));
            let scan = sign_scan(&integral.iter().map(|c| c.1).collect::<Vec<_>>(), tol);
            let witnesses: Vec<Witness> =
                integral.iter().filter(|c| c.1 < -tol.abs_tol).map(|&(p, v)| Witness { p, margin: v }).collect();
            verdict.cross_check = Some(CrossCheck {
                functional: if increasing { "I(p)" } else { "J(p)" }.to_string(),
                holds: scan.is_nonnegative(),
                witnesses,
                agrees: false,
            });
        }
        OrderKind::ConvexTransform => {
            for &p in pts {
                let (fx, fy) = (x.density_at_quantile(p), y.density_at_quantile(p));
                let (vx, vy) = (fx.unwrap_or(f64::NAN), fy.unwrap_or(f64::NAN));
                verdict.curve.push(CurvePoint { p, value_x: vx, value_y: vy, functional: vx / vy });
            }
            ratio_witnesses(&mut verdict, true, tol, None);
        }
        OrderKind::Star => {
            for &p in pts {
                let (qx, qy) = (x.quantile(p), y.quantile(p));
                verdict.curve.push(CurvePoint { p, value_x: qx, value_y: qy, functional: qy / qx });
            }
            ratio_witnesses(&mut verdict, true, tol, None);
        }
    }
    verdict.holds = verdict.witnesses.is_empty();
    if let Some(cc) = verdict.cross_check.as_mut() {
        cc.agrees = cc.holds == verdict.holds;
    }
    Ok(verdict)
}

/// Relative rounding error of `ew` or `mit` at a point: both integrate
/// `|q(s) - q(p)|` over a stretch of length `width`, and each difference
/// carries about `ε |q(p)|` of absolute error. Matters only where the
/// transform is many orders below `|q(p)| width`, e.g. near a bounded
/// upper end after a strong distortion.
fn rounding(q: f64, width: f64, value: f64) -> f64 {
    4.0 * f64::EPSILON * q.abs() * width / value.abs()
}

/// Fills `witnesses` and `excluded` from the ratio column of the curve.
///
/// A point is a witness when it falls below the running maximum (or rises
/// above the running minimum) by more than the tolerance plus the rounding
/// noise of both values; its margin is the signed distance to that extremum.
fn ratio_witnesses(verdict: &mut OrderVerdict, increasing: bool, tol: Tolerance, noise: Option<&[f64]>) {
    let mut kept = Vec::with_capacity(verdict.curve.len());
    for (i, c) in verdict.curve.iter().enumerate() {
        let n = noise.map_or(0.0, |n| n[i]);
        if c.functional.is_finite() && n.is_finite() {
            kept.push((c.p, c.functional, n));
        } else {
            verdict.excluded.push(c.p);
        }
    }
    let Some(&(_, first, first_noise)) = kept.first() else { return };
    let (mut extremum, mut extremum_noise) = (first, first_noise);
    for &(p, v, n) in &kept[1..] {
        let margin = if increasing { v - extremum } else { extremum - v };
        if margin < -(tol.threshold(v, extremum) + n + extremum_noise) {
            verdict.witnesses.push(Witness { p, margin });
        }
        let better = if increasing { v > extremum } else { v < extremum };
        if better {
            (extremum, extremum_noise) = (v, n);
        }
    }
    if noise.is_none() {
        debug_assert_eq!(
            verdict.witnesses.is_empty(),
            {
                let values: Vec<f64> = kept.iter().map(|k| k.1).collect();
                let scan = monotone_scan(&values, tol);
                if increasing { scan.is_increasing() } else { scan.is_decreasing() }
            }
        );
    }
}

/// All six verdicts plus alarms for broken implications
/// `c ⟹ dmrl`, `c ⟹ qmit` and `qmit ⟹ star`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub holds: Vec<(OrderKind, bool)>,
    pub alarms: Vec<String>,
}

impl ImplicationReport {
    pub fn holds(&self, kind: OrderKind) -> bool {
        self.holds.iter().any(|&(k, h)| k == kind && h)
    }

    pub fn consistent(&self) -> bool {
        self.alarms.is_empty()
    }
}

pub fn order_implication_check(x: &Distribution, y: &Distribution, grid: &Grid) -> Result<ImplicationReport, OrderError> {
    let mut holds = Vec::with_capacity(OrderKind::ALL.len());
    for kind in OrderKind::ALL {
        holds.push((kind, check_order(x, y, kind, grid)?.holds));
    }
    let mut report = ImplicationReport { holds, alarms: Vec::new() };
    let chains = [
        (OrderKind::ConvexTransform, OrderKind::Dmrl),
        (OrderKind::ConvexTransform, OrderKind::Qmit),
        (OrderKind::Qmit, OrderKind::Star),
    ];
    for (premise, conclusion) in chains {
        if report.holds(premise) && !report.holds(conclusion) {
            report.alarms.push(format!("{premise} holds but {conclusion} does not"));
        }
    }
    Ok(report)
}
