//! Exchangeable copulas: Durante generator copulas, Jaworski copulas with a
//! prescribed diagonal, and the named families that reduce to them.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcalc::{Expr, RealFn};
use crate::numerics::{monotone_scan, Grid, Tolerance};

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = 12;
/// Slack on endpoint and pointwise checks.
const POINT_TOL: f64 = 1e-12;
/// Per-unit slack on the diagonal Lipschitz bound.
const LIPSCHITZ_SLACK: f64 = 1e-9;
const SPOTCHECK_SEED: u64 = 0x5eed_c0b1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CopulaError {
    #[error("dimension {0} outside 2..={MAX_DIMENSION}")]
    Dimension(usize),
    #[error("{family} parameter {value} outside (0, 1)")]
    Parameter { family: &'static str, value: f64 },
    #[error("point has {got} coordinates, copula has dimension {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("coordinate {value} outside [0, 1]")]
    PointRange { value: f64 },
    #[error("generator: f(1) = {value}, expected 1")]
    GeneratorEndpoint { value: f64 },
    #[error("generator leaves [0, 1]: f({p}) = {value}")]
    GeneratorRange { p: f64, value: f64 },
    #[error("generator is not increasing near p = {p}")]
    GeneratorNotIncreasing { p: f64 },
    #[error("generator is not antistarshaped: f(p)/p increases near p = {p}")]
    GeneratorNotAntistarshaped { p: f64 },
    #[error("diagonal: d(1) = {value}, expected 1")]
    DiagonalEndpoint { value: f64 },
    #[error("diagonal exceeds the identity: d({p}) = {value}")]
    DiagonalAboveIdentity { p: f64, value: f64 },
    #[error("diagonal decreases near p = {p}")]
    DiagonalNotIncreasing { p: f64 },
    #[error("diagonal slope exceeds n = {n} near p = {p}")]
    DiagonalLipschitz { p: f64, n: usize },
    #[error("{what} is not finite at p = {p}")]
    NonFinite { what: &'static str, p: f64 },
}

fn check_dimension(n: usize) -> Result<(), CopulaError> {
    if (2..=MAX_DIMENSION).contains(&n) {
        Ok(())
    } else {
        Err(CopulaError::Dimension(n))
    }
}

fn with_endpoints(grid: &Grid) -> Vec<f64> {
    let mut pts = Vec::with_capacity(grid.count() + 2);
    pts.push(0.0);
    pts.extend_from_slice(grid.points());
    pts.push(1.0);
    pts
}

/// Generator `f` of a Durante copula `p_[1] ∏_{i≥2} f(p_[i])`.
#[derive(Clone, Debug)]
pub struct DuranteGenerator {
    f: RealFn,
    n: usize,
    label: String,
}

impl DuranteGenerator {
    /// Accepts `f` when `f(1) = 1`, `f` is increasing into [0, 1] and `f(p)/p`
    /// is decreasing, all checked on `grid` plus the endpoints.
    pub fn validate(f: RealFn, n: usize, grid: &Grid, label: impl Into<String>) -> Result<Self, CopulaError> {
        check_dimension(n)?;
        let one = f.eval(1.0);
        if !((one - 1.0).abs() <= POINT_TOL) {
            return Err(CopulaError::GeneratorEndpoint { value: one });
        }
        let pts = with_endpoints(grid);
        let values: Vec<f64> = pts.iter().map(|&p| f.eval(p)).collect();
        for (&p, &v) in pts.iter().zip(&values) {
            if !v.is_finite() {
                return Err(CopulaError::NonFinite { what: "generator", p });
            }
            if !(-POINT_TOL..=1.0 + POINT_TOL).contains(&v) {
                return Err(CopulaError::GeneratorRange { p, value: v });
            }
        }
        let scan = monotone_scan(&values, Tolerance::SCAN);
        if !scan.is_increasing() {
            return Err(CopulaError::GeneratorNotIncreasing { p: pts[scan.witness.unwrap_or(0)] });
        }
        let inner = &pts[1..];
        let ratio: Vec<f64> = inner.iter().zip(&values[1..]).map(|(&p, &v)| v / p).collect();
        let scan = monotone_scan(&ratio, Tolerance::SCAN);
        if !scan.is_decreasing() {
            return Err(CopulaError::GeneratorNotAntistarshaped { p: inner[scan.witness.unwrap_or(0)] });
        }
        Ok(DuranteGenerator { f, n, label: label.into() })
    }

    pub fn from_expr(f: Expr, n: usize, grid: &Grid) -> Result<Self, CopulaError> {
        let label = f.source().to_string();
        Self::validate(RealFn::from(f), n, grid, label)
    }

    pub fn f(&self, p: f64) -> f64 {
        self.f.eval(p)
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.f.expr()
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// An n-dimensional diagonal `𝔡`: `𝔡(1) = 1`, `𝔡(p) ≤ p`, and
/// `0 ≤ 𝔡(p₂) − 𝔡(p₁) ≤ n(p₂ − p₁)`.
#[derive(Clone, Debug)]
pub struct Diagonal {
    d: RealFn,
    n: usize,
    label: String,
}

impl Diagonal {
    pub fn validate(d: RealFn, n: usize, grid: &Grid, label: impl Into<String>) -> Result<Self, CopulaError> {
        check_dimension(n)?;
        let one = d.eval(1.0);
        if !((one - 1.0).abs() <= POINT_TOL) {
            return Err(CopulaError::DiagonalEndpoint { value: one });
        }
        let pts = with_endpoints(grid);
        let values: Vec<f64> = pts.iter().map(|&p| d.eval(p)).collect();
        for (&p, &v) in pts.iter().zip(&values) {
            if !v.is_finite() {
                return Err(CopulaError::NonFinite { what: "diagonal", p });
            }
            if v > p + POINT_TOL {
                return Err(CopulaError::DiagonalAboveIdentity { p, value: v });
            }
        }
        let slack = LIPSCHITZ_SLACK * n as f64;
        for i in 1..pts.len() {
            let rise = values[i] - values[i - 1];
            let run = pts[i] - pts[i - 1];
            if rise < -slack {
                return Err(CopulaError::DiagonalNotIncreasing { p: pts[i] });
            }
            if rise > n as f64 * run + slack {
                return Err(CopulaError::DiagonalLipschitz { p: pts[i], n });
            }
        }
        Ok(Diagonal { d, n, label: label.into() })
    }

    pub fn from_expr(d: Expr, n: usize, grid: &Grid) -> Result<Self, CopulaError> {
        let label = d.source().to_string();
        Self::validate(RealFn::from(d), n, grid, label)
    }

    pub fn d(&self, p: f64) -> f64 {
        self.d.eval(p)
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.d.expr()
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `f(u) = (n u − 𝔡(u)) / (n − 1)`.
    pub fn jaworski_f(&self, u: f64) -> f64 {
        let n = self.n as f64;
        (n * u - self.d(u)) / (n - 1.0)
    }

    /// The generic cyclic-permutation form
    /// `(1/n) Σᵢ min{f(p_τⁱ(1)), …, f(p_τⁱ(n−1)), 𝔡(p_τⁱ(n))}`
    /// with `τⁱ(k) = k + i mod n` (1-based, 0 read as n).
    pub fn eval(&self, point: &[f64]) -> f64 {
        let n = self.n;
        let fs: Vec<f64> = point.iter().map(|&p| self.jaworski_f(p)).collect();
        let ds: Vec<f64> = point.iter().map(|&p| self.d(p)).collect();
        let tau = |i: usize, k: usize| (k + i - 1) % n; // 0-based image of 1-based k
        let mut total = 0.0;
        for i in 1..=n {
            let mut m = ds[tau(i, n)];
            for k in 1..n {
                m = m.min(fs[tau(i, k)]);
            }
            total += m;
        }
        total / n as f64
    }
}

#[derive(Clone, Debug)]
pub enum CopulaHandle {
    Durante(DuranteGenerator),
    Jaworski(Diagonal),
    Product(usize),
    Comonotone(usize),
    /// Bivariate `min(p₁,p₂)^θ (p₁p₂)^{1−θ}`.
    CuadrasAuge(f64),
    /// Bivariate `γ p₁p₂ + (1−γ) min(p₁,p₂)`.
    Frechet(f64),
}

impl CopulaHandle {
    pub fn product(n: usize) -> Result<Self, CopulaError> {
        check_dimension(n)?;
        Ok(CopulaHandle::Product(n))
    }

    pub fn comonotone(n: usize) -> Result<Self, CopulaError> {
        check_dimension(n)?;
        Ok(CopulaHandle::Comonotone(n))
    }

    pub fn cuadras_auge(theta: f64) -> Result<Self, CopulaError> {
        if theta > 0.0 && theta < 1.0 {
            Ok(CopulaHandle::CuadrasAuge(theta))
        } else {
            Err(CopulaError::Parameter { family: "cuadras-auge", value: theta })
        }
    }

    pub fn frechet(gamma: f64) -> Result<Self, CopulaError> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(CopulaHandle::Frechet(gamma))
        } else {
            Err(CopulaError::Parameter { family: "frechet", value: gamma })
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            CopulaHandle::Durante(g) => g.n,
            CopulaHandle::Jaworski(d) => d.n,
            CopulaHandle::Product(n) | CopulaHandle::Comonotone(n) => *n,
            CopulaHandle::CuadrasAuge(_) | CopulaHandle::Frechet(_) => 2,
        }
    }

    /// The equivalent Durante generator, for families that have one:
    /// product (`f = p`), Cuadras–Augé (`f = p^{1−θ}`), Fréchet (`f = γp + 1 − γ`).
    pub fn as_durante(&self) -> Option<DuranteGenerator> {
        let (f, n, label) = match self {
            CopulaHandle::Durante(g) => return Some(g.clone()),
            CopulaHandle::Product(n) => (RealFn::native(|p| p), *n, "p".to_string()),
            CopulaHandle::CuadrasAuge(theta) => {
                let k = 1.0 - theta;
                (RealFn::native(move |p: f64| p.powf(k)), 2, format!("p^{k}"))
            }
            CopulaHandle::Frechet(gamma) => {
                let g = *gamma;
                (RealFn::native(move |p| g * p + (1.0 - g)), 2, format!("{g}*p + {}", 1.0 - g))
            }
            _ => return None,
        };
        Some(DuranteGenerator { f, n, label })
    }

    /// The comonotone copula has diagonal `𝔡(p) = p`.
    pub fn as_diagonal(&self) -> Option<Diagonal> {
        match self {
            CopulaHandle::Jaworski(d) => Some(d.clone()),
            CopulaHandle::Comonotone(n) => Some(Diagonal { d: RealFn::native(|p| p), n: *n, label: "p".into() }),
            _ => None,
        }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, CopulaError> {
        let n = self.dimension();
        if point.len() != n {
            return Err(CopulaError::PointLength { expected: n, got: point.len() });
        }
        if let Some(&value) = point.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CopulaError::PointRange { value });
        }
        Ok(self.eval_unchecked(point))
    }

    fn eval_unchecked(&self, point: &[f64]) -> f64 {
        match self {
            CopulaHandle::Durante(g) => durante_eval(g, point),
            CopulaHandle::Jaworski(d) => d.eval(point),
            CopulaHandle::Product(_) => point.iter().product(),
            CopulaHandle::Comonotone(_) => point.iter().copied().fold(1.0, f64::min),
            CopulaHandle::CuadrasAuge(theta) => {
                let m = point[0].min(point[1]);
                m.powf(*theta) * (point[0] * point[1]).powf(1.0 - theta)
            }
            CopulaHandle::Frechet(gamma) => {
                gamma * point[0] * point[1] + (1.0 - gamma) * point[0].min(point[1])
            }
        }
    }

    /// `C(p, …(i)…, p, 1, …, 1)` in closed form.
    pub fn boundary_section(&self, p: f64, i: usize) -> f64 {
        debug_assert!(i >= 1 && i <= self.dimension());
        match self {
            CopulaHandle::Durante(g) => p * g.f(p).powi(i as i32 - 1),
            CopulaHandle::Jaworski(d) => {
                let n = d.n as f64;
                ((n - i as f64) * d.jaworski_f(p) + i as f64 * d.d(p)) / n
            }
            CopulaHandle::Product(_) => p.powi(i as i32),
            CopulaHandle::Comonotone(_) => p,
            CopulaHandle::CuadrasAuge(theta) => {
                if i == 1 {
                    p
                } else {
                    p.powf(2.0 - theta)
                }
            }
            CopulaHandle::Frechet(gamma) => {
                if i == 1 {
                    p
                } else {
                    gamma * p * p + (1.0 - gamma) * p
                }
            }
        }
    }

    /// `C(p, …(i)…, p, 1, …, 1)` through the full copula formula.
    pub fn boundary_section_generic(&self, p: f64, i: usize) -> f64 {
        let n = self.dimension();
        let point: Vec<f64> = (0..n).map(|k| if k < i { p } else { 1.0 }).collect();
        self.eval_unchecked(&point)
    }

    /// Diagonal section `C(p, …, p)`.
    pub fn diagonal_section(&self, p: f64) -> f64 {
        self.boundary_section(p, self.dimension())
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CopulaHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CopulaHandle::Durante(g) => write!(f, "durante:f={},n={}", g.label, g.n),
            CopulaHandle::Jaworski(d) => write!(f, "diagonal:d={},n={}", d.label, d.n),
            CopulaHandle::Product(n) => write!(f, "product:{n}"),
            CopulaHandle::Comonotone(n) => write!(f, "comonotone:{n}"),
            CopulaHandle::CuadrasAuge(t) => write!(f, "cuadras-auge:theta={t}"),
            CopulaHandle::Frechet(g) => write!(f, "frechet:gamma={g}"),
        }
    }
}

/// `p_[1] ∏_{i≥2} f(p_[i])` with the coordinates sorted increasingly.
pub fn durante_eval(gen: &DuranteGenerator, point: &[f64]) -> f64 {
    let mut sorted = point.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[1..].iter().fold(sorted[0], |acc, &p| acc * gen.f(p))
}

/// Fredricks–Nelsen bivariate copula with diagonal `𝔡`:
/// `min{p₁, p₂, (𝔡(p₁) + 𝔡(p₂))/2}`.
pub fn fredricks_nelsen(d: &Diagonal, p1: f64, p2: f64) -> f64 {
    p1.min(p2).min(0.5 * (d.d(p1) + d.d(p2)))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub margins: bool,
    pub monotone: bool,
    pub symmetric: bool,
    /// Nonnegative rectangle volumes on the grid; bivariate copulas only.
    pub rectangles: Option<bool>,
    pub failures: Vec<String>,
}

impl SpotCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Numerical sanity of the copula axioms: uniform margins, monotonicity
/// along every coordinate, permutation symmetry at sampled points, and for
/// n = 2 the 2-increasing property on the grid.
pub fn copula_spotcheck(handle: &CopulaHandle, grid: &Grid) -> SpotCheck {
    let n = handle.dimension();
    let tol = 1e-12;
    let pts = with_endpoints(grid);
    let mut report = SpotCheck { margins: true, monotone: true, symmetric: true, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(SPOTCHECK_SEED);

    'margins: for axis in 0..n {
        for &p in &pts {
            let mut point = vec![1.0; n];
            point[axis] = p;
            let v = handle.eval_unchecked(&point);
            if (v - p).abs() > tol {
                report.margins = false;
                report.failures.push(format!("margin {axis}: C = {v} at p = {p}"));
                break 'margins;
            }
        }
    }

    'monotone: for _ in 0..8 {
        let base: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        for axis in 0..n {
            let mut prev = f64::NEG_INFINITY;
            for &p in &pts {
                let mut point = base.clone();
                point[axis] = p;
                let v = handle.eval_unchecked(&point);
                if v < prev - tol {
                    report.monotone = false;
                    report.failures.push(format!("not increasing along axis {axis} at {point:?}"));
                    break 'monotone;
                }
                prev = v;
            }
        }
    }

    'symmetric: for _ in 0..64 {
        let point: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let v = handle.eval_unchecked(&point);
        let mut shuffled = point.clone();
        shuffled.shuffle(&mut rng);
        let w = handle.eval_unchecked(&shuffled);
        if (v - w).abs() > tol {
            report.symmetric = false;
            report.failures.push(format!("asymmetric: {point:?} -> {v}, {shuffled:?} -> {w}"));
            break 'symmetric;
        }
    }

    if n == 2 {
        let mut ok = true;
        'rect: for i in 1..pts.len() {
            for j in 1..pts.len() {
                let (u0, u1, v0, v1) = (pts[i - 1], pts[i], pts[j - 1], pts[j]);
                let c = |a, b| handle.eval_unchecked(&[a, b]);
                let volume = c(u1, v1) - c(u0, v1) - c(u1, v0) + c(u0, v0);
                if volume < -tol {
                    ok = false;
                    report.failures.push(format!("negative volume {volume} on [{u0},{u1}]x[{v0},{v1}]"));
                    break 'rect;
                }
            }
        }
        report.rectangles = Some(ok);
    }
    report
}
