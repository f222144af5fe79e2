//! Lifetime distributions with the quantile function as the primitive.

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::distortions::Distortion;
use crate::funcalc::{Expr, RealFn};
use crate::numerics::{self, Grid, NumericsError, Tolerance};

/// Relative step of the quantile derivative, as a fraction of the distance
/// to the nearer endpoint of (0, 1).
const QUANTILE_STEP: f64 = 1e-3;
/// ψ must exceed this on the validation window; `exp(-40)` is far below
/// any probability the grid resolves.
const HAZARD_CEILING: f64 = 40.0;
/// The mean is reused as a reference value, so it is computed tighter than
/// the quadrature default.
const MEAN_TOL: Tolerance = Tolerance { abs_tol: 1e-13, rel_tol: 1e-13 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("quantile is not increasing: q({p}) = {value} is below an earlier value {previous}")]
    NotIncreasing { p: f64, value: f64, previous: f64 },
    #[error("quantile is negative: q({p}) = {value}")]
    Negative { p: f64, value: f64 },
    #[error("quantile is not finite at p = {p}")]
    NonFinite { p: f64 },
    #[error("hazard ψ is not increasing: ψ({x}) = {value} is below an earlier value {previous}")]
    HazardNotIncreasing { x: f64, value: f64, previous: f64 },
    #[error("hazard ψ is not finite at x = {x}")]
    HazardNonFinite { x: f64 },
    #[error("hazard ψ does not grow without bound")]
    HazardBounded,
    #[error("degenerate density at p = {p}: q'(p) = {derivative}")]
    DegenerateDensity { p: f64, derivative: f64 },
    #[error("the mean appears to be infinite (tail contributions stop shrinking)")]
    InfiniteMean,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How a distribution is specified.
#[derive(Clone, Debug)]
pub enum DistributionSpec {
    Exponential { rate: f64 },
    /// Quantile function in the variable `p`.
    Quantile(Expr),
    /// Cumulative hazard ψ with `F(x) = 1 - exp(-ψ(x))`, in the variable `x`.
    Hazard(Expr),
    Distorted { base: Box<DistributionSpec>, h: Distortion },
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Exponential { rate } => write!(f, "exp:{rate}"),
            DistributionSpec::Quantile(e) => write!(f, "q:{}", e.source()),
            DistributionSpec::Hazard(e) => write!(f, "hazard:{}", e.source()),
            DistributionSpec::Distorted { base, h } => write!(f, "distort({base}, h={})", h.label()),
        }
    }
}

enum Kind {
    Exponential(f64),
    Quantile(RealFn),
    Hazard(RealFn),
    Distorted { base: Distribution, h: Distortion, dual: Distortion },
}

struct Inner {
    kind: Kind,
    spec: DistributionSpec,
    support_low: f64,
    mean: OnceLock<Result<f64, DistributionError>>,
}

/// A non-negative lifetime, immutable after [`build`].
#[derive(Clone)]
pub struct Distribution {
    inner: Arc<Inner>,
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distribution").field("spec", &self.label()).field("support_low", &self.inner.support_low).finish()
    }
}

/// Builds and validates a distribution on the default grid.
pub fn build(spec: &DistributionSpec) -> Result<Distribution, DistributionError> {
    let kind = match spec {
        DistributionSpec::Exponential { rate } => {
            if !(rate.is_finite() && *rate > 0.0) {
                return Err(DistributionError::InvalidRate(*rate));
            }
            Kind::Exponential(*rate)
        }
        DistributionSpec::Quantile(e) => Kind::Quantile(e.clone().into()),
        DistributionSpec::Hazard(e) => {
            let psi: RealFn = e.clone().into();
            validate_hazard(&psi)?;
            Kind::Hazard(psi)
        }
        DistributionSpec::Distorted { base, h } => {
            let base = build(base)?;
            Kind::Distorted { base, h: h.clone(), dual: h.dual() }
        }
    };
    let mut dist = Distribution {
        inner: Arc::new(Inner { kind, spec: spec.clone(), support_low: 0.0, mean: OnceLock::new() }),
    };
    let low = dist.quantile(0.0);
    let support_low = if low.is_finite() { low } else { dist.quantile(1e-12) };
    validate_quantile(&dist)?;
    Arc::get_mut(&mut dist.inner).expect("freshly built").support_low = support_low.max(0.0);
    Ok(dist)
}

fn validate_quantile(d: &Distribution) -> Result<(), DistributionError> {
    let tol = Tolerance::SCAN;
    let mut running = f64::NEG_INFINITY;
    for &p in Grid::unit().points() {
        let v = d.quantile(p);
        if !v.is_finite() {
            return Err(DistributionError::NonFinite { p });
        }
        if v < -tol.abs_tol {
            return Err(DistributionError::Negative { p, value: v });
        }
        if v < running - tol.threshold(v, running) {
            return Err(DistributionError::NotIncreasing { p, value: v, previous: running });
        }
        running = running.max(v);
    }
    Ok(())
}

fn validate_hazard(psi: &RealFn) -> Result<(), DistributionError> {
    let top = numerics::expand_bracket(|x| psi.eval(x), HAZARD_CEILING, 1.0).ok_or(DistributionError::HazardBounded)?;
    let grid = Grid::uniform(0.0, top, Grid::DEFAULT_COUNT, top * 1e-6)?;
    let tol = Tolerance::SCAN;
    let mut running = f64::NEG_INFINITY;
    for &x in std::iter::once(&0.0).chain(grid.points()) {
        let v = psi.try_eval(x).map_err(|_| DistributionError::HazardNonFinite { x })?;
        if v < running - tol.threshold(v, running) {
            return Err(DistributionError::HazardNotIncreasing { x, value: v, previous: running });
        }
        running = running.max(v);
    }
    Ok(())
}

impl Distribution {
    pub fn spec(&self) -> &DistributionSpec {
        &self.inner.spec
    }

    pub fn label(&self) -> String {
        self.inner.spec.to_string()
    }

    /// `ψ⁻¹(target)`.
    fn hazard_quantile(&self, target: f64) -> f64 {
        let Kind::Hazard(psi) = &self.inner.kind else { unreachable!("hazard_quantile on a non-hazard distribution") };
        if target <= 0.0 {
            return 0.0;
        }
        if !target.is_finite() {
            return f64::INFINITY;
        }
        let f = |x: f64| psi.eval(x);
        match numerics::expand_bracket(f, target, 1.0) {
            Some(hi) => numerics::monotone_inverse(f, target, 0.0, hi, Tolerance::QUADRATURE).unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    /// `q(0+)`, the lower end of the support.
    pub fn support_low(&self) -> f64 {
        self.inner.support_low
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match &self.inner.kind {
            Kind::Exponential(rate) => -(-p).ln_1p() / rate,
            Kind::Quantile(q) => q.eval(p),
            Kind::Hazard(_) => self.hazard_quantile(-(-p).ln_1p()),
            // above 1/2 the complement 1 - p is exact, so go through the upper tail
            Kind::Distorted { .. } if p >= 0.5 => self.upper_quantile(1.0 - p),
            Kind::Distorted { base, h, .. } => base.quantile(inner_probability(h, p)),
        }
    }

    /// `q(1 - c)`, accurate for `c` far below the spacing of doubles near 1
    /// wherever the form allows: closed for the exponential and the hazard,
    /// through literal `1 - p` subterms for quantile expressions, and through
    /// `h⁻¹(c)` for distortions.
    pub fn upper_quantile(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return self.quantile(1.0);
        }
        match &self.inner.kind {
            Kind::Exponential(rate) => -c.ln() / rate,
            Kind::Quantile(q) => q.eval_complement(c),
            Kind::Hazard(_) => self.hazard_quantile(-c.ln()),
            Kind::Distorted { base, h, .. } => base.upper_quantile(upper_inner(h, c)),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.support_low() {
            return 0.0;
        }
        match &self.inner.kind {
            Kind::Exponential(rate) => -(-rate * x.max(0.0)).exp_m1(),
            Kind::Hazard(psi) => -(-psi.eval(x.max(0.0))).exp_m1(),
            Kind::Quantile(_) => self.invert_quantile(x),
            Kind::Distorted { base, dual, .. } => dual.eval(base.cdf(x)),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        match &self.inner.kind {
            Kind::Exponential(rate) => (-rate * x.max(0.0)).exp(),
            Kind::Hazard(psi) => (-psi.eval(x.max(0.0))).exp(),
            Kind::Quantile(_) => 1.0 - self.invert_quantile(x),
            Kind::Distorted { base, h, .. } => h.eval(base.survival(x)),
        }
    }

    fn invert_quantile(&self, x: f64) -> f64 {
        if x < self.support_low() {
            return 0.0;
        }
        let lo = if self.quantile(0.0).is_finite() { 0.0 } else { 1e-12 };
        let hi = if self.quantile(1.0).is_finite() { 1.0 } else { 1.0 - f64::EPSILON / 2.0 };
        if x >= self.quantile(hi) {
            return 1.0;
        }
        numerics::monotone_inverse(|p| self.quantile(p), x, lo, hi, Tolerance::QUADRATURE)
            .unwrap_or(f64::NAN)
            .clamp(0.0, 1.0)
    }

    /// `q'(p)`. Closed form for the exponential, chain rule through the
    /// distortion, Richardson-extrapolated differences otherwise.
    pub fn quantile_derivative(&self, p: f64) -> f64 {
        if p >= 0.5 {
            return self.upper_quantile_derivative(1.0 - p);
        }
        match &self.inner.kind {
            Kind::Exponential(rate) => 1.0 / (rate * (1.0 - p)),
            Kind::Distorted { base, h, .. } => {
                let u = inner_probability(h, p);
                base.quantile_derivative(u) / h.derivative(1.0 - u)
            }
            _ => {
                let step = QUANTILE_STEP * p.min(1.0 - p);
                numerics::richardson_derivative(|t| self.quantile(t), p, step)
            }
        }
    }

    /// `q'(1 - c)`, computed from the upper tail like [`Distribution::upper_quantile`].
    pub fn upper_quantile_derivative(&self, c: f64) -> f64 {
        match &self.inner.kind {
            Kind::Exponential(rate) => 1.0 / (rate * c),
            Kind::Distorted { base, h, .. } => {
                let t = upper_inner(h, c);
                base.upper_quantile_derivative(t) / h.derivative(t)
            }
            _ => {
                let step = QUANTILE_STEP * c.min(1.0 - c);
                -numerics::richardson_derivative(|t| self.upper_quantile(t), c, step)
            }
        }
    }

    /// `f(q(p)) = 1 / q'(p)`.
    pub fn density_at_quantile(&self, p: f64) -> Result<f64, DistributionError> {
        let d = self.quantile_derivative(p);
        if d.is_finite() && d > 0.0 {
            Ok(1.0 / d)
        } else {
            Err(DistributionError::DegenerateDensity { p, derivative: d })
        }
    }

    /// `∫₀¹ q(p) dp`, cached after the first call.
    pub fn mean(&self) -> Result<f64, DistributionError> {
        self.inner.mean.get_or_init(|| compute_mean(self)).clone()
    }

    pub fn has_finite_mean(&self) -> bool {
        self.mean().is_ok()
    }

    /// The divergence test behind [`Distribution::mean`] without the full
    /// integral; reuses the cached mean when there is one.
    pub fn check_finite_mean(&self) -> Result<(), DistributionError> {
        match self.inner.mean.get() {
            Some(m) => m.clone().map(|_| ()),
            None if matches!(self.inner.kind, Kind::Exponential(_)) => Ok(()),
            None if tail_stalls(self) => Err(DistributionError::InfiniteMean),
            None => Ok(()),
        }
    }

    /// The distribution of the lifetime with survival `h(F̄)`.
    pub fn distort(&self, h: &Distortion) -> Distribution {
        let spec = DistributionSpec::Distorted { base: Box::new(self.inner.spec.clone()), h: h.clone() };
        let kind = Kind::Distorted { base: self.clone(), h: h.clone(), dual: h.dual() };
        Distribution {
            inner: Arc::new(Inner { kind, spec, support_low: self.support_low(), mean: OnceLock::new() }),
        }
    }
}

/// `h*⁻¹(p)`, kept below 1 for `p < 1` so that an unbounded base quantile
/// stays finite where `h*⁻¹` rounds up to 1.
fn inner_probability(h: &Distortion, p: f64) -> f64 {
    let u = h.dual_inverse(p);
    if p < 1.0 {
        u.min(1.0 - f64::EPSILON / 2.0)
    } else {
        u
    }
}

/// `h⁻¹(c)`, kept above zero for `c > 0` so the base tail stays finite
/// where the inverse underflows.
fn upper_inner(h: &Distortion, c: f64) -> f64 {
    let t = h.inverse(c);
    if c > 0.0 {
        t.max(f64::MIN_POSITIVE)
    } else {
        t
    }
}

fn compute_mean(d: &Distribution) -> Result<f64, DistributionError> {
    if let Kind::Exponential(rate) = d.inner.kind {
        return Ok(1.0 / rate);
    }
    if tail_stalls(d) {
        return Err(DistributionError::InfiniteMean);
    }
    let lower = numerics::integrate_open(|p| d.quantile(p), 0.0, 0.5, MEAN_TOL)?;
    let upper = numerics::integrate_open(|c| d.upper_quantile(c), 0.0, 0.5, MEAN_TOL)?;
    Ok(lower + upper)
}

/// True when the integrals of `q(1 - c)` over `c ∈ [10^-(k+1), 10^-k]` stop
/// shrinking geometrically, the signature of a divergent mean.
fn tail_stalls(d: &Distribution) -> bool {
    let tails: Vec<f64> = (3..=6)
        .map(|k| {
            let (a, b) = (10f64.powi(-k - 1), 10f64.powi(-k));
            numerics::integrate(|c| d.upper_quantile(c), a, b, Tolerance::QUADRATURE).unwrap_or(f64::INFINITY)
        })
        .collect();
    tails.windows(2).rev().take(2).all(|w| !(w[1] < 0.9 * w[0]))
}
