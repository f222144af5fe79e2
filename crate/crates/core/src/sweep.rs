//! Randomized preservation trials.
//!
//! Each suite draws pairs ordered by construction and a distortion meeting
//! the suite's hypothesis, checks that the base pair is ordered, and checks
//! that the distorted pair still is.
//!
//! | suite | pairs | distortions |
//! |---|---|---|
//! | ttt | `q_Y = max(q_X, c q_Z)` or `c q_X + d q_Z`, c ≥ 1 | starshaped |
//! | ew | `q_Y = c q_X + d q_Z`, c ≥ 1 (dispersive) | antistarshaped, strictly increasing |
//! | dmrl | `q_Y = φ(q_X)`, φ convex with φ(0) = 0; scaled worked-example pair | antistarshaped, strictly increasing |
//! | qmit | `q_Y = φ(q_X)`; hazard worked-example pair against a scaled exponential | dual antistarshaped, strictly increasing |
//! | invariance | any of the above | any catalog distortion |

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{distortion_catalog, CatalogDistortion};
use crate::distributions::{build, Distribution};
use crate::error::Error;
use crate::fixtures::{CE01_PSI, CE02_X_QUANTILE, CE02_Y_QUANTILE};
use crate::forms::parse_distribution_spec;
use crate::numerics::{Grid, GridSpec, Tolerance};
use crate::orders::{check_order_with, OrderKind, Witness};

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Ttt,
    Ew,
    Dmrl,
    Qmit,
    Invariance,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Ttt, Suite::Ew, Suite::Dmrl, Suite::Qmit, Suite::Invariance];

    fn stream(self) -> u64 {
        self as u64
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ttt => "ttt",
            Suite::Ew => "ew",
            Suite::Dmrl => "dmrl",
            Suite::Qmit => "qmit",
            Suite::Invariance => "invariance",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown suite `{s}` (expected ttt, ew, dmrl, qmit or invariance)"))
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_trials() -> usize {
    200
}
fn default_grid_points() -> usize {
    256
}
fn default_margin() -> f64 {
    1e-8
}
fn default_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Violations smaller than this are ties.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: DEFAULT_SEED,
            trials: default_trials(),
            grid_points: default_grid_points(),
            margin: default_margin(),
            suites: default_suites(),
        }
    }
}

/// Everything needed to re-run a failing trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub order: OrderKind,
    pub x: String,
    pub y: String,
    pub h: String,
    pub stage: String,
    pub worst: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<TrialFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub grid: Option<GridSpec>,
    pub margin: f64,
    pub suites: Vec<SuiteSummary>,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures.is_empty())
    }
}

/// One randomly drawn trial.
#[derive(Clone, Debug)]
pub struct Trial {
    pub x: String,
    pub y: String,
    pub h: CatalogDistortion,
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Base quantile expressions in `p`, all with `q(0) = 0`.
fn family(rng: &mut ChaCha8Rng, allow_heavy: bool) -> String {
    let pick = rng.gen_range(0..if allow_heavy { 4 } else { 3 });
    match pick {
        0 => format!("-ln(1-p)/{}", round6(rng.gen_range(0.5..3.0))),
        1 => format!("p^{}", round6(rng.gen_range(0.5..3.0))),
        2 => format!("(-ln(1-p))^{}", round6(rng.gen_range(0.4..1.5))),
        _ => format!("(1-p)^(-{}) - 1", round6(rng.gen_range(0.15..0.4))),
    }
}

/// Convex increasing φ with φ(0) = 0, applied to the expression `q`.
fn convex_map(rng: &mut ChaCha8Rng, q: &str) -> String {
    match rng.gen_range(0..3) {
        0 => format!("({q})^{}", round6(rng.gen_range(1.0..2.0))),
        1 => format!("({q}) + {}*({q})^2", round6(rng.gen_range(0.0..2.0))),
        _ => format!("{}*({q})*(1 + ({q}))", round6(rng.gen_range(0.5..2.0))),
    }
}

fn draw_pair(suite: Suite, rng: &mut ChaCha8Rng) -> (String, String) {
    match suite {
        Suite::Ttt => {
            let x = family(rng, true);
            let z = family(rng, true);
            let c = round6(rng.gen_range(1.0..2.0));
            let y = if rng.gen_bool(0.5) {
                format!("max({x}, {c}*({z}))")
            } else {
                format!("{c}*({x}) + {}*({z})", round6(rng.gen_range(0.0..1.0)))
            };
            (format!("q:{x}"), format!("q:{y}"))
        }
        Suite::Ew => {
            let x = family(rng, false);
            let z = family(rng, false);
            let c = round6(rng.gen_range(1.0..2.0));
            (format!("q:{x}"), format!("q:{c}*({x}) + {}*({z})", round6(rng.gen_range(0.0..1.0))))
        }
        Suite::Dmrl => {
            if rng.gen_bool(0.25) {
                let (a, b) = (round6(rng.gen_range(0.5..2.0)), round6(rng.gen_range(0.5..2.0)));
                (format!("q:{a}*({CE02_X_QUANTILE})"), format!("q:{b}*({CE02_Y_QUANTILE})"))
            } else {
                let x = family(rng, false);
                let y = convex_map(rng, &x);
                (format!("q:{x}"), format!("q:{y}"))
            }
        }
        Suite::Qmit => {
            if rng.gen_bool(0.25) {
                (format!("hazard:{CE01_PSI}"), format!("exp:{}", round6(rng.gen_range(0.5..2.0))))
            } else {
                let x = family(rng, true);
                let y = convex_map(rng, &x);
                (format!("q:{x}"), format!("q:{y}"))
            }
        }
        Suite::Invariance => {
            let inner = *[Suite::Ttt, Suite::Ew, Suite::Dmrl, Suite::Qmit].choose(rng).expect("non-empty");
            draw_pair(inner, rng)
        }
    }
}

fn admissible(suite: Suite, h: &CatalogDistortion) -> bool {
    match suite {
        Suite::Ttt => h.is_starshaped(),
        Suite::Ew | Suite::Dmrl => h.is_antistarshaped_strict(),
        Suite::Qmit => h.is_dual_antistarshaped_strict(),
        Suite::Invariance => true,
    }
}

fn order_of(suite: Suite) -> &'static [OrderKind] {
    match suite {
        Suite::Ttt => &[OrderKind::Ttt],
        Suite::Ew => &[OrderKind::Ew],
        Suite::Dmrl => &[OrderKind::Dmrl],
        Suite::Qmit => &[OrderKind::Qmit],
        Suite::Invariance => &[OrderKind::ConvexTransform, OrderKind::Star],
    }
}

/// Draws `count` trials for a suite; deterministic in `(seed, suite)`.
pub fn draw_trials(suite: Suite, seed: u64, count: usize, grid: &Grid) -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    let pool: Vec<CatalogDistortion> = distortion_catalog(grid).into_iter().filter(|h| admissible(suite, h)).collect();
    (0..count)
        .map(|_| {
            let (x, y) = draw_pair(suite, &mut rng);
            let base = pool.choose(&mut rng).expect("every suite has admissible distortions");
            let h = if rng.gen_bool(0.3) { base.mixture(round6(rng.gen_range(0.05..0.95)), grid) } else { base.clone() };
            Trial { x, y, h }
        })
        .collect()
}

fn build_text(text: &str) -> Result<Distribution, Error> {
    Ok(build(&parse_distribution_spec(text)?)?)
}

/// Base points `u` and their images `h*(u)`, keeping only images inside
/// (0, 1) that strictly increase. A flat stretch of `h` maps a whole range
/// of `u` to an atom; those points are dropped from both grids so the two
/// verdicts cover the same quantile levels.
pub fn matched_grids(h: &CatalogDistortion, grid: &Grid) -> Option<(Grid, Grid)> {
    let dual = h.h.dual();
    let (mut base, mut image) = (Vec::with_capacity(grid.count()), Vec::with_capacity(grid.count()));
    for &u in grid.points() {
        let p = dual.eval(u);
        if p > 0.0 && p < 1.0 && image.last().is_none_or(|&last| p > last) {
            base.push(u);
            image.push(p);
        }
    }
    Some((Grid::from_points(base, 0.0, 1.0).ok()?, Grid::from_points(image, 0.0, 1.0).ok()?))
}

fn run_trial(suite: Suite, index: usize, trial: &Trial, grid: &Grid, tol: Tolerance) -> Result<Vec<TrialFailure>, Error> {
    let x = build_text(&trial.x)?;
    let y = build_text(&trial.y)?;
    let (xh, yh) = (x.distort(&trial.h.h), y.distort(&trial.h.h));
    let mut failures = Vec::new();
    let fail = |order, stage: &str, worst| TrialFailure {
        trial: index,
        order,
        x: trial.x.clone(),
        y: trial.y.clone(),
        h: trial.h.spec.clone(),
        stage: stage.to_string(),
        worst,
    };
    for &order in order_of(suite) {
        if suite == Suite::Invariance {
            let Some((base, matched)) = matched_grids(&trial.h, grid) else { continue };
            let before = check_order_with(&x, &y, order, &base, tol)?;
            let after = check_order_with(&xh, &yh, order, &matched, tol)?;
            if after.holds != before.holds {
                failures.push(fail(order, "verdict changed under distortion", after.worst().or(before.worst())));
            }
            continue;
        }
        let before = check_order_with(&x, &y, order, grid, tol)?;
        if !before.holds {
            failures.push(fail(order, "base pair not ordered", before.worst()));
            continue;
        }
        let after = check_order_with(&xh, &yh, order, grid, tol)?;
        if !after.holds {
            failures.push(fail(order, "order lost under distortion", after.worst()));
        }
    }
    Ok(failures)
}

pub fn run_suite(suite: Suite, config: &SweepConfig) -> Result<SuiteSummary, Error> {
    let grid = Grid::unit_with(config.grid_points)?;
    let tol = Tolerance::new(config.margin, 1e-12)?;
    let mut summary = SuiteSummary { suite, trials: config.trials, passed: 0, failures: Vec::new() };
    for (i, trial) in draw_trials(suite, config.seed, config.trials, &grid).iter().enumerate() {
        let failures = run_trial(suite, i, trial, &grid, tol)?;
        if failures.is_empty() {
            summary.passed += 1;
        }
        summary.failures.extend(failures);
    }
    Ok(summary)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepSummary, Error> {
    let grid = if config.trials > 0 { Some(Grid::unit_with(config.grid_points)?.spec()) } else { None };
    let suites = config.suites.iter().map(|&s| run_suite(s, config)).collect::<Result<Vec<_>, _>>()?;
    Ok(SweepSummary { seed: config.seed, grid, margin: config.margin, suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_deterministic() {
        let g = Grid::unit_with(64).unwrap();
        let a = draw_trials(Suite::Dmrl, 7, 5, &g);
        let b = draw_trials(Suite::Dmrl, 7, 5, &g);
        for (s, t) in a.iter().zip(&b) {
            assert_eq!((&s.x, &s.y, &s.h.spec), (&t.x, &t.y, &t.h.spec));
        }
        let c = draw_trials(Suite::Ew, 7, 5, &g);
        assert_ne!(a[0].x, c[0].x);
    }

    #[test]
    fn pools_respect_hypotheses() {
        let g = Grid::unit_with(128).unwrap();
        for suite in [Suite::Ttt, Suite::Ew, Suite::Dmrl, Suite::Qmit] {
            for t in draw_trials(suite, DEFAULT_SEED, 20, &g) {
                assert!(admissible(suite, &t.h), "{suite:?} {}", t.h.spec);
            }
        }
    }

    #[test]
    fn empty_sweep() {
        let s = run_sweep(&SweepConfig { trials: 0, ..Default::default() }).unwrap();
        assert!(s.all_passed());
        assert!(s.suites.iter().all(|s| s.trials == 0 && s.passed == 0));
    }

    #[test]
    fn small_sweep_passes() {
        let cfg = SweepConfig { trials: 4, grid_points: 64, ..Default::default() };
        let s = run_sweep(&cfg).unwrap();
        assert!(s.all_passed(), "{:#?}", s.suites.iter().flat_map(|s| &s.failures).collect::<Vec<_>>());
    }

    #[test]
    fn config_defaults() {
        let cfg: SweepConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, SweepConfig::default());
        assert_eq!(cfg.seed, 20240917);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"trails": 3}"#).is_err());
    }
}
