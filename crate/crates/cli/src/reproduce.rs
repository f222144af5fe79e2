//! Hard-coded worked examples and the curves plotted for them.

use clap::ValueEnum;
use distorder::distributions::build;
use distorder::fixtures::*;
use distorder::forms::parse_distortion;
use distorder::orders::{dmrl_integral, dmrl_integral_curve, qmit_xspace_integral};
use distorder::systems::{classify_system, system_distortion, SystemClassification, SystemDistortion};
use distorder::{Distribution, DistributionSpec, Error, Expr, Grid, MinimalSignature};
use serde::Serialize;
use serde_json::json;

use crate::output::{curve_csv, describe_grid, Artifact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ReproTarget {
    #[value(name = "ce02")]
    #[serde(rename = "ce02")]
    Ce02,
    #[value(name = "ce01")]
    #[serde(rename = "ce01")]
    Ce01,
    #[value(name = "ex_durante_1")]
    #[serde(rename = "ex_durante_1")]
    ExDurante1,
    #[value(name = "ex_durante_2")]
    #[serde(rename = "ex_durante_2")]
    ExDurante2,
    #[value(name = "ex_diag_5comp")]
    #[serde(rename = "ex_diag_5comp")]
    ExDiag5comp,
    #[value(name = "ex_3of4")]
    #[serde(rename = "ex_3of4")]
    Ex3of4,
    #[value(name = "ex_qmit")]
    #[serde(rename = "ex_qmit")]
    ExQmit,
}

impl ReproTarget {
    pub const ALL: [ReproTarget; 7] = [
        ReproTarget::Ce02,
        ReproTarget::Ce01,
        ReproTarget::ExDurante1,
        ReproTarget::ExDurante2,
        ReproTarget::ExDiag5comp,
        ReproTarget::Ex3of4,
        ReproTarget::ExQmit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReproTarget::Ce02 => "ce02",
            ReproTarget::Ce01 => "ce01",
            ReproTarget::ExDurante1 => "ex_durante_1",
            ReproTarget::ExDurante2 => "ex_durante_2",
            ReproTarget::ExDiag5comp => "ex_diag_5comp",
            ReproTarget::Ex3of4 => "ex_3of4",
            ReproTarget::ExQmit => "ex_qmit",
        }
    }

    /// Signature and copula of the worked system examples.
    pub fn system(self) -> Option<(&'static str, String)> {
        let durante = || format!("durante:f={DURANTE_GENERATOR},n=4");
        match self {
            ReproTarget::ExDurante1 => Some((EX_DURANTE_1_SIGNATURE, durante())),
            ReproTarget::ExDurante2 => Some((EX_DURANTE_2_SIGNATURE, durante())),
            ReproTarget::ExDiag5comp => Some((EX_DIAG_5COMP_SIGNATURE, format!("diagonal:d={EX_DIAG_5COMP_DIAGONAL},n=5"))),
            ReproTarget::Ex3of4 => Some((EX_3OF4_SIGNATURE, format!("diagonal:d={EX_3OF4_DIAGONAL},n=4"))),
            ReproTarget::ExQmit => Some((EX_QMIT_SIGNATURE, format!("diagonal:d={EX_QMIT_DIAGONAL},n=4"))),
            ReproTarget::Ce02 | ReproTarget::Ce01 => None,
        }
    }
}

fn quantile(text: &str) -> Result<Distribution, Error> {
    Ok(build(&DistributionSpec::Quantile(Expr::parse(text)?))?)
}

/// The dmrl counterexample: X, Y and their images under `p^5`.
pub struct Ce02 {
    pub x: Distribution,
    pub y: Distribution,
    pub xh: Distribution,
    pub yh: Distribution,
}

impl Ce02 {
    pub fn new() -> Result<Self, Error> {
        let (x, y) = (quantile(CE02_X_QUANTILE)?, quantile(CE02_Y_QUANTILE)?);
        let h = parse_distortion(CE02_H)?;
        Ok(Ce02 { xh: x.distort(&h), yh: y.distort(&h), x, y })
    }

    /// `s(p) = q_Y'(p) / q_X'(p)`.
    pub fn s(&self, p: f64) -> f64 {
        self.y.quantile_derivative(p) / self.x.quantile_derivative(p)
    }

    /// Bisection for the zero of `I_h` inside a sign-changing bracket.
    pub fn sign_change(&self, mut lo: f64, mut hi: f64) -> Result<f64, Error> {
        let mut f_lo = dmrl_integral(&self.xh, &self.yh, lo)?;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let f = dmrl_integral(&self.xh, &self.yh, mid)?;
            if (f < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = f;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// The qmit counterexample: X with cumulative hazard ψ, Y exponential(1),
/// both distorted by `1 − (1−p)^5`.
pub struct Ce01 {
    pub xh: Distribution,
    pub yh: Distribution,
}

impl Ce01 {
    pub fn new() -> Result<Self, Error> {
        let x = build(&DistributionSpec::Hazard(Expr::parse_in(CE01_PSI, "x")?))?;
        let y = build(&DistributionSpec::Exponential { rate: 1.0 })?;
        let h = parse_distortion(CE01_H)?;
        Ok(Ce01 { xh: x.distort(&h), yh: y.distort(&h) })
    }

    pub fn i_hat(&self, t: f64) -> Result<f64, Error> {
        Ok(qmit_xspace_integral(&self.xh, &self.yh, t)?)
    }
}

/// `t = k/200` for `k = 1..=400`, covering (0, 2].
pub fn ce01_points() -> Vec<f64> {
    (1..=400).map(|k| k as f64 / 200.0).collect()
}

pub fn system_of(target: ReproTarget, grid: &Grid) -> Result<Option<SystemDistortion>, Error> {
    let Some((sig, copula)) = target.system() else { return Ok(None) };
    let sig = MinimalSignature::parse(sig)?;
    let copula = distorder::forms::parse_copula(&copula, Some(sig.len()), grid)?;
    Ok(Some(system_distortion(&sig, &copula)?))
}

/// Î_h values above this are rounding noise rather than failures.
pub const NEGATIVE: f64 = 1e-10;

pub struct Reproduction {
    pub target: ReproTarget,
    pub summary: serde_json::Value,
    pub artifacts: Vec<Artifact>,
}

pub fn reproduce(target: ReproTarget) -> Result<Reproduction, Error> {
    let grid = Grid::unit();
    let grid_text = describe_grid(&grid.spec());
    let name = target.name();
    let mut artifacts = Vec::new();
    let summary = match target {
        ReproTarget::Ce02 => {
            let ex = Ce02::new()?;
            let pts = grid.points();
            let s = grid.sample(|p| ex.s(p));
            let i = dmrl_integral_curve(&ex.x, &ex.y, &grid)?;
            let ih = dmrl_integral_curve(&ex.xh, &ex.yh, &grid)?;
            let turning = (0..pts.len()).min_by(|&a, &b| s[a].total_cmp(&s[b])).map(|k| pts[k]);
            let crossing = (1..pts.len()).find(|&k| ih[k - 1] < 0.0 && ih[k] >= 0.0);
            let zero = crossing.map(|k| ex.sign_change(pts[k - 1], pts[k])).transpose()?;
            let rows = |v: &[f64]| pts.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
            artifacts.push(Artifact::new(format!("{name}_s.csv"), curve_csv("p", "s(p) = q_Y'(p)/q_X'(p)", &grid_text, rows(&s))));
            artifacts.push(Artifact::new(format!("{name}_I.csv"), curve_csv("p", "I(p) = ew_Y(p) - s(p) ew_X(p)", &grid_text, rows(&i))));
            artifacts.push(Artifact::new(
                format!("{name}_I_h.csv"),
                curve_csv("p", "I_h(p), the same for X_h and Y_h with h(p) = p^5", &grid_text, rows(&ih)),
            ));
            json!({
                "s_turning_point": turning,
                "min_I": i.iter().copied().fold(f64::INFINITY, f64::min),
                "I_h_sign_change": zero,
                "dmrl_holds": i.iter().all(|&v| v >= -1e-8),
                "dmrl_holds_after_distortion": ih.iter().all(|&v| v >= -1e-8),
            })
        }
        ReproTarget::Ce01 => {
            let ex = Ce01::new()?;
            let ts = ce01_points();
            let values = ts.iter().map(|&t| ex.i_hat(t)).collect::<Result<Vec<_>, _>>()?;
            let (k, min) = values.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
            let negative: Vec<f64> = ts.iter().zip(&values).filter(|(_, &v)| v < -NEGATIVE).map(|(&t, _)| t).collect();
            artifacts.push(Artifact::new(
                format!("{name}_I_hat_h.csv"),
                curve_csv("t", "I_hat_h(t) = int_0^t [a'(t) - a'(x)] F_h(x) dx, a = G_h^-1 o F_h", "t = k/200 for k = 1..400", ts.iter().copied().zip(values.iter().copied())),
            ));
            json!({
                "min_I_hat_h": min,
                "argmin": ts[k],
                "negative_from": negative.first(),
                "negative_to": negative.last(),
                "qmit_holds_after_distortion": negative.is_empty(),
            })
        }
        _ => {
            let sys = system_of(target, &grid)?.expect("system target");
            let c = classify_system(&sys, &grid)?;
            let title = format!("h_T(p) for signature ({}) on {}", sys.signature, sys.copula);
            artifacts.push(Artifact::new(
                format!("{name}_h_T.csv"),
                curve_csv("p", &title, &grid_text, grid.points().iter().map(|&p| (p, sys.h.eval(p)))),
            ));
            if target == ReproTarget::ExQmit {
                let dual = sys.h.dual();
                let d = sys.copula.as_diagonal().expect("diagonal copula");
                artifacts.push(Artifact::new(
                    format!("{name}_dual_ratio.csv"),
                    curve_csv("p", "h*(p)/p with h*(p) = 1 - h_T(1-p)", &grid_text, grid.points().iter().map(|&p| (p, dual.eval(p) / p))),
                ));
                artifacts.push(Artifact::new(
                    format!("{name}_diagonal.csv"),
                    curve_csv("p", "diagonal d(p)", &grid_text, grid.points().iter().map(|&p| (p, d.d(p)))),
                ));
            }
            artifacts.push(Artifact::json(format!("{name}_classification.json"), &c));
            summary_of(&c)
        }
    };
    let summary = json!({ "target": name, "grid": grid.spec(), "summary": summary });
    artifacts.push(Artifact::json(format!("{name}_summary.json"), &summary));
    Ok(Reproduction { target, summary, artifacts })
}

fn summary_of(c: &SystemClassification) -> serde_json::Value {
    json!({ "verdict": c.verdict, "shape": c.shape, "consistent": c.consistent })
}
