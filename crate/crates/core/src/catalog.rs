//! Reference distributions and distortions used by property tests, the
//! sweep and the command line.

use crate::copulas::{CopulaHandle, Diagonal, DuranteGenerator};
use crate::distortions::{Distortion, ShapeReport};
use crate::distributions::DistributionSpec;
use crate::fixtures::*;
use crate::forms::{parse_distortion, parse_distribution_spec};
use crate::funcalc::Expr;
use crate::numerics::Grid;
use crate::systems::{system_distortion, MinimalSignature};

/// A distortion together with a re-parseable spec and an expression in `p`.
#[derive(Clone, Debug)]
pub struct CatalogDistortion {
    pub name: String,
    /// Text accepted by [`parse_distortion`].
    pub spec: String,
    /// The same function as an expression in `p`, for building mixtures.
    pub expr: String,
    pub h: Distortion,
    pub shape: ShapeReport,
}

impl CatalogDistortion {
    fn new(name: impl Into<String>, spec: impl Into<String>, expr: impl Into<String>, grid: &Grid) -> Self {
        let spec = spec.into();
        let h = parse_distortion(&spec).unwrap_or_else(|e| panic!("catalog distortion `{spec}`: {e}"));
        let shape = h.classify(grid);
        CatalogDistortion { name: name.into(), spec, expr: expr.into(), h, shape }
    }

    fn from_expr(name: impl Into<String>, expr: String, grid: &Grid) -> Self {
        Self::new(name, format!("h:{expr}"), expr, grid)
    }

    /// `λ p + (1 − λ) h(p)`; keeps starshapedness, antistarshapedness and
    /// antistarshapedness of the dual.
    pub fn mixture(&self, lambda: f64, grid: &Grid) -> Self {
        let expr = format!("{lambda}*p + {}*({})", 1.0 - lambda, self.expr);
        Self::from_expr(format!("mix({lambda}, {})", self.name), expr, grid)
    }

    pub fn is_starshaped(&self) -> bool {
        self.shape.starshaped
    }

    pub fn is_antistarshaped_strict(&self) -> bool {
        self.shape.antistarshaped && self.shape.strictly_increasing
    }

    pub fn is_dual_antistarshaped_strict(&self) -> bool {
        self.shape.dual_antistarshaped && self.shape.strictly_increasing
    }
}

fn system_expr(signature: &str, copula: &CopulaHandle) -> String {
    let sig = MinimalSignature::parse(signature).expect("catalog signature");
    let sys = system_distortion(&sig, copula).expect("catalog system");
    sys.closed_form.expect("catalog systems have closed forms").source().to_string()
}

/// Distortions covering every shape class, including all the worked examples.
pub fn distortion_catalog(grid: &Grid) -> Vec<CatalogDistortion> {
    let mut out = vec![CatalogDistortion::new("identity", "identity", "p", grid)];
    for k in [1.5, 2.0, 3.0, 5.0, 8.0, 0.3, 0.5] {
        out.push(CatalogDistortion::new(format!("power {k}"), format!("power:{k}"), format!("p^{k}"), grid));
    }
    for k in [1.5, 2.0, 3.0, 5.0, 8.0, 0.5] {
        out.push(CatalogDistortion::new(format!("dual power {k}"), format!("dualpower:{k}"), format!("1-(1-p)^{k}"), grid));
    }
    let unit = Grid::unit();
    let f = |n| CopulaHandle::Durante(DuranteGenerator::from_expr(Expr::parse(DURANTE_GENERATOR).unwrap(), n, &unit).unwrap());
    let d = |text: &str, n| CopulaHandle::Jaworski(Diagonal::from_expr(Expr::parse(text).unwrap(), n, &unit).unwrap());
    let systems = [
        ("durante 2,0,-2,1", system_expr(EX_DURANTE_1_SIGNATURE, &f(4))),
        ("durante 0,1,1,-1", system_expr(EX_DURANTE_2_SIGNATURE, &f(4))),
        ("diagonal 0,0,0,3,-2", system_expr(EX_DIAG_5COMP_SIGNATURE, &d(EX_DIAG_5COMP_DIAGONAL, 5))),
        ("diagonal 0,6,-8,3", system_expr(EX_3OF4_SIGNATURE, &d(EX_3OF4_DIAGONAL, 4))),
        ("diagonal 0,0,2,-1", system_expr(EX_QMIT_SIGNATURE, &d(EX_QMIT_DIAGONAL, 4))),
        ("parallel cuadras-auge 0.5", "1 - (1-p)^1.5".to_string()),
    ];
    for (name, expr) in systems {
        out.push(CatalogDistortion::from_expr(name, expr, grid));
    }
    out.push(CatalogDistortion::from_expr("flat below 0.2", "max(0, (p - 0.2)/0.8)".into(), grid));
    out.push(CatalogDistortion::from_expr("smoothstep", "3*p^2 - 2*p^3".into(), grid));
    out.push(CatalogDistortion::from_expr("half identity, half p^5", "0.5*p + 0.5*p^5".into(), grid));
    out
}

/// Distributions with finite means, in their textual form.
pub const DISTRIBUTION_CATALOG: &[&str] = &[
    "exp:1",
    "exp:0.5",
    "exp:3",
    "q:p",
    "q:p^2",
    "q:sqrt(p)",
    "q:17/8*p - 1/2*p^2",
    "q:ln(15/8 + p)",
    "q:(-ln(1-p))^2",
    "q:(1-p)^(-1/3) - 1",
    "hazard:x^2",
    "distort(exp:1, h=power:5)",
    "distort(q:17/8*p - 1/2*p^2, h=power:5)",
    "distort(q:ln(15/8 + p), h=dualpower:3)",
];

pub fn distribution_catalog() -> Vec<DistributionSpec> {
    let mut out: Vec<DistributionSpec> =
        DISTRIBUTION_CATALOG.iter().map(|t| parse_distribution_spec(t).expect("catalog distribution")).collect();
    out.push(parse_distribution_spec(&format!("hazard:{CE01_PSI}")).expect("ce01 hazard"));
    out.push(parse_distribution_spec(&format!("distort(hazard:{CE01_PSI}, h=dualpower:5)")).expect("ce01 distorted"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes() {
        let g = Grid::unit();
        let cat = distortion_catalog(&g);
        assert!(cat.len() >= 20);
        for c in &cat {
            assert!(c.shape.is_consistent(), "{}", c.name);
            let again = parse_distortion(&format!("h:{}", c.expr)).unwrap();
            for &p in &[0.1, 0.5, 0.9] {
                assert!((again.eval(p) - c.h.eval(p)).abs() < 1e-12, "{} at {p}", c.name);
            }
        }
        let by = |name: &str| cat.iter().find(|c| c.name == name).unwrap();
        assert!(by("durante 2,0,-2,1").is_antistarshaped_strict());
        assert!(by("durante 0,1,1,-1").is_starshaped());
        assert!(by("diagonal 0,0,0,3,-2").is_starshaped() && !by("diagonal 0,0,0,3,-2").shape.convex);
        assert!(by("diagonal 0,6,-8,3").is_antistarshaped_strict());
        let q = by("diagonal 0,0,2,-1");
        assert!(q.is_dual_antistarshaped_strict() && !q.shape.starshaped && !q.shape.antistarshaped);
        let flat = by("flat below 0.2");
        assert!(flat.is_starshaped() && !flat.shape.strictly_increasing);
        let s = by("smoothstep");
        assert!(!s.shape.starshaped && !s.shape.antistarshaped);
        for c in &cat {
            let m = c.mixture(0.3, &g);
            assert!(!c.shape.starshaped || m.shape.starshaped, "{}", c.name);
            assert!(!c.shape.antistarshaped || m.shape.antistarshaped, "{}", c.name);
            assert!(!c.shape.dual_antistarshaped || m.shape.dual_antistarshaped, "{}", c.name);
        }
    }

    #[test]
    fn distribution_catalog_builds() {
        for spec in distribution_catalog() {
            let d = crate::distributions::build(&spec).unwrap();
            let m = d.mean();
            assert!(m.as_ref().is_ok_and(|m| m.is_finite()), "{spec}: {m:?}");
        }
    }
}
