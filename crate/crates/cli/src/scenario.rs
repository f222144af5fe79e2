//! JSON scenarios for `check-order`.

use distorder::{Grid, OrderKind};
use serde::{Deserialize, Serialize};

use crate::{core, CheckOrderArgs, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    VerdictJson,
    CurveCsv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Option<usize>,
    pub edge_margin: Option<f64>,
}

/// A scenario as read from disk; every field may still be filled by flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub distortion: Option<String>,
    #[serde(default)]
    pub orders: Vec<OrderKind>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
}

/// A scenario with flags applied and every required field present.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub name: String,
    pub x: String,
    pub y: String,
    pub distortion: Option<String>,
    pub orders: Vec<OrderKind>,
    pub grid: GridConfig,
    pub outputs: Vec<OutputKind>,
}

impl Resolved {
    pub fn grid(&self) -> Result<Grid, CliError> {
        let count = self.grid.points.unwrap_or(Grid::DEFAULT_COUNT);
        let margin = self.grid.edge_margin.unwrap_or(Grid::DEFAULT_MARGIN);
        Grid::uniform(0.0, 1.0, count, margin).map_err(core)
    }
}

impl Scenario {
    pub fn merge(self, a: &CheckOrderArgs) -> Result<Resolved, CliError> {
        let missing = |what: &str| CliError::Input(format!("no {what} given (flag or scenario field)"));
        let orders = if a.order.is_empty() { self.orders } else { a.order.clone() };
        if orders.is_empty() {
            return Err(missing("order"));
        }
        Ok(Resolved {
            name: a.scenario.clone().or(self.name).unwrap_or_else(|| "scenario".to_string()),
            x: a.x.clone().or(self.x).ok_or_else(|| missing("x"))?,
            y: a.y.clone().or(self.y).ok_or_else(|| missing("y"))?,
            distortion: a.distort.clone().or(self.distortion),
            orders,
            grid: GridConfig {
                points: a.grid.grid_points.or(self.grid.points),
                edge_margin: a.grid.edge_margin.or(self.grid.edge_margin),
            },
            outputs: if self.outputs.is_empty() { vec![OutputKind::VerdictJson, OutputKind::CurveCsv] } else { self.outputs },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GridArgs;

    fn args() -> CheckOrderArgs {
        CheckOrderArgs {
            config: None,
            scenario: None,
            x: None,
            y: Some("exp:2".into()),
            order: vec![],
            distort: None,
            grid: GridArgs { grid_points: Some(64), edge_margin: None },
            out_dir: None,
        }
    }

    #[test]
    fn flags_override_config() {
        let s: Scenario = serde_json::from_str(
            r#"{"name": "pair", "x": "exp:1", "y": "exp:1", "orders": ["ttt", "dmrl"], "grid": {"points": 128}}"#,
        )
        .unwrap();
        let r = s.merge(&args()).unwrap();
        assert_eq!((r.name.as_str(), r.x.as_str(), r.y.as_str()), ("pair", "exp:1", "exp:2"));
        assert_eq!(r.orders, vec![OrderKind::Ttt, OrderKind::Dmrl]);
        assert_eq!(r.grid.points, Some(64));
        assert_eq!(r.outputs.len(), 2);
    }

    #[test]
    fn missing_fields_are_input_errors() {
        let err = Scenario::default().merge(&args()).unwrap_err();
        assert!(matches!(err, CliError::Input(_)));
        assert!(serde_json::from_str::<Scenario>(r#"{"nmae": "typo"}"#).is_err());
    }
}
