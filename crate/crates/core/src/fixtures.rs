//! Hard-coded inputs of the reference counterexamples and worked systems.

/// Quantile of X in the dmrl counterexample.
pub const CE02_X_QUANTILE: &str = "17/8*p - 1/2*p^2";
/// Quantile of Y in the dmrl counterexample.
pub const CE02_Y_QUANTILE: &str = "ln(15/8 + p)";
/// Convex distortion that breaks the dmrl order.
pub const CE02_H: &str = "p^5";

/// Cumulative hazard of X in the qmit counterexample; Y is exponential(1).
pub const CE01_PSI: &str = "piece(x <= 1 : exp(x) - 1 ; \
x <= 13/10 : 2*e*sqrt(x) - e - 1 ; \
else : 5/13*sqrt(10/13)*exp(x^2 - 69/100) + 2*(sqrt(13/10) - 1)*e - 5/13*sqrt(10/13)*e + e - 1)";
/// Distortion that breaks the qmit order.
pub const CE01_H: &str = "1 - (1-p)^5";
/// Window in which the distorted x-space qmit integral goes negative.
pub const CE01_FAILURE_WINDOW: (f64, f64) = (1.2539, 1.3050);

/// Durante generator used for the two Durante examples.
pub const DURANTE_GENERATOR: &str = "p^0.5";
pub const EX_DURANTE_1_SIGNATURE: &str = "2,0,-2,1";
pub const EX_DURANTE_2_SIGNATURE: &str = "0,1,1,-1";

pub const EX_DIAG_5COMP_SIGNATURE: &str = "0,0,0,3,-2";
pub const EX_DIAG_5COMP_DIAGONAL: &str = "2*p^2 - p^3";

pub const EX_3OF4_SIGNATURE: &str = "0,6,-8,3";
pub const EX_3OF4_DIAGONAL: &str = "1/4*p + 3/4*(2*p^2 - p^3)";

pub const EX_QMIT_SIGNATURE: &str = "0,0,2,-1";
pub const EX_QMIT_DIAGONAL: &str = "1 - 7/4*(1-p) + 3/2*(1-p)^2 - 3/4*(1-p)^3";
