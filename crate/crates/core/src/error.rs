use thiserror::Error;

use crate::copulas::CopulaError;
use crate::distortions::DistortionError;
use crate::distributions::DistributionError;
use crate::forms::FormError;
use crate::funcalc::{EvalError, ParseError};
use crate::numerics::NumericsError;
use crate::orders::OrderError;
use crate::systems::SystemError;

/// Any failure raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Form(#[from] FormError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
