//! Duration-to-energy functions.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("energy model parameter {field} = {value} is invalid")]
pub struct EnergyModelError {
    pub field: &'static str,
    pub value: f64,
}

/// Maps how long a device works on something to the energy it spends.
///
/// Every form must be strictly increasing and non-negative on non-negative
/// durations; [`EnergyModel::validate`] enforces the parameter ranges that
/// guarantee it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnergyModel {
    /// `f(t) = t`
    Identity,
    /// `f(t) = k t`
    Linear { coefficient: f64 },
    /// `f(t) = k t + c`
    Affine { coefficient: f64, offset: f64 },
    /// `f(t) = k t^p`
    PowerLaw { coefficient: f64, exponent: f64 },
}

fn positive(field: &'static str, value: f64) -> Result<(), EnergyModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(EnergyModelError { field, value })
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<(), EnergyModelError> {
        match *self {
            EnergyModel::Identity => Ok(()),
            EnergyModel::Linear { coefficient } => positive("coefficient", coefficient),
            EnergyModel::Affine {
                coefficient,
                offset,
            } => {
                positive("coefficient", coefficient)?;
                if offset >= 0.0 && offset.is_finite() {
                    Ok(())
                } else {
                    Err(EnergyModelError {
                        field: "offset",
                        value: offset,
                    })
                }
            }
            EnergyModel::PowerLaw {
                coefficient,
                exponent,
            } => {
                positive("coefficient", coefficient)?;
                positive("exponent", exponent)
            }
        }
    }

    pub fn evaluate(&self, duration: f64) -> f64 {
        match *self {
            EnergyModel::Identity => duration,
            EnergyModel::Linear { coefficient } => coefficient * duration,
            EnergyModel::Affine {
                coefficient,
                offset,
            } => coefficient * duration + offset,
            EnergyModel::PowerLaw {
                coefficient,
                exponent,
            } => coefficient * libm::pow(duration, exponent),
        }
    }

    /// The same model with every output multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        match *self {
            EnergyModel::Identity => EnergyModel::Linear { coefficient: k },
            EnergyModel::Linear { coefficient } => EnergyModel::Linear {
                coefficient: coefficient * k,
            },
            EnergyModel::Affine {
                coefficient,
                offset,
            } => EnergyModel::Affine {
                coefficient: coefficient * k,
                offset: offset * k,
            },
            EnergyModel::PowerLaw {
                coefficient,
                exponent,
            } => EnergyModel::PowerLaw {
                coefficient: coefficient * k,
                exponent,
            },
        }
    }
}
