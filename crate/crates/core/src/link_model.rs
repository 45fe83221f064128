//! Slot-based link capacity model.
//!
//! A link carries `B0 * rho_capacity * (1 - rho_delay)` bits per slot, where
//! `B0 = c0 * tau0` is what a perfect link moves in one slot of length
//! `tau0`. A transfer of `B` bits then occupies `ceil(B / bits_per_slot)`
//! slots. The per-slot figure stays real-valued up to that single ceiling.

use thiserror::Error;

use crate::topology::Link;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LinkError {
    #[error("network parameter {field} must be positive and finite, got {value}")]
    InvalidNetworkParams { field: &'static str, value: f64 },
    #[error("rho_capacity = 1 is not allowed when c0 is an asymptotic upper limit")]
    AsymptoticCapacityViolated,
    #[error("link carries no payload per slot")]
    UnusableLink,
    #[error("payload must be at least one bit")]
    EmptyPayload,
}

/// Network-wide constants shared by every link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkParams {
    c0: f64,
    tau0: f64,
    c0_is_asymptotic: bool,
}

impl NetworkParams {
    /// `c0` is the maximum capacity in bits per time unit and `tau0` the slot
    /// length in time units. When `c0_is_asymptotic` is set no link may reach
    /// it, so `rho_capacity = 1` is rejected by [`bits_per_slot`].
    pub fn new(c0: f64, tau0: f64, c0_is_asymptotic: bool) -> Result<Self, LinkError> {
        for (field, value) in [("c0", c0), ("tau0", tau0)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(LinkError::InvalidNetworkParams { field, value });
            }
        }
        Ok(Self {
            c0,
            tau0,
            c0_is_asymptotic,
        })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn c0_is_asymptotic(&self) -> bool {
        self.c0_is_asymptotic
    }

    /// Bits a perfect link moves in one slot.
    pub fn b0(&self) -> f64 {
        self.c0 * self.tau0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkClass {
    Usable,
    /// The whole slot is eaten by delay; nothing gets through.
    Useless,
    /// Zero delay. Physically implausible but still carries data.
    NearImpossible,
}

impl LinkClass {
    pub fn carries_payload(self) -> bool {
        self != LinkClass::Useless
    }
}

pub fn classify_link(link: &Link) -> LinkClass {
    let rho = link.rho_delay();
    if rho == 1.0 {
        LinkClass::Useless
    } else if rho == 0.0 {
        LinkClass::NearImpossible
    } else {
        LinkClass::Usable
    }
}

/// Payload of a single transfer, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransferRequest {
    payload_bits: u64,
}

impl TransferRequest {
    pub fn new(payload_bits: u64) -> Result<Self, LinkError> {
        if payload_bits == 0 {
            return Err(LinkError::EmptyPayload);
        }
        Ok(Self { payload_bits })
    }

    pub fn payload_bits(&self) -> u64 {
        self.payload_bits
    }
}

pub fn bits_per_slot(params: &NetworkParams, link: &Link) -> Result<f64, LinkError> {
    if params.c0_is_asymptotic && link.rho_capacity() >= 1.0 {
        return Err(LinkError::AsymptoticCapacityViolated);
    }
    Ok(params.b0() * link.rho_capacity() * (1.0 - link.rho_delay()))
}

/// Number of whole slots needed to push `request` through a link moving
/// `per_slot` bits each slot.
///
/// The result satisfies `(slots - 1) * per_slot < payload <= slots * per_slot`
/// when both sides are evaluated in `f64`; the quotient's rounding is
/// corrected against that bracket rather than trusted blindly.
pub fn slots_required(per_slot: f64, request: TransferRequest) -> Result<u64, LinkError> {
    if per_slot.is_nan() || per_slot <= 0.0 {
        return Err(LinkError::UnusableLink);
    }
    let payload = request.payload_bits as f64;
    let mut slots = libm::ceil(payload / per_slot).max(1.0);
    while slots > 1.0 && (slots - 1.0) * per_slot >= payload {
        slots -= 1.0;
    }
    while slots * per_slot < payload {
        slots += 1.0;
    }
    Ok(slots as u64)
}
