//! Radiated power channels and emission figures of merit.
//!
//! All powers are photon rates in units of γ. The transmitted power carries
//! the incoming probe γp plus the interference term Ω·Re⟨σ−⟩ plus half of
//! the guided spontaneous emission; the reflected power carries the other
//! half; the remainder γ(1−β)P_e leaks out of the waveguide.

use serde::Serialize;
use thiserror::Error;

use crate::bloch::BlochState;
use crate::model::TwoLevelParams;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("no net emission: N = {0} is not positive")]
    NoNetEmission(f64),
}

/// Power balance of a single atomic state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerChannels {
    /// Transmitted power 𝒯.
    pub transmitted: f64,
    /// Reflected power ℛ.
    pub reflected: f64,
    /// Power dissipated in the leaky modes 𝒮.
    pub leaked: f64,
    /// Net transmitted power 𝒯 − γp.
    pub net_transmitted: f64,
    /// Net total emitted rate N = (𝒯 − γp) + ℛ + 𝒮.
    pub total: f64,
    /// Coherent atomic absorption 𝒲 = −Ω·Re⟨σ−⟩.
    pub absorption: f64,
}

/// Fraction of the net emitted photons leaving through each guided channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionRatios {
    pub beta_r: f64,
    pub beta_t: f64,
}

pub fn channels_from_state(state: &BlochState, params: &TwoLevelParams) -> PowerChannels {
    let omega = params.rabi_frequency();
    let pe = state.excited_population();
    let interference = omega * state.s_minus.re;
    let reflected = params.gamma * params.beta / 2.0 * pe;
    let leaked = params.gamma * (1.0 - params.beta) * pe;
    let transmitted = params.gamma * params.p + interference + reflected;
    let net_transmitted = interference + reflected;
    PowerChannels {
        transmitted,
        reflected,
        leaked,
        net_transmitted,
        total: net_transmitted + reflected + leaked,
        absorption: -interference,
    }
}

/// Emission ratios β_R = ℛ/N and β_T = (𝒯 − γp)/N, defined only in the net
/// emission regime N > 0.
pub fn ratios(ch: &PowerChannels) -> Result<EmissionRatios, ChannelError> {
    if ch.total <= 0.0 {
        return Err(ChannelError::NoNetEmission(ch.total));
    }
    Ok(EmissionRatios { beta_r: ch.reflected / ch.total, beta_t: ch.net_transmitted / ch.total })
}
