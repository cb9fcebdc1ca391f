//! Physical parameters, unit conventions and closed-form derived quantities.
//!
//! All rates are expressed in units of the total two-level decay rate `gamma`
//! (or the exciton decay rate `gamma_x` for the three-level system), and
//! times in units of its inverse. Probe powers `p` are dimensionless photon
//! numbers per atomic lifetime.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("no 1D coupling (beta = 0): threshold power is undefined")]
    NoOneDCoupling,
    #[error("invalid parameters: {0:?}")]
    Invalid(Vec<String>),
}

/// Parameters of the driven, pumped and dephased two-level 1D atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    /// Total decay rate γ = γ₀ + γ₁ (reference scale).
    pub gamma: f64,
    /// 1D coupling fraction β = γ₁/(γ₀+γ₁).
    pub beta: f64,
    /// Pure dephasing rate γ*.
    pub gamma_star: f64,
    /// Incoherent pump rate ξ.
    pub xi: f64,
    /// Resonant probe power in photons per atomic lifetime.
    pub p: f64,
    /// Laser-atom detuning δ_L = ω_L − ω_A.
    pub delta_l: f64,
}

impl Default for TwoLevelParams {
    fn default() -> Self {
        Self { gamma: 1.0, beta: 1.0, gamma_star: 0.0, xi: 0.0, p: 0.0, delta_l: 0.0 }
    }
}

impl TwoLevelParams {
    /// Rabi frequency Ω = γ√(2βp).
    pub fn rabi_frequency(&self) -> f64 {
        self.gamma * (2.0 * self.beta * self.p).sqrt()
    }

    /// Coherence decay rate Γ₂ = (γ + γ* + ξ)/2.
    pub fn coherence_decay(&self) -> f64 {
        (self.gamma + self.gamma_star + self.xi) / 2.0
    }

    /// Probe power separating the incoherent from the coherent (Rabi) regime,
    /// p_th = (γ+γ*+ξ)(γ+ξ)/(4βγ²).
    pub fn threshold_power(&self) -> Result<f64, ModelError> {
        if self.beta == 0.0 {
            return Err(ModelError::NoOneDCoupling);
        }
        let num = (self.gamma + self.gamma_star + self.xi) * (self.gamma + self.xi);
        Ok(num / (4.0 * self.beta * self.gamma * self.gamma))
    }

    /// Collects every violated invariant; empty result means the parameters
    /// are usable. Nothing is ever clamped.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !(self.gamma > 0.0) {
            errs.push("gamma must be > 0".to_string());
        }
        if !(0.0..=1.0).contains(&self.beta) {
            errs.push("beta out of [0,1]".to_string());
        }
        if !(self.gamma_star >= 0.0) {
            errs.push("negative dephasing rate gamma-star".to_string());
        }
        if !(self.xi >= 0.0) {
            errs.push("negative pump rate xi".to_string());
        }
        if !(self.p >= 0.0) {
            errs.push("negative probe power".to_string());
        }
        if !self.delta_l.is_finite() {
            errs.push("non-finite detuning delta-l".to_string());
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }

    /// Step resolving the fastest time scale, min(1e−3/γ, 0.02/Ω).
    pub fn default_time_step(&self) -> f64 {
        let omega = self.rabi_frequency();
        let dt = 1e-3 / self.gamma;
        if omega > 0.0 { dt.min(0.02 / omega) } else { dt }
    }
}

/// Parameters of the exciton/biexciton cascade with resonant two-photon
/// pumping of the biexciton and a resonant probe on the excitonic line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelParams {
    /// Exciton decay rate Γ_X (reference scale).
    pub gamma_x: f64,
    /// Biexciton decay rate Γ_XX.
    pub gamma_xx: f64,
    /// Effective two-photon pump rate Λ²/Δ.
    pub g2: f64,
    /// Two-photon drive detuning; the shipped experiments keep this at 0.
    pub delta_2ph: f64,
    /// 1D coupling fraction of the exciton transition.
    pub beta: f64,
    /// Resonant probe power on the excitonic transition.
    pub p: f64,
    /// Pure dephasing rate applied to both excited levels.
    pub gamma_star: f64,
}

impl Default for ThreeLevelParams {
    fn default() -> Self {
        Self {
            gamma_x: 1.0,
            gamma_xx: 2.0,
            g2: 0.0,
            delta_2ph: 0.0,
            beta: 1.0,
            p: 0.0,
            gamma_star: 0.0,
        }
    }
}

impl ThreeLevelParams {
    /// Effective two-photon pump rate from the pump Rabi frequency Λ and the
    /// half binding energy Δ = (E_XX − E_X)/2. Only the ratio Λ²/Δ enters
    /// the dynamics.
    pub fn g2_from_pump(lambda: f64, delta: f64) -> f64 {
        lambda * lambda / delta
    }

    /// Probe Rabi frequency Ω = Γ_X√(2βp).
    pub fn rabi_frequency(&self) -> f64 {
        self.gamma_x * (2.0 * self.beta * self.p).sqrt()
    }

    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !(self.gamma_x > 0.0) {
            errs.push("gamma-x must be > 0".to_string());
        }
        if !(self.gamma_xx >= 0.0) {
            errs.push("negative decay rate gamma-xx".to_string());
        }
        if !(self.g2 >= 0.0) {
            errs.push("negative two-photon pump rate g2".to_string());
        }
        if !self.delta_2ph.is_finite() {
            errs.push("non-finite detuning delta-2ph".to_string());
        }
        if !(0.0..=1.0).contains(&self.beta) {
            errs.push("beta out of [0,1]".to_string());
        }
        if !(self.p >= 0.0) {
            errs.push("negative probe power".to_string());
        }
        if !(self.gamma_star >= 0.0) {
            errs.push("negative dephasing rate gamma-star".to_string());
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }

    /// Step resolving the fastest of the decay, pump and probe scales.
    pub fn default_time_step(&self) -> f64 {
        let fastest = [
            self.gamma_x + self.gamma_xx + self.gamma_star,
            self.rabi_frequency(),
            self.g2,
        ]
        .into_iter()
        .fold(self.gamma_x, f64::max);
        1e-3_f64.min(0.02 / fastest)
    }
}

/// Uniform time grid over [0, t_max] with `n_steps` integration steps,
/// i.e. `n_steps + 1` sample times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Self {
        Self { t_max, n_steps }
    }

    /// Grid over [0, t_max] with the step `dt` (rounded up to an integer
    /// number of steps).
    pub fn with_step(t_max: f64, dt: f64) -> Self {
        let n_steps = (t_max / dt).ceil().max(2.0) as usize;
        Self { t_max, n_steps }
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.n_steps).map(|k| k as f64 * dt).collect()
    }

    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !(self.t_max > 0.0) {
            errs.push("t-max must be > 0".to_string());
        }
        if self.n_steps < 2 {
            errs.push("steps must be >= 2".to_string());
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// Logarithmically spaced probe-power grid, optionally prefixed by the exact
/// p = 0 endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub n_points: usize,
    pub include_zero: bool,
}

impl Default for PowerGrid {
    /// 121 log-spaced points over [1e−2, 1e4] plus the p = 0 endpoint.
    fn default() -> Self {
        Self { p_min: 1e-2, p_max: 1e4, n_points: 121, include_zero: true }
    }
}

impl PowerGrid {
    /// Grid points in ascending order.
    pub fn points(&self) -> Vec<f64> {
        let lo = self.p_min.ln();
        let hi = self.p_max.ln();
        let mut pts = Vec::with_capacity(self.n_points + 1);
        if self.include_zero {
            pts.push(0.0);
        }
        for k in 0..self.n_points {
            let f = k as f64 / (self.n_points - 1) as f64;
            pts.push((lo + f * (hi - lo)).exp());
        }
        pts
    }

    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !(self.p_min > 0.0 && self.p_min < self.p_max) {
            errs.push("power grid requires 0 < p-min < p-max".to_string());
        }
        if self.n_points < 2 {
            errs.push("points must be >= 2".to_string());
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}
