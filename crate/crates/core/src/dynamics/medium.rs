use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coupling ratio `mu23 / mu13` of the Rb-87 D2 line.
pub const RB87_MU_RATIO: f64 = 0.99998;

/// `tau_a * Gamma3` for Rb-87 with `tau_a ~ 0.26 ns`.
pub const RB87_GAMMA3_TAU: f64 = 0.01;

/// Default medium extent, in absorption lengths.
pub const DEFAULT_LENGTH: f64 = 10.0;

/// Dimensionless signal coupling.
///
/// Lengths are measured in `1/kappa_a` with `kappa_a = mu13 tau_a / 2`, so the
/// field equation `dOmega13/dZ = i mu13 rho31` carries the constant `2`.
pub const SIGNAL_COUPLING: f64 = 2.0;

/// Optical medium, in units of `tau_a` (time) and `1/kappa_a` (length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    /// Extent in absorption lengths.
    pub length: f64,
    /// `mu23 / mu13`.
    pub mu_ratio: f64,
    /// `Gamma3 * tau_a`.
    pub gamma3_tau: f64,
    /// Common one-photon detuning `Delta * tau_a`.
    pub delta_tau: f64,
}

impl Default for MediumSpec {
    fn default() -> Self {
        MediumSpec { length: DEFAULT_LENGTH, mu_ratio: 1.0, gamma3_tau: 0.0, delta_tau: 0.0 }
    }
}

impl MediumSpec {
    /// Equal couplings, no decay, resonant: the integrable limit.
    pub fn ideal(length: f64) -> Self {
        MediumSpec { length, ..Default::default() }
    }

    /// Rb-87 D2 parameters with or without spontaneous emission.
    pub fn rubidium(length: f64, with_decay: bool) -> Self {
        MediumSpec {
            length,
            mu_ratio: RB87_MU_RATIO,
            gamma3_tau: if with_decay { RB87_GAMMA3_TAU } else { 0.0 },
            delta_tau: 0.0,
        }
    }

    pub fn mu13(&self) -> f64 {
        SIGNAL_COUPLING
    }

    pub fn mu23(&self) -> f64 {
        SIGNAL_COUPLING * self.mu_ratio
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid("medium length must be positive"));
        }
        if !(self.gamma3_tau.is_finite() && self.gamma3_tau >= 0.0) {
            return Err(Error::invalid("gamma3_tau must be non-negative"));
        }
        if !(self.mu_ratio.is_finite() && self.mu_ratio > 0.0) {
            return Err(Error::invalid("coupling ratio mu23/mu13 must be positive"));
        }
        if !self.delta_tau.is_finite() {
            return Err(Error::invalid("detuning must be finite"));
        }
        Ok(())
    }
}
