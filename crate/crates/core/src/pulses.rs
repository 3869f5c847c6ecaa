//! Input envelopes, truncation and pulse-area bookkeeping.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{trapezoid, Grid};
use crate::error::{Error, Result};

/// Envelopes with `|tau_a Omega|` below this are set to zero at the input.
pub const TRUNCATION_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Sech,
    Gaussian,
}

/// One input envelope. Times in `tau_a`, area and phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub area: f64,
    pub duration: f64,
    pub center: f64,
    pub phase: f64,
}

impl PulseSpec {
    pub fn sech(area: f64, duration: f64, center: f64) -> Self {
        PulseSpec { shape: PulseShape::Sech, area, duration, center, phase: 0.0 }
    }

    pub fn gaussian(area: f64, duration: f64, center: f64) -> Self {
        PulseSpec { shape: PulseShape::Gaussian, area, duration, center, phase: 0.0 }
    }

    pub fn new(shape: PulseShape, area: f64, duration: f64, center: f64) -> Self {
        PulseSpec { shape, area, duration, center, phase: 0.0 }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        PulseSpec { phase, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::invalid("pulse duration must be positive"));
        }
        if !(self.area.is_finite() && self.area >= 0.0) {
            return Err(Error::invalid("pulse area must be non-negative"));
        }
        if !(self.center.is_finite() && self.phase.is_finite()) {
            return Err(Error::invalid("pulse center and phase must be finite"));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        match self.shape {
            PulseShape::Sech => self.area / (PI * self.duration),
            PulseShape::Gaussian => self.area / ((2.0 * PI).sqrt() * self.duration),
        }
    }

    /// Real envelope at time `t`, before the phase factor.
    pub fn amplitude(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.duration;
        match self.shape {
            PulseShape::Sech => self.peak() / x.cosh(),
            PulseShape::Gaussian => self.peak() * (-0.5 * x * x).exp(),
        }
    }

    /// Half-width beyond which the envelope is below `threshold`.
    pub fn cutoff_half_width(&self, threshold: f64) -> f64 {
        let ratio = self.peak() / threshold;
        if ratio <= 1.0 {
            return 0.0;
        }
        match self.shape {
            PulseShape::Sech => self.duration * ratio.acosh(),
            PulseShape::Gaussian => self.duration * (2.0 * ratio.ln()).sqrt(),
        }
    }
}

/// Samples `spec` on the `T` nodes of `grid`.
///
/// Fails if the envelope at either end of the window is still above the
/// truncation threshold.
pub fn make_envelope(spec: &PulseSpec, grid: &Grid) -> Result<Vec<C64>> {
    make_envelope_within(spec, grid, TRUNCATION_THRESHOLD)
}

/// [`make_envelope`] with an explicit edge threshold.
pub fn make_envelope_within(spec: &PulseSpec, grid: &Grid, threshold: f64) -> Result<Vec<C64>> {
    spec.validate()?;
    let edge = spec.amplitude(grid.t_min).max(spec.amplitude(grid.t_max));
    if edge >= threshold {
        return Err(Error::WindowTooNarrow { value: edge, threshold });
    }
    let phase = C64::from_polar(1.0, spec.phase);
    Ok((0..grid.nt()).map(|i| phase * spec.amplitude(grid.t_at(i))).collect())
}

/// Zeroes every sample with magnitude below `threshold`.
pub fn truncate_envelope(samples: &[C64], threshold: f64) -> Vec<C64> {
    samples.iter().map(|&w| if w.norm() < threshold { C64::new(0.0, 0.0) } else { w }).collect()
}

/// Sampled and truncated input envelope.
pub fn input_envelope(spec: &PulseSpec, grid: &Grid) -> Result<Vec<C64>> {
    Ok(truncate_envelope(&make_envelope(spec, grid)?, TRUNCATION_THRESHOLD))
}

/// Trapezoidal time integral of the envelope over the whole window.
///
/// Each sample contributes its magnitude signed by its real part, which for
/// real envelopes is the envelope itself and for a constant phase `phi`
/// carries the sign of `cos(phi)`.
pub fn pulse_area(samples: &[C64], dt: f64) -> f64 {
    trapezoid(samples.iter().map(|w| if w.re < 0.0 { -w.norm() } else { w.norm() }), dt)
}

/// `sqrt(theta13^2 + theta23^2)`.
pub fn total_area(theta13: f64, theta23: f64) -> f64 {
    theta13.hypot(theta23)
}

/// Imprint location predicted from the entry areas, `ln(theta13 / theta23)`,
/// in absorption lengths.
pub fn predicted_location(theta13: f64, theta23: f64) -> f64 {
    (theta13 / theta23).ln()
}

/// Signal (1-3) and control (2-3) inputs injected together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputPair {
    pub signal: PulseSpec,
    pub control: PulseSpec,
}

impl InputPair {
    pub fn is_time_matched(&self) -> bool {
        self.signal.duration == self.control.duration && self.signal.center == self.control.center
    }

    pub fn at_center(self, center: f64) -> Self {
        InputPair {
            signal: PulseSpec { center, ..self.signal },
            control: PulseSpec { center, ..self.control },
        }
    }

    pub fn envelopes(&self, grid: &Grid) -> Result<(Vec<C64>, Vec<C64>)> {
        Ok((input_envelope(&self.signal, grid)?, input_envelope(&self.control, grid)?))
    }
}

/// Time-matched sech pair with total area `theta_tot` whose area ratio places
/// the imprint at `x1_target`.
pub fn matched_input_for_target(x1_target: f64, theta_tot: f64, duration: f64) -> InputPair {
    let theta13 = theta_tot / (1.0 + (-2.0 * x1_target).exp()).sqrt();
    let theta23 = theta13 * (-x1_target).exp();
    InputPair {
        signal: PulseSpec::sech(theta13, duration, 0.0),
        control: PulseSpec::sech(theta23, duration, 0.0),
    }
}

/// Pair with a fixed signal area and the control area that places the imprint
/// at `x1_target`.
pub fn signal_fixed_input_for_target(
    x1_target: f64,
    theta13: f64,
    duration: f64,
    shape: PulseShape,
) -> InputPair {
    InputPair {
        signal: PulseSpec::new(shape, theta13, duration, 0.0),
        control: PulseSpec::new(shape, theta13 * (-x1_target).exp(), duration, 0.0),
    }
}
