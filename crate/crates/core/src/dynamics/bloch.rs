//! Decay-modified Bloch equations for the lambda system and their time march
//! at a fixed position.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::medium::MediumSpec;
use crate::error::{Error, Result};

const I_HALF: C64 = C64::new(0.0, 0.5);

/// `d rho / dT` under the fields `omega13`, `omega23` (units of `1/tau_a`).
///
/// Spontaneous emission empties `|3>` at rate `Gamma3` and refills each ground
/// state at `Gamma3 / 2`; optical coherences decay at `Gamma3 / 2`; the ground
/// coherence `rho12` is undamped.
#[inline]
pub fn bloch_derivative(
    rho: &DensityMatrix,
    omega13: C64,
    omega23: C64,
    medium: &MediumSpec,
) -> DensityMatrix {
    let gamma = medium.gamma3_tau;
    let i_delta = C64::new(0.0, medium.delta_tau);
    let o13c = omega13.conj();
    let o23c = omega23.conj();
    let rho31 = rho.rho31();
    let rho32 = rho.rho32();

    let pump13 = I_HALF * (o13c * rho31 - omega13 * rho.rho13);
    let pump23 = I_HALF * (o23c * rho32 - omega23 * rho.rho23);

    DensityMatrix {
        rho11: pump13.re + 0.5 * gamma * rho.rho33,
        rho22: pump23.re + 0.5 * gamma * rho.rho33,
        rho33: -pump13.re - pump23.re - gamma * rho.rho33,
        rho12: I_HALF * (o13c * rho32 - omega23 * rho.rho13),
        rho13: i_delta * rho.rho13 - I_HALF * o23c * rho.rho12 + I_HALF * o13c * (rho.rho33 - rho.rho11)
            - 0.5 * gamma * rho.rho13,
        rho23: i_delta * rho.rho23 - I_HALF * o13c * rho.rho21() + I_HALF * o23c * (rho.rho33 - rho.rho22)
            - 0.5 * gamma * rho.rho23,
    }
}

/// How envelope values between samples are reconstructed for the RK4 midpoint
/// stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfStep {
    /// Two-point average. Limits the march to second order in `dT`.
    Linear,
    /// Four-point Lagrange midpoint, one-sided at the window edges.
    #[default]
    Cubic,
}

impl HalfStep {
    /// Envelope values at `T_i + dT/2` for `i in 0..n-1`.
    pub fn midpoints(self, samples: &[C64]) -> Vec<C64> {
        let n = samples.len();
        if n < 2 {
            return Vec::new();
        }
        match self {
            HalfStep::Linear => samples.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
            HalfStep::Cubic if n < 4 => HalfStep::Linear.midpoints(samples),
            HalfStep::Cubic => {
                let s = samples;
                let mut out = Vec::with_capacity(n - 1);
                out.push((5.0 * s[0] + 15.0 * s[1] - 5.0 * s[2] + s[3]) / 16.0);
                for i in 1..n - 2 {
                    out.push((-s[i - 1] + 9.0 * s[i] + 9.0 * s[i + 1] - s[i + 2]) / 16.0);
                }
                out.push((s[n - 4] - 5.0 * s[n - 3] + 15.0 * s[n - 2] + 5.0 * s[n - 1]) / 16.0);
                out
            }
        }
    }
}

/// Marches one slice in `T` with classical RK4, calling `visit(i, rho)` at
/// every node including the initial one. On a non-finite state returns the
/// offending `T` index.
pub(crate) fn march_slice(
    rho_init: DensityMatrix,
    omega13: &[C64],
    omega23: &[C64],
    medium: &MediumSpec,
    dt: f64,
    half_step: HalfStep,
    mut visit: impl FnMut(usize, &DensityMatrix),
) -> std::result::Result<(), usize> {
    debug_assert_eq!(omega13.len(), omega23.len());
    let n = omega13.len();
    let mid13 = half_step.midpoints(omega13);
    let mid23 = half_step.midpoints(omega23);
    let zero = C64::new(0.0, 0.0);

    // Without decay or detuning the field-free generator is identically zero.
    let inert_when_dark = medium.gamma3_tau == 0.0 && medium.delta_tau == 0.0;

    let mut rho = rho_init;
    visit(0, &rho);
    for i in 0..n.saturating_sub(1) {
        let (a13, a23) = (omega13[i], omega23[i]);
        let (m13, m23) = (mid13[i], mid23[i]);
        let (b13, b23) = (omega13[i + 1], omega23[i + 1]);

        // Every RK4 stage would be exactly zero: no field, and either an inert
        // generator or a ground superposition (which nothing acts on).
        let idle = [a13, a23, m13, m23, b13, b23].iter().all(|w| *w == zero)
            && (inert_when_dark || (rho.rho33 == 0.0 && rho.rho13 == zero && rho.rho23 == zero));
        if !idle {
            let k1 = bloch_derivative(&rho, a13, a23, medium);
            let k2 = bloch_derivative(&(rho + (0.5 * dt) * k1), m13, m23, medium);
            let k3 = bloch_derivative(&(rho + (0.5 * dt) * k2), m13, m23, medium);
            let k4 = bloch_derivative(&(rho + dt * k3), b13, b23, medium);
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !rho.is_finite() {
                return Err(i + 1);
            }
        }
        visit(i + 1, &rho);
    }
    Ok(())
}

/// Density-matrix trajectory at one position under sampled envelopes.
///
/// Both envelopes must be sampled on the same uniform `T` grid with spacing
/// `dt`; the returned vector has one entry per sample.
pub fn advance_bloch_slice(
    rho_init: DensityMatrix,
    omega13: &[C64],
    omega23: &[C64],
    medium: &MediumSpec,
    dt: f64,
    half_step: HalfStep,
) -> Result<Vec<DensityMatrix>> {
    if omega13.len() != omega23.len() {
        return Err(Error::invalid("envelope sample counts differ"));
    }
    let mut out = Vec::with_capacity(omega13.len());
    march_slice(rho_init, omega13, omega23, medium, dt, half_step, |_, r| out.push(*r))
        .map_err(|t_index| Error::NonFiniteState { z_index: 0, t_index })?;
    Ok(out)
}
