//! Quick self-check suite: closed-form Bloch oracles, conservation laws,
//! transparency of a 2pi pulse and convergence order on a short medium.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analysis::shape_correlation;
use crate::dynamics::{
    advance_bloch_slice, integrate_medium, DensityMatrix, Grid, HalfStep, MediumSpec, Retention,
};
use crate::error::Result;
use crate::pulses::{input_envelope, make_envelope, pulse_area, PulseSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckOutcome { name, passed, detail }
    }
}

/// Largest deviation of a constant resonant drive on `|1> <-> |3>` from
/// `rho33 = sin^2(Omega t / 2)`, at step `dt` over `[0, t_end]`.
pub fn rabi_error(omega: f64, dt: f64, t_end: f64) -> Result<f64> {
    let n = (t_end / dt).round() as usize + 1;
    let o13 = vec![C64::new(omega, 0.0); n];
    let o23 = vec![C64::new(0.0, 0.0); n];
    let states = advance_bloch_slice(
        DensityMatrix::ground(),
        &o13,
        &o23,
        &MediumSpec::ideal(1.0),
        dt,
        HalfStep::default(),
    )?;
    Ok(states
        .iter()
        .enumerate()
        .map(|(i, r)| (r.rho33 - (0.5 * omega * i as f64 * dt).sin().powi(2)).abs())
        .fold(0.0, f64::max))
}

/// Largest deviation of an undriven excited atom from
/// `rho33 = exp(-Gamma3 t)`.
pub fn decay_error(gamma3_tau: f64, dt: f64, t_end: f64) -> Result<f64> {
    let n = (t_end / dt).round() as usize + 1;
    let zero = vec![C64::new(0.0, 0.0); n];
    let medium = MediumSpec { gamma3_tau, ..MediumSpec::ideal(1.0) };
    let states =
        advance_bloch_slice(DensityMatrix::excited(), &zero, &zero, &medium, dt, HalfStep::default())?;
    Ok(states
        .iter()
        .enumerate()
        .map(|(i, r)| (r.rho33 - (-gamma3_tau * i as f64 * dt).exp()).abs())
        .fold(0.0, f64::max))
}

/// Exit-face signal of a lone untruncated 2pi sech pulse.
fn sit_output(length: f64, dt: f64, dz: f64, t_min: f64, t_max: f64) -> Result<(Grid, Vec<C64>)> {
    let grid = Grid::new(dt, dz, t_min, t_max, length)?;
    let input = make_envelope(&PulseSpec::sech(2.0 * PI, 1.0, 0.0), &grid)?;
    let zero = vec![C64::new(0.0, 0.0); grid.nt()];
    let run = integrate_medium(&input, &zero, &MediumSpec::ideal(length), &grid, &Retention::default())?;
    Ok((grid, run.output13))
}

fn max_diff_on_common_nodes(coarse: &[C64], fine: &[C64], stride: usize) -> f64 {
    coarse.iter().enumerate().map(|(i, c)| (c - fine[i * stride]).norm()).fold(0.0, f64::max)
}

/// Observed orders `(dZ, dT)` from three-level Richardson ratios on a short
/// transparent medium.
pub fn convergence_orders() -> Result<(f64, f64)> {
    let (length, t0, t1) = (2.0, -16.0, 16.0);
    let z: Vec<Vec<C64>> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dz| sit_output(length, 0.01, dz, t0, t1).map(|r| r.1))
        .collect::<Result<_>>()?;
    let z_order =
        (max_diff_on_common_nodes(&z[0], &z[1], 1) / max_diff_on_common_nodes(&z[1], &z[2], 1)).log2();
    let t: Vec<Vec<C64>> = [0.08, 0.04, 0.02]
        .iter()
        .map(|&dt| sit_output(length, dt, 0.01, t0, t1).map(|r| r.1))
        .collect::<Result<_>>()?;
    let t_order =
        (max_diff_on_common_nodes(&t[0], &t[1], 2) / max_diff_on_common_nodes(&t[1], &t[2], 2)).log2();
    Ok((z_order, t_order))
}

/// Runs the whole suite.
pub fn run_checks() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    let e = rabi_error(1.3, 0.02, 20.0)?;
    out.push(CheckOutcome::new("bloch_rabi_oracle", e < 1e-6, format!("max error {e:.2e}")));
    let e = decay_error(0.01, 0.02, 50.0)?;
    out.push(CheckOutcome::new("bloch_decay_oracle", e < 1e-6, format!("max error {e:.2e}")));

    let grid = Grid::new(0.02, 0.02, -16.0, 24.0, 4.0)?;
    let pulse = PulseSpec::sech(2.0 * PI, 1.0, 0.0);
    let input = input_envelope(&pulse, &grid)?;
    let zero = vec![C64::new(0.0, 0.0); grid.nt()];
    let run = integrate_medium(&input, &zero, &MediumSpec::ideal(4.0), &grid, &Retention::default())?;
    let area = pulse_area(&run.output13, grid.dt);
    out.push(CheckOutcome::new(
        "sit_area",
        (area / (2.0 * PI) - 1.0).abs() < 0.01,
        format!("output area {:.5} pi", area / PI),
    ));
    let r = shape_correlation(&input, &run.output13)?;
    out.push(CheckOutcome::new("sit_shape", r >= 0.999, format!("r = {r:.6}")));
    let d = run.diagnostics;
    out.push(CheckOutcome::new(
        "conservation",
        d.max_trace_drift < 1e-8 && d.max_purity_drift < 1e-6 && d.max_cauchy_schwarz_excess <= 1e-12,
        format!(
            "trace {:.1e}, purity {:.1e}, cauchy-schwarz {:.1e}",
            d.max_trace_drift, d.max_purity_drift, d.max_cauchy_schwarz_excess
        ),
    ));

    let (zo, to) = convergence_orders()?;
    out.push(CheckOutcome::new("order_dz", zo >= 2.0, format!("observed {zo:.2}")));
    out.push(CheckOutcome::new("order_dt", to >= 4.0, format!("observed {to:.2}")));
    Ok(out)
}
