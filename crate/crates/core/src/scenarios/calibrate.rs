//! Searches for input parameters that realize a measured target, for cases
//! where the closed-form laws are only approximate.

use super::run::{displacement_report, resolve_sequence, simulate, ResolvedEvent};
use super::{PulseEvent, ScenarioConfig, TargetedControl, TargetedPair};
use crate::analysis::{duration_for_displacement, ImprintNotFound};
use crate::error::Result;
use crate::pulses::{InputPair, PulseSpec};

/// Accepted mismatch between measured and target positions, absorption lengths.
pub const CALIBRATION_TOLERANCE: f64 = 0.005;

const MAX_EVALUATIONS: usize = 8;

/// Pair with the configured signal whose control area places the imprint at
/// `target.x1`. Without calibration the area follows `theta23 = theta13 e^-x1`.
pub fn calibrate_pair(cfg: &ScenarioConfig, target: &TargetedPair) -> Result<InputPair> {
    let shape = cfg.case.shape();
    let pair_at = |u: f64| InputPair {
        signal: PulseSpec::new(shape, target.signal_area, target.duration, target.center),
        control: PulseSpec::new(shape, target.signal_area * (-u).exp(), target.duration, target.center),
    };
    if !target.calibrate {
        return Ok(pair_at(target.x1));
    }
    let length = cfg.medium.length;
    let probe = probe_config(cfg);
    let u = solve(target.x1, (-5.0, length + 5.0), |u| {
        let events = [ResolvedEvent { signal: Some(pair_at(u).signal), control: Some(pair_at(u).control) }];
        let sim = simulate(&probe, &events, false)?;
        Ok(match sim.imprints[0].outcome {
            Ok(c) => c.center - target.x1,
            Err(ImprintNotFound::PushedOut) => length - target.x1 + 0.5,
            Err(e) => return Err(e.into()),
        })
    })?;
    Ok(pair_at(u))
}

/// Control whose duration moves the imprint left by `prior` through
/// `target.delta`. Without calibration the duration follows the closed-form
/// displacement law.
pub fn calibrate_control(
    cfg: &ScenarioConfig,
    prior: &[ResolvedEvent],
    target: &TargetedControl,
) -> Result<PulseSpec> {
    let shape = cfg.case.shape();
    let control_at = |u: f64| {
        PulseSpec::new(shape, target.area, duration_for_displacement(u, target.tau_a), target.center)
    };
    if !target.calibrate {
        return Ok(control_at(target.delta));
    }
    let probe = probe_config(cfg);
    let u = solve(target.delta, (0.05, 15.0), |u| {
        let mut events = prior.to_vec();
        events.push(ResolvedEvent { signal: None, control: Some(control_at(u)) });
        let sim = simulate(&probe, &events, false)?;
        let report = displacement_report(&probe, &events, &sim.imprints)?;
        if report.pushed_out {
            return Ok(report.delta - target.delta + 0.5);
        }
        if report.delta.is_nan() {
            return Err(ImprintNotFound::Absent { peak: 0.0 }.into());
        }
        Ok(report.delta - target.delta)
    })?;
    Ok(control_at(u))
}

/// Copy of `cfg` used for calibration runs: automatic window, no extras.
fn probe_config(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut probe = cfg.clone();
    probe.steps.t_min = None;
    probe.steps.t_max = None;
    probe.snapshot_times.clear();
    probe.retain_fields = false;
    probe.sweep = None;
    probe
}

/// Finds `u` in `bounds` with `g(u)` within tolerance, starting from `u0`.
///
/// `g` is expected to behave like `u - u*` plus a slowly varying offset, so the
/// first correction assumes unit slope; afterwards secant steps are used,
/// falling back to bisection once a sign change has been bracketed. Returns the
/// best point found if the budget runs out.
fn solve(u0: f64, bounds: (f64, f64), mut g: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let clamp = |u: f64| u.clamp(bounds.0, bounds.1);
    let mut a = (clamp(u0), g(clamp(u0))?);
    let mut best = a;
    if a.1.abs() < CALIBRATION_TOLERANCE {
        return Ok(a.0);
    }
    let mut next = clamp(a.0 - a.1);
    let mut bracket: Option<((f64, f64), (f64, f64))> = None;
    for _ in 1..MAX_EVALUATIONS {
        let b = (next, g(next)?);
        if b.1.abs() < best.1.abs() {
            best = b;
        }
        if b.1.abs() < CALIBRATION_TOLERANCE {
            return Ok(b.0);
        }
        if let Some((lo, hi)) = bracket {
            bracket = Some(if (b.1 < 0.0) == (lo.1 < 0.0) { (b, hi) } else { (lo, b) });
        } else if (a.1 < 0.0) != (b.1 < 0.0) {
            bracket = Some((a, b));
        }
        let slope = ((b.1 - a.1) / (b.0 - a.0)).clamp(0.2, 5.0);
        let mut candidate = clamp(b.0 - b.1 / slope);
        if let Some((lo, hi)) = bracket {
            let (l, h) = (lo.0.min(hi.0), lo.0.max(hi.0));
            if !(candidate > l && candidate < h) {
                candidate = 0.5 * (lo.0 + hi.0);
            }
        }
        a = b;
        next = candidate;
    }
    Ok(best.0)
}

/// Convenience: resolves every targeted event in `cfg` and returns the
/// configuration with concrete pulses in their place.
pub(crate) fn resolved_config(cfg: &ScenarioConfig) -> Result<(ScenarioConfig, Vec<ResolvedEvent>)> {
    let events = resolve_sequence(cfg)?;
    let mut out = cfg.clone();
    out.sequence = events.iter().map(ResolvedEvent::as_event).collect::<Vec<PulseEvent>>();
    Ok((out, events))
}
