use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibrate::resolved_config;
use super::run::run_scenario;
use super::{Case, PulseEvent, ScenarioConfig, ScenarioKind, TargetedPair};
use crate::analysis::ImprintNotFound;
use crate::error::{Error, Result};
use crate::pulses::{predicted_location, InputPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Storing control area, radians.
    ControlArea,
    /// Total storing area at a fixed area ratio, radians.
    TotalArea,
    /// Storing control duration over signal duration.
    DurationRatio,
    /// Displacing control duration, `tau_a`.
    DisplacingDuration,
    /// Displacing control area, radians.
    DisplacingArea,
    /// Target imprint location before displacement, absorption lengths.
    StorageLocation,
}

impl SweepAxis {
    pub fn is_storage(self) -> bool {
        matches!(self, SweepAxis::ControlArea | SweepAxis::TotalArea | SweepAxis::DurationRatio)
    }

    /// Column heading and the factor converting a value into its column.
    pub fn column(self) -> (&'static str, f64) {
        match self {
            SweepAxis::ControlArea => ("theta23_over_pi", 1.0 / PI),
            SweepAxis::TotalArea => ("theta_tot_over_pi", 1.0 / PI),
            SweepAxis::DurationRatio => ("tau_c_over_tau_s", 1.0),
            SweepAxis::DisplacingDuration => ("tau_b_over_tau_a", 1.0),
            SweepAxis::DisplacingArea => ("theta23b_over_pi", 1.0 / PI),
            SweepAxis::StorageLocation => ("kappa_x1", 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub(crate) fn validate(&self, cfg: &ScenarioConfig) -> Result<()> {
        if self.values.is_empty() || self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("sweep values must be positive and finite"));
        }
        let pair_first =
            matches!(cfg.sequence.first(), Some(PulseEvent::Pair(_) | PulseEvent::TargetedPair(_)));
        if !pair_first {
            return Err(Error::invalid("sweeps need an input pair as the first event"));
        }
        if !self.axis.is_storage() && cfg.sequence.len() < 2 {
            return Err(Error::invalid("displacement sweeps need a control after the pair"));
        }
        Ok(())
    }
}

/// Observables of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Imprint location after storage; the medium length if it was pushed out.
    pub location: f64,
    /// Displacement by the final control (displacement axes only).
    pub displacement: Option<f64>,
    pub flipped: Option<bool>,
    /// The last imprint left the medium.
    pub pushed_out: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<SweepPoint, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub case: Case,
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `(value, observable)` for rows that succeeded. The observable is the
    /// location for storage axes and the displacement otherwise.
    pub fn series(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| {
                let p = r.outcome.as_ref().ok()?;
                let y = if self.axis.is_storage() { p.location } else { p.displacement? };
                Some((r.value, y))
            })
            .collect()
    }
}

/// Runs one scenario per sweep value on up to `cfg.workers` threads.
///
/// Targeted events of the base sequence are resolved once; rows then vary a
/// single parameter of the concrete pulses. Row failures are recorded in the
/// table rather than aborting the sweep.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let spec = cfg.sweep.clone().ok_or_else(|| Error::invalid("configuration has no sweep"))?;
    let (base, _) = resolved_config(cfg)?;
    let first_target = match cfg.sequence[0] {
        PulseEvent::TargetedPair(t) => Some(t),
        _ => None,
    };
    let row_config = |v: f64| row_config(&base, first_target, spec.axis, v);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        spec.values
            .par_iter()
            .map(|&value| SweepRow { value, outcome: run_row(&row_config(value)).map_err(|e| e.to_string()) })
            .collect()
    });
    Ok(SweepTable { case: cfg.case, axis: spec.axis, rows })
}

fn row_config(
    base: &ScenarioConfig,
    target: Option<TargetedPair>,
    axis: SweepAxis,
    v: f64,
) -> ScenarioConfig {
    let mut cfg = base.clone();
    cfg.sweep = None;
    cfg.workers = 1;
    let PulseEvent::Pair(pair) = cfg.sequence[0] else {
        unreachable!("base sequence is resolved");
    };
    let set_pair = |cfg: &mut ScenarioConfig, p: InputPair| {
        cfg.sequence = vec![PulseEvent::Pair(p)];
        cfg.kind = ScenarioKind::Storage;
    };
    match axis {
        SweepAxis::ControlArea => {
            let mut p = pair;
            p.control.area = v;
            set_pair(&mut cfg, p);
        }
        SweepAxis::TotalArea => {
            let x = predicted_location(pair.signal.area, pair.control.area);
            let mut p = pair;
            p.signal.area = v / (1.0 + (-2.0 * x).exp()).sqrt();
            p.control.area = p.signal.area * (-x).exp();
            set_pair(&mut cfg, p);
        }
        SweepAxis::DurationRatio => {
            let mut p = pair;
            p.control.duration = v * pair.signal.duration;
            set_pair(&mut cfg, p);
        }
        SweepAxis::DisplacingDuration | SweepAxis::DisplacingArea => {
            cfg.kind = ScenarioKind::Displacement;
            if let Some(PulseEvent::Control(c)) = cfg.sequence.last_mut() {
                match axis {
                    SweepAxis::DisplacingDuration => c.duration = v,
                    _ => c.area = v,
                }
            }
        }
        SweepAxis::StorageLocation => {
            cfg.kind = ScenarioKind::Displacement;
            let t = target.unwrap_or(TargetedPair {
                x1: v,
                signal_area: pair.signal.area,
                duration: pair.signal.duration,
                center: pair.signal.center,
                calibrate: false,
            });
            cfg.sequence[0] = PulseEvent::TargetedPair(TargetedPair { x1: v, ..t });
        }
    }
    cfg
}

fn run_row(cfg: &ScenarioConfig) -> Result<SweepPoint> {
    let res = run_scenario(cfg);
    if let Err(Error::ImprintNotFound(ImprintNotFound::PushedOut)) = res {
        if cfg.kind == ScenarioKind::Storage {
            let length = cfg.medium.length;
            return Ok(SweepPoint { location: length, displacement: None, flipped: None, pushed_out: true });
        }
    }
    let res = res?;
    let location = res.storage()?.center;
    Ok(match res.displacement {
        Some(d) => SweepPoint {
            location,
            displacement: Some(d.delta),
            flipped: d.flip.map(|f| f == crate::analysis::PhaseFlip::Flipped),
            pushed_out: d.pushed_out,
        },
        None => SweepPoint { location, displacement: None, flipped: None, pushed_out: false },
    })
}
