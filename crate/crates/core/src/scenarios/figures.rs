//! Built-in configurations for the published figures and table.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{
    Case, PulseEvent, ScenarioConfig, ScenarioKind, SweepAxis, SweepSpec, TargetedControl, TargetedPair,
    EVENT_GAP,
};
use crate::error::{Error, Result};
use crate::pulses::{matched_input_for_target, signal_fixed_input_for_target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5a,
    Fig5b,
    Fig5c,
    Table1,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig4c,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig5c,
        FigureId::Table1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig4c => "fig4c",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
            FigureId::Fig5c => "fig5c",
            FigureId::Table1 => "table1",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown figure id `{s}`")))
    }
}

/// Imprint location for the storage sweeps of the displacement figures.
pub const DISPLACEMENT_X1: f64 = 3.0;

/// Displacing control duration held fixed while its area is swept.
pub const AREA_SWEEP_TAU_B: f64 = 0.5;

/// Medium length for the location-dependence sweep.
pub const LONG_MEDIUM: f64 = 15.0;

/// Times at which the before/after imprints are shown.
pub const FIG3_TIMES: [f64; 2] = [5.0, 25.0];

/// Sweep values used when reproducing each figure, in the axis's own units.
pub fn default_values(axis: SweepAxis) -> Vec<f64> {
    let steps = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    match axis {
        SweepAxis::ControlArea => (1..=8).map(|x| 2.0 * PI * (-(x as f64)).exp()).collect(),
        SweepAxis::TotalArea => steps(1.8, 2.2, 5).into_iter().map(|v| v * PI).collect(),
        SweepAxis::DurationRatio => steps(0.8, 1.2, 5),
        SweepAxis::DisplacingDuration => steps(0.1, 0.9, 9).into_iter().chain([0.95]).collect(),
        SweepAxis::DisplacingArea => steps(0.8, 3.0, 12).into_iter().map(|v| v * PI).collect(),
        SweepAxis::StorageLocation => steps(3.0, 9.0, 7),
    }
}

/// Storage at 3 followed by a control displacing it by 3, with the imprint
/// captured at the figure's snapshot times.
fn fig3_config() -> ScenarioConfig {
    let case = Case::SechIdeal;
    let mut cfg = ScenarioConfig::new(case, ScenarioKind::Displacement)
        .with_event(PulseEvent::TargetedPair(TargetedPair {
            x1: DISPLACEMENT_X1,
            signal_area: 2.0 * PI,
            duration: 1.0,
            center: -10.0,
            calibrate: true,
        }))
        .with_event(PulseEvent::TargetedControl(TargetedControl {
            delta: 3.0,
            area: 2.0 * PI,
            center: 15.0,
            tau_a: 1.0,
            calibrate: true,
        }));
    cfg.snapshot_times = FIG3_TIMES.to_vec();
    cfg
}

fn sweep_config(case: Case, axis: SweepAxis) -> ScenarioConfig {
    let shape = case.shape();
    let mut cfg = match axis {
        SweepAxis::ControlArea | SweepAxis::DurationRatio => {
            let p = signal_fixed_input_for_target(5.0, 2.0 * PI, 1.0, shape);
            ScenarioConfig::new(case, ScenarioKind::Storage).with_event(PulseEvent::Pair(p))
        }
        SweepAxis::TotalArea => {
            let mut p = matched_input_for_target(5.0, 2.0 * PI, 1.0);
            p.signal.shape = shape;
            p.control.shape = shape;
            ScenarioConfig::new(case, ScenarioKind::Storage).with_event(PulseEvent::Pair(p))
        }
        SweepAxis::DisplacingDuration => ScenarioConfig::displacement(case, DISPLACEMENT_X1, 0.5, 2.0 * PI),
        SweepAxis::DisplacingArea => {
            ScenarioConfig::displacement(case, DISPLACEMENT_X1, AREA_SWEEP_TAU_B, 2.0 * PI)
        }
        SweepAxis::StorageLocation => ScenarioConfig::storage(case, DISPLACEMENT_X1, true)
            .with_length(LONG_MEDIUM)
            .with_event(PulseEvent::TargetedControl(TargetedControl {
                delta: 3.0,
                area: 2.0 * PI,
                center: EVENT_GAP,
                tau_a: 1.0,
                calibrate: true,
            })),
    };
    if !axis.is_storage() {
        cfg.kind = ScenarioKind::Displacement;
    }
    cfg.sweep = Some(SweepSpec { axis, values: default_values(axis) });
    cfg
}

/// Sweep axis behind a figure, if it is a sweep.
pub fn figure_axis(id: FigureId) -> Option<SweepAxis> {
    match id {
        FigureId::Fig4a => Some(SweepAxis::ControlArea),
        FigureId::Fig4b => Some(SweepAxis::TotalArea),
        FigureId::Fig4c => Some(SweepAxis::DurationRatio),
        FigureId::Fig5a => Some(SweepAxis::DisplacingDuration),
        FigureId::Fig5b => Some(SweepAxis::DisplacingArea),
        FigureId::Fig5c => Some(SweepAxis::StorageLocation),
        _ => None,
    }
}

/// Every configuration run to reproduce `id`.
pub fn figure_configs(id: FigureId) -> Vec<ScenarioConfig> {
    if let Some(axis) = figure_axis(id) {
        return Case::ALL.iter().map(|&c| sweep_config(c, axis)).collect();
    }
    match id {
        FigureId::Fig2 => {
            let mut cfg = fig3_config();
            cfg.retain_fields = true;
            vec![cfg]
        }
        FigureId::Fig3 => vec![fig3_config()],
        FigureId::Table1 => [1, 2]
            .into_iter()
            .flat_map(|steps| {
                Case::ALL.iter().map(move |&c| {
                    ScenarioConfig::retrieval(c, steps).expect("one and two steps are supported")
                })
            })
            .collect(),
        _ => unreachable!("sweep figures handled above"),
    }
}
