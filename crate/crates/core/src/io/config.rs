//! TOML configuration documents. Every physical quantity carries its unit in
//! the key: `_tau_a` (times), `_inv_kappa_a` (lengths), `_rad` (areas,
//! phases).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::DETECTION_THRESHOLD;
use crate::dynamics::{MediumSpec, DEFAULT_DT, DEFAULT_DZ, DEFAULT_LENGTH, RB87_MU_RATIO};
use crate::error::{Error, Result};
use crate::pulses::{InputPair, PulseShape, PulseSpec, TRUNCATION_THRESHOLD};
use crate::scenarios::{
    Case, GridSteps, PulseEvent, ScenarioConfig, ScenarioKind, SweepAxis, SweepSpec, TargetedControl,
    TargetedPair,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub medium: MediumSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sequence: Vec<EventEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<SnapshotSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub thresholds: ThresholdSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub case: Case,
    pub kind: ScenarioKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    pub length_inv_kappa_a: Option<f64>,
    /// `mu23 / mu13`.
    pub mu_ratio: Option<f64>,
    /// `Gamma3 tau_a`; defaults to the case's value.
    pub gamma3_tau_a: Option<f64>,
    /// `Delta tau_a`.
    pub detuning_tau_a: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dt_tau_a: Option<f64>,
    pub dz_inv_kappa_a: Option<f64>,
    pub t_min_tau_a: Option<f64>,
    pub t_max_tau_a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseEntry {
    pub shape: PulseShape,
    pub area_rad: f64,
    pub duration_tau_a: f64,
    pub center_tau_a: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub signal: PulseEntry,
    pub control: PulseEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetedPairEntry {
    pub x1_inv_kappa_a: f64,
    pub signal_area_rad: f64,
    pub duration_tau_a: f64,
    pub center_tau_a: f64,
    #[serde(default)]
    pub calibrate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetedControlEntry {
    pub delta_inv_kappa_a: f64,
    pub area_rad: f64,
    pub center_tau_a: f64,
    /// Duration of the storing pulses.
    pub reference_duration_tau_a: f64,
    #[serde(default)]
    pub calibrate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventEntry {
    Signal(PulseEntry),
    Control(PulseEntry),
    Pair(PairEntry),
    TargetedPair(TargetedPairEntry),
    TargetedControl(TargetedControlEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotSection {
    pub times_tau_a: Vec<f64>,
}

/// Exactly one key names the swept parameter and lists its values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control_area_rad: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_area_rad: Option<Vec<f64>>,
    /// Control over signal duration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ratio: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displacing_duration_tau_a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displacing_area_rad: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1_inv_kappa_a: Option<Vec<f64>>,
}

impl SweepSection {
    fn to_spec(&self) -> Result<SweepSpec> {
        let candidates = [
            (SweepAxis::ControlArea, &self.control_area_rad),
            (SweepAxis::TotalArea, &self.total_area_rad),
            (SweepAxis::DurationRatio, &self.duration_ratio),
            (SweepAxis::DisplacingDuration, &self.displacing_duration_tau_a),
            (SweepAxis::DisplacingArea, &self.displacing_area_rad),
            (SweepAxis::StorageLocation, &self.x1_inv_kappa_a),
        ];
        let mut set = candidates.into_iter().filter_map(|(axis, v)| Some((axis, v.clone()?)));
        match (set.next(), set.next()) {
            (Some((axis, values)), None) => Ok(SweepSpec { axis, values }),
            (None, _) => Err(Error::invalid("sweep section must name one swept parameter")),
            (Some(_), Some(_)) => Err(Error::invalid("sweep section names more than one parameter")),
        }
    }

    fn from_spec(spec: &SweepSpec) -> Self {
        let mut s = SweepSection::default();
        let v = Some(spec.values.clone());
        match spec.axis {
            SweepAxis::ControlArea => s.control_area_rad = v,
            SweepAxis::TotalArea => s.total_area_rad = v,
            SweepAxis::DurationRatio => s.duration_ratio = v,
            SweepAxis::DisplacingDuration => s.displacing_duration_tau_a = v,
            SweepAxis::DisplacingArea => s.displacing_area_rad = v,
            SweepAxis::StorageLocation => s.x1_inv_kappa_a = v,
        }
        s
    }
}

/// Dimensionless thresholds on `|tau_a Omega|` and on the `rho22` peak.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub truncation: Option<f64>,
    pub detection: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub retain_fields: Option<bool>,
}

impl From<PulseEntry> for PulseSpec {
    fn from(e: PulseEntry) -> Self {
        PulseSpec {
            shape: e.shape,
            area: e.area_rad,
            duration: e.duration_tau_a,
            center: e.center_tau_a,
            phase: e.phase_rad,
        }
    }
}

impl From<PulseSpec> for PulseEntry {
    fn from(p: PulseSpec) -> Self {
        PulseEntry {
            shape: p.shape,
            area_rad: p.area,
            duration_tau_a: p.duration,
            center_tau_a: p.center,
            phase_rad: p.phase,
        }
    }
}

impl From<EventEntry> for PulseEvent {
    fn from(e: EventEntry) -> Self {
        match e {
            EventEntry::Signal(p) => PulseEvent::Signal(p.into()),
            EventEntry::Control(p) => PulseEvent::Control(p.into()),
            EventEntry::Pair(p) => {
                PulseEvent::Pair(InputPair { signal: p.signal.into(), control: p.control.into() })
            }
            EventEntry::TargetedPair(t) => PulseEvent::TargetedPair(TargetedPair {
                x1: t.x1_inv_kappa_a,
                signal_area: t.signal_area_rad,
                duration: t.duration_tau_a,
                center: t.center_tau_a,
                calibrate: t.calibrate,
            }),
            EventEntry::TargetedControl(t) => PulseEvent::TargetedControl(TargetedControl {
                delta: t.delta_inv_kappa_a,
                area: t.area_rad,
                center: t.center_tau_a,
                tau_a: t.reference_duration_tau_a,
                calibrate: t.calibrate,
            }),
        }
    }
}

impl From<PulseEvent> for EventEntry {
    fn from(e: PulseEvent) -> Self {
        match e {
            PulseEvent::Signal(p) => EventEntry::Signal(p.into()),
            PulseEvent::Control(p) => EventEntry::Control(p.into()),
            PulseEvent::Pair(p) => {
                EventEntry::Pair(PairEntry { signal: p.signal.into(), control: p.control.into() })
            }
            PulseEvent::TargetedPair(t) => EventEntry::TargetedPair(TargetedPairEntry {
                x1_inv_kappa_a: t.x1,
                signal_area_rad: t.signal_area,
                duration_tau_a: t.duration,
                center_tau_a: t.center,
                calibrate: t.calibrate,
            }),
            PulseEvent::TargetedControl(t) => EventEntry::TargetedControl(TargetedControlEntry {
                delta_inv_kappa_a: t.delta,
                area_rad: t.area,
                center_tau_a: t.center,
                reference_duration_tau_a: t.tau_a,
                calibrate: t.calibrate,
            }),
        }
    }
}

impl ConfigDocument {
    /// Applies defaults and validates.
    pub fn to_config(&self) -> Result<ScenarioConfig> {
        let case = self.scenario.case;
        let m = &self.medium;
        let g = &self.grid;
        let cfg = ScenarioConfig {
            case,
            kind: self.scenario.kind,
            medium: MediumSpec {
                length: m.length_inv_kappa_a.unwrap_or(DEFAULT_LENGTH),
                mu_ratio: m.mu_ratio.unwrap_or(RB87_MU_RATIO),
                gamma3_tau: m.gamma3_tau_a.unwrap_or(case.default_gamma3_tau()),
                delta_tau: m.detuning_tau_a.unwrap_or(0.0),
            },
            steps: GridSteps {
                dt: g.dt_tau_a.unwrap_or(DEFAULT_DT),
                dz: g.dz_inv_kappa_a.unwrap_or(DEFAULT_DZ),
                t_min: g.t_min_tau_a,
                t_max: g.t_max_tau_a,
            },
            sequence: self.sequence.iter().map(|&e| e.into()).collect(),
            snapshot_times: self.snapshots.as_ref().map(|s| s.times_tau_a.clone()).unwrap_or_default(),
            sweep: self.sweep.as_ref().map(SweepSection::to_spec).transpose()?,
            truncation_threshold: self.thresholds.truncation.unwrap_or(TRUNCATION_THRESHOLD),
            detection_threshold: self.thresholds.detection.unwrap_or(DETECTION_THRESHOLD),
            retain_fields: self.output.retain_fields.unwrap_or(false),
            workers: self.output.workers.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fully explicit document for `cfg`.
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        ConfigDocument {
            scenario: ScenarioSection { case: cfg.case, kind: cfg.kind },
            medium: MediumSection {
                length_inv_kappa_a: Some(cfg.medium.length),
                mu_ratio: Some(cfg.medium.mu_ratio),
                gamma3_tau_a: Some(cfg.medium.gamma3_tau),
                detuning_tau_a: Some(cfg.medium.delta_tau),
            },
            grid: GridSection {
                dt_tau_a: Some(cfg.steps.dt),
                dz_inv_kappa_a: Some(cfg.steps.dz),
                t_min_tau_a: cfg.steps.t_min,
                t_max_tau_a: cfg.steps.t_max,
            },
            sequence: cfg.sequence.iter().map(|&e| e.into()).collect(),
            snapshots: (!cfg.snapshot_times.is_empty())
                .then(|| SnapshotSection { times_tau_a: cfg.snapshot_times.clone() }),
            sweep: cfg.sweep.as_ref().map(SweepSection::from_spec),
            thresholds: ThresholdSection {
                truncation: Some(cfg.truncation_threshold),
                detection: Some(cfg.detection_threshold),
            },
            output: OutputSection {
                dir: None,
                workers: Some(cfg.workers),
                retain_fields: Some(cfg.retain_fields),
            },
        }
    }
}

/// Parses a TOML document without applying defaults.
pub fn parse_document(text: &str) -> Result<ConfigDocument> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses, applies defaults and validates.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_document(text)?.to_config()
}

/// Canonical TOML text for `cfg`; [`parse_config`] inverts it exactly.
pub fn serialize_config(cfg: &ScenarioConfig) -> String {
    toml::to_string(&ConfigDocument::from_config(cfg)).expect("configuration documents always serialize")
}
