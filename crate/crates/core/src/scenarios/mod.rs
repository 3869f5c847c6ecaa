//! End-to-end experiments: storage, displacement, retrieval and parameter
//! sweeps across the three canonical cases.

mod calibrate;
pub mod figures;
mod run;
mod sweep;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::DETECTION_THRESHOLD;
use crate::dynamics::{MediumSpec, DEFAULT_DT, DEFAULT_DZ, DEFAULT_LENGTH, RB87_GAMMA3_TAU};
use crate::error::{Error, Result};
use crate::pulses::{InputPair, PulseShape, PulseSpec, TRUNCATION_THRESHOLD};

pub use calibrate::{calibrate_control, calibrate_pair, CALIBRATION_TOLERANCE};
pub use run::{
    run_displacement, run_retrieval, run_scenario, run_storage, DisplacementReport, ImprintRecord,
    OutputPhase, ResolvedEvent, RetrievalReport, ScenarioResult,
};
pub use sweep::{run_sweep, SweepAxis, SweepPoint, SweepRow, SweepSpec, SweepTable};

/// Spacing between consecutive pulse events in the built-in experiments.
pub const EVENT_GAP: f64 = 30.0;

/// Minimum event spacing in units of the longest pulse duration involved.
pub const MIN_EVENT_SEPARATION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Hyperbolic-secant pulses, no spontaneous emission.
    SechIdeal,
    /// Gaussian pulses, no spontaneous emission.
    GaussianIdeal,
    /// Hyperbolic-secant pulses with `Gamma3 tau_a = 0.01`.
    SechDecay,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::SechIdeal, Case::GaussianIdeal, Case::SechDecay];

    pub fn shape(self) -> PulseShape {
        match self {
            Case::GaussianIdeal => PulseShape::Gaussian,
            Case::SechIdeal | Case::SechDecay => PulseShape::Sech,
        }
    }

    pub fn default_gamma3_tau(self) -> f64 {
        match self {
            Case::SechDecay => RB87_GAMMA3_TAU,
            _ => 0.0,
        }
    }

    /// Rb-87 medium of the given length with this case's decay rate.
    pub fn medium(self, length: f64) -> MediumSpec {
        MediumSpec::rubidium(length, self == Case::SechDecay)
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::SechIdeal => "sech_ideal",
            Case::GaussianIdeal => "gaussian_ideal",
            Case::SechDecay => "sech_decay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Integrate and report boundary areas only.
    Propagation,
    Storage,
    Displacement,
    Retrieval,
}

/// Input pair whose control area is chosen for an imprint location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetedPair {
    /// Target imprint location, absorption lengths.
    pub x1: f64,
    pub signal_area: f64,
    /// Shared duration of signal and control.
    pub duration: f64,
    pub center: f64,
    /// Search the control area against the measured imprint center instead
    /// of trusting the closed-form location.
    pub calibrate: bool,
}

/// Control pulse whose duration is chosen for a displacement of the
/// existing imprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetedControl {
    pub delta: f64,
    pub area: f64,
    pub center: f64,
    /// Duration of the storing pulses the displacement law refers to.
    pub tau_a: f64,
    pub calibrate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseEvent {
    /// Lone pulse on the 1-3 transition.
    Signal(PulseSpec),
    /// Lone pulse on the 2-3 transition.
    Control(PulseSpec),
    Pair(InputPair),
    TargetedPair(TargetedPair),
    TargetedControl(TargetedControl),
}

impl PulseEvent {
    pub fn center(&self) -> f64 {
        match self {
            PulseEvent::Signal(p) | PulseEvent::Control(p) => p.center,
            PulseEvent::Pair(p) => p.signal.center,
            PulseEvent::TargetedPair(t) => t.center,
            PulseEvent::TargetedControl(t) => t.center,
        }
    }

    /// Longest duration involved; targeted controls are bounded by `tau_a`.
    pub fn max_duration(&self) -> f64 {
        match self {
            PulseEvent::Signal(p) | PulseEvent::Control(p) => p.duration,
            PulseEvent::Pair(p) => p.signal.duration.max(p.control.duration),
            PulseEvent::TargetedPair(t) => t.duration,
            PulseEvent::TargetedControl(t) => t.tau_a,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            PulseEvent::Signal(p) | PulseEvent::Control(p) => p.validate(),
            PulseEvent::Pair(p) => {
                p.signal.validate()?;
                p.control.validate()
            }
            PulseEvent::TargetedPair(t) => {
                if !(t.duration > 0.0 && t.signal_area > 0.0 && t.x1.is_finite()) {
                    return Err(Error::invalid("targeted pair needs positive duration and area"));
                }
                Ok(())
            }
            PulseEvent::TargetedControl(t) => {
                if !(t.delta > 0.0 && t.area > 0.0 && t.tau_a > 0.0) {
                    return Err(Error::invalid(
                        "targeted control needs positive displacement, area and tau_a",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Integration steps and optional explicit time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSteps {
    pub dt: f64,
    pub dz: f64,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

impl Default for GridSteps {
    fn default() -> Self {
        GridSteps { dt: DEFAULT_DT, dz: DEFAULT_DZ, t_min: None, t_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub case: Case,
    pub kind: ScenarioKind,
    pub medium: MediumSpec,
    pub steps: GridSteps,
    pub sequence: Vec<PulseEvent>,
    /// Extra instants at which the imprint is captured.
    pub snapshot_times: Vec<f64>,
    pub sweep: Option<SweepSpec>,
    pub truncation_threshold: f64,
    pub detection_threshold: f64,
    pub retain_fields: bool,
    pub workers: usize,
}

impl ScenarioConfig {
    /// Empty scenario with the case's default medium and default steps.
    pub fn new(case: Case, kind: ScenarioKind) -> Self {
        ScenarioConfig {
            case,
            kind,
            medium: case.medium(DEFAULT_LENGTH),
            steps: GridSteps::default(),
            sequence: Vec::new(),
            snapshot_times: Vec::new(),
            sweep: None,
            truncation_threshold: TRUNCATION_THRESHOLD,
            detection_threshold: DETECTION_THRESHOLD,
            retain_fields: false,
            workers: 1,
        }
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.medium.length = length;
        self
    }

    pub fn with_event(mut self, event: PulseEvent) -> Self {
        self.sequence.push(event);
        self
    }

    /// Lone 2pi signal pulse in an ideal medium of equal couplings.
    pub fn sit(case: Case) -> Self {
        let mut cfg = ScenarioConfig::new(case, ScenarioKind::Propagation);
        cfg.medium.mu_ratio = 1.0;
        cfg.with_event(PulseEvent::Signal(PulseSpec::new(case.shape(), 2.0 * PI, 1.0, 0.0)))
    }

    /// 2pi signal with the control area placing the imprint at `x1`.
    pub fn storage(case: Case, x1: f64, calibrate: bool) -> Self {
        ScenarioConfig::new(case, ScenarioKind::Storage).with_event(PulseEvent::TargetedPair(TargetedPair {
            x1,
            signal_area: 2.0 * PI,
            duration: 1.0,
            center: 0.0,
            calibrate,
        }))
    }

    /// Calibrated storage at `x1` followed by a control of duration `tau_b`
    /// and area `area_b`.
    pub fn displacement(case: Case, x1: f64, tau_b: f64, area_b: f64) -> Self {
        let mut cfg = ScenarioConfig::storage(case, x1, true);
        cfg.kind = ScenarioKind::Displacement;
        cfg.with_event(PulseEvent::Control(PulseSpec::new(case.shape(), area_b, tau_b, EVENT_GAP)))
    }

    /// One-step: store at 8, push out with `tau_b = tau_a`. Two-step: store
    /// at 5, displace by 3, push out.
    pub fn retrieval(case: Case, steps: usize) -> Result<Self> {
        let push = |center| PulseEvent::Control(PulseSpec::new(case.shape(), 2.0 * PI, 1.0, center));
        let mut cfg = match steps {
            1 => ScenarioConfig::storage(case, 8.0, true).with_event(push(EVENT_GAP)),
            2 => ScenarioConfig::storage(case, 5.0, true)
                .with_event(PulseEvent::TargetedControl(TargetedControl {
                    delta: 3.0,
                    area: 2.0 * PI,
                    center: EVENT_GAP,
                    tau_a: 1.0,
                    calibrate: true,
                }))
                .with_event(push(2.0 * EVENT_GAP)),
            _ => return Err(Error::invalid("retrieval supports one or two steps")),
        };
        cfg.kind = ScenarioKind::Retrieval;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        if !(self.steps.dt > 0.0 && self.steps.dz > 0.0) {
            return Err(Error::invalid("dT and dZ must be positive"));
        }
        if self.sequence.is_empty() {
            return Err(Error::invalid("sequence must contain at least one pulse event"));
        }
        for e in &self.sequence {
            e.validate()?;
        }
        for w in self.sequence.windows(2) {
            let gap = w[1].center() - w[0].center();
            let need = MIN_EVENT_SEPARATION * w[0].max_duration().max(w[1].max_duration());
            if gap < need {
                return Err(Error::invalid(format!(
                    "pulse events at {} and {} are closer than {need} tau_a",
                    w[0].center(),
                    w[1].center()
                )));
            }
        }
        if !(self.truncation_threshold > 0.0 && self.detection_threshold > 0.0) {
            return Err(Error::invalid("thresholds must be positive"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("worker budget must be at least 1"));
        }
        let first = &self.sequence[0];
        match self.kind {
            ScenarioKind::Propagation => {}
            ScenarioKind::Storage => {
                if !is_pair(first) {
                    return Err(Error::invalid("storage needs an input pair as its first event"));
                }
            }
            ScenarioKind::Displacement | ScenarioKind::Retrieval => {
                if !is_pair(first) || self.sequence.len() < 2 {
                    return Err(Error::invalid(
                        "displacement and retrieval need an input pair followed by control pulses",
                    ));
                }
                if self.sequence[1..].iter().any(is_pair) {
                    return Err(Error::invalid("only the first event may be an input pair"));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate(self)?;
        }
        Ok(())
    }
}

fn is_pair(e: &PulseEvent) -> bool {
    matches!(e, PulseEvent::Pair(_) | PulseEvent::TargetedPair(_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_validate() {
        for case in Case::ALL {
            ScenarioConfig::sit(case).validate().unwrap();
            ScenarioConfig::storage(case, 3.0, false).validate().unwrap();
            ScenarioConfig::displacement(case, 3.0, 0.5, 2.0 * PI).validate().unwrap();
            ScenarioConfig::retrieval(case, 1).unwrap().validate().unwrap();
            ScenarioConfig::retrieval(case, 2).unwrap().validate().unwrap();
        }
        assert!(ScenarioConfig::retrieval(Case::SechIdeal, 3).is_err());
    }

    #[test]
    fn empty_sequence_rejected() {
        let err = ScenarioConfig::new(Case::SechIdeal, ScenarioKind::Storage).validate().unwrap_err();
        assert_eq!(err.to_string(), "validation error: sequence must contain at least one pulse event");
    }

    #[test]
    fn crowded_events_rejected() {
        let cfg = ScenarioConfig::storage(Case::SechIdeal, 3.0, false)
            .with_event(PulseEvent::Control(PulseSpec::sech(2.0 * PI, 1.0, 5.0)));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn decay_case_medium() {
        assert_eq!(Case::SechDecay.medium(10.0).gamma3_tau, 0.01);
        assert_eq!(Case::GaussianIdeal.medium(10.0).gamma3_tau, 0.0);
    }
}
