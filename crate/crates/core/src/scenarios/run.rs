use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{calibrate, Case, PulseEvent, ScenarioConfig, ScenarioKind};
use crate::analysis::{
    area_evolution, characterize_imprint, displacement, phase_flip, predicted_displacement,
    retrieval_efficiency, shape_correlation, AreaTable, ImprintCharacter, ImprintNotFound, ImprintSnapshot,
    PhaseFlip,
};
use crate::dynamics::{integrate_medium, Advisory, Diagnostics, Grid, Propagation, Retention};
use crate::error::{Error, Result};
use crate::pulses::{make_envelope_within, pulse_area, truncate_envelope, PulseSpec};

/// Margin before a pulse's truncated leading edge at which the preceding
/// imprint is captured.
const SNAPSHOT_LEAD: f64 = 0.5;

/// Output below this fraction of the input peak counts as nothing retrieved.
const RETRIEVAL_FLOOR: f64 = 1e-3;

/// Pulses actually injected for one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEvent {
    pub signal: Option<PulseSpec>,
    pub control: Option<PulseSpec>,
}

impl ResolvedEvent {
    fn pulses(&self) -> impl Iterator<Item = &PulseSpec> {
        self.signal.iter().chain(self.control.iter())
    }

    pub fn center(&self) -> f64 {
        self.pulses().map(|p| p.center).fold(f64::NAN, f64::min)
    }

    /// Earliest time any pulse of the event exceeds `threshold`.
    pub fn leading_edge(&self, threshold: f64) -> f64 {
        self.pulses().map(|p| p.center - p.cutoff_half_width(threshold)).fold(f64::INFINITY, f64::min)
    }

    pub fn trailing_edge(&self, threshold: f64) -> f64 {
        self.pulses().map(|p| p.center + p.cutoff_half_width(threshold)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn as_event(&self) -> PulseEvent {
        match (self.signal, self.control) {
            (Some(signal), Some(control)) => PulseEvent::Pair(crate::pulses::InputPair { signal, control }),
            (Some(s), None) => PulseEvent::Signal(s),
            (None, Some(c)) => PulseEvent::Control(c),
            (None, None) => unreachable!("resolved events carry at least one pulse"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprintRecord {
    pub snapshot: ImprintSnapshot,
    pub outcome: std::result::Result<ImprintCharacter, ImprintNotFound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub before: ImprintCharacter,
    /// `None` when the imprint left the medium or vanished.
    pub after: Option<ImprintCharacter>,
    /// Measured displacement; `length - before.center` when pushed out.
    pub delta: f64,
    /// Closed-form displacement for the control duration.
    pub predicted: f64,
    pub flip: Option<PhaseFlip>,
    pub pushed_out: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputPhase {
    Same,
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    /// Number of control pulses after storage.
    pub steps: usize,
    pub eta: f64,
    pub r: f64,
    pub phase: OutputPhase,
    /// Start of the window in which the retrieved signal is collected.
    pub window_start: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub case: Case,
    pub kind: ScenarioKind,
    pub grid: Grid,
    pub events: Vec<ResolvedEvent>,
    /// Imprint left by each event, captured just before the next one arrives
    /// (or at the end of the window).
    pub imprints: Vec<ImprintRecord>,
    /// Imprints at the configured extra snapshot times.
    pub snapshots: Vec<ImprintRecord>,
    pub displacement: Option<DisplacementReport>,
    pub retrieval: Option<RetrievalReport>,
    /// Entry-face areas `(theta13, theta23)`.
    pub input_areas: (f64, f64),
    /// Exit-face areas `(theta13, theta23)`.
    pub output_areas: (f64, f64),
    pub areas: Option<AreaTable>,
    pub diagnostics: Diagnostics,
    pub advisories: Vec<Advisory>,
    pub propagation: Propagation,
}

impl ScenarioResult {
    /// Imprint formed by the first event.
    pub fn storage(&self) -> std::result::Result<ImprintCharacter, ImprintNotFound> {
        self.imprints[0].outcome
    }
}

/// Replaces targeted events by concrete pulses, calibrating where requested.
pub(crate) fn resolve_sequence(cfg: &ScenarioConfig) -> Result<Vec<ResolvedEvent>> {
    let shape = cfg.case.shape();
    let mut out: Vec<ResolvedEvent> = Vec::with_capacity(cfg.sequence.len());
    for event in &cfg.sequence {
        let resolved = match *event {
            PulseEvent::Signal(s) => ResolvedEvent { signal: Some(s), control: None },
            PulseEvent::Control(c) => ResolvedEvent { signal: None, control: Some(c) },
            PulseEvent::Pair(p) => ResolvedEvent { signal: Some(p.signal), control: Some(p.control) },
            PulseEvent::TargetedPair(t) => {
                let p = calibrate::calibrate_pair(cfg, &t)?;
                debug_assert_eq!(p.signal.shape, shape);
                ResolvedEvent { signal: Some(p.signal), control: Some(p.control) }
            }
            PulseEvent::TargetedControl(t) => {
                let c = calibrate::calibrate_control(cfg, &out, &t)?;
                ResolvedEvent { signal: None, control: Some(c) }
            }
        };
        out.push(resolved);
    }
    Ok(out)
}

/// Window covering every truncated input plus the transit of the medium.
pub(crate) fn window_for(cfg: &ScenarioConfig, events: &[ResolvedEvent]) -> Result<Grid> {
    let thr = cfg.truncation_threshold;
    let first = events.iter().map(|e| e.leading_edge(thr)).fold(f64::INFINITY, f64::min);
    let last = events.iter().map(|e| e.trailing_edge(thr)).fold(f64::NEG_INFINITY, f64::max);
    let t_min = cfg.steps.t_min.unwrap_or(first - 1.0);
    let t_max = cfg.steps.t_max.unwrap_or(last + 1.5 * cfg.medium.length + 5.0);
    match (cfg.steps.t_min, cfg.steps.t_max) {
        (Some(_), Some(_)) => Grid::new(cfg.steps.dt, cfg.steps.dz, t_min, t_max, cfg.medium.length),
        _ => Grid::snapped(cfg.steps.dt, cfg.steps.dz, t_min, t_max, cfg.medium.length),
    }
}

/// Capture time for the imprint left by event `k`.
pub(crate) fn imprint_time(events: &[ResolvedEvent], k: usize, grid: &Grid, threshold: f64) -> f64 {
    match events.get(k + 1) {
        Some(next) => (next.leading_edge(threshold) - SNAPSHOT_LEAD).max(grid.t_min),
        None => grid.t_max,
    }
}

/// Summed, truncated entry envelopes of all events.
fn entry_fields(cfg: &ScenarioConfig, events: &[ResolvedEvent], grid: &Grid) -> Result<(Vec<C64>, Vec<C64>)> {
    let thr = cfg.truncation_threshold;
    let zero = C64::new(0.0, 0.0);
    let mut in13 = vec![zero; grid.nt()];
    let mut in23 = vec![zero; grid.nt()];
    let add = |dst: &mut Vec<C64>, p: &PulseSpec| -> Result<()> {
        let env = truncate_envelope(&make_envelope_within(p, grid, thr)?, thr);
        dst.iter_mut().zip(env).for_each(|(d, v)| *d += v);
        Ok(())
    };
    for e in events {
        if let Some(s) = &e.signal {
            add(&mut in13, s)?;
        }
        if let Some(c) = &e.control {
            add(&mut in23, c)?;
        }
    }
    Ok((in13, in23))
}

/// Integrates the resolved events and characterizes every imprint.
pub(crate) struct Simulation {
    pub grid: Grid,
    pub imprints: Vec<ImprintRecord>,
    pub extra: Vec<ImprintRecord>,
    pub propagation: Propagation,
}

pub(crate) fn simulate(
    cfg: &ScenarioConfig,
    events: &[ResolvedEvent],
    keep_fields: bool,
) -> Result<Simulation> {
    let grid = window_for(cfg, events)?;
    let (in13, in23) = entry_fields(cfg, events, &grid)?;
    let thr = cfg.truncation_threshold;
    let mut times: Vec<f64> = (0..events.len()).map(|k| imprint_time(events, k, &grid, thr)).collect();
    times.extend(cfg.snapshot_times.iter().copied());
    let mut retention = Retention::with_snapshots(times);
    if keep_fields {
        retention.fields = true;
        retention.z_stride = if cfg.retain_fields { 1 } else { ((0.1 / grid.dz).round() as usize).max(1) };
    }
    let propagation = integrate_medium(&in13, &in23, &cfg.medium, &grid, &retention)?;
    let mut records = propagation.snapshots.iter().map(|s| {
        let snapshot = ImprintSnapshot::from(s);
        let outcome = characterize_imprint(&snapshot, cfg.detection_threshold);
        ImprintRecord { snapshot, outcome }
    });
    let imprints = records.by_ref().take(events.len()).collect();
    let extra = records.collect();
    Ok(Simulation { grid, imprints, extra, propagation })
}

/// Runs whatever the configuration's kind calls for.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let events = resolve_sequence(cfg)?;
    let keep_fields = cfg.retain_fields || cfg.kind == ScenarioKind::Propagation;
    let sim = simulate(cfg, &events, keep_fields)?;
    let p = &sim.propagation;
    let dt = sim.grid.dt;

    let displacement = match cfg.kind {
        ScenarioKind::Displacement => Some(displacement_report(cfg, &events, &sim.imprints)?),
        _ => None,
    };
    let retrieval = match cfg.kind {
        ScenarioKind::Retrieval => Some(retrieval_report(cfg, &events, &sim)?),
        _ => None,
    };
    if matches!(cfg.kind, ScenarioKind::Storage | ScenarioKind::Displacement) {
        sim.imprints[0].outcome?;
    }

    Ok(ScenarioResult {
        case: cfg.case,
        kind: cfg.kind,
        grid: sim.grid,
        input_areas: (pulse_area(&p.input13, dt), pulse_area(&p.input23, dt)),
        output_areas: (pulse_area(&p.output13, dt), pulse_area(&p.output23, dt)),
        areas: p.fields.as_ref().map(area_evolution),
        diagnostics: p.diagnostics,
        advisories: p.advisories.clone(),
        events,
        imprints: sim.imprints,
        snapshots: sim.extra,
        displacement,
        retrieval,
        propagation: sim.propagation,
    })
}

/// Stores one pair and characterizes the imprint.
pub fn run_storage(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    with_kind(cfg, ScenarioKind::Storage)
}

/// Stores, displaces with the final control, and compares the imprints.
pub fn run_displacement(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    with_kind(cfg, ScenarioKind::Displacement)
}

/// Stores, applies every control, and scores the pulse leaving the medium
/// after the final one.
pub fn run_retrieval(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    with_kind(cfg, ScenarioKind::Retrieval)
}

fn with_kind(cfg: &ScenarioConfig, kind: ScenarioKind) -> Result<ScenarioResult> {
    if cfg.kind == kind {
        return run_scenario(cfg);
    }
    run_scenario(&ScenarioConfig { kind, ..cfg.clone() })
}

/// Compares the imprint before and after the final event.
pub(crate) fn displacement_report(
    cfg: &ScenarioConfig,
    events: &[ResolvedEvent],
    imprints: &[ImprintRecord],
) -> Result<DisplacementReport> {
    let n = imprints.len();
    let before = imprints[n - 2].outcome?;
    let tau_a = events[0].signal.map_or(1.0, |s| s.duration);
    let tau_b = events[n - 1].control.map_or(f64::NAN, |c| c.duration);
    let predicted = predicted_displacement(tau_a, tau_b);
    Ok(match imprints[n - 1].outcome {
        Ok(after) => DisplacementReport {
            before,
            after: Some(after),
            delta: displacement(&before, &after),
            predicted,
            flip: Some(phase_flip(&before, &after)),
            pushed_out: false,
        },
        Err(ImprintNotFound::PushedOut) => DisplacementReport {
            before,
            after: None,
            delta: cfg.medium.length - before.center,
            predicted,
            flip: None,
            pushed_out: true,
        },
        Err(ImprintNotFound::Absent { .. }) => DisplacementReport {
            before,
            after: None,
            delta: f64::NAN,
            predicted,
            flip: None,
            pushed_out: false,
        },
    })
}

fn retrieval_report(
    cfg: &ScenarioConfig,
    events: &[ResolvedEvent],
    sim: &Simulation,
) -> Result<RetrievalReport> {
    let p = &sim.propagation;
    let grid = &sim.grid;
    let last = events.last().expect("validated non-empty");
    let window_start = imprint_time(events, events.len() - 2, grid, cfg.truncation_threshold);
    let start = grid.t_index(window_start);

    let signal = events[0].signal.expect("retrieval starts with a pair");
    let thr = cfg.truncation_threshold;
    let input = truncate_envelope(&make_envelope_within(&signal, grid, thr)?, thr);
    let zero = C64::new(0.0, 0.0);
    let output: Vec<C64> =
        p.output13.iter().enumerate().map(|(i, &w)| if i < start { zero } else { w }).collect();

    let peak_in = input.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let (i_out, peak_out) =
        output
            .iter()
            .map(|w| w.norm())
            .enumerate()
            .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if peak_out < RETRIEVAL_FLOOR * peak_in {
        return Err(Error::RetrievalFailed(format!(
            "no signal left the medium after the control at T = {}",
            last.center()
        )));
    }
    let i_in = grid.t_index(signal.center);
    let phase = if (output[i_out] * input[i_in].conj()).re >= 0.0 {
        OutputPhase::Same
    } else {
        OutputPhase::Inverted
    };
    Ok(RetrievalReport {
        steps: events.len() - 1,
        eta: retrieval_efficiency(&input, &output, grid.dt)?,
        r: shape_correlation(&input, &output)?,
        phase,
        window_start,
    })
}
