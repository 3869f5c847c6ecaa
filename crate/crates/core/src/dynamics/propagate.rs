//! Space march of the coupled field/medium system.
//!
//! Each `Z` slice is a `T` march of the Bloch equations driven by the local
//! envelopes; envelopes move between slices through the field equations
//! `dOmega13/dZ = i mu13 rho31`, `dOmega23/dZ = i mu23 rho32`, advanced with a
//! predictor (Euler) / corrector (trapezoid) pair.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::bloch::{march_slice, HalfStep};
use super::density::DensityMatrix;
use super::grid::Grid;
use super::medium::MediumSpec;
use crate::error::{Error, Result};

/// Trace drift above which a run is flagged as under-resolved.
pub const TRACE_DRIFT_ADVISORY: f64 = 1e-6;

/// One explicit Euler step of both envelopes using the given polarizations.
pub fn advance_field_step(
    rho31: &[C64],
    rho32: &[C64],
    omega13: &[C64],
    omega23: &[C64],
    medium: &MediumSpec,
    dz: f64,
) -> (Vec<C64>, Vec<C64>) {
    let k13 = C64::new(0.0, medium.mu13() * dz);
    let k23 = C64::new(0.0, medium.mu23() * dz);
    let next13 = omega13.iter().zip(rho31).map(|(o, p)| o + k13 * p).collect();
    let next23 = omega23.iter().zip(rho32).map(|(o, p)| o + k23 * p).collect();
    (next13, next23)
}

/// What to keep from a run besides the boundary envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retention {
    /// Full `(Z, T)` envelope record.
    pub fields: bool,
    /// `rho31`, `rho32` alongside the envelope record.
    pub polarization: bool,
    /// Full density-matrix record. Large; intended for diagnostics.
    pub density: bool,
    /// Keep every `z_stride`-th slice in the full records.
    pub z_stride: usize,
    /// Times at which `rho(Z)` is captured over the whole medium.
    pub snapshot_times: Vec<f64>,
}

impl Default for Retention {
    fn default() -> Self {
        Retention {
            fields: false,
            polarization: false,
            density: false,
            z_stride: 1,
            snapshot_times: Vec::new(),
        }
    }
}

impl Retention {
    pub fn with_snapshots(times: Vec<f64>) -> Self {
        Retention { snapshot_times: times, ..Default::default() }
    }

    pub fn full() -> Self {
        Retention { fields: true, polarization: true, density: true, ..Default::default() }
    }
}

/// Envelopes (and optionally polarizations) on the retained `(Z, T)` nodes.
/// Rows are `Z` slices, columns are `T` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRecord {
    pub z: Vec<f64>,
    pub dt: f64,
    pub t_min: f64,
    pub omega13: Array2<C64>,
    pub omega23: Array2<C64>,
    pub rho31: Option<Array2<C64>>,
    pub rho32: Option<Array2<C64>>,
}

impl FieldRecord {
    pub fn nz(&self) -> usize {
        self.omega13.nrows()
    }

    pub fn nt(&self) -> usize {
        self.omega13.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRecord {
    pub z: Vec<f64>,
    pub states: Array2<DensityMatrix>,
}

/// `rho(Z)` across the medium at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySnapshot {
    /// Grid-node time actually captured.
    pub time: f64,
    pub z: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// Worst-case invariant violations over every visited `(Z, T)` node.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub max_purity_drift: f64,
    pub max_cauchy_schwarz_excess: f64,
    pub min_population: f64,
    pub max_population: f64,
}

impl Diagnostics {
    fn fresh() -> Self {
        Diagnostics { min_population: f64::INFINITY, max_population: f64::NEG_INFINITY, ..Default::default() }
    }

    #[inline]
    fn observe(&mut self, rho: &DensityMatrix, purity0: f64) {
        self.max_trace_drift = self.max_trace_drift.max((rho.trace() - 1.0).abs());
        self.max_purity_drift = self.max_purity_drift.max((rho.purity() - purity0).abs());
        self.max_cauchy_schwarz_excess = self.max_cauchy_schwarz_excess.max(rho.cauchy_schwarz_excess());
        let lo = rho.rho11.min(rho.rho22).min(rho.rho33);
        let hi = rho.rho11.max(rho.rho22).max(rho.rho33);
        self.min_population = self.min_population.min(lo);
        self.max_population = self.max_population.max(hi);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Advisory {
    /// Trace drift exceeded the advisory level; steps are likely too coarse.
    GridTooCoarse { trace_drift: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub half_step: HalfStep,
}

/// Everything produced by one pass through the medium.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub grid: Grid,
    pub medium: MediumSpec,
    pub input13: Vec<C64>,
    pub input23: Vec<C64>,
    pub output13: Vec<C64>,
    pub output23: Vec<C64>,
    pub fields: Option<FieldRecord>,
    pub density: Option<DensityRecord>,
    pub snapshots: Vec<DensitySnapshot>,
    /// `rho(Z, T_max)` for every slice.
    pub final_states: Vec<DensityMatrix>,
    /// `int |Omega13|^2/(2 mu13) + |Omega23|^2/(2 mu23) dT` for every slice.
    pub field_energy: Vec<f64>,
    pub diagnostics: Diagnostics,
    pub advisories: Vec<Advisory>,
}

impl Propagation {
    pub fn snapshot_near(&self, time: f64) -> Option<&DensitySnapshot> {
        self.snapshots.iter().min_by(|a, b| (a.time - time).abs().total_cmp(&(b.time - time).abs()))
    }
}

struct SliceSink {
    snapshot_idx: Vec<usize>,
    fields: Option<(Array2<C64>, Array2<C64>)>,
    polarization: Option<(Array2<C64>, Array2<C64>)>,
    density: Option<Array2<DensityMatrix>>,
    snapshots: Vec<Vec<DensityMatrix>>,
    final_states: Vec<DensityMatrix>,
    field_energy: Vec<f64>,
    diagnostics: Diagnostics,
}

/// Integrates the medium from `Z = 0` to `Z = length`, starting every atom in
/// `|1>` at `T_min`. Input envelopes must already be truncated.
pub fn integrate_medium(
    input13: &[C64],
    input23: &[C64],
    medium: &MediumSpec,
    grid: &Grid,
    retention: &Retention,
) -> Result<Propagation> {
    integrate_medium_with(input13, input23, medium, grid, retention, IntegrationOptions::default())
}

pub fn integrate_medium_with(
    input13: &[C64],
    input23: &[C64],
    medium: &MediumSpec,
    grid: &Grid,
    retention: &Retention,
    options: IntegrationOptions,
) -> Result<Propagation> {
    medium.validate()?;
    grid.validate()?;
    let nt = grid.nt();
    let nz = grid.nz();
    if input13.len() != nt || input23.len() != nt {
        return Err(Error::invalid(format!(
            "input envelopes have {} / {} samples, grid has {nt}",
            input13.len(),
            input23.len()
        )));
    }
    if (grid.length - medium.length).abs() > 1e-12 * medium.length {
        return Err(Error::invalid("grid length differs from medium length"));
    }
    if retention.z_stride == 0 {
        return Err(Error::invalid("z_stride must be at least 1"));
    }

    let kept: Vec<usize> = (0..nz).step_by(retention.z_stride).collect();
    let kept_z: Vec<f64> = kept.iter().map(|&k| grid.z_at(k)).collect();
    let zero = C64::new(0.0, 0.0);
    let blank = || Array2::from_elem((kept.len(), nt), zero);

    let mut sink = SliceSink {
        snapshot_idx: retention.snapshot_times.iter().map(|&t| grid.t_index(t)).collect(),
        fields: retention.fields.then(|| (blank(), blank())),
        polarization: (retention.fields && retention.polarization).then(|| (blank(), blank())),
        density: retention.density.then(|| Array2::from_elem((kept.len(), nt), DensityMatrix::ZERO)),
        snapshots: vec![Vec::with_capacity(nz); retention.snapshot_times.len()],
        final_states: Vec::with_capacity(nz),
        field_energy: Vec::with_capacity(nz),
        diagnostics: Diagnostics::fresh(),
    };

    let ground = DensityMatrix::ground();
    let purity0 = ground.purity();
    let mut omega13 = input13.to_vec();
    let mut omega23 = input23.to_vec();
    let mut p31 = vec![zero; nt];
    let mut p32 = vec![zero; nt];
    let mut q31 = vec![zero; nt];
    let mut q32 = vec![zero; nt];

    for k in 0..nz {
        let row = (k % retention.z_stride == 0).then_some(k / retention.z_stride);
        // Pass 1: the slice at Z with its final envelopes; this is the recorded one.
        {
            let s = &mut sink;
            march_slice(ground, &omega13, &omega23, medium, grid.dt, options.half_step, |i, rho| {
                p31[i] = rho.rho31();
                p32[i] = rho.rho32();
                s.diagnostics.observe(rho, purity0);
                for (slot, &si) in s.snapshot_idx.iter().enumerate() {
                    if si == i {
                        s.snapshots[slot].push(*rho);
                    }
                }
                if let (Some(r), Some(d)) = (row, s.density.as_mut()) {
                    d[[r, i]] = *rho;
                }
                if i == nt - 1 {
                    s.final_states.push(*rho);
                }
            })
            .map_err(|t_index| Error::NonFiniteState { z_index: k, t_index })?;
        }
        sink.field_energy.push(field_energy(&omega13, &omega23, medium, grid.dt));
        if let Some(r) = row {
            if let Some((f13, f23)) = sink.fields.as_mut() {
                f13.row_mut(r).iter_mut().zip(&omega13).for_each(|(d, s)| *d = *s);
                f23.row_mut(r).iter_mut().zip(&omega23).for_each(|(d, s)| *d = *s);
            }
            if let Some((r31, r32)) = sink.polarization.as_mut() {
                r31.row_mut(r).iter_mut().zip(&p31).for_each(|(d, s)| *d = *s);
                r32.row_mut(r).iter_mut().zip(&p32).for_each(|(d, s)| *d = *s);
            }
        }
        if k + 1 == nz {
            break;
        }

        // Predict Omega(Z + dZ), re-solve the next slice under it, then correct
        // with the trapezoidal average of the two polarizations.
        let (pred13, pred23) = advance_field_step(&p31, &p32, &omega13, &omega23, medium, grid.dz);
        march_slice(ground, &pred13, &pred23, medium, grid.dt, options.half_step, |i, rho| {
            q31[i] = rho.rho31();
            q32[i] = rho.rho32();
        })
        .map_err(|t_index| Error::NonFiniteState { z_index: k + 1, t_index })?;
        for i in 0..nt {
            q31[i] = 0.5 * (p31[i] + q31[i]);
            q32[i] = 0.5 * (p32[i] + q32[i]);
        }
        let (next13, next23) = advance_field_step(&q31, &q32, &omega13, &omega23, medium, grid.dz);
        omega13 = next13;
        omega23 = next23;
    }

    let mut advisories = Vec::new();
    if sink.diagnostics.max_trace_drift > TRACE_DRIFT_ADVISORY {
        advisories.push(Advisory::GridTooCoarse { trace_drift: sink.diagnostics.max_trace_drift });
    }

    let z_all = grid.z_axis();
    let snapshots = sink
        .snapshot_idx
        .iter()
        .zip(sink.snapshots)
        .map(|(&i, states)| DensitySnapshot { time: grid.t_at(i), z: z_all.clone(), states })
        .collect();
    let fields = sink.fields.map(|(omega13, omega23)| {
        let (rho31, rho32) = match sink.polarization {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        FieldRecord { z: kept_z.clone(), dt: grid.dt, t_min: grid.t_min, omega13, omega23, rho31, rho32 }
    });
    let density = sink.density.map(|states| DensityRecord { z: kept_z, states });

    Ok(Propagation {
        grid: *grid,
        medium: *medium,
        input13: input13.to_vec(),
        input23: input23.to_vec(),
        output13: omega13,
        output23: omega23,
        fields,
        density,
        snapshots,
        final_states: sink.final_states,
        field_energy: sink.field_energy,
        diagnostics: sink.diagnostics,
        advisories,
    })
}

/// Trapezoidal `int |Omega13|^2/(2 mu13) + |Omega23|^2/(2 mu23) dT`.
pub fn field_energy(omega13: &[C64], omega23: &[C64], medium: &MediumSpec, dt: f64) -> f64 {
    let i13 = trapezoid(omega13.iter().map(|w| w.norm_sqr()), dt);
    let i23 = trapezoid(omega23.iter().map(|w| w.norm_sqr()), dt);
    i13 / (2.0 * medium.mu13()) + i23 / (2.0 * medium.mu23())
}

pub(crate) fn trapezoid(values: impl ExactSizeIterator<Item = f64>, dt: f64) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (i, v) in values.enumerate() {
        sum += if i == 0 || i + 1 == n { 0.5 * v } else { v };
    }
    sum * dt
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(n: usize) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); n]
    }

    #[test]
    fn free_field_is_unchanged() {
        let m = MediumSpec::ideal(1.0);
        let o13: Vec<C64> = (0..10).map(|i| C64::new(i as f64, 0.5)).collect();
        let o23: Vec<C64> = (0..10).map(|i| C64::new(-(i as f64), 0.0)).collect();
        let (a, b) = advance_field_step(&zeros(10), &zeros(10), &o13, &o23, &m, 0.1);
        assert_eq!(a, o13);
        assert_eq!(b, o23);
    }

    #[test]
    fn euler_increment() {
        let m = MediumSpec::rubidium(1.0, false);
        let p = vec![C64::new(0.1, -0.3); 3];
        let o = zeros(3);
        let (a, b) = advance_field_step(&p, &p, &o, &o, &m, 0.05);
        let expect13 = C64::new(0.0, m.mu13() * 0.05) * p[0];
        let expect23 = C64::new(0.0, m.mu23() * 0.05) * p[0];
        assert!((a[1] - expect13).norm() < 1e-15);
        assert!((b[2] - expect23).norm() < 1e-15);
    }

    #[test]
    fn zero_input_leaves_medium_quiescent() {
        let grid = Grid::new(0.1, 0.1, -2.0, 2.0, 1.0).unwrap();
        let m = MediumSpec { gamma3_tau: 0.01, ..MediumSpec::ideal(1.0) };
        let z = zeros(grid.nt());
        let run = integrate_medium(&z, &z, &m, &grid, &Retention::with_snapshots(vec![0.0])).unwrap();
        assert!(run.output13.iter().all(|w| *w == C64::new(0.0, 0.0)));
        assert!(run.final_states.iter().all(|r| *r == DensityMatrix::ground()));
        assert_eq!(run.snapshots[0].states.len(), grid.nz());
        assert!(run.advisories.is_empty());
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let grid = Grid::new(0.1, 0.1, -2.0, 2.0, 1.0).unwrap();
        let m = MediumSpec::ideal(1.0);
        assert!(integrate_medium(&zeros(3), &zeros(3), &m, &grid, &Retention::default()).is_err());
    }

    #[test]
    fn strided_record_shapes() {
        let grid = Grid::new(0.1, 0.1, -2.0, 2.0, 1.0).unwrap();
        let m = MediumSpec::ideal(1.0);
        let z = zeros(grid.nt());
        let retention = Retention { fields: true, z_stride: 5, ..Default::default() };
        let run = integrate_medium(&z, &z, &m, &grid, &retention).unwrap();
        let rec = run.fields.unwrap();
        assert_eq!(rec.nz(), 3);
        assert_eq!(rec.nt(), grid.nt());
        assert_eq!(rec.z, vec![0.0, 0.5, 1.0]);
        assert!(rec.rho31.is_none());
    }
}
