//! Observables extracted from finished runs: imprint position and shape,
//! displacement, retrieval efficiency, shape correlation, area evolution.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{trapezoid, DensitySnapshot, FieldRecord};
use crate::error::{Error, Result};
use crate::pulses::{pulse_area, total_area};

/// Default minimum `rho22` peak for an imprint to count as present.
pub const DETECTION_THRESHOLD: f64 = 0.05;

/// Fraction of the envelope peak that defines the correlation window.
pub const CORRELATION_WINDOW_FRACTION: f64 = 1e-3;

/// Ground-state profiles over the medium at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprintSnapshot {
    pub z: Vec<f64>,
    pub rho11: Vec<f64>,
    pub rho22: Vec<f64>,
    pub rho12: Vec<C64>,
    pub time: f64,
}

impl From<&DensitySnapshot> for ImprintSnapshot {
    fn from(s: &DensitySnapshot) -> Self {
        ImprintSnapshot {
            z: s.z.clone(),
            rho11: s.states.iter().map(|r| r.rho11).collect(),
            rho22: s.states.iter().map(|r| r.rho22).collect(),
            rho12: s.states.iter().map(|r| r.rho12).collect(),
            time: s.time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprintCharacter {
    /// Position of the `rho22` maximum, in absorption lengths.
    pub center: f64,
    /// Full width at half maximum of `rho22`.
    pub width_fwhm: f64,
    /// `rho22` at the center.
    pub peak_population: f64,
    /// Largest `|rho12|` within the imprint.
    pub peak_coherence: f64,
    /// Sign of `Re rho12` on the entry side of the center, `+1` or `-1`.
    pub phase_sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, thiserror::Error)]
pub enum ImprintNotFound {
    #[error("no imprint: peak rho22 {peak:.3e} below detection threshold")]
    Absent { peak: f64 },
    /// The population maximum sits on the exit face.
    #[error("imprint pushed out of the medium")]
    PushedOut,
}

/// Locates the imprint as the `rho22` maximum, refined by a parabola through
/// the three nodes around it.
///
/// The first-order imprint has `rho22 = sech^2(Z - x1)` while `rho12` is odd
/// about `x1`, so the population, not the coherence, marks the location.
pub fn characterize_imprint(
    snapshot: &ImprintSnapshot,
    detection_threshold: f64,
) -> std::result::Result<ImprintCharacter, ImprintNotFound> {
    let p = &snapshot.rho22;
    let n = p.len();
    let Some((m, &peak)) = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return Err(ImprintNotFound::Absent { peak: 0.0 });
    };
    if peak < detection_threshold {
        return Err(ImprintNotFound::Absent { peak });
    }
    if m + 1 == n {
        return Err(ImprintNotFound::PushedOut);
    }
    let dz = snapshot.z[1] - snapshot.z[0];

    let (offset, peak_population) =
        if m == 0 { (0.0, peak) } else { parabolic_vertex(p[m - 1], p[m], p[m + 1]) };
    let center = snapshot.z[m] + offset * dz;

    let half = 0.5 * peak_population;
    let left = (0..m)
        .rev()
        .find(|&i| p[i] < half)
        .map(|i| snapshot.z[i] + dz * (half - p[i]) / (p[i + 1] - p[i]))
        .unwrap_or(snapshot.z[0]);
    let right = (m + 1..n)
        .find(|&i| p[i] < half)
        .map(|i| snapshot.z[i] - dz * (half - p[i]) / (p[i - 1] - p[i]))
        .unwrap_or(snapshot.z[n - 1]);
    let width_fwhm = right - left;

    let reach = 3.0 * width_fwhm.max(dz);
    let near = |i: &usize| (snapshot.z[*i] - center).abs() <= reach;
    let peak_coherence = (0..n).filter(near).map(|i| snapshot.rho12[i].norm()).fold(0.0, f64::max);
    let moment: f64 = (0..n).filter(near).map(|i| snapshot.rho12[i].re * (snapshot.z[i] - center)).sum();
    let phase_sign = if moment > 0.0 { -1 } else { 1 };

    Ok(ImprintCharacter { center, width_fwhm, peak_population, peak_coherence, phase_sign })
}

/// Offset (in nodes, within `[-1, 1]`) and value of the vertex of the parabola
/// through three equally spaced samples.
fn parabolic_vertex(a: f64, b: f64, c: f64) -> (f64, f64) {
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return (0.0, b);
    }
    let off = (0.5 * (a - c) / denom).clamp(-1.0, 1.0);
    (off, b - 0.25 * (a - c) * off)
}

/// `after.center - before.center`.
pub fn displacement(before: &ImprintCharacter, after: &ImprintCharacter) -> f64 {
    after.center - before.center
}

/// Imprint shift predicted from the first and second control durations,
/// `ln|(tau_a + tau_b) / (tau_a - tau_b)|`. Infinite when they are equal.
pub fn predicted_displacement(tau_a: f64, tau_b: f64) -> f64 {
    ((tau_a + tau_b) / (tau_a - tau_b)).abs().ln()
}

/// Control duration shorter than `tau_a` that gives the predicted shift
/// `delta`: `tau_a tanh(delta / 2)`.
pub fn duration_for_displacement(delta: f64, tau_a: f64) -> f64 {
    tau_a * (0.5 * delta).tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseFlip {
    Flipped,
    Unflipped,
}

pub fn phase_flip(before: &ImprintCharacter, after: &ImprintCharacter) -> PhaseFlip {
    if before.phase_sign * after.phase_sign < 0 {
        PhaseFlip::Flipped
    } else {
        PhaseFlip::Unflipped
    }
}

/// `int |out|^2 dT / int |in|^2 dT`.
pub fn retrieval_efficiency(omega_in: &[C64], omega_out: &[C64], dt: f64) -> Result<f64> {
    let i_in = trapezoid(omega_in.iter().map(|w| w.norm_sqr()), dt);
    if i_in == 0.0 {
        return Err(Error::ZeroInput);
    }
    Ok(trapezoid(omega_out.iter().map(|w| w.norm_sqr()), dt) / i_in)
}

/// Pearson correlation of the input and output envelope magnitudes `|Omega|`
/// after shifting the output so the peaks coincide.
///
/// The output is resampled at the sub-sample shift with cubic interpolation;
/// the correlation runs over nodes where either aligned profile exceeds
/// `CORRELATION_WINDOW_FRACTION` of its peak.
pub fn shape_correlation(omega_in: &[C64], omega_out: &[C64]) -> Result<f64> {
    let a: Vec<f64> = omega_in.iter().map(|w| w.norm()).collect();
    let b: Vec<f64> = omega_out.iter().map(|w| w.norm()).collect();
    let (pa, ma) = refined_peak(&a).ok_or(Error::ZeroInput)?;
    let (pb, mb) = refined_peak(&b).ok_or(Error::ZeroInput)?;
    let shift = pb - pa;
    let aligned: Vec<f64> = (0..a.len()).map(|i| sample_cubic(&b, i as f64 + shift)).collect();

    let window: Vec<usize> = (0..a.len())
        .filter(|&i| a[i] > CORRELATION_WINDOW_FRACTION * ma || aligned[i] > CORRELATION_WINDOW_FRACTION * mb)
        .collect();
    let n = window.len() as f64;
    let mean_a = window.iter().map(|&i| a[i]).sum::<f64>() / n;
    let mean_b = window.iter().map(|&i| aligned[i]).sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &i in &window {
        let (da, db) = (a[i] - mean_a, aligned[i] - mean_b);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroInput);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Fractional index and value of the maximum; `None` for an all-zero profile.
fn refined_peak(v: &[f64]) -> Option<(f64, f64)> {
    let (m, &peak) = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if peak <= 0.0 {
        return None;
    }
    if m == 0 || m + 1 == v.len() {
        return Some((m as f64, peak));
    }
    let (off, val) = parabolic_vertex(v[m - 1], v[m], v[m + 1]);
    Some((m as f64 + off, val))
}

/// Catmull-Rom interpolation at fractional index `x`; zero outside the samples.
fn sample_cubic(v: &[f64], x: f64) -> f64 {
    let n = v.len() as isize;
    let i = x.floor() as isize;
    let f = x - i as f64;
    if f == 0.0 {
        return if (0..n).contains(&i) { v[i as usize] } else { 0.0 };
    }
    let at = |k: isize| if (0..n).contains(&k) { v[k as usize] } else { 0.0 };
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)))
}

/// Time of the intensity peak, refined by a parabola, relative to `t0`.
pub fn peak_time(omega: &[C64], t0: f64, dt: f64) -> Option<f64> {
    let v: Vec<f64> = omega.iter().map(|w| w.norm_sqr()).collect();
    refined_peak(&v).map(|(x, _)| t0 + x * dt)
}

/// Pulse areas of both channels along the medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaTable {
    pub z: Vec<f64>,
    pub theta13: Vec<f64>,
    pub theta23: Vec<f64>,
    pub theta_tot: Vec<f64>,
}

pub fn area_evolution(record: &FieldRecord) -> AreaTable {
    let mut table = AreaTable {
        z: record.z.clone(),
        theta13: Vec::with_capacity(record.nz()),
        theta23: Vec::with_capacity(record.nz()),
        theta_tot: Vec::with_capacity(record.nz()),
    };
    for (r13, r23) in record.omega13.rows().into_iter().zip(record.omega23.rows()) {
        let a13 = pulse_area(&r13.to_vec(), record.dt);
        let a23 = pulse_area(&r23.to_vec(), record.dt);
        table.theta13.push(a13);
        table.theta23.push(a23);
        table.theta_tot.push(total_area(a13, a23));
    }
    table
}
