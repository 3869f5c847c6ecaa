//! Decay-modified Maxwell-Bloch equations in traveling-wave coordinates
//! `T = t - x/c`, `Z = x`.
//!
//! Units throughout: time in `tau_a`, length in `1/kappa_a`, Rabi frequencies
//! in `1/tau_a`.

mod bloch;
mod density;
pub mod diagnostics;
mod grid;
mod medium;
mod propagate;

pub use bloch::{advance_bloch_slice, bloch_derivative, HalfStep};
pub use density::DensityMatrix;
pub use grid::{Grid, DEFAULT_DT, DEFAULT_DZ};
pub use medium::{MediumSpec, DEFAULT_LENGTH, RB87_GAMMA3_TAU, RB87_MU_RATIO, SIGNAL_COUPLING};
pub(crate) use propagate::trapezoid;
pub use propagate::{
    advance_field_step, field_energy, integrate_medium, integrate_medium_with, Advisory, DensityRecord,
    DensitySnapshot, Diagnostics, FieldRecord, IntegrationOptions, Propagation, Retention,
    TRACE_DRIFT_ADVISORY,
};
