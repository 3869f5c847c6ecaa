use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DT: f64 = 0.02;
pub const DEFAULT_DZ: f64 = 0.02;

const REPRESENTABLE_TOL: f64 = 1e-9;

/// Uniform `(Z, T)` lattice in traveling-wave coordinates.
///
/// `T` runs over `[t_min, t_max]` in units of `tau_a`; `Z` runs over
/// `[0, length]` in units of `1/kappa_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dt: f64,
    pub dz: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub length: f64,
}

impl Grid {
    pub fn new(dt: f64, dz: f64, t_min: f64, t_max: f64, length: f64) -> Result<Self> {
        let g = Grid { dt, dz, t_min, t_max, length };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dT must be positive"));
        }
        if !(self.dz.is_finite() && self.dz > 0.0) {
            return Err(Error::invalid("dZ must be positive"));
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_max > self.t_min) {
            return Err(Error::invalid("time range must be nonempty"));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid("medium length must be positive"));
        }
        steps_of(self.t_max - self.t_min, self.dt)
            .ok_or_else(|| Error::invalid("time range is not a whole number of dT steps"))?;
        steps_of(self.length, self.dz)
            .ok_or_else(|| Error::invalid("medium length is not a whole number of dZ steps"))?;
        Ok(())
    }

    /// Number of `T` nodes.
    pub fn nt(&self) -> usize {
        steps_of(self.t_max - self.t_min, self.dt).expect("validated grid") + 1
    }

    /// Number of `Z` nodes.
    pub fn nz(&self) -> usize {
        steps_of(self.length, self.dz).expect("validated grid") + 1
    }

    pub fn t_at(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.dt
    }

    pub fn z_at(&self, k: usize) -> f64 {
        k as f64 * self.dz
    }

    pub fn t_axis(&self) -> Vec<f64> {
        (0..self.nt()).map(|i| self.t_at(i)).collect()
    }

    pub fn z_axis(&self) -> Vec<f64> {
        (0..self.nz()).map(|k| self.z_at(k)).collect()
    }

    /// Nearest `T` node, clamped to the window.
    pub fn t_index(&self, t: f64) -> usize {
        let i = ((t - self.t_min) / self.dt).round();
        (i.max(0.0) as usize).min(self.nt() - 1)
    }

    /// Same window with both steps divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Grid { dt: self.dt / factor as f64, dz: self.dz / factor as f64, ..*self }
    }

    /// Expands `[t_min, t_max]` outward to whole multiples of `dt` anchored at zero.
    pub fn snapped(dt: f64, dz: f64, t_min: f64, t_max: f64, length: f64) -> Result<Self> {
        let lo = (t_min / dt).floor() * dt;
        let hi = lo + ((t_max - lo) / dt).ceil() * dt;
        Grid::new(dt, dz, lo, hi, length)
    }
}

fn steps_of(range: f64, step: f64) -> Option<usize> {
    let n = range / step;
    let r = n.round();
    if r >= 1.0 && (n - r).abs() < REPRESENTABLE_TOL * r.max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}
