//! Three-level density matrix with structural Hermiticity.

use std::ops::{Add, Mul};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Atomic state of a single lambda-system atom.
///
/// Only the upper triangle is stored; `rho_ji = conj(rho_ij)`.
/// Level 1 and 2 are the ground states, level 3 is the excited state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho12: C64,
    pub rho13: C64,
    pub rho23: C64,
}

impl DensityMatrix {
    pub const ZERO: DensityMatrix = DensityMatrix {
        rho11: 0.0,
        rho22: 0.0,
        rho33: 0.0,
        rho12: C64::new(0.0, 0.0),
        rho13: C64::new(0.0, 0.0),
        rho23: C64::new(0.0, 0.0),
    };

    /// `|1><1|`, the quiescent medium.
    pub fn ground() -> Self {
        DensityMatrix { rho11: 1.0, ..Self::ZERO }
    }

    /// `|2><2|`.
    pub fn second_ground() -> Self {
        DensityMatrix { rho22: 1.0, ..Self::ZERO }
    }

    /// `|3><3|`.
    pub fn excited() -> Self {
        DensityMatrix { rho33: 1.0, ..Self::ZERO }
    }

    /// Pure state `|psi><psi|` from unnormalized amplitudes.
    pub fn from_amplitudes(c1: C64, c2: C64, c3: C64) -> Self {
        let norm = c1.norm_sqr() + c2.norm_sqr() + c3.norm_sqr();
        DensityMatrix {
            rho11: c1.norm_sqr() / norm,
            rho22: c2.norm_sqr() / norm,
            rho33: c3.norm_sqr() / norm,
            rho12: c1 * c2.conj() / norm,
            rho13: c1 * c3.conj() / norm,
            rho23: c2 * c3.conj() / norm,
        }
    }

    /// Dark state of a field pair: the ground superposition that does not
    /// couple to `|3>`, proportional to `Omega23 |1> - Omega13 |2>`.
    pub fn dark_state(omega13: C64, omega23: C64) -> Self {
        Self::from_amplitudes(omega23.conj(), -omega13.conj(), C64::new(0.0, 0.0))
    }

    #[inline]
    pub fn rho21(&self) -> C64 {
        self.rho12.conj()
    }

    #[inline]
    pub fn rho31(&self) -> C64 {
        self.rho13.conj()
    }

    #[inline]
    pub fn rho32(&self) -> C64 {
        self.rho23.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22 + self.rho33
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.rho11 * self.rho11
            + self.rho22 * self.rho22
            + self.rho33 * self.rho33
            + 2.0 * (self.rho12.norm_sqr() + self.rho13.norm_sqr() + self.rho23.norm_sqr())
    }

    /// Largest violation of `|rho_ij|^2 <= rho_ii rho_jj` over the three pairs;
    /// non-positive when the inequality holds everywhere.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        let e12 = self.rho12.norm_sqr() - self.rho11 * self.rho22;
        let e13 = self.rho13.norm_sqr() - self.rho11 * self.rho33;
        let e23 = self.rho23.norm_sqr() - self.rho22 * self.rho33;
        e12.max(e13).max(e23)
    }

    pub fn is_finite(&self) -> bool {
        self.rho11.is_finite()
            && self.rho22.is_finite()
            && self.rho33.is_finite()
            && self.rho12.is_finite()
            && self.rho13.is_finite()
            && self.rho23.is_finite()
    }

    /// Full 3x3 matrix, row-major.
    pub fn to_matrix(&self) -> [[C64; 3]; 3] {
        let re = |x: f64| C64::new(x, 0.0);
        [
            [re(self.rho11), self.rho12, self.rho13],
            [self.rho21(), re(self.rho22), self.rho23],
            [self.rho31(), self.rho32(), re(self.rho33)],
        ]
    }

    /// Reads the upper triangle and real diagonal of a full matrix.
    pub fn from_matrix(m: &[[C64; 3]; 3]) -> Self {
        DensityMatrix {
            rho11: m[0][0].re,
            rho22: m[1][1].re,
            rho33: m[2][2].re,
            rho12: m[0][1],
            rho13: m[0][2],
            rho23: m[1][2],
        }
    }

    /// Component-wise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.rho11 - other.rho11).abs(),
            (self.rho22 - other.rho22).abs(),
            (self.rho33 - other.rho33).abs(),
            (self.rho12 - other.rho12).norm(),
            (self.rho13 - other.rho13).norm(),
            (self.rho23 - other.rho23).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Add for DensityMatrix {
    type Output = DensityMatrix;

    #[inline]
    fn add(self, o: DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            rho11: self.rho11 + o.rho11,
            rho22: self.rho22 + o.rho22,
            rho33: self.rho33 + o.rho33,
            rho12: self.rho12 + o.rho12,
            rho13: self.rho13 + o.rho13,
            rho23: self.rho23 + o.rho23,
        }
    }
}

impl Mul<DensityMatrix> for f64 {
    type Output = DensityMatrix;

    #[inline]
    fn mul(self, d: DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            rho11: self * d.rho11,
            rho22: self * d.rho22,
            rho33: self * d.rho33,
            rho12: d.rho12 * self,
            rho13: d.rho13 * self,
            rho23: d.rho23 * self,
        }
    }
}
