//! Consistency diagnostics on finished runs.

use num_complex::Complex64 as C64;

use super::density::DensityMatrix;
use super::propagate::{DensityRecord, FieldRecord, Propagation};
use crate::error::{Error, Result};

type M3 = [[C64; 3]; 3];

fn zero3() -> M3 {
    [[C64::new(0.0, 0.0); 3]; 3]
}

fn commutator(a: &M3, b: &M3) -> M3 {
    let mut c = zero3();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[i][j] += a[i][k] * b[k][j] - b[i][k] * a[k][j];
            }
        }
    }
    c
}

/// `U = (i/2) M - lambda W` with `M` the RWA coupling matrix and `W = i|3><3|`.
fn lax_u(o13: C64, o23: C64, delta: f64, lambda: C64) -> M3 {
    let i_half = C64::new(0.0, 0.5);
    let mut u = zero3();
    u[0][2] = i_half * o13.conj();
    u[1][2] = i_half * o23.conj();
    u[2][0] = i_half * o13;
    u[2][1] = i_half * o23;
    u[2][2] = i_half * (-2.0 * delta) - lambda * C64::new(0.0, 1.0);
    u
}

/// `V = (i mu / 2 lambda) rho`.
fn lax_v(rho: &DensityMatrix, mu: f64, lambda: C64) -> M3 {
    let scale = C64::new(0.0, mu / 2.0) / lambda;
    let mut v = rho.to_matrix();
    v.iter_mut().flatten().for_each(|x| *x *= scale);
    v
}

fn frobenius(m: &M3) -> f64 {
    m.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest Frobenius norm of the discrete zero-curvature residual
/// `dZ U - dT V + [U, V]` over interior nodes, using centered differences.
///
/// Meaningful only for equal couplings and no decay, where the continuum
/// residual vanishes identically for every spectral parameter `lambda`.
pub fn lax_residual(
    fields: &FieldRecord,
    density: &DensityRecord,
    mu: f64,
    delta: f64,
    lambda: C64,
) -> Result<f64> {
    let (nz, nt) = (fields.nz(), fields.nt());
    if density.states.dim() != (nz, nt) {
        return Err(Error::invalid("field and density records differ in shape"));
    }
    if nz < 3 || nt < 3 {
        return Err(Error::invalid("records too small for centered differences"));
    }
    let dz = fields.z[1] - fields.z[0];
    let dt = fields.dt;
    let u_at = |k: usize, i: usize| lax_u(fields.omega13[[k, i]], fields.omega23[[k, i]], delta, lambda);
    let v_at = |k: usize, i: usize| lax_v(&density.states[[k, i]], mu, lambda);

    let mut worst = 0.0f64;
    for k in 1..nz - 1 {
        for i in 1..nt - 1 {
            let (up, um) = (u_at(k + 1, i), u_at(k - 1, i));
            let (vp, vm) = (v_at(k, i + 1), v_at(k, i - 1));
            let c = commutator(&u_at(k, i), &v_at(k, i));
            let mut r = zero3();
            for a in 0..3 {
                for b in 0..3 {
                    r[a][b] =
                        (up[a][b] - um[a][b]) / (2.0 * dz) - (vp[a][b] - vm[a][b]) / (2.0 * dt) + c[a][b];
                }
            }
            worst = worst.max(frobenius(&r));
        }
    }
    Ok(worst)
}

/// Excitation balance along the medium for a decay-free run.
///
/// With no decay, `d/dZ int (|Omega13|^2/2mu13 + |Omega23|^2/2mu23) dT`
/// equals `-rho33(Z, T_max)`. Returns the largest deviation of
/// `E(Z) + int_0^Z rho33(Z', T_max) dZ'` from `E(0)`, relative to `E(0)`.
pub fn excitation_balance(run: &Propagation) -> f64 {
    let e0 = run.field_energy[0];
    if e0 == 0.0 {
        return 0.0;
    }
    let dz = run.grid.dz;
    let mut deposited = 0.0;
    let mut worst = 0.0f64;
    for k in 0..run.field_energy.len() {
        if k > 0 {
            deposited += 0.5 * dz * (run.final_states[k - 1].rho33 + run.final_states[k].rho33);
        }
        worst = worst.max((run.field_energy[k] + deposited - e0).abs());
    }
    worst / e0
}
