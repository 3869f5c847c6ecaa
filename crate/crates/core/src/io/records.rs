//! Flat little-endian binary envelope records.
//!
//! Layout: a 64-byte header followed by `channels * nz * nt` complex samples,
//! each stored as `re, im` `f64`. Channels are stored one after another, each
//! row-major in `(Z, T)`.
//!
//! | offset | type     | field                        |
//! |--------|----------|------------------------------|
//! | 0      | `[u8;8]` | magic `LMBDREC\0`            |
//! | 8      | `u16`    | format version               |
//! | 10     | `u16`    | channel count                |
//! | 12     | `u16`    | sample type (1 = complex f64)|
//! | 14     | `u16`    | units (1 = `tau_a Omega`)    |
//! | 16     | `u64`    | `nz`                         |
//! | 24     | `u64`    | `nt`                         |
//! | 32     | `f64`    | first `Z`, `1/kappa_a`       |
//! | 40     | `f64`    | `Z` spacing                  |
//! | 48     | `f64`    | first `T`, `tau_a`           |
//! | 56     | `f64`    | `T` spacing                  |

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::dynamics::FieldRecord;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"LMBDREC\0";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 64;
pub const DTYPE_COMPLEX_F64: u16 = 1;
pub const UNITS_RABI: u16 = 1;

/// Self-describing header of a binary record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordHeader {
    pub channels: u16,
    pub nz: u64,
    pub nt: u64,
    pub z0: f64,
    pub dz: f64,
    pub t0: f64,
    pub dt: f64,
}

impl RecordHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..8].copy_from_slice(&MAGIC);
        h[8..10].copy_from_slice(&VERSION.to_le_bytes());
        h[10..12].copy_from_slice(&self.channels.to_le_bytes());
        h[12..14].copy_from_slice(&DTYPE_COMPLEX_F64.to_le_bytes());
        h[14..16].copy_from_slice(&UNITS_RABI.to_le_bytes());
        h[16..24].copy_from_slice(&self.nz.to_le_bytes());
        h[24..32].copy_from_slice(&self.nt.to_le_bytes());
        h[32..40].copy_from_slice(&self.z0.to_le_bytes());
        h[40..48].copy_from_slice(&self.dz.to_le_bytes());
        h[48..56].copy_from_slice(&self.t0.to_le_bytes());
        h[56..64].copy_from_slice(&self.dt.to_le_bytes());
        h
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("binary record: {m}"));
        if b.len() < HEADER_LEN {
            return Err(bad("truncated header"));
        }
        if b[0..8] != MAGIC {
            return Err(bad("bad magic"));
        }
        let u16_at = |o: usize| u16::from_le_bytes([b[o], b[o + 1]]);
        let u64_at = |o: usize| u64::from_le_bytes(b[o..o + 8].try_into().expect("8 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(b[o..o + 8].try_into().expect("8 bytes"));
        if u16_at(8) != VERSION {
            return Err(bad("unsupported version"));
        }
        if u16_at(12) != DTYPE_COMPLEX_F64 || u16_at(14) != UNITS_RABI {
            return Err(bad("unsupported sample type or units"));
        }
        Ok(RecordHeader {
            channels: u16_at(10),
            nz: u64_at(16),
            nt: u64_at(24),
            z0: f64_at(32),
            dz: f64_at(40),
            t0: f64_at(48),
            dt: f64_at(56),
        })
    }
}

/// Encodes `Omega13` and `Omega23` of `record`.
pub fn encode_fields(record: &FieldRecord) -> Vec<u8> {
    let (nz, nt) = (record.nz(), record.nt());
    let header = RecordHeader {
        channels: 2,
        nz: nz as u64,
        nt: nt as u64,
        z0: record.z.first().copied().unwrap_or(0.0),
        dz: if nz > 1 { record.z[1] - record.z[0] } else { 0.0 },
        t0: record.t_min,
        dt: record.dt,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * nz * nt * 16);
    out.extend_from_slice(&header.to_bytes());
    for channel in [&record.omega13, &record.omega23] {
        for w in channel.iter() {
            out.extend_from_slice(&w.re.to_le_bytes());
            out.extend_from_slice(&w.im.to_le_bytes());
        }
    }
    out
}

/// Decodes a two-channel record written by [`encode_fields`].
pub fn decode_fields(bytes: &[u8]) -> Result<FieldRecord> {
    let h = RecordHeader::from_bytes(bytes)?;
    let (nz, nt) = (h.nz as usize, h.nt as usize);
    if h.channels != 2 || bytes.len() != HEADER_LEN + 2 * nz * nt * 16 {
        return Err(Error::Parse("binary record: size does not match header".into()));
    }
    let mut samples = bytes[HEADER_LEN..].chunks_exact(16).map(|c| {
        C64::new(
            f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
            f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
        )
    });
    let mut channel = || Array2::from_shape_vec((nz, nt), samples.by_ref().take(nz * nt).collect());
    let omega13 = channel().map_err(|e| Error::Parse(e.to_string()))?;
    let omega23 = channel().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(FieldRecord {
        z: (0..nz).map(|k| h.z0 + k as f64 * h.dz).collect(),
        dt: h.dt,
        t_min: h.t0,
        omega13,
        omega23,
        rho31: None,
        rho32: None,
    })
}
