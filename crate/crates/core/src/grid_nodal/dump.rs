//! Raw label-grid dump.
//!
//! Layout, all little-endian:
//!
//! | field              | type            |
//! |--------------------|-----------------|
//! | magic              | `b"QHOG"`       |
//! | version            | `u32` (= 1)     |
//! | n                  | `u32`           |
//! | resolution         | `n × u32`       |
//! | box bounds         | `n × (f64, f64)` as `(lo, hi)` per axis |
//! | labels             | `i32` per cell, row-major, last axis fastest |
//!
//! Label 0 marks cells whose sampled value was zero; components are `1..=count`.

use std::io::{Read, Write};

use super::LabelGrid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"QHOG";
pub const VERSION: u32 = 1;

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_label_grid<W: Write>(mut w: W, grid: &LabelGrid) -> Result<()> {
    let n = grid.dim();
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(n as u32).to_le_bytes()).map_err(io_err)?;
    for _ in 0..n {
        w.write_all(&(grid.resolution() as u32).to_le_bytes()).map_err(io_err)?;
    }
    for &r in grid.half_widths() {
        w.write_all(&(-r).to_le_bytes()).map_err(io_err)?;
        w.write_all(&r.to_le_bytes()).map_err(io_err)?;
    }
    let mut buf = Vec::with_capacity(grid.labels().len() * 4);
    for &l in grid.labels() {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_label_grid<R: Read>(mut r: R) -> Result<LabelGrid> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = read_u32(&mut r)? as usize;
    if n == 0 || n > crate::oscillator::MAX_DIMENSION {
        return Err(Error::Format(format!("dimension {n} out of range")));
    }
    let resolutions: Vec<u32> = (0..n).map(|_| read_u32(&mut r)).collect::<Result<_>>()?;
    let resolution = resolutions[0] as usize;
    if resolutions.iter().any(|&m| m as usize != resolution) || resolution == 0 {
        return Err(Error::Format("only uniform nonzero resolutions are supported".into()));
    }
    let mut half_widths = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = read_f64(&mut r)?;
        let hi = read_f64(&mut r)?;
        if hi.is_nan() || hi <= 0.0 || lo != -hi {
            return Err(Error::Format(format!("box [{lo}, {hi}] is not symmetric")));
        }
        half_widths.push(hi);
    }
    let cells = (resolution as u128).pow(n as u32);
    if cells > u32::MAX as u128 {
        return Err(Error::Format(format!("{cells} cells is too many")));
    }
    let mut raw = Vec::new();
    r.read_to_end(&mut raw).map_err(io_err)?;
    if raw.len() as u128 != cells * 4 {
        return Err(Error::Format(format!(
            "expected {} label bytes, found {}",
            cells * 4,
            raw.len()
        )));
    }
    let labels = raw
        .chunks_exact(4)
        .map(|c| i32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    LabelGrid::new(half_widths, resolution, labels)
}
