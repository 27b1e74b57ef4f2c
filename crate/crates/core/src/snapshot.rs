//! Field snapshots.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! "RSF1"                 4-byte magic
//! nx, ny, nz             u64 each
//! lx, ly, lz             f64 each
//! t                      f64
//! psi                    for each point in x-fastest order: re_x, im_x, re_y, im_y, re_z, im_z (f64)
//! ```

use std::fmt::Write as _;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::RSField;
use crate::grid::Grid3;

pub const MAGIC: &[u8; 4] = b"RSF1";
const HEADER_LEN: usize = 4 + 3 * 8 + 3 * 8 + 8;

pub fn encode(field: &RSField, time: f64) -> Vec<u8> {
    let g = field.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + g.len() * 48);
    out.extend_from_slice(MAGIC);
    for n in g.n {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for l in g.l {
        out.extend_from_slice(&l.to_le_bytes());
    }
    out.extend_from_slice(&time.to_le_bytes());
    for idx in 0..g.len() {
        for z in field.at(idx) {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

/// Decodes a snapshot, returning the field and its time. `path` is only
/// used in error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<(RSField, f64)> {
    let bad = |msg: String| Error::Snapshot {
        path: path.to_path_buf(),
        msg,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let word = |i: usize| -> [u8; 8] { bytes[4 + 8 * i..12 + 8 * i].try_into().expect("8-byte slice") };
    let mut n = [0usize; 3];
    for a in 0..3 {
        n[a] = usize::try_from(u64::from_le_bytes(word(a))).map_err(|_| bad("dimension overflows usize".into()))?;
    }
    let l: [f64; 3] = std::array::from_fn(|a| f64::from_le_bytes(word(3 + a)));
    let time = f64::from_le_bytes(word(6));
    let grid = Grid3::new(n, l).map_err(|e| bad(e.to_string()))?;

    let points = grid.len();
    let expected = points
        .checked_mul(48)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| bad("dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for a {n:?} grid, found {}",
            bytes.len()
        )));
    }
    let mut field = RSField::zeros(grid);
    let body = &bytes[HEADER_LEN..];
    for idx in 0..points {
        for a in 0..3 {
            let off = 48 * idx + 16 * a;
            let re = f64::from_le_bytes(body[off..off + 8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(body[off + 8..off + 16].try_into().expect("8-byte slice"));
            field.comps[a][idx] = Complex64::new(re, im);
        }
    }
    if !field.is_finite() {
        return Err(bad("non-finite field values".into()));
    }
    Ok((field, time))
}

pub fn write_snapshot(path: &Path, field: &RSField, time: f64) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode(field, time)).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<(RSField, f64)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}

/// CSV with columns `ix,iy,iz,re_x,im_x,re_y,im_y,re_z,im_z`, 17 significant
/// digits.
pub fn to_csv(field: &RSField) -> String {
    let g = field.grid;
    let mut out = String::from("ix,iy,iz,re_x,im_x,re_y,im_y,re_z,im_z\n");
    for idx in 0..g.len() {
        let [ix, iy, iz] = g.coords(idx);
        let _ = write!(out, "{ix},{iy},{iz}");
        for z in field.at(idx) {
            let _ = write!(out, ",{:.16e},{:.16e}", z.re, z.im);
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, field: &RSField) -> Result<()> {
    std::fs::write(path, to_csv(field)).map_err(|e| Error::io(path, e))
}
