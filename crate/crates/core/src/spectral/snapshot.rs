//! Binary field snapshot.
//!
//! Byte layout, all integers and floats little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `b"TPSF"`                           |
//! | 4      | 4    | format version (`u32`, currently 1)       |
//! | 8      | 4    | endianness tag `0x01020304` (`u32`)       |
//! | 12     | 4    | dimension `d` (`u32`)                     |
//! | 16     | 4    | points per axis `N` (`u32`)               |
//! | 20     | 4    | number of components (`u32`)              |
//! | 24     | 8    | side length `L` (`f64`)                   |
//! | 32     | ...  | coefficients as `(re, im)` `f64` pairs    |
//!
//! Coefficients follow the in-memory order: component-major, then modes in
//! row-major storage order with axis 0 slowest.

use std::io::{Read, Write};
use std::path::Path;

use super::field::SpectralField;
use super::grid::{Grid, C64};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"TPSF";
pub const FORMAT_VERSION: u32 = 1;
pub const ENDIAN_TAG: u32 = 0x0102_0304;

pub fn write_snapshot<W: Write>(w: &mut W, f: &SpectralField) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&ENDIAN_TAG.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&(f.ncomp() as u32).to_le_bytes())?;
    w.write_all(&g.side().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * f.data().len());
    for z in f.data() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads a snapshot, building a fresh grid from the header.
pub fn read_snapshot<R: Read>(r: &mut R) -> Result<SpectralField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::FormatVersionMismatch {
            expected: "TPSF".into(),
            found: String::from_utf8_lossy(&magic).into_owned(),
        });
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(Error::FormatVersionMismatch {
            expected: FORMAT_VERSION.to_string(),
            found: version.to_string(),
        });
    }
    let tag = read_u32(r)?;
    if tag != ENDIAN_TAG {
        return Err(Error::FormatVersionMismatch {
            expected: format!("endianness tag {ENDIAN_TAG:#x}"),
            found: format!("{tag:#x}"),
        });
    }
    let dim = read_u32(r)? as usize;
    let n = read_u32(r)? as usize;
    let ncomp = read_u32(r)? as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let side = f64::from_le_bytes(b8);
    let grid = Grid::new(dim, n, side)?;
    let count = ncomp * grid.len();
    let mut raw = vec![0u8; 16 * count];
    r.read_exact(&mut raw)?;
    let data: Vec<C64> = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..16].try_into().unwrap());
            C64::new(re, im)
        })
        .collect();
    let mut f = SpectralField::zeros(&grid, ncomp);
    f.data_mut().copy_from_slice(&data);
    Ok(f)
}

pub fn save_snapshot(path: &Path, f: &SpectralField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<SpectralField> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_snapshot(&mut r)
}
