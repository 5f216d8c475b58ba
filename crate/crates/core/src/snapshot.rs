//! `FNLS1` field snapshot files.
//!
//! Layout (all little-endian): magic `FNLS`, `u32` version (= 1), `u32` d,
//! then per axis `u64 n_j` and `f64 L_j`, then interleaved `f64` real and
//! imaginary parts in storage order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;

pub const MAGIC: [u8; 4] = *b"FNLS";
pub const VERSION: u32 = 1;

pub fn write_field<W: Write>(mut w: W, u: &ComplexField) -> Result<()> {
    let grid = u.grid();
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for (&n, &l) in grid.shape().iter().zip(grid.extents()) {
        w.write_all(&(n as u64).to_le_bytes())?;
        w.write_all(&l.to_le_bytes())?;
    }
    for z in u.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated input: {e}")))?;
    Ok(buf)
}

pub fn read_field<R: Read>(mut r: R) -> Result<ComplexField> {
    if read_array::<_, 4>(&mut r)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if !(1..=3).contains(&d) {
        return Err(Error::Format(format!("dimension {d}")));
    }
    let mut n = Vec::with_capacity(d);
    let mut extent = Vec::with_capacity(d);
    for _ in 0..d {
        n.push(u64::from_le_bytes(read_array(&mut r)?) as usize);
        extent.push(f64::from_le_bytes(read_array(&mut r)?));
    }
    let grid = Grid::new(&n, &extent)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(read_array(&mut r)?);
        let im = f64::from_le_bytes(read_array(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes".into()));
    }
    ComplexField::new(grid, values)
}

pub fn save(path: &Path, u: &ComplexField) -> Result<()> {
    write_field(BufWriter::new(File::create(path)?), u)
}

pub fn load(path: &Path) -> Result<ComplexField> {
    read_field(BufReader::new(File::open(path)?))
}
