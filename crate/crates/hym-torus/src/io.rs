//! Binary serialization of grid fields.
//!
//! Layout (all integers and floats little-endian):
//!   magic `HYMF` (4 bytes), format version (u32), complex dimension n (u32),
//!   points per axis (u32), matrix rank r (u32), dtype tag (u32; 0 scalar,
//!   1 matrix), 2n periods (f64), then `N^{2n} * r * r` complex values as
//!   (re, im) f64 pairs in row-major point-major order.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::MatrixField;
use crate::grid::{GridSpec, ScalarField};

const MAGIC: &[u8; 4] = b"HYMF";
const FORMAT_VERSION: u32 = 1;

const DTYPE_SCALAR: u32 = 0;
const DTYPE_MATRIX: u32 = 1;

fn write_header(w: &mut impl Write, grid: &GridSpec, r: usize, dtype: u32) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&(r as u32).to_le_bytes())?;
    w.write_all(&dtype.to_le_bytes())?;
    for p in grid.periods() {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

fn write_values(w: &mut impl Write, data: &[Complex64]) -> Result<()> {
    let mut buf = Vec::with_capacity(data.len() * 16);
    for z in data {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Header {
    grid: GridSpec,
    r: usize,
    dtype: u32,
}

fn read_header(rd: &mut impl Read) -> Result<Header> {
    let mut magic = [0u8; 4];
    rd.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::BadFieldFile("bad magic".into()));
    }
    let mut u = [0u8; 4];
    let mut next_u32 = |rd: &mut dyn Read| -> Result<u32> {
        rd.read_exact(&mut u)?;
        Ok(u32::from_le_bytes(u))
    };
    let version = next_u32(rd)?;
    if version != FORMAT_VERSION {
        return Err(Error::BadFieldFile(format!(
            "unsupported format version {version}"
        )));
    }
    let n = next_u32(rd)? as usize;
    let points = next_u32(rd)? as usize;
    let r = next_u32(rd)? as usize;
    let dtype = next_u32(rd)?;
    if dtype != DTYPE_SCALAR && dtype != DTYPE_MATRIX {
        return Err(Error::BadFieldFile(format!("unknown dtype tag {dtype}")));
    }
    let mut periods = vec![0.0f64; 2 * n];
    let mut f = [0u8; 8];
    for p in periods.iter_mut() {
        rd.read_exact(&mut f)?;
        *p = f64::from_le_bytes(f);
    }
    let grid = GridSpec::new(n, points, periods)?;
    Ok(Header { grid, r, dtype })
}

fn read_values(rd: &mut impl Read, count: usize) -> Result<Vec<Complex64>> {
    let mut buf = vec![0u8; count * 16];
    rd.read_exact(&mut buf)?;
    let mut out = Vec::with_capacity(count);
    for ch in buf.chunks_exact(16) {
        let re = f64::from_le_bytes(ch[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(ch[8..16].try_into().unwrap());
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

/// Writes a scalar field to `path`.
pub fn write_scalar_field(path: &Path, f: &ScalarField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, f.grid(), 1, DTYPE_SCALAR)?;
    write_values(&mut w, f.data())
}

/// Reads a scalar field from `path`.
pub fn read_scalar_field(path: &Path) -> Result<ScalarField> {
    let mut rd = std::io::BufReader::new(std::fs::File::open(path)?);
    let hdr = read_header(&mut rd)?;
    if hdr.dtype != DTYPE_SCALAR || hdr.r != 1 {
        return Err(Error::BadFieldFile("expected a scalar field".into()));
    }
    let data = read_values(&mut rd, hdr.grid.total_points())?;
    ScalarField::from_data(&hdr.grid, data)
}

/// Writes a matrix field to `path`.
pub fn write_matrix_field(path: &Path, f: &MatrixField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_header(&mut w, f.grid(), f.rank(), DTYPE_MATRIX)?;
    write_values(&mut w, f.raw_data())
}

/// Reads a matrix field from `path`.
pub fn read_matrix_field(path: &Path) -> Result<MatrixField> {
    let mut rd = std::io::BufReader::new(std::fs::File::open(path)?);
    let hdr = read_header(&mut rd)?;
    if hdr.dtype != DTYPE_MATRIX {
        return Err(Error::BadFieldFile("expected a matrix field".into()));
    }
    let data = read_values(&mut rd, hdr.grid.total_points() * hdr.r * hdr.r)?;
    MatrixField::from_raw(&hdr.grid, hdr.r, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_hermitian_field, random_real_field, rng_for};

    #[test]
    fn scalar_field_round_trips() {
        let grid = GridSpec::new(2, 8, vec![1.0, 2.0, 0.5, 1.5]).unwrap();
        let mut rng = rng_for(3, 1);
        let f = random_real_field(&grid, &mut rng, 0.7, 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        write_scalar_field(&path, &f).unwrap();
        let back = read_scalar_field(&path).unwrap();
        assert_eq!(back.grid().periods(), grid.periods());
        assert_eq!(back.data(), f.data());
    }

    #[test]
    fn matrix_field_round_trips() {
        let grid = GridSpec::square(1, 8).unwrap();
        let mut rng = rng_for(4, 2);
        let f = random_hermitian_field(&grid, 3, &mut rng, 0.4, 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        write_matrix_field(&path, &f).unwrap();
        let back = read_matrix_field(&path).unwrap();
        assert_eq!(back.rank(), 3);
        assert_eq!(back.raw_data(), f.raw_data());
    }

    #[test]
    fn rejects_wrong_magic_and_dtype() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(read_scalar_field(&path).is_err());

        let grid = GridSpec::square(1, 8).unwrap();
        let m = MatrixField::identity(&grid, 2);
        let path2 = dir.path().join("m.bin");
        write_matrix_field(&path2, &m).unwrap();
        assert!(read_scalar_field(&path2).is_err());
    }
}
