//! Binary field files and CSV slices.
//!
//! Layout (all little-endian):
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `FLABFLD1` |
//! | 4 | `u32` dimension |
//! | 4 | `u32` points per axis |
//! | 8 x dim | `f64` side lengths |
//! | 8 | `f64` inner support fraction |
//! | 4 | `u32` component count (1, dim or dim x dim) |
//! | 4 | `u32` flags, bit 0 = skew matrix |
//! | 16 x count x points | payload |
//!
//! The payload stores components one after another; each component is
//! row-major with the last axis fastest, every sample as `re, im` doubles.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Grid, MatrixField, ScalarField, VectorField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"FLABFLD1";
const FLAG_SKEW: u32 = 1;

/// Any field kind as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldFile {
    Scalar(ScalarField),
    Vector(VectorField),
    Matrix(MatrixField),
}

impl From<ScalarField> for FieldFile {
    fn from(f: ScalarField) -> Self {
        Self::Scalar(f)
    }
}

impl From<VectorField> for FieldFile {
    fn from(f: VectorField) -> Self {
        Self::Vector(f)
    }
}

impl From<MatrixField> for FieldFile {
    fn from(f: MatrixField) -> Self {
        Self::Matrix(f)
    }
}

impl FieldFile {
    pub fn grid(&self) -> &Grid {
        match self {
            Self::Scalar(f) => f.grid(),
            Self::Vector(f) => f.grid(),
            Self::Matrix(f) => f.grid(),
        }
    }

    fn components(&self) -> Vec<&ScalarField> {
        match self {
            Self::Scalar(f) => vec![f],
            Self::Vector(f) => f.components().iter().collect(),
            Self::Matrix(f) => f.entries().iter().collect(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.grid();
        let comps = self.components();
        let mut out = Vec::with_capacity(48 + comps.len() * grid.len() * 16);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
        out.extend_from_slice(&(grid.points_per_axis() as u32).to_le_bytes());
        for s in grid.sides() {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out.extend_from_slice(&grid.inner_fraction().to_le_bytes());
        out.extend_from_slice(&(comps.len() as u32).to_le_bytes());
        let flags = match self {
            Self::Matrix(m) if m.is_skew() => FLAG_SKEW,
            _ => 0,
        };
        out.extend_from_slice(&flags.to_le_bytes());
        for c in comps {
            for v in c.values() {
                out.extend_from_slice(&v.re.to_le_bytes());
                out.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let dim = cur.u32()? as usize;
        let points = cur.u32()? as usize;
        if !(1..=3).contains(&dim) {
            return Err(Error::Format(format!("dimension {dim}")));
        }
        let sides = (0..dim).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        let inner = cur.f64()?;
        let grid = Grid::with_sides(dim, points, &sides)?.with_inner_fraction(inner)?;
        let count = cur.u32()? as usize;
        let flags = cur.u32()?;
        let expected = grid.len() * count * 16;
        if cur.remaining() != expected {
            return Err(Error::Format(format!(
                "payload has {} bytes, expected {expected}",
                cur.remaining()
            )));
        }
        let comps = (0..count)
            .map(|_| {
                let vals = (0..grid.len())
                    .map(|_| Ok(Complex64::new(cur.f64()?, cur.f64()?)))
                    .collect::<Result<Vec<_>>>()?;
                ScalarField::new(grid, vals)
            })
            .collect::<Result<Vec<_>>>()?;
        match count {
            1 => Ok(Self::Scalar(comps.into_iter().next().expect("one component"))),
            c if c == dim && dim > 1 => Ok(Self::Vector(VectorField::new(comps)?)),
            c if c == dim * dim => {
                if flags & FLAG_SKEW != 0 {
                    Ok(Self::Matrix(MatrixField::new_skew(comps)?))
                } else {
                    Ok(Self::Matrix(MatrixField::new(comps)?))
                }
            }
            c => Err(Error::Format(format!("component count {c} for dimension {dim}"))),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    pub fn into_scalar(self) -> Result<ScalarField> {
        match self {
            Self::Scalar(f) => Ok(f),
            _ => Err(Error::Format("expected a scalar field".into())),
        }
    }

    /// In one dimension a scalar file also reads as a one-component vector.
    pub fn into_vector(self) -> Result<VectorField> {
        match self {
            Self::Vector(f) => Ok(f),
            Self::Scalar(f) if f.grid().dim() == 1 => VectorField::new(vec![f]),
            _ => Err(Error::Format("expected a vector field".into())),
        }
    }

    pub fn into_matrix(self) -> Result<MatrixField> {
        match self {
            Self::Matrix(f) => Ok(f),
            Self::Scalar(f) if f.grid().dim() == 1 => MatrixField::new(vec![f]),
            _ => Err(Error::Format("expected a matrix field".into())),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Format("truncated file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

/// Writes a CSV slice: all samples in 1D and 2D, the plane through the inner
/// center along the first axis in 3D. Columns are the node indices, the
/// positions, and the real and imaginary parts.
pub fn write_csv_slice<W: Write>(field: &ScalarField, out: &mut W) -> Result<()> {
    let g = field.grid();
    let d = g.dim();
    let names = ["x", "y", "z"];
    let mut header: Vec<String> = Vec::new();
    let shown = d.min(2);
    let first = d - shown;
    for &name in &names[first..d] {
        header.push(format!("i_{name}"));
    }
    for &name in &names[first..d] {
        header.push(name.to_string());
    }
    header.push("re".into());
    header.push("im".into());
    writeln!(out, "{}", header.join(","))?;
    let fixed = ((g.inner_bounds().0 + g.inner_bounds().1) / 2) % g.points_per_axis();
    for (l, v) in field.values().iter().enumerate() {
        let idx = g.multi(l);
        if d == 3 && idx[0] != fixed {
            continue;
        }
        let x = g.position(idx);
        let mut row: Vec<String> = (first..d).map(|a| idx[a].to_string()).collect();
        row.extend((first..d).map(|a| format!("{:.16e}", x[a])));
        row.push(format!("{:.16e}", v.re));
        row.push(format!("{:.16e}", v.im));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_all_kinds() {
        let g = Grid::with_sides(2, 8, &[1.0, 2.0]).unwrap();
        let s = ScalarField::from_fn(g, |x| Complex64::new(x[0], -x[1])).unwrap();
        let v = VectorField::new(vec![s.clone(), s.scale(Complex64::new(0.0, 2.0))]).unwrap();
        let z = ScalarField::zeros(g);
        let m = MatrixField::new_skew(vec![z.clone(), s.clone(), s.scale((-1.0).into()), z]).unwrap();
        for file in [FieldFile::from(s), FieldFile::from(v), FieldFile::from(m)] {
            let back = FieldFile::from_bytes(&file.to_bytes()).unwrap();
            assert_eq!(back, file);
        }
    }

    #[test]
    fn rejects_truncation_and_magic() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let bytes = FieldFile::from(ScalarField::zeros(g)).to_bytes();
        assert!(FieldFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(FieldFile::from_bytes(&bad).is_err());
    }

    #[test]
    fn csv_has_one_row_per_sample_in_2d() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_csv_slice(&ScalarField::zeros(g), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.starts_with("i_x,i_y,x,y,re,im"));
    }
}
