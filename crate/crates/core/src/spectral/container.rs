use std::io::{Read, Write};

use byteorder::{BigEndian, LittleEndian, ReadBytesExt, WriteBytesExt};

use super::field::Field;
use super::grid::Grid;
use crate::error::{LabError, Result};

const MAGIC: &[u8; 8] = b"BOFIELD1";

/// Byte order of a binary field container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endianness {
    Little,
    Big,
}

impl Endianness {
    fn tag(self) -> u8 {
        match self {
            Endianness::Little => b'L',
            Endianness::Big => b'B',
        }
    }
}

/// Writes `magic | tag | n: u64 | L: f64 | n x f64`.
pub fn write_field<W: Write>(mut w: W, field: &Field, order: Endianness) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u8(order.tag())?;
    let g = field.grid();
    match order {
        Endianness::Little => write_body::<LittleEndian, _>(&mut w, g, field.samples())?,
        Endianness::Big => write_body::<BigEndian, _>(&mut w, g, field.samples())?,
    }
    Ok(())
}

fn write_body<B: byteorder::ByteOrder, W: Write>(w: &mut W, g: &Grid, samples: &[f64]) -> Result<()> {
    w.write_u64::<B>(g.n() as u64)?;
    w.write_f64::<B>(g.half_length())?;
    for &v in samples {
        w.write_f64::<B>(v)?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LabError::Format("bad magic in field container".into()));
    }
    match r.read_u8()? {
        b'L' => read_body::<LittleEndian, _>(&mut r),
        b'B' => read_body::<BigEndian, _>(&mut r),
        t => Err(LabError::Format(format!("unknown endianness tag {t:#x}"))),
    }
}

fn read_body<B: byteorder::ByteOrder, R: Read>(r: &mut R) -> Result<Field> {
    let n = r.read_u64::<B>()? as usize;
    let l = r.read_f64::<B>()?;
    let grid = Grid::new(n, l)?;
    let mut samples = vec![0.0; n];
    r.read_f64_into::<B>(&mut samples)?;
    Field::new(&grid, samples)
}

/// CSV with header `x,u`.
pub fn write_field_csv<W: Write>(w: W, field: &Field) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "u"])?;
    let g = field.grid();
    for (j, v) in field.samples().iter().enumerate() {
        out.write_record([format!("{:e}", g.x(j)), format!("{v:e}")])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_field_csv`], recovering the grid from the
/// first point and the spacing.
pub fn read_field_csv<R: Read>(r: R) -> Result<Field> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for rec in rdr.deserialize::<(f64, f64)>() {
        let (x, u) = rec?;
        xs.push(x);
        us.push(u);
    }
    let l = -xs.first().copied().ok_or_else(|| LabError::Format("empty field CSV".into()))?;
    let grid = Grid::new(xs.len(), l)?;
    Field::new(&grid, us)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_both_orders() {
        let g = Grid::new(32, 2.5).unwrap();
        let f = Field::from_fn(&g, |x| x.sin() * 1e-3 + x);
        for order in [Endianness::Little, Endianness::Big] {
            let mut buf = Vec::new();
            write_field(&mut buf, &f, order).unwrap();
            assert_eq!(buf.len(), 8 + 1 + 8 + 8 + 32 * 8);
            let back = read_field(buf.as_slice()).unwrap();
            assert_eq!(back.samples(), f.samples());
            assert_eq!(back.grid(), f.grid());
        }
    }

    #[test]
    fn corrupt_header_rejected() {
        let mut buf = b"NOTFIELD".to_vec();
        buf.extend([0u8; 32]);
        assert!(read_field(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,u\n"));
        let back = read_field_csv(buf.as_slice()).unwrap();
        assert_eq!(back.samples(), f.samples());
    }
}
