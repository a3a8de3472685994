//! BFLD binary snapshots: `"BFLD"`, version `u32 = 1`, `n: u32`,
//! `box_length: f64`, component count `u8`, then each component as
//! little-endian `f64` with the x index fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::PhysicalField;
use crate::grid::GridSpec;

const MAGIC: &[u8; 4] = b"BFLD";
const VERSION: u32 = 1;

pub fn write<W: Write>(f: &PhysicalField, mut w: W) -> Result<()> {
    let ncomp = u8::try_from(f.ncomp()).map_err(|_| Error::Format("too many components".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(f.grid.n as u32).to_le_bytes())?;
    w.write_all(&f.grid.box_length.to_le_bytes())?;
    w.write_all(&[ncomp])?;
    for c in &f.comps {
        for v in c {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read<R: Read>(mut r: R) -> Result<PhysicalField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let grid = GridSpec::new(n, f64::from_le_bytes(b8))?;
    let mut b1 = [0u8; 1];
    r.read_exact(&mut b1)?;
    let mut comps = Vec::with_capacity(b1[0] as usize);
    let mut buf = vec![0u8; 8 * grid.len_physical()];
    for _ in 0..b1[0] {
        r.read_exact(&mut buf)?;
        comps.push(
            buf.chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
                .collect(),
        );
    }
    Ok(PhysicalField { grid, comps })
}

pub fn save(f: &PhysicalField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<PhysicalField> {
    read(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_and_roundtrip() {
        let g = GridSpec::with_periods(4, 1).unwrap();
        let f = PhysicalField::from_fn(g, |[x, y, z]| [x, y * 2.0, z - 1.0]);
        let mut bytes = Vec::new();
        write(&f, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"BFLD");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(bytes[20], 3);
        assert_eq!(bytes.len(), 21 + 3 * 64 * 8);
        // first sample of component 0 is x at node 0, the box corner
        let x0 = f64::from_le_bytes(bytes[21..29].try_into().unwrap());
        assert_eq!(x0, g.coord(0));
        assert_eq!(read(bytes.as_slice()).unwrap(), f);
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(matches!(read(&b"NOPE\x01\0\0\0"[..]), Err(Error::Format(_))));
    }
}
