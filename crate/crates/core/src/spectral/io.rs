//! Binary field files: `"HJMR"`, version `u32 = 1`, `d: u32`, `n: u32` repeated
//! `d` times, then `n^d` binary64 values. Everything little-endian, row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{FieldError, GridSpec, ScalarField};

pub const FIELD_MAGIC: &[u8; 4] = b"HJMR";
pub const FIELD_VERSION: u32 = 1;

pub fn write_field<W: Write>(mut w: W, field: &ScalarField) -> std::io::Result<()> {
    let g = field.grid();
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&FIELD_VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for _ in 0..g.dim() {
        w.write_all(&(g.n() as u32).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, FieldError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)
        .map_err(|e| FieldError::Format(format!("truncated header: {e}")))?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_field<R: Read>(mut r: R) -> Result<ScalarField, FieldError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| FieldError::Format(format!("truncated header: {e}")))?;
    if &magic != FIELD_MAGIC {
        return Err(FieldError::Format(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != FIELD_VERSION {
        return Err(FieldError::Format(format!("unsupported version {version}")));
    }
    let d = read_u32(&mut r)? as usize;
    if !(1..=GridSpec::MAX_DIM).contains(&d) {
        return Err(FieldError::Format(format!("unsupported dimension {d}")));
    }
    let sizes: Vec<u32> = (0..d).map(|_| read_u32(&mut r)).collect::<Result<_, _>>()?;
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(FieldError::Format(format!("non-cubic grid {sizes:?}")));
    }
    let grid = GridSpec::new(d, sizes[0] as usize)
        .map_err(|e| FieldError::Format(format!("bad grid: {e}")))?;
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)
        .map_err(|e| FieldError::Format(format!("read failed: {e}")))?;
    if raw.len() != 8 * grid.len() {
        return Err(FieldError::Format(format!(
            "payload has {} bytes, expected {}",
            raw.len(),
            8 * grid.len()
        )));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    ScalarField::new(grid, values)
}

pub fn save_field(path: &Path, field: &ScalarField) -> std::io::Result<()> {
    let file = fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field)
}

pub fn load_field(path: &Path) -> Result<ScalarField, FieldError> {
    let bytes = fs::read(path)
        .map_err(|e| FieldError::Format(format!("{}: {e}", path.display())))?;
    read_field(bytes.as_slice())
}
