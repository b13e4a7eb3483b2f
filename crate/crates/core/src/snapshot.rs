//! Little-endian binary field files: the 24-byte header
//! `"PLAB", version u32, dim u32, n u32, box_length f64` followed by the
//! row-major `f64` samples of each component, back to back.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::vector::VectorField;

pub const MAGIC: &[u8; 4] = b"PLAB";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;

/// Encodes one or more components sharing a grid.
pub fn encode(fields: &[&SpectralField]) -> Result<Vec<u8>> {
    let first = fields.first().ok_or_else(|| Error::Snapshot("no components to write".into()))?;
    let g = *first.grid();
    for f in fields {
        first.ensure_same_grid(f)?;
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len() * fields.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&g.box_length().to_le_bytes());
    for f in fields {
        for v in f.samples() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

/// Decodes a file into its components.
pub fn decode(bytes: &[u8]) -> Result<Vec<SpectralField>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("four bytes"));
    let version = word(4);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let (dim, n) = (word(8) as usize, word(12) as usize);
    let box_length = f64::from_le_bytes(bytes[16..24].try_into().expect("eight bytes"));
    let g = Grid::new(n, box_length, dim).map_err(|e| Error::Snapshot(format!("header: {e}")))?;
    let body = &bytes[HEADER_LEN..];
    let per = 8 * g.len();
    if body.is_empty() || body.len() % per != 0 {
        return Err(Error::Snapshot(format!("body of {} bytes is not a whole number of {per}-byte fields", body.len())));
    }
    Ok(body
        .chunks_exact(per)
        .map(|chunk| {
            let s = chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("eight bytes"))).collect();
            SpectralField::from_samples(g, s).expect("grid size")
        })
        .collect())
}

pub fn write_field(path: &Path, f: &SpectralField) -> Result<()> {
    write_bytes(path, &encode(&[f])?)
}

pub fn write_vector(path: &Path, v: &VectorField) -> Result<()> {
    let [a, b, c] = v.components();
    write_bytes(path, &encode(&[a, b, c])?)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(bytes)?;
    Ok(())
}

/// Reads every component stored in `path`.
pub fn read_components(path: &Path) -> Result<Vec<SpectralField>> {
    decode(&fs::read(path)?)
}

/// Reads a single scalar field.
pub fn read_field(path: &Path) -> Result<SpectralField> {
    let mut c = read_components(path)?;
    if c.len() != 1 {
        return Err(Error::Snapshot(format!("expected one component, found {}", c.len())));
    }
    Ok(c.remove(0))
}

/// Reads a three-component field; the divergence claim is re-verified.
pub fn read_vector(path: &Path) -> Result<VectorField> {
    let c = read_components(path)?;
    let comps: [SpectralField; 3] =
        c.try_into().map_err(|c: Vec<_>| Error::Snapshot(format!("expected three components, found {}", c.len())))?;
    let v = VectorField::from_components(comps)?;
    let free = v.relative_divergence() <= crate::vector::DIVERGENCE_TOL;
    VectorField::new(v.into_components(), free)
}
