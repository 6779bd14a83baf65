use std::path::Path;

use super::{header_dims, read_file, write_atomic, Reader};
use crate::error::{Error, Result};
use crate::grid::LabelGrid;

pub const LMAP_MAGIC: &[u8; 4] = b"LMAP";

pub fn encode_lmap(grid: &LabelGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * grid.len());
    out.extend_from_slice(LMAP_MAGIC);
    out.extend_from_slice(&(grid.width() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.height() as u32).to_le_bytes());
    for v in grid.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_lmap(bytes: &[u8]) -> Result<LabelGrid> {
    let mut r = Reader::new(bytes, "LMAP");
    if r.take(4)? != LMAP_MAGIC {
        return Err(Error::BadMagic { what: "LMAP" });
    }
    let (w, h) = (r.u32()?, r.u32()?);
    let n = header_dims("LMAP", w, h, 4)?;
    r.expect_remaining(n * 4)?;
    let values = r
        .take(n * 4)?
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    LabelGrid::from_vec(w as usize, h as usize, values)
}

pub fn read_lmap(path: &Path) -> Result<LabelGrid> {
    decode_lmap(&read_file(path)?)
}

pub fn write_lmap(path: &Path, grid: &LabelGrid) -> Result<()> {
    if grid.width() > u32::MAX as usize || grid.height() > u32::MAX as usize {
        return Err(Error::Overflow {
            what: "LMAP",
            width: grid.width() as u64,
            height: grid.height() as u64,
        });
    }
    write_atomic(path, &encode_lmap(grid))
}
