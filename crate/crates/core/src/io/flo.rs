use std::path::Path;

use super::{header_dims, read_file, write_atomic, Reader};
use crate::error::{Error, Result};
use crate::grid::{FlowField, FlowVector};

/// The float 202021.25, whose little-endian bytes spell `PIEH`.
pub const FLO_MAGIC: f32 = 202021.25;

pub fn encode_flo(flow: &FlowField) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * flow.vectors().len());
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(flow.width() as u32).to_le_bytes());
    out.extend_from_slice(&(flow.height() as u32).to_le_bytes());
    for v in flow.vectors() {
        out.extend_from_slice(&v.dx.to_le_bytes());
        out.extend_from_slice(&v.dy.to_le_bytes());
    }
    out
}

pub fn decode_flo(bytes: &[u8]) -> Result<FlowField> {
    let mut r = Reader::new(bytes, "flo");
    if r.take(4)? != FLO_MAGIC.to_le_bytes() {
        return Err(Error::BadMagic { what: "flo" });
    }
    let (w, h) = (r.u32()?, r.u32()?);
    let n = header_dims("flo", w, h, 8)?;
    r.expect_remaining(n * 8)?;
    let f32_at = |c: &[u8]| f32::from_le_bytes(c.try_into().expect("4 bytes"));
    let vectors = r
        .take(n * 8)?
        .chunks_exact(8)
        .map(|c| FlowVector::new(f32_at(&c[..4]), f32_at(&c[4..])))
        .collect();
    FlowField::from_vec(w as usize, h as usize, vectors)
}

pub fn read_flo(path: &Path) -> Result<FlowField> {
    decode_flo(&read_file(path)?)
}

pub fn write_flo(path: &Path, flow: &FlowField) -> Result<()> {
    if flow.width() > u32::MAX as usize || flow.height() > u32::MAX as usize {
        return Err(Error::Overflow {
            what: "flo",
            width: flow.width() as u64,
            height: flow.height() as u64,
        });
    }
    write_atomic(path, &encode_flo(flow))
}
