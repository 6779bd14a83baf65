//! File formats.
//!
//! * LMAP label grids: `"LMAP"`, `u32` width, `u32` height, then
//!   `width × height` `u32` values, all little-endian, row-major.
//! * Middlebury `.flo` flow fields: `f32` 202021.25, `u32` width, `u32`
//!   height, then `(dx, dy)` `f32` pairs, little-endian, row-major.
//! * Tracks as JSON Lines, one [`TrackedBox`](crate::fillfuse::TrackedBox)
//!   object per line.
//! * Sequence manifests tying per-frame files together.
//!
//! Readers never panic on malformed input; they return structured errors.
//! Writers go through a temporary file and a rename.

mod flo;
mod lmap;
mod manifest;
mod tracks;

pub use flo::{decode_flo, encode_flo, read_flo, write_flo, FLO_MAGIC};
pub use lmap::{decode_lmap, encode_lmap, read_lmap, write_lmap, LMAP_MAGIC};
pub use manifest::{
    read_sequence, write_sequence, FlowDirection, FlowSet, Sequence, SequenceManifest, TaxonomyRef,
    MANIFEST_FILE, MANIFEST_VERSION,
};
pub use tracks::{decode_tracks, encode_tracks, read_tracks, write_tracks};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `bytes` next to `path` under a temporary name, then renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Little-endian cursor over a byte slice that reports truncation.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8], what: &'static str) -> Self {
        Reader {
            bytes,
            pos: 0,
            what,
        }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(Error::Truncated {
                what: self.what,
                needed: self.pos.saturating_add(n),
                found: self.bytes.len(),
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    /// Checks that exactly `n` more bytes remain.
    pub fn expect_remaining(&self, n: usize) -> Result<()> {
        let left = self.bytes.len() - self.pos;
        match left.cmp(&n) {
            std::cmp::Ordering::Less => Err(Error::Truncated {
                what: self.what,
                needed: self.pos + n,
                found: self.bytes.len(),
            }),
            std::cmp::Ordering::Greater => Err(Error::TrailingData {
                what: self.what,
                extra: left - n,
            }),
            std::cmp::Ordering::Equal => Ok(()),
        }
    }
}

/// Validates a width/height header and returns the pixel count.
pub(crate) fn header_dims(
    what: &'static str,
    width: u32,
    height: u32,
    bytes_per_pixel: usize,
) -> Result<usize> {
    let overflow = Error::Overflow {
        what,
        width: width as u64,
        height: height as u64,
    };
    if width == 0 || height == 0 {
        return Err(Error::EmptyGrid {
            width: width as usize,
            height: height as usize,
        });
    }
    let n = (width as usize)
        .checked_mul(height as usize)
        .ok_or(overflow)?;
    n.checked_mul(bytes_per_pixel).ok_or(Error::Overflow {
        what,
        width: width as u64,
        height: height as u64,
    })?;
    Ok(n)
}
