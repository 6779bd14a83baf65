use std::path::Path;

use super::{read_file, write_atomic};
use crate::error::{Error, Result};
use crate::fillfuse::TrackedBox;

/// Parses JSON Lines. Blank lines are skipped; line numbers in errors are
/// 1-based.
pub fn decode_tracks(text: &str) -> Result<Vec<TrackedBox>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let b: TrackedBox = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        b.validate().map_err(|e| parse_err(e.to_string()))?;
        out.push(b);
    }
    Ok(out)
}

/// One object per line, sorted by frame then track id (stable otherwise).
pub fn encode_tracks(boxes: &[TrackedBox]) -> String {
    let mut sorted = boxes.to_vec();
    sorted.sort_by_key(|b| (b.frame, b.track_id));
    let mut out = String::new();
    for b in &sorted {
        out.push_str(&serde_json::to_string(b).expect("plain struct serializes"));
        out.push('\n');
    }
    out
}

pub fn read_tracks(path: &Path) -> Result<Vec<TrackedBox>> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    decode_tracks(text)
}

pub fn write_tracks(path: &Path, boxes: &[TrackedBox]) -> Result<()> {
    write_atomic(path, encode_tracks(boxes).as_bytes())
}
