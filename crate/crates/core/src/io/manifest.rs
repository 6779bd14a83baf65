//! Sequence manifests.
//!
//! ```json
//! {
//!   "version": "vpskit-sequence/1",
//!   "frame_count": 2,
//!   "taxonomy": {"entries": [...], "void_class_id": 0},
//!   "classes": ["frame_00000.classes.lmap", "frame_00001.classes.lmap"],
//!   "instances": ["frame_00000.instances.lmap", "frame_00001.instances.lmap"],
//!   "flows": {"direction": "prev_to_curr", "files": ["flow_00001.flo"]}
//! }
//! ```
//!
//! `taxonomy` may also be `{"path": "taxonomy.json"}`. Every list except
//! `classes` is optional. Relative paths resolve against the manifest's
//! directory. Flow file `i` relates frames `i` and `i + 1`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_flo, read_lmap, write_atomic, write_flo, write_lmap};
use crate::error::{Error, Result};
use crate::grid::{FlowField, LabelGrid};
use crate::panoptic::PanopticMap;
use crate::taxonomy::ClassTaxonomy;

pub const MANIFEST_VERSION: &str = "vpskit-sequence/1";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Which way the stored flow fields point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowDirection {
    /// Field `i` lives on frame `i` and points into frame `i + 1`.
    PrevToCurr,
    /// Field `i` lives on frame `i + 1` and points back into frame `i`.
    CurrToPrev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSet {
    pub direction: FlowDirection,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaxonomyRef {
    Inline(ClassTaxonomy),
    Path { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceManifest {
    pub version: String,
    pub frame_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taxonomy: Option<TaxonomyRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flows: Option<FlowSet>,
}

impl SequenceManifest {
    fn check(&self, path: &Path) -> Result<()> {
        let fail = |message: String| {
            Err(Error::Manifest {
                path: path.to_path_buf(),
                message,
            })
        };
        if self.version != MANIFEST_VERSION {
            return fail(format!("unsupported version {:?}", self.version));
        }
        let n = self.frame_count;
        if !self.classes.is_empty() && self.classes.len() != n {
            return fail(format!("{} class maps for {n} frames", self.classes.len()));
        }
        if !self.instances.is_empty() {
            if self.instances.len() != n {
                return fail(format!(
                    "{} instance maps for {n} frames",
                    self.instances.len()
                ));
            }
            if self.classes.is_empty() {
                return fail("instance maps without class maps".into());
            }
        }
        if let Some(f) = &self.flows {
            if f.files.len() != n.saturating_sub(1) {
                return fail(format!("{} flow files for {n} frames", f.files.len()));
            }
        }
        Ok(())
    }
}

/// Contents of a manifest with every referenced file loaded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sequence {
    pub taxonomy: Option<ClassTaxonomy>,
    pub classes: Vec<LabelGrid>,
    /// Empty for semantic-only sequences.
    pub instances: Vec<LabelGrid>,
    pub flows: Option<(FlowDirection, Vec<FlowField>)>,
}

impl Sequence {
    pub fn frame_count(&self) -> usize {
        self.classes
            .len()
            .max(self.flows.as_ref().map_or(0, |(_, f)| f.len() + 1))
    }

    /// Pairs class and instance grids into panoptic frames.
    pub fn panoptic(&self) -> Result<Vec<PanopticMap>> {
        if self.instances.len() != self.classes.len() {
            return Err(Error::SequenceLengthMismatch {
                expected: self.classes.len(),
                found: self.instances.len(),
            });
        }
        self.classes
            .iter()
            .zip(&self.instances)
            .map(|(c, i)| PanopticMap::new(c.clone(), i.clone()))
            .collect()
    }

    pub fn taxonomy(&self) -> Result<&ClassTaxonomy> {
        self.taxonomy
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("sequence has no taxonomy".into()))
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Loads a manifest and every file it references.
pub fn read_sequence(manifest_path: &Path) -> Result<Sequence> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: SequenceManifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: manifest_path.to_path_buf(),
        message: e.to_string(),
    })?;
    manifest.check(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let taxonomy = match manifest.taxonomy {
        None => None,
        Some(TaxonomyRef::Inline(t)) => Some(t),
        Some(TaxonomyRef::Path { path }) => {
            let p = resolve(base, &path);
            let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            Some(serde_json::from_str(&text)?)
        }
    };
    let classes = manifest
        .classes
        .iter()
        .map(|p| read_lmap(&resolve(base, p)))
        .collect::<Result<Vec<_>>>()?;
    let instances = manifest
        .instances
        .iter()
        .map(|p| read_lmap(&resolve(base, p)))
        .collect::<Result<Vec<_>>>()?;
    let flows = match manifest.flows {
        None => None,
        Some(set) => {
            let fields = set
                .files
                .iter()
                .map(|p| read_flo(&resolve(base, p)))
                .collect::<Result<Vec<_>>>()?;
            Some((set.direction, fields))
        }
    };
    Ok(Sequence {
        taxonomy,
        classes,
        instances,
        flows,
    })
}

/// Writes every grid and flow field of `seq` into `dir` (created if
/// missing) together with `manifest.json`, whose path is returned.
pub fn write_sequence(dir: &Path, seq: &Sequence) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = SequenceManifest {
        version: MANIFEST_VERSION.to_string(),
        frame_count: seq.frame_count(),
        taxonomy: seq.taxonomy.clone().map(TaxonomyRef::Inline),
        classes: Vec::new(),
        instances: Vec::new(),
        flows: None,
    };
    for (t, g) in seq.classes.iter().enumerate() {
        let name = PathBuf::from(format!("frame_{t:05}.classes.lmap"));
        write_lmap(&dir.join(&name), g)?;
        manifest.classes.push(name);
    }
    for (t, g) in seq.instances.iter().enumerate() {
        let name = PathBuf::from(format!("frame_{t:05}.instances.lmap"));
        write_lmap(&dir.join(&name), g)?;
        manifest.instances.push(name);
    }
    if let Some((direction, fields)) = &seq.flows {
        let mut files = Vec::with_capacity(fields.len());
        for (i, f) in fields.iter().enumerate() {
            let name = PathBuf::from(format!("flow_{:05}.flo", i + 1));
            write_flo(&dir.join(&name), f)?;
            files.push(name);
        }
        manifest.flows = Some(FlowSet {
            direction: *direction,
            files,
        });
    }
    let path = dir.join(MANIFEST_FILE);
    manifest.check(&path)?;
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
