use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a class is countable (`Thing`, carries instance ids) or an
/// amorphous region (`Stuff`, instance id is always 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Stuff,
    Thing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub class_id: u32,
    pub name: String,
    pub kind: ClassKind,
}

fn default_void() -> u32 {
    0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTaxonomy {
    entries: Vec<ClassEntry>,
    #[serde(default = "default_void")]
    void_class_id: u32,
}

/// Class id → name and kind. The void class is reserved, must be stuff, and
/// is excluded from matching and metrics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTaxonomy", into = "RawTaxonomy")]
pub struct ClassTaxonomy {
    entries: Vec<ClassEntry>,
    void_class_id: u32,
    by_id: BTreeMap<u32, usize>,
}

impl TryFrom<RawTaxonomy> for ClassTaxonomy {
    type Error = Error;

    fn try_from(raw: RawTaxonomy) -> Result<Self> {
        ClassTaxonomy::new(raw.entries, raw.void_class_id)
    }
}

impl From<ClassTaxonomy> for RawTaxonomy {
    fn from(t: ClassTaxonomy) -> Self {
        RawTaxonomy {
            entries: t.entries,
            void_class_id: t.void_class_id,
        }
    }
}

impl ClassTaxonomy {
    pub fn new(entries: Vec<ClassEntry>, void_class_id: u32) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            if by_id.insert(e.class_id, i).is_some() {
                return Err(Error::InvalidTaxonomy(format!(
                    "duplicate class id {}",
                    e.class_id
                )));
            }
        }
        match by_id.get(&void_class_id) {
            None => {
                return Err(Error::InvalidTaxonomy(format!(
                    "void class {void_class_id} is missing"
                )))
            }
            Some(&i) if entries[i].kind != ClassKind::Stuff => {
                return Err(Error::InvalidTaxonomy(format!(
                    "void class {void_class_id} must be stuff"
                )))
            }
            _ => {}
        }
        Ok(ClassTaxonomy {
            entries,
            void_class_id,
            by_id,
        })
    }

    /// A small street-scene taxonomy: void, road, sidewalk, building,
    /// vegetation, sky (stuff) and person, car (thing).
    pub fn street() -> Self {
        let e = |class_id, name: &str, kind| ClassEntry {
            class_id,
            name: name.to_string(),
            kind,
        };
        use ClassKind::*;
        Self::new(
            vec![
                e(0, "void", Stuff),
                e(1, "road", Stuff),
                e(2, "sidewalk", Stuff),
                e(3, "building", Stuff),
                e(4, "vegetation", Stuff),
                e(5, "sky", Stuff),
                e(11, "person", Thing),
                e(13, "car", Thing),
            ],
            0,
        )
        .expect("built-in taxonomy is valid")
    }

    pub fn entries(&self) -> &[ClassEntry] {
        &self.entries
    }

    pub fn void_class_id(&self) -> u32 {
        self.void_class_id
    }

    pub fn get(&self, class_id: u32) -> Option<&ClassEntry> {
        self.by_id.get(&class_id).map(|&i| &self.entries[i])
    }

    pub fn kind(&self, class_id: u32) -> Result<ClassKind> {
        self.get(class_id)
            .map(|e| e.kind)
            .ok_or(Error::UnknownClass(class_id))
    }

    pub fn contains(&self, class_id: u32) -> bool {
        self.by_id.contains_key(&class_id)
    }

    pub fn is_thing(&self, class_id: u32) -> bool {
        self.get(class_id)
            .is_some_and(|e| e.kind == ClassKind::Thing)
    }

    pub fn is_void(&self, class_id: u32) -> bool {
        class_id == self.void_class_id
    }

    pub fn by_name(&self, name: &str) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn thing_classes(&self) -> impl Iterator<Item = &ClassEntry> {
        self.entries.iter().filter(|e| e.kind == ClassKind::Thing)
    }

    /// Fails when no thing class exists; tracking needs at least one.
    pub fn ensure_has_things(&self) -> Result<()> {
        if self.thing_classes().next().is_none() {
            return Err(Error::InvalidTaxonomy("no thing class defined".into()));
        }
        Ok(())
    }

    /// Dense lookup table of kinds indexed by class id, for per-pixel loops.
    pub(crate) fn kind_table(&self) -> KindTable {
        let max = self.by_id.keys().next_back().copied().unwrap_or(0) as usize;
        let mut table = vec![None; max + 1];
        for e in &self.entries {
            table[e.class_id as usize] = Some(e.kind);
        }
        KindTable(table)
    }
}

pub(crate) struct KindTable(Vec<Option<ClassKind>>);

impl KindTable {
    #[inline]
    pub fn get(&self, class_id: u32) -> Option<ClassKind> {
        self.0.get(class_id as usize).copied().flatten()
    }
}
