//! Panoptic frames, segments and pixel-set IoU.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{LabelGrid, Pixel};
use crate::taxonomy::{ClassKind, ClassTaxonomy};

/// Instance id carried by every pixel that belongs to no instance.
pub const NO_INSTANCE: u32 = 0;

pub type PixelSet = BTreeSet<Pixel>;

/// One video-panoptic frame: a class grid plus an instance grid of the same
/// size. Instance 0 means "no instance".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PanopticMap {
    classes: LabelGrid,
    instances: LabelGrid,
}

impl PanopticMap {
    /// Pairs two grids. Only the dimensions are checked here; use
    /// [`validate_panoptic`] for the taxonomy rules.
    pub fn new(classes: LabelGrid, instances: LabelGrid) -> Result<Self> {
        instances.ensure_same_dims(classes.width(), classes.height())?;
        Ok(PanopticMap { classes, instances })
    }

    /// All pixels `class_id`, no instances.
    pub fn uniform(width: usize, height: usize, class_id: u32) -> Result<Self> {
        Ok(PanopticMap {
            classes: LabelGrid::filled(width, height, class_id)?,
            instances: LabelGrid::filled(width, height, NO_INSTANCE)?,
        })
    }

    pub fn classes(&self) -> &LabelGrid {
        &self.classes
    }

    pub fn instances(&self) -> &LabelGrid {
        &self.instances
    }

    pub fn width(&self) -> usize {
        self.classes.width()
    }

    pub fn height(&self) -> usize {
        self.classes.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.classes.dims()
    }

    pub fn into_parts(self) -> (LabelGrid, LabelGrid) {
        (self.classes, self.instances)
    }

    /// Sets one pixel's class and instance.
    pub fn set(&mut self, x: usize, y: usize, class_id: u32, instance_id: u32) {
        self.classes.set(x, y, class_id);
        self.instances.set(x, y, instance_id);
    }

    /// Distinct non-zero instance ids, ascending.
    pub fn instance_ids(&self) -> BTreeSet<u32> {
        self.instances
            .values()
            .iter()
            .copied()
            .filter(|&i| i != NO_INSTANCE)
            .collect()
    }
}

/// Pixels sharing one (class, instance) label. Need not be connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub class_id: u32,
    pub instance_id: u32,
    pub pixels: PixelSet,
}

impl Segment {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

/// Intersection over union of two pixel sets; 0 when both are empty.
pub fn iou(a: &PixelSet, b: &PixelSet) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let inter = small.iter().filter(|p| large.contains(p)).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Splits a map into segments: one per (class, instance ≠ 0) pair and one
/// per stuff class. Void pixels and thing pixels without an instance (such
/// as objects no tracker box covered) belong to no segment.
///
/// Output is sorted by (class id, instance id).
pub fn extract_segments(map: &PanopticMap, taxonomy: &ClassTaxonomy) -> Result<Vec<Segment>> {
    let kinds = taxonomy.kind_table();
    let void = taxonomy.void_class_id();
    let mut groups: BTreeMap<(u32, u32), PixelSet> = BTreeMap::new();
    let classes = map.classes.values();
    let instances = map.instances.values();
    for (i, (&c, &inst)) in classes.iter().zip(instances).enumerate() {
        let kind = kinds.get(c).ok_or(Error::UnknownClass(c))?;
        if c == void {
            continue;
        }
        let key = match kind {
            ClassKind::Stuff => (c, NO_INSTANCE),
            ClassKind::Thing if inst == NO_INSTANCE => continue,
            ClassKind::Thing => (c, inst),
        };
        groups
            .entry(key)
            .or_default()
            .insert(map.classes.pixel_at(i));
    }
    Ok(groups
        .into_iter()
        .map(|((class_id, instance_id), pixels)| Segment {
            class_id,
            instance_id,
            pixels,
        })
        .collect())
}

/// A broken [`PanopticMap`] rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch {
        classes: (usize, usize),
        instances: (usize, usize),
    },
    UnknownClass {
        pixel: Pixel,
        class_id: u32,
    },
    StuffWithInstance {
        pixel: Pixel,
        class_id: u32,
        instance_id: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { classes, instances } => write!(
                f,
                "class grid is {}x{} but instance grid is {}x{}",
                classes.0, classes.1, instances.0, instances.1
            ),
            Violation::UnknownClass { pixel, class_id } => write!(
                f,
                "pixel ({}, {}) has unknown class {}",
                pixel.x, pixel.y, class_id
            ),
            Violation::StuffWithInstance {
                pixel,
                class_id,
                instance_id,
            } => write!(
                f,
                "pixel ({}, {}) of stuff class {} carries instance {}",
                pixel.x, pixel.y, class_id, instance_id
            ),
        }
    }
}

/// Checks a pair of grids against the panoptic rules. An empty result means
/// the pair is a valid [`PanopticMap`] for `taxonomy`.
pub fn validate_grids(
    classes: &LabelGrid,
    instances: &LabelGrid,
    taxonomy: &ClassTaxonomy,
) -> Vec<Violation> {
    if classes.dims() != instances.dims() {
        return vec![Violation::DimensionMismatch {
            classes: classes.dims(),
            instances: instances.dims(),
        }];
    }
    let kinds = taxonomy.kind_table();
    let mut out = Vec::new();
    for (i, (&c, &inst)) in classes.values().iter().zip(instances.values()).enumerate() {
        match kinds.get(c) {
            None => out.push(Violation::UnknownClass {
                pixel: classes.pixel_at(i),
                class_id: c,
            }),
            Some(ClassKind::Stuff) if inst != NO_INSTANCE => {
                out.push(Violation::StuffWithInstance {
                    pixel: classes.pixel_at(i),
                    class_id: c,
                    instance_id: inst,
                })
            }
            _ => {}
        }
    }
    out
}

pub fn validate_panoptic(map: &PanopticMap, taxonomy: &ClassTaxonomy) -> Vec<Violation> {
    validate_grids(&map.classes, &map.instances, taxonomy)
}
