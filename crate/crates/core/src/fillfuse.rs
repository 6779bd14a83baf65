//! Fill & Fuse: semantic segmentation + tracked boxes → panoptic frames.
//!
//! Inside every tracked box, pixels whose semantic class is the box's bound
//! thing class receive the box's track id. Everything else keeps its
//! semantic class and gets instance 0. Track ids are stable across frames,
//! so the output is time-consistent by construction.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::LabelGrid;
use crate::panoptic::{PanopticMap, NO_INSTANCE};
use crate::taxonomy::ClassTaxonomy;

/// One tracker output box. The box is half-open, `[x0, x1) × [y0, y1)`, in
/// fractional pixel units. `class_id` is the tracker's category, mapped to a
/// taxonomy class through a [`TrackClassBinding`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackedBox {
    pub frame: u32,
    pub track_id: u32,
    pub class_id: u32,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl TrackedBox {
    pub fn new(
        frame: u32,
        track_id: u32,
        class_id: u32,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    ) -> Result<Self> {
        let b = TrackedBox {
            frame,
            track_id,
            class_id,
            x0,
            y0,
            x1,
            y1,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.track_id == NO_INSTANCE {
            return Err(Error::InvalidBox("track_id 0 is reserved".into()));
        }
        if ![self.x0, self.y0, self.x1, self.y1]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidBox("non-finite coordinate".into()));
        }
        if self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(Error::InvalidBox(format!(
                "empty box [{}, {}) x [{}, {})",
                self.x0, self.x1, self.y0, self.y1
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// Pixel index ranges `(xs, ys)` whose centers fall inside the box,
    /// clipped to a `width × height` grid.
    pub fn pixel_span(
        &self,
        width: usize,
        height: usize,
    ) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        // center x + 0.5 in [x0, x1)  <=>  x in [ceil(x0 - 0.5), ceil(x1 - 0.5))
        let span = |lo: f64, hi: f64, n: usize| {
            let a = (lo - 0.5).ceil().clamp(0.0, n as f64) as usize;
            let b = (hi - 0.5).ceil().clamp(0.0, n as f64) as usize;
            a..b.max(a)
        };
        (
            span(self.x0, self.x1, width),
            span(self.y0, self.y1, height),
        )
    }
}

/// Which box owns a pixel covered by several boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapRule {
    /// Smallest box area wins, ties go to the lower track id.
    #[default]
    SmallestArea,
    /// Lowest track id wins regardless of size.
    LowestTrackId,
}

impl OverlapRule {
    fn prefers(self, a: &TrackedBox, b: &TrackedBox) -> bool {
        let ord = match self {
            OverlapRule::SmallestArea => a
                .area()
                .total_cmp(&b.area())
                .then(a.track_id.cmp(&b.track_id)),
            OverlapRule::LowestTrackId => a.track_id.cmp(&b.track_id),
        };
        // remaining keys only make the choice independent of list order
        let ord = ord
            .then(a.class_id.cmp(&b.class_id))
            .then(a.area().total_cmp(&b.area()))
            .then(a.x0.total_cmp(&b.x0))
            .then(a.y0.total_cmp(&b.y0))
            .then(a.x1.total_cmp(&b.x1))
            .then(a.y1.total_cmp(&b.y1));
        ord == Ordering::Less
    }
}

/// Maps tracker categories to taxonomy thing classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackClassBinding {
    pairs: BTreeMap<u32, u32>,
}

impl TrackClassBinding {
    pub fn new(pairs: BTreeMap<u32, u32>, taxonomy: &ClassTaxonomy) -> Result<Self> {
        for (&category, &class_id) in &pairs {
            if !taxonomy.contains(class_id) {
                return Err(Error::UnknownClass(class_id));
            }
            if !taxonomy.is_thing(class_id) {
                return Err(Error::InvalidBinding(format!(
                    "category {category} is bound to stuff class {class_id}"
                )));
            }
        }
        Ok(TrackClassBinding { pairs })
    }

    /// Only pedestrians are things: binds the class named `person` (or
    /// `pedestrian`) to itself.
    pub fn pedestrians(taxonomy: &ClassTaxonomy) -> Result<Self> {
        let person = taxonomy
            .by_name("person")
            .or_else(|| taxonomy.by_name("pedestrian"))
            .ok_or_else(|| Error::InvalidBinding("taxonomy has no person class".into()))?;
        Self::new(
            BTreeMap::from([(person.class_id, person.class_id)]),
            taxonomy,
        )
    }

    /// Every thing class bound to itself.
    pub fn all_things(taxonomy: &ClassTaxonomy) -> Result<Self> {
        taxonomy.ensure_has_things()?;
        let pairs = taxonomy
            .thing_classes()
            .map(|e| (e.class_id, e.class_id))
            .collect();
        Self::new(pairs, taxonomy)
    }

    pub fn class_for(&self, category: u32) -> Option<u32> {
        self.pairs.get(&category).copied()
    }
}

/// Index of the owning box per pixel, `None` where no box covers it.
fn owners(
    boxes: &[TrackedBox],
    width: usize,
    height: usize,
    rule: OverlapRule,
) -> Vec<Option<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; width * height];
    for (bi, b) in boxes.iter().enumerate() {
        let (xs, ys) = b.pixel_span(width, height);
        for y in ys {
            for x in xs.clone() {
                let slot = &mut owner[y * width + x];
                match *slot {
                    Some(cur) if !rule.prefers(b, &boxes[cur]) => {}
                    _ => *slot = Some(bi),
                }
            }
        }
    }
    owner
}

/// Rasterizes one frame's boxes into a grid of owning track ids (0 where no
/// box covers the pixel), using [`OverlapRule::SmallestArea`].
pub fn rasterize_ownership(boxes: &[TrackedBox], width: usize, height: usize) -> Result<LabelGrid> {
    rasterize_ownership_with(boxes, width, height, OverlapRule::default())
}

pub fn rasterize_ownership_with(
    boxes: &[TrackedBox],
    width: usize,
    height: usize,
    rule: OverlapRule,
) -> Result<LabelGrid> {
    let owner = owners(boxes, width, height, rule);
    let values = owner
        .into_iter()
        .map(|o| o.map_or(NO_INSTANCE, |i| boxes[i].track_id))
        .collect();
    LabelGrid::from_vec(width, height, values)
}

/// Fuses one semantic frame with that frame's boxes.
pub fn fill_and_fuse(
    semantic: &LabelGrid,
    boxes: &[TrackedBox],
    taxonomy: &ClassTaxonomy,
    binding: &TrackClassBinding,
) -> Result<PanopticMap> {
    fill_and_fuse_with(semantic, boxes, taxonomy, binding, OverlapRule::default())
}

pub fn fill_and_fuse_with(
    semantic: &LabelGrid,
    boxes: &[TrackedBox],
    taxonomy: &ClassTaxonomy,
    binding: &TrackClassBinding,
    rule: OverlapRule,
) -> Result<PanopticMap> {
    let kinds = taxonomy.kind_table();
    if let Some(&c) = semantic.values().iter().find(|&&c| kinds.get(c).is_none()) {
        return Err(Error::UnknownClass(c));
    }
    // (box, bound class) for boxes whose category is bound
    let mut bound = Vec::with_capacity(boxes.len());
    let mut bound_class = Vec::with_capacity(boxes.len());
    for b in boxes {
        b.validate()?;
        if let Some(c) = binding.class_for(b.class_id) {
            bound.push(*b);
            bound_class.push(c);
        }
    }
    let (width, height) = semantic.dims();
    let owner = owners(&bound, width, height, rule);
    let instances = semantic
        .values()
        .iter()
        .zip(owner)
        .map(|(&c, o)| match o {
            Some(bi) if bound_class[bi] == c => bound[bi].track_id,
            _ => NO_INSTANCE,
        })
        .collect();
    PanopticMap::new(
        semantic.clone(),
        LabelGrid::from_vec(width, height, instances)?,
    )
}

/// Applies [`fill_and_fuse`] to each frame. `tracks` may hold boxes of any
/// frame in any order; a box referring to a frame past the end is an error.
pub fn run_fillfuse_sequence(
    semantic_seq: &[LabelGrid],
    tracks: &[TrackedBox],
    taxonomy: &ClassTaxonomy,
    binding: &TrackClassBinding,
) -> Result<Vec<PanopticMap>> {
    let mut per_frame: Vec<Vec<TrackedBox>> = vec![Vec::new(); semantic_seq.len()];
    for b in tracks {
        per_frame
            .get_mut(b.frame as usize)
            .ok_or_else(|| {
                Error::InvalidBox(format!(
                    "box for frame {} but sequence has {} frames",
                    b.frame,
                    semantic_seq.len()
                ))
            })?
            .push(*b);
    }
    if let Some(first) = semantic_seq.first() {
        for g in semantic_seq {
            g.ensure_same_dims(first.width(), first.height())?;
        }
    }
    semantic_seq
        .par_iter()
        .zip(per_frame.par_iter())
        .map(|(sem, boxes)| fill_and_fuse(sem, boxes, taxonomy, binding))
        .collect()
}
