//! Synthetic moving-shape scenes with exact ground truth.
//!
//! A scene is a stack of horizontal stuff bands with rectangle or disk
//! actors translating over it at constant velocity. For every frame the
//! generator emits the panoptic map, tight per-actor boxes and the semantic
//! map; for every consecutive pair it emits the flow `t-1 → t`. Actor `i`
//! (0-based) always carries instance id `i + 1`.

mod corrupt;
pub mod rng;

pub use corrupt::{corrupt_boxes, corrupt_masks, corrupt_shuffle_ids, ShuffledSequence};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fillfuse::TrackedBox;
use crate::grid::{FlowField, FlowVector, LabelGrid};
use crate::panoptic::{PanopticMap, NO_INSTANCE};
use crate::taxonomy::{ClassKind, ClassTaxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Rectangle,
    Disk,
}

/// Rows `[y0, y1)` painted with a stuff class. Rows covered by no band are
/// void; later bands win where bands overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub class_id: u32,
    pub y0: u32,
    pub y1: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Actor {
    pub shape: Shape,
    pub class_id: u32,
    /// Side length (rectangle) or diameter (disk) in pixels.
    pub size: u32,
    /// Top-left corner of the actor's bounding square at frame 0.
    pub start: [f64; 2],
    /// Pixels per frame.
    pub velocity: [f64; 2],
    /// Higher depth is drawn on top.
    #[serde(default)]
    pub depth: i32,
}

impl Actor {
    fn origin(&self, frame: usize) -> (f64, f64) {
        let t = frame as f64;
        (
            self.start[0] + self.velocity[0] * t,
            self.start[1] + self.velocity[1] * t,
        )
    }

    /// Calls `f(x, y)` for every in-bounds pixel whose center the actor
    /// covers at `frame`.
    fn for_each_pixel(
        &self,
        frame: usize,
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize),
    ) {
        let (ox, oy) = self.origin(frame);
        let size = self.size as f64;
        let lo = |v: f64, n: usize| (v - 0.5).ceil().clamp(0.0, n as f64) as usize;
        let (x_lo, x_hi) = (lo(ox, width), lo(ox + size, width));
        let (y_lo, y_hi) = (lo(oy, height), lo(oy + size, height));
        let r = size / 2.0;
        let (cx, cy) = (ox + r, oy + r);
        for y in y_lo..y_hi {
            for x in x_lo..x_hi {
                let inside = match self.shape {
                    Shape::Rectangle => true,
                    Shape::Disk => {
                        let dx = x as f64 + 0.5 - cx;
                        let dy = y as f64 + 0.5 - cy;
                        dx * dx + dy * dy <= r * r
                    }
                };
                if inside {
                    f(x, y);
                }
            }
        }
    }
}

fn default_taxonomy() -> ClassTaxonomy {
    ClassTaxonomy::street()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    #[serde(default)]
    pub background: Vec<Band>,
    #[serde(default)]
    pub actors: Vec<Actor>,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to [`ClassTaxonomy::street`].
    #[serde(default = "default_taxonomy")]
    pub taxonomy: ClassTaxonomy,
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!(
                "image must be at least 1x1, got {}x{}",
                self.width, self.height
            ));
        }
        if self.frames == 0 {
            return bad("frames must be at least 1".into());
        }
        for (i, b) in self.background.iter().enumerate() {
            match self.taxonomy.get(b.class_id) {
                None => return bad(format!("band {i}: unknown class {}", b.class_id)),
                Some(e) if e.kind != ClassKind::Stuff => {
                    return bad(format!("band {i}: class {} is not stuff", b.class_id))
                }
                _ => {}
            }
            if b.y1 <= b.y0 {
                return bad(format!("band {i}: empty row range [{}, {})", b.y0, b.y1));
            }
        }
        for (i, a) in self.actors.iter().enumerate() {
            if a.size < 2 {
                return bad(format!("actor {i}: size {} is below 2", a.size));
            }
            match self.taxonomy.get(a.class_id) {
                None => return bad(format!("actor {i}: unknown class {}", a.class_id)),
                Some(e) if e.kind != ClassKind::Thing => {
                    return bad(format!("actor {i}: class {} is not a thing", a.class_id))
                }
                _ => {}
            }
            if !a.start.iter().chain(&a.velocity).all(|v| v.is_finite()) {
                return bad(format!("actor {i}: non-finite start or velocity"));
            }
        }
        if self.actors.len() >= u32::MAX as usize {
            return bad("too many actors".into());
        }
        Ok(())
    }
}

/// Everything [`generate`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthBundle {
    pub taxonomy: ClassTaxonomy,
    /// Stuff class per pixel before actors are drawn.
    pub background: LabelGrid,
    pub panoptic: Vec<PanopticMap>,
    /// Class grids of `panoptic`, i.e. a perfect semantic segmentation.
    pub semantic: Vec<LabelGrid>,
    /// Tight boxes around each visible actor; `track_id` is the instance id.
    pub boxes: Vec<Vec<TrackedBox>>,
    /// `flows[t - 1]` maps frame `t - 1` to frame `t`.
    pub flows: Vec<FlowField>,
    pub seed: u64,
}

impl GroundTruthBundle {
    pub fn frames(&self) -> usize {
        self.panoptic.len()
    }

    /// All boxes as one list, frame by frame.
    pub fn tracks(&self) -> Vec<TrackedBox> {
        self.boxes.iter().flatten().copied().collect()
    }
}

/// Renders a scene. Pure: the same config always yields the same bundle.
pub fn generate(config: &SceneConfig) -> Result<GroundTruthBundle> {
    config.validate()?;
    let (w, h) = (config.width, config.height);
    let void = config.taxonomy.void_class_id();

    let mut background = LabelGrid::filled(w, h, void)?;
    for band in &config.background {
        for y in band.y0 as usize..(band.y1 as usize).min(h) {
            for x in 0..w {
                background.set(x, y, band.class_id);
            }
        }
    }

    let mut order: Vec<usize> = (0..config.actors.len()).collect();
    order.sort_by_key(|&i| (config.actors[i].depth, i));

    let mut panoptic = Vec::with_capacity(config.frames);
    let mut boxes = Vec::with_capacity(config.frames);
    // index of the visible actor per pixel, per frame
    let mut visible: Vec<Vec<Option<usize>>> = Vec::with_capacity(config.frames);
    for t in 0..config.frames {
        let mut top: Vec<Option<usize>> = vec![None; w * h];
        for &ai in &order {
            config.actors[ai].for_each_pixel(t, w, h, |x, y| top[y * w + x] = Some(ai));
        }
        let mut map = PanopticMap::new(background.clone(), LabelGrid::filled(w, h, NO_INSTANCE)?)?;
        let mut extent: Vec<Option<[usize; 4]>> = vec![None; config.actors.len()];
        for (i, owner) in top.iter().enumerate() {
            let Some(ai) = *owner else { continue };
            let (x, y) = (i % w, i / w);
            map.set(x, y, config.actors[ai].class_id, ai as u32 + 1);
            let e = extent[ai].get_or_insert([x, y, x, y]);
            e[0] = e[0].min(x);
            e[1] = e[1].min(y);
            e[2] = e[2].max(x);
            e[3] = e[3].max(y);
        }
        let frame_boxes = extent
            .iter()
            .enumerate()
            .filter_map(|(ai, e)| {
                e.map(|[x0, y0, x1, y1]| TrackedBox {
                    frame: t as u32,
                    track_id: ai as u32 + 1,
                    class_id: config.actors[ai].class_id,
                    x0: x0 as f64,
                    y0: y0 as f64,
                    x1: (x1 + 1) as f64,
                    y1: (y1 + 1) as f64,
                })
            })
            .collect();
        panoptic.push(map);
        boxes.push(frame_boxes);
        visible.push(top);
    }

    let mut flows = Vec::with_capacity(config.frames.saturating_sub(1));
    for top in visible.iter().take(config.frames.saturating_sub(1)) {
        let vectors = top
            .iter()
            .map(|o| match o {
                Some(ai) => {
                    let v = config.actors[*ai].velocity;
                    FlowVector::new(v[0] as f32, v[1] as f32)
                }
                None => FlowVector::ZERO,
            })
            .collect();
        flows.push(FlowField::from_vec(w, h, vectors)?);
    }

    let semantic = panoptic.iter().map(|m| m.classes().clone()).collect();
    Ok(GroundTruthBundle {
        taxonomy: config.taxonomy.clone(),
        background,
        panoptic,
        semantic,
        boxes,
        flows,
        seed: config.seed,
    })
}
