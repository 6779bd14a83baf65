//! Generators and brute-force reference implementations shared by the
//! integration tests. The references favour obviousness over speed.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use vpskit::synth::{Actor, Band, SceneConfig, Shape};
use vpskit::{ClassTaxonomy, LabelGrid, PanopticMap, TrackedBox};

pub const VOID: u32 = 0;
pub const ROAD: u32 = 1;
pub const SKY: u32 = 5;
pub const PERSON: u32 = 11;
pub const CAR: u32 = 13;
pub const STUFF: [u32; 5] = [1, 2, 3, 4, 5];
pub const THINGS: [u32; 2] = [PERSON, CAR];

pub fn tax() -> ClassTaxonomy {
    ClassTaxonomy::street()
}

/// One painted rectangle of a random map.
#[derive(Debug, Clone)]
pub struct Patch {
    pub class_id: u32,
    pub instance_id: u32,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

fn patch(width: usize, height: usize) -> impl Strategy<Value = Patch> {
    let class = prop_oneof![
        3 => prop::sample::select(THINGS.to_vec()),
        1 => prop::sample::select(STUFF.to_vec()),
        1 => Just(VOID),
    ];
    (class, 0u32..4, 0..width, 0..height, 1..=width, 1..=height).prop_map(
        move |(c, i, x, y, w, h)| Patch {
            class_id: c,
            instance_id: if THINGS.contains(&c) { i } else { 0 },
            x,
            y,
            w: w.min(width - x),
            h: h.min(height - y),
        },
    )
}

pub fn paint(width: usize, height: usize, background: u32, patches: &[Patch]) -> PanopticMap {
    let mut m = PanopticMap::uniform(width, height, background).unwrap();
    for p in patches {
        for y in p.y..p.y + p.h {
            for x in p.x..p.x + p.w {
                m.set(x, y, p.class_id, p.instance_id);
            }
        }
    }
    m
}

/// Valid panoptic map of the given size with a stuff background and up to
/// five painted patches (so at most six segments).
pub fn map_with_dims(width: usize, height: usize) -> impl Strategy<Value = PanopticMap> {
    (
        prop::sample::select(STUFF.to_vec()),
        prop::collection::vec(patch(width, height), 0..=5),
    )
        .prop_map(move |(bg, patches)| paint(width, height, bg, &patches))
}

pub fn map_pair() -> impl Strategy<Value = (PanopticMap, PanopticMap)> {
    (1usize..=16, 1usize..=16).prop_flat_map(|(w, h)| (map_with_dims(w, h), map_with_dims(w, h)))
}

pub fn map_sequence(frames: usize) -> impl Strategy<Value = (Vec<PanopticMap>, Vec<PanopticMap>)> {
    (1usize..=10, 1usize..=10).prop_flat_map(move |(w, h)| {
        (
            prop::collection::vec(map_with_dims(w, h), frames),
            prop::collection::vec(map_with_dims(w, h), frames),
        )
    })
}

// ---------------------------------------------------------------------------
// PQ / VPQ reference
// ---------------------------------------------------------------------------

pub type Key = (u32, u32);

/// Pixel sets per segment key, gt-void pixels and instance-less thing
/// pixels dropped, over a list of
/// frames (a tube when several frames are given).
pub fn segment_sets(
    maps: &[&PanopticMap],
    gts: &[&PanopticMap],
    tax: &ClassTaxonomy,
) -> BTreeMap<Key, BTreeSet<(usize, usize, usize)>> {
    let mut out: BTreeMap<Key, BTreeSet<_>> = BTreeMap::new();
    for (t, (m, g)) in maps.iter().zip(gts).enumerate() {
        for y in 0..m.height() {
            for x in 0..m.width() {
                if g.classes().get(x, y) == VOID {
                    continue;
                }
                let c = m.classes().get(x, y);
                if c == VOID {
                    continue;
                }
                let i = if tax.is_thing(c) {
                    m.instances().get(x, y)
                } else {
                    0
                };
                if tax.is_thing(c) && i == 0 {
                    continue;
                }
                out.entry((c, i)).or_default().insert((t, x, y));
            }
        }
    }
    out
}

pub type RefStats = BTreeMap<u32, (u64, u64, u64, f64)>;

/// tp/fp/fn/iou_sum per class by comparing every pred segment with every
/// gt segment.
pub fn brute_stats(pred: &[&PanopticMap], gt: &[&PanopticMap], tax: &ClassTaxonomy) -> RefStats {
    let ps = segment_sets(pred, gt, tax);
    let gs = segment_sets(gt, gt, tax);
    let mut stats: RefStats = BTreeMap::new();
    let mut matched_p = BTreeSet::new();
    let mut matched_g = BTreeSet::new();
    for (pk, pset) in &ps {
        for (gk, gset) in &gs {
            if pk.0 != gk.0 {
                continue;
            }
            let inter = pset.intersection(gset).count();
            let union = pset.union(gset).count();
            if inter * 2 > union {
                let e = stats.entry(pk.0).or_default();
                e.0 += 1;
                e.3 += inter as f64 / union as f64;
                matched_p.insert(*pk);
                matched_g.insert(*gk);
            }
        }
    }
    for pk in ps.keys().filter(|k| !matched_p.contains(k)) {
        stats.entry(pk.0).or_default().1 += 1;
    }
    for gk in gs.keys().filter(|k| !matched_g.contains(k)) {
        stats.entry(gk.0).or_default().2 += 1;
    }
    stats
}

pub fn merge_stats(into: &mut RefStats, from: &RefStats) {
    for (c, s) in from {
        let e = into.entry(*c).or_default();
        e.0 += s.0;
        e.1 += s.1;
        e.2 += s.2;
        e.3 += s.3;
    }
}

pub fn pq_of(stats: &RefStats) -> f64 {
    if stats.is_empty() {
        return 0.0;
    }
    let per: Vec<f64> = stats
        .values()
        .map(|&(tp, fp, fn_, iou)| {
            let d = tp as f64 + 0.5 * fp as f64 + 0.5 * fn_ as f64;
            if d == 0.0 {
                0.0
            } else {
                iou / d
            }
        })
        .collect();
    per.iter().sum::<f64>() / per.len() as f64
}

pub fn brute_vpq_k(
    pred: &[PanopticMap],
    gt: &[PanopticMap],
    tax: &ClassTaxonomy,
    k: usize,
) -> Option<f64> {
    if pred.len() < k {
        return None;
    }
    let mut total = RefStats::new();
    for s in 0..=pred.len() - k {
        let p: Vec<&PanopticMap> = pred[s..s + k].iter().collect();
        let g: Vec<&PanopticMap> = gt[s..s + k].iter().collect();
        merge_stats(&mut total, &brute_stats(&p, &g, tax));
    }
    Some(pq_of(&total))
}

// ---------------------------------------------------------------------------
// Box ownership reference
// ---------------------------------------------------------------------------

pub fn center_inside(b: &TrackedBox, x: usize, y: usize) -> bool {
    let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
    b.x0 <= cx && cx < b.x1 && b.y0 <= cy && cy < b.y1
}

/// Owning track id per pixel: smallest area, then lowest track id.
pub fn brute_owner(boxes: &[TrackedBox], width: usize, height: usize) -> LabelGrid {
    let mut g = LabelGrid::filled(width, height, 0).unwrap();
    for y in 0..height {
        for x in 0..width {
            let best = boxes
                .iter()
                .filter(|b| center_inside(b, x, y))
                .min_by(|a, b| {
                    a.area()
                        .total_cmp(&b.area())
                        .then(a.track_id.cmp(&b.track_id))
                });
            if let Some(b) = best {
                g.set(x, y, b.track_id);
            }
        }
    }
    g
}

/// Boxes with distinct track ids and coordinates on a quarter-pixel lattice.
pub fn boxes(width: usize, height: usize, max: usize) -> impl Strategy<Value = Vec<TrackedBox>> {
    let one = (
        0u32..=(width as u32 * 4),
        0u32..=(height as u32 * 4),
        1u32..=(width as u32 * 4),
        1u32..=(height as u32 * 4),
        prop::sample::select(THINGS.to_vec()),
    );
    prop::collection::vec(one, 0..=max).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (x, y, w, h, c))| {
                let x0 = x as f64 / 4.0 - 0.5;
                let y0 = y as f64 / 4.0 - 0.5;
                TrackedBox::new(
                    0,
                    i as u32 + 1,
                    c,
                    x0,
                    y0,
                    x0 + w as f64 / 4.0,
                    y0 + h as f64 / 4.0,
                )
                .unwrap()
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

pub fn rect(class_id: u32, size: u32, start: [f64; 2], velocity: [f64; 2]) -> Actor {
    Actor {
        shape: Shape::Rectangle,
        class_id,
        size,
        start,
        velocity,
        depth: 0,
    }
}

pub fn disk(class_id: u32, size: u32, start: [f64; 2], velocity: [f64; 2]) -> Actor {
    Actor {
        shape: Shape::Disk,
        class_id,
        size,
        start,
        velocity,
        depth: 0,
    }
}

/// Sky over road, split at mid height.
pub fn street_scene(
    width: usize,
    height: usize,
    frames: usize,
    actors: Vec<Actor>,
    seed: u64,
) -> SceneConfig {
    let mid = height as u32 / 2;
    SceneConfig {
        width,
        height,
        frames,
        background: vec![
            Band {
                class_id: SKY,
                y0: 0,
                y1: mid,
            },
            Band {
                class_id: ROAD,
                y0: mid,
                y1: height as u32,
            },
        ],
        actors,
        seed,
        taxonomy: tax(),
    }
}

/// Random integer-velocity scenes, actors possibly leaving the frame.
pub fn random_scene() -> impl Strategy<Value = SceneConfig> {
    let actor = (
        prop::bool::ANY,
        prop::sample::select(THINGS.to_vec()),
        2u32..8,
        (-4i32..28, -4i32..20),
        (-3i32..=3, -3i32..=3),
        0i32..3,
    )
        .prop_map(|(is_disk, c, size, (x, y), (vx, vy), depth)| Actor {
            shape: if is_disk {
                Shape::Disk
            } else {
                Shape::Rectangle
            },
            class_id: c,
            size,
            start: [x as f64, y as f64],
            velocity: [vx as f64, vy as f64],
            depth,
        });
    (
        8usize..32,
        8usize..24,
        1usize..6,
        prop::collection::vec(actor, 0..5),
        any::<u64>(),
    )
        .prop_map(|(w, h, t, actors, seed)| street_scene(w, h, t, actors, seed))
}
