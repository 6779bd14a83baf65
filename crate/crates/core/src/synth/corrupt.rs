//! Corruption models standing in for imperfect upstream networks.

use std::collections::BTreeMap;

use super::rng::Rng;
use super::GroundTruthBundle;
use crate::error::{Error, Result};
use crate::fillfuse::TrackedBox;
use crate::panoptic::{PanopticMap, NO_INSTANCE};

/// A sequence whose instance ids were permuted frame by frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffledSequence {
    pub frames: Vec<PanopticMap>,
    /// Per frame, original id → shuffled id.
    pub permutations: Vec<BTreeMap<u32, u32>>,
}

impl ShuffledSequence {
    /// Applies the inverse permutations, giving back the input sequence.
    pub fn restore(&self) -> Vec<PanopticMap> {
        self.frames
            .iter()
            .zip(&self.permutations)
            .map(|(m, perm)| {
                let inverse: BTreeMap<u32, u32> = perm.iter().map(|(&a, &b)| (b, a)).collect();
                relabel_with(m, &inverse)
            })
            .collect()
    }
}

fn relabel_with(map: &PanopticMap, rename: &BTreeMap<u32, u32>) -> PanopticMap {
    let inst = map
        .instances()
        .map(|i| rename.get(&i).copied().unwrap_or(i));
    PanopticMap::new(map.classes().clone(), inst).expect("dimensions unchanged")
}

/// Permutes the non-zero instance ids of every frame independently, making
/// the sequence time-inconsistent while every frame stays a perfect
/// panoptic segmentation. One generator seeded with `seed` drives all
/// frames in order; each frame shuffles its ascending id list with
/// Fisher–Yates.
pub fn corrupt_shuffle_ids(seq: &[PanopticMap], seed: u64) -> ShuffledSequence {
    let mut rng = Rng::new(seed);
    let mut frames = Vec::with_capacity(seq.len());
    let mut permutations = Vec::with_capacity(seq.len());
    for map in seq {
        let ids: Vec<u32> = map.instance_ids().into_iter().collect();
        let mut shuffled = ids.clone();
        rng.shuffle(&mut shuffled);
        let perm: BTreeMap<u32, u32> = ids.into_iter().zip(shuffled).collect();
        frames.push(relabel_with(map, &perm));
        permutations.push(perm);
    }
    ShuffledSequence {
        frames,
        permutations,
    }
}

/// Simulates an imperfect tracker. For each box, in frame then list order:
/// draw `u = unit()` and drop the box if `u < drop_rate`; otherwise, when
/// `jitter > 0`, shift `x0, y0, x1, y1` (in that order) by integers drawn
/// uniformly from `[-jitter, jitter]`. A box collapsed by jitter is
/// re-opened to one pixel past its low edge.
pub fn corrupt_boxes(
    boxes: &[Vec<TrackedBox>],
    jitter: u32,
    drop_rate: f64,
    seed: u64,
) -> Result<Vec<Vec<TrackedBox>>> {
    if !(0.0..=1.0).contains(&drop_rate) {
        return Err(Error::InvalidArgument(format!(
            "drop rate {drop_rate} outside [0, 1]"
        )));
    }
    let mut rng = Rng::new(seed);
    let j = jitter as i64;
    let mut out = Vec::with_capacity(boxes.len());
    for frame in boxes {
        let mut kept = Vec::with_capacity(frame.len());
        for b in frame {
            if rng.unit() < drop_rate {
                continue;
            }
            let mut nb = *b;
            if jitter > 0 {
                nb.x0 += rng.range_inclusive(-j, j) as f64;
                nb.y0 += rng.range_inclusive(-j, j) as f64;
                nb.x1 += rng.range_inclusive(-j, j) as f64;
                nb.y1 += rng.range_inclusive(-j, j) as f64;
                if nb.x1 <= nb.x0 {
                    nb.x1 = nb.x0 + 1.0;
                }
                if nb.y1 <= nb.y0 {
                    nb.y1 = nb.y0 + 1.0;
                }
            }
            kept.push(nb);
        }
        out.push(kept);
    }
    Ok(out)
}

/// Erodes every instance mask with a `(2·erode + 1)²` square. A pixel
/// survives when every in-bounds pixel of the square around it carries the
/// same (class, instance); eroded pixels revert to the background class
/// with instance 0.
pub fn corrupt_masks(bundle: &GroundTruthBundle, erode: u32) -> Vec<PanopticMap> {
    if erode == 0 {
        return bundle.panoptic.clone();
    }
    let e = erode as isize;
    bundle
        .panoptic
        .iter()
        .map(|m| {
            let (w, h) = m.dims();
            let mut out = m.clone();
            for y in 0..h {
                for x in 0..w {
                    let inst = m.instances().get(x, y);
                    if inst == NO_INSTANCE {
                        continue;
                    }
                    let class = m.classes().get(x, y);
                    let mut keep = true;
                    'win: for ny in (y as isize - e).max(0)..=(y as isize + e).min(h as isize - 1) {
                        for nx in (x as isize - e).max(0)..=(x as isize + e).min(w as isize - 1) {
                            let (nx, ny) = (nx as usize, ny as usize);
                            if m.instances().get(nx, ny) != inst || m.classes().get(nx, ny) != class
                            {
                                keep = false;
                                break 'win;
                            }
                        }
                    }
                    if !keep {
                        out.set(x, y, bundle.background.get(x, y), NO_INSTANCE);
                    }
                }
            }
            out
        })
        .collect()
}
