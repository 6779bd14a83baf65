//! Panoptic quality (PQ) per frame and video panoptic quality (VPQ) over
//! sliding windows of `k` frames.
//!
//! A predicted and a ground-truth segment (or tube) of the same class match
//! when their IoU is strictly above 0.5, which makes matches unique. Pixels
//! that are void in the ground truth are removed from both sides first.
//! Thing pixels without an instance belong to no segment: in a prediction
//! they cover nothing, in the ground truth they only enlarge unions.
//! Classes that appear in neither prediction nor ground truth are left out
//! of the class average.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::panoptic::{PanopticMap, Segment, NO_INSTANCE};
use crate::taxonomy::{ClassKind, ClassTaxonomy};

pub const DEFAULT_WINDOWS: [usize; 4] = [1, 2, 3, 4];

/// Raw counts for one class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassStats {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub iou_sum: f64,
}

impl ClassStats {
    pub fn merge(&mut self, other: &ClassStats) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.iou_sum += other.iou_sum;
    }

    pub fn is_empty(&self) -> bool {
        self.tp + self.fp + self.fn_ == 0
    }

    pub fn sq(&self) -> f64 {
        if self.tp == 0 {
            0.0
        } else {
            self.iou_sum / self.tp as f64
        }
    }

    pub fn rq(&self) -> f64 {
        let denom = self.tp as f64 + 0.5 * self.fp as f64 + 0.5 * self.fn_ as f64;
        if denom == 0.0 {
            0.0
        } else {
            self.tp as f64 / denom
        }
    }

    pub fn pq(&self) -> f64 {
        let denom = self.tp as f64 + 0.5 * self.fp as f64 + 0.5 * self.fn_ as f64;
        if denom == 0.0 {
            0.0
        } else {
            self.iou_sum / denom
        }
    }
}

/// Per-class counts, merged by addition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PqStats {
    pub per_class: BTreeMap<u32, ClassStats>,
}

impl PqStats {
    pub fn merge(&mut self, other: &PqStats) {
        for (c, s) in &other.per_class {
            self.per_class.entry(*c).or_default().merge(s);
        }
    }

    fn class_mut(&mut self, class_id: u32) -> &mut ClassStats {
        self.per_class.entry(class_id).or_default()
    }

    /// Mean PQ/SQ/RQ over classes with at least one segment on either side;
    /// 0 when there are none.
    pub fn summary(&self) -> (f64, f64, f64) {
        let included: Vec<&ClassStats> =
            self.per_class.values().filter(|s| !s.is_empty()).collect();
        if included.is_empty() {
            return (0.0, 0.0, 0.0);
        }
        let n = included.len() as f64;
        let mean = |f: fn(&ClassStats) -> f64| included.iter().map(|s| f(s)).sum::<f64>() / n;
        (
            mean(ClassStats::pq),
            mean(ClassStats::sq),
            mean(ClassStats::rq),
        )
    }
}

/// Result of matching predicted against ground-truth segments. Indices refer
/// to the input slices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegmentMatching {
    pub tp: Vec<(usize, usize, f64)>,
    pub fp: Vec<usize>,
    pub fn_: Vec<usize>,
}

/// `(pred, gt, iou)` matches, unmatched pred keys, unmatched gt keys.
type Matched<K> = (Vec<(K, K, f64)>, Vec<K>, Vec<K>);

/// Matches keyed regions given their areas and pairwise intersections.
/// Returns `(pred, gt, iou)` triples plus the unmatched keys of each side,
/// all in key order.
fn match_regions<K: Copy + Ord + Hash>(
    pred_area: &HashMap<K, u64>,
    gt_area: &HashMap<K, u64>,
    inter: &HashMap<(K, K), u64>,
    class_of: impl Fn(K) -> u32,
) -> Matched<K> {
    let mut tp = Vec::new();
    let mut pred_hit: HashMap<K, K> = HashMap::new();
    let mut gt_hit: HashMap<K, K> = HashMap::new();
    let mut pairs: Vec<(&(K, K), &u64)> = inter.iter().collect();
    pairs.sort_by_key(|(k, _)| **k);
    for (&(p, g), &i) in pairs {
        if i == 0 || class_of(p) != class_of(g) {
            continue;
        }
        let union = pred_area[&p] + gt_area[&g] - i;
        // iou > 0.5, exactly
        if 2 * i > union {
            assert!(
                pred_hit.insert(p, g).is_none() && gt_hit.insert(g, p).is_none(),
                "IoU > 0.5 matches must be unique"
            );
            tp.push((p, g, i as f64 / union as f64));
        }
    }
    let mut fp: Vec<K> = pred_area
        .keys()
        .filter(|k| !pred_hit.contains_key(k))
        .copied()
        .collect();
    let mut fns: Vec<K> = gt_area
        .keys()
        .filter(|k| !gt_hit.contains_key(k))
        .copied()
        .collect();
    fp.sort();
    fns.sort();
    (tp, fp, fns)
}

/// Pairs predicted and ground-truth segments: same class and IoU > 0.5.
pub fn match_segments(pred: &[Segment], gt: &[Segment]) -> SegmentMatching {
    let pred_area: HashMap<usize, u64> = pred
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.area() as u64))
        .collect();
    let gt_area: HashMap<usize, u64> = gt
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.area() as u64))
        .collect();
    let mut owner = HashMap::new();
    for (gi, s) in gt.iter().enumerate() {
        for p in &s.pixels {
            owner.insert(*p, gi);
        }
    }
    let mut inter: HashMap<(usize, usize), u64> = HashMap::new();
    for (pi, s) in pred.iter().enumerate() {
        for p in &s.pixels {
            if let Some(&gi) = owner.get(p) {
                *inter.entry((pi, gi)).or_insert(0) += 1;
            }
        }
    }
    // keys encode side so one closure can look up the class of either
    let n = pred.len();
    let shift = |(a, b): (usize, usize)| (a, b + n);
    let pred_area_k: HashMap<usize, u64> = pred_area;
    let gt_area_k: HashMap<usize, u64> = gt_area.into_iter().map(|(k, v)| (k + n, v)).collect();
    let inter_k: HashMap<(usize, usize), u64> =
        inter.into_iter().map(|(k, v)| (shift(k), v)).collect();
    let class_of = |k: usize| {
        if k < n {
            pred[k].class_id
        } else {
            gt[k - n].class_id
        }
    };
    let (tp, fp, fns) = match_regions(&pred_area_k, &gt_area_k, &inter_k, class_of);
    SegmentMatching {
        tp: tp.into_iter().map(|(p, g, v)| (p, g - n, v)).collect(),
        fp,
        fn_: fns.into_iter().map(|g| g - n).collect(),
    }
}

type Key = (u32, u32);

/// Areas and pairwise intersections of one frame's segments, after void
/// removal. Adding two of these gives the tube statistics of a window.
#[derive(Debug, Clone, Default)]
struct FrameOverlap {
    pred_area: HashMap<Key, u64>,
    gt_area: HashMap<Key, u64>,
    inter: HashMap<(Key, Key), u64>,
}

impl FrameOverlap {
    fn compute(pred: &PanopticMap, gt: &PanopticMap, taxonomy: &ClassTaxonomy) -> Result<Self> {
        let (w, h) = gt.dims();
        pred.classes().ensure_same_dims(w, h)?;
        let kinds = taxonomy.kind_table();
        let void = taxonomy.void_class_id();
        // None for void and for thing pixels without an instance
        let key = |c: u32, i: u32| -> Result<Option<Key>> {
            let kind = kinds.get(c).ok_or(Error::UnknownClass(c))?;
            Ok(match kind {
                _ if c == void => None,
                ClassKind::Stuff => Some((c, NO_INSTANCE)),
                ClassKind::Thing if i == NO_INSTANCE => None,
                ClassKind::Thing => Some((c, i)),
            })
        };
        let mut out = FrameOverlap::default();
        let pc = pred.classes().values();
        let pi = pred.instances().values();
        let gc = gt.classes().values();
        let gi = gt.instances().values();
        for idx in 0..gc.len() {
            let p = key(pc[idx], pi[idx])?;
            let g = key(gc[idx], gi[idx])?;
            if gc[idx] == void {
                // void in ground truth: ignored on both sides
                continue;
            }
            if let Some(g) = g {
                *out.gt_area.entry(g).or_insert(0) += 1;
            }
            if let Some(p) = p {
                *out.pred_area.entry(p).or_insert(0) += 1;
                if let Some(g) = g {
                    *out.inter.entry((p, g)).or_insert(0) += 1;
                }
            }
        }
        Ok(out)
    }

    fn add(&mut self, other: &FrameOverlap) {
        for (k, v) in &other.pred_area {
            *self.pred_area.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.gt_area {
            *self.gt_area.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.inter {
            *self.inter.entry(*k).or_insert(0) += v;
        }
    }

    fn stats(&self) -> PqStats {
        let (tp, fp, fns) = match_regions(&self.pred_area, &self.gt_area, &self.inter, |k| k.0);
        let mut stats = PqStats::default();
        for (p, _, v) in tp {
            let s = stats.class_mut(p.0);
            s.tp += 1;
            s.iou_sum += v;
        }
        for p in fp {
            stats.class_mut(p.0).fp += 1;
        }
        for g in fns {
            stats.class_mut(g.0).fn_ += 1;
        }
        stats
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassQuality {
    pub class_id: u32,
    pub pq: f64,
    pub sq: f64,
    pub rq: f64,
    pub stats: ClassStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VpqSummary {
    /// VPQ for each window size that fits in the sequence.
    pub per_k: BTreeMap<usize, f64>,
    /// Mean over `per_k`.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// Per-class quality for every class with at least one segment.
    pub classes: Vec<ClassQuality>,
    pub pq: f64,
    pub sq: f64,
    pub rq: f64,
    pub vpq: Option<VpqSummary>,
}

impl MetricReport {
    pub fn from_stats(stats: &PqStats) -> Self {
        let classes = stats
            .per_class
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(&class_id, s)| ClassQuality {
                class_id,
                pq: s.pq(),
                sq: s.sq(),
                rq: s.rq(),
                stats: *s,
            })
            .collect();
        let (pq, sq, rq) = stats.summary();
        MetricReport {
            classes,
            pq,
            sq,
            rq,
            vpq: None,
        }
    }

    pub fn class(&self, class_id: u32) -> Option<&ClassQuality> {
        self.classes.iter().find(|c| c.class_id == class_id)
    }

    /// JSON document with numbers fixed to 6 decimals:
    /// `{"pq": {"all": {...}, "per_class": {"<id>": {...}}}, "vpq": {"k=1": v, ..., "mean": v}}`.
    pub fn to_json(&self, taxonomy: &ClassTaxonomy) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{{\"pq\": {{\"all\": {{\"pq\": {:.6}, \"sq\": {:.6}, \"rq\": {:.6}}}, \"per_class\": {{",
            self.pq, self.sq, self.rq
        );
        for (i, c) in self.classes.iter().enumerate() {
            let name = taxonomy.get(c.class_id).map_or("", |e| e.name.as_str());
            let _ = write!(
                s,
                "{}\"{}\": {{\"name\": {}, \"pq\": {:.6}, \"sq\": {:.6}, \"rq\": {:.6}, \"tp\": {}, \"fp\": {}, \"fn\": {}}}",
                if i == 0 { "" } else { ", " },
                c.class_id,
                serde_json::to_string(name).expect("string serializes"),
                c.pq,
                c.sq,
                c.rq,
                c.stats.tp,
                c.stats.fp,
                c.stats.fn_
            );
        }
        s.push_str("}}");
        if let Some(v) = &self.vpq {
            s.push_str(", \"vpq\": {");
            for (k, val) in &v.per_k {
                let _ = write!(s, "\"k={k}\": {val:.6}, ");
            }
            let _ = write!(s, "\"mean\": {:.6}}}", v.mean);
        }
        s.push_str("}\n");
        s
    }
}

/// Per-frame statistics of one prediction against ground truth.
pub fn pq_stats(pred: &PanopticMap, gt: &PanopticMap, taxonomy: &ClassTaxonomy) -> Result<PqStats> {
    Ok(FrameOverlap::compute(pred, gt, taxonomy)?.stats())
}

pub fn pq(pred: &PanopticMap, gt: &PanopticMap, taxonomy: &ClassTaxonomy) -> Result<MetricReport> {
    Ok(MetricReport::from_stats(&pq_stats(pred, gt, taxonomy)?))
}

/// Accumulated tube statistics for window size `k` over every start
/// position. Returns `None` when the sequence is shorter than `k`.
fn window_stats(frames: &[FrameOverlap], k: usize) -> Option<PqStats> {
    if frames.len() < k {
        return None;
    }
    let mut total = PqStats::default();
    for start in 0..=frames.len() - k {
        let mut tube = FrameOverlap::default();
        for f in &frames[start..start + k] {
            tube.add(f);
        }
        total.merge(&tube.stats());
    }
    Some(total)
}

/// VPQ stats for one window size; exposed for callers who want per-class
/// video numbers.
pub fn vpq_stats(
    pred_seq: &[PanopticMap],
    gt_seq: &[PanopticMap],
    taxonomy: &ClassTaxonomy,
    k: usize,
) -> Result<Option<PqStats>> {
    let frames = overlaps(pred_seq, gt_seq, taxonomy)?;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "window size must be at least 1".into(),
        ));
    }
    Ok(window_stats(&frames, k))
}

fn overlaps(
    pred_seq: &[PanopticMap],
    gt_seq: &[PanopticMap],
    taxonomy: &ClassTaxonomy,
) -> Result<Vec<FrameOverlap>> {
    if pred_seq.len() != gt_seq.len() {
        return Err(Error::SequenceLengthMismatch {
            expected: gt_seq.len(),
            found: pred_seq.len(),
        });
    }
    pred_seq
        .iter()
        .zip(gt_seq)
        .map(|(p, g)| FrameOverlap::compute(p, g, taxonomy))
        .collect()
}

/// Sequence report: the PQ section holds per-frame statistics summed over
/// all frames, the VPQ section one value per window size plus their mean.
/// Window sizes longer than the sequence are left out.
pub fn vpq(
    pred_seq: &[PanopticMap],
    gt_seq: &[PanopticMap],
    taxonomy: &ClassTaxonomy,
    window_sizes: &[usize],
) -> Result<MetricReport> {
    if window_sizes.contains(&0) {
        return Err(Error::InvalidArgument(
            "window size must be at least 1".into(),
        ));
    }
    let frames = overlaps(pred_seq, gt_seq, taxonomy)?;
    let per_frame = window_stats(&frames, 1).unwrap_or_default();
    let mut report = MetricReport::from_stats(&per_frame);
    let mut per_k = BTreeMap::new();
    for &k in window_sizes {
        if let Some(stats) = window_stats(&frames, k) {
            per_k.insert(k, stats.summary().0);
        }
    }
    let mean = if per_k.is_empty() {
        0.0
    } else {
        per_k.values().sum::<f64>() / per_k.len() as f64
    };
    report.vpq = Some(VpqSummary { per_k, mean });
    Ok(report)
}
