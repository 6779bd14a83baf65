use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grid::LabelGrid;
use crate::panoptic::{PanopticMap, NO_INSTANCE};
use crate::taxonomy::ClassTaxonomy;

/// IoU between every current (warped) instance mask and every previous
/// instance mask. Rows follow `current_ids`, columns `previous_ids`, both
/// ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct IoUMatrix {
    current_ids: Vec<u32>,
    previous_ids: Vec<u32>,
    values: Vec<f64>,
}

impl IoUMatrix {
    pub fn new(current_ids: Vec<u32>, previous_ids: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if values.len() != current_ids.len() * previous_ids.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {}x{} matrix",
                values.len(),
                current_ids.len(),
                previous_ids.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("IoU {v} outside [0, 1]")));
        }
        Ok(IoUMatrix {
            current_ids,
            previous_ids,
            values,
        })
    }

    /// Convenience constructor from nested rows, mostly for tests.
    pub fn from_rows(
        current_ids: Vec<u32>,
        previous_ids: Vec<u32>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        if rows.len() != current_ids.len() || rows.iter().any(|r| r.len() != previous_ids.len()) {
            return Err(Error::InvalidArgument("ragged IoU rows".into()));
        }
        Self::new(current_ids, previous_ids, rows.concat())
    }

    pub fn current_ids(&self) -> &[u32] {
        &self.current_ids
    }

    pub fn previous_ids(&self) -> &[u32] {
        &self.previous_ids
    }

    pub fn rows(&self) -> usize {
        self.current_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.previous_ids.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }
}

/// Thing pixels with a non-zero instance, grouped per instance id: area and
/// most frequent class (lowest class id on ties).
struct Masks {
    area: BTreeMap<u32, usize>,
    class: BTreeMap<u32, u32>,
}

fn thing_instance(class_id: u32, inst: u32, taxonomy: &ClassTaxonomy) -> Option<u32> {
    (inst != NO_INSTANCE && taxonomy.is_thing(class_id)).then_some(inst)
}

fn collect_masks(inst: &LabelGrid, class: &LabelGrid, taxonomy: &ClassTaxonomy) -> Masks {
    let mut area = BTreeMap::new();
    let mut votes: BTreeMap<u32, BTreeMap<u32, usize>> = BTreeMap::new();
    for (&i, &c) in inst.values().iter().zip(class.values()) {
        if let Some(id) = thing_instance(c, i, taxonomy) {
            *area.entry(id).or_insert(0) += 1;
            *votes.entry(id).or_default().entry(c).or_insert(0) += 1;
        }
    }
    let class = votes
        .into_iter()
        .map(|(id, counts)| {
            let mut best = (0u32, 0usize);
            for (c, n) in counts {
                if n > best.1 {
                    best = (c, n);
                }
            }
            (id, best.0)
        })
        .collect();
    Masks { area, class }
}

/// IoU of every warped current instance against every previous instance.
/// Only non-zero instances on thing-class pixels take part. With
/// `class_strict`, pairs whose classes differ are forced to 0.
pub fn build_iou_matrix(
    warped_inst: &LabelGrid,
    warped_class: &LabelGrid,
    prev: &PanopticMap,
    taxonomy: &ClassTaxonomy,
    class_strict: bool,
) -> Result<IoUMatrix> {
    let (width, height) = prev.dims();
    warped_inst.ensure_same_dims(width, height)?;
    warped_class.ensure_same_dims(width, height)?;

    let cur = collect_masks(warped_inst, warped_class, taxonomy);
    let old = collect_masks(prev.instances(), prev.classes(), taxonomy);

    let mut inter: HashMap<(u32, u32), usize> = HashMap::new();
    let cur_px = warped_inst.values().iter().zip(warped_class.values());
    let old_px = prev
        .instances()
        .values()
        .iter()
        .zip(prev.classes().values());
    for ((&ci, &cc), (&pi, &pc)) in cur_px.zip(old_px) {
        if let (Some(a), Some(b)) = (
            thing_instance(cc, ci, taxonomy),
            thing_instance(pc, pi, taxonomy),
        ) {
            *inter.entry((a, b)).or_insert(0) += 1;
        }
    }

    let current_ids: Vec<u32> = cur.area.keys().copied().collect();
    let previous_ids: Vec<u32> = old.area.keys().copied().collect();
    let mut values = Vec::with_capacity(current_ids.len() * previous_ids.len());
    for c in &current_ids {
        for p in &previous_ids {
            let both = inter.get(&(*c, *p)).copied().unwrap_or(0);
            let v = if class_strict && cur.class[c] != old.class[p] {
                0.0
            } else {
                let union = cur.area[c] + old.area[p] - both;
                both as f64 / union as f64
            };
            values.push(v);
        }
    }
    IoUMatrix::new(current_ids, previous_ids, values)
}

/// Outcome of matching one frame: which current ids inherit a previous id,
/// and which need a new one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdAssignment {
    pub matches: BTreeMap<u32, u32>,
    pub fresh: BTreeSet<u32>,
}

impl IdAssignment {
    /// Adds every id in `ids` that is neither matched nor fresh to `fresh`.
    pub fn complete_with(&mut self, ids: impl IntoIterator<Item = u32>) {
        for id in ids {
            if !self.matches.contains_key(&id) {
                self.fresh.insert(id);
            }
        }
    }

    pub fn covers(&self, id: u32) -> bool {
        self.matches.contains_key(&id) || self.fresh.contains(&id)
    }
}

/// How current masks are paired with previous masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Matcher {
    /// Repeatedly take the largest remaining IoU.
    #[default]
    Greedy,
    /// Maximise the summed IoU over all admissible pairs (Hungarian method).
    Optimal,
}

impl std::str::FromStr for Matcher {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Matcher::Greedy),
            "optimal" => Ok(Matcher::Optimal),
            other => Err(Error::InvalidArgument(format!("unknown matcher {other:?}"))),
        }
    }
}

/// Greedy one-to-one matching. Pairs with IoU below `threshold` (or equal
/// to 0) are never matched. Ties go to the lower previous id, then the
/// lower current id.
pub fn match_ids(matrix: &IoUMatrix, threshold: f64) -> IdAssignment {
    match_ids_with(matrix, threshold, Matcher::Greedy)
}

pub fn match_ids_with(matrix: &IoUMatrix, threshold: f64, matcher: Matcher) -> IdAssignment {
    let pairs = match matcher {
        Matcher::Greedy => greedy_pairs(matrix, threshold),
        Matcher::Optimal => optimal_pairs(matrix, threshold),
    };
    let mut out = IdAssignment::default();
    for (r, c) in pairs {
        out.matches
            .insert(matrix.current_ids[r], matrix.previous_ids[c]);
    }
    out.complete_with(matrix.current_ids.iter().copied());
    out
}

fn admissible(v: f64, threshold: f64) -> bool {
    v > 0.0 && v >= threshold
}

fn greedy_pairs(m: &IoUMatrix, threshold: f64) -> Vec<(usize, usize)> {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.get(r, c);
            if admissible(v, threshold) {
                cand.push((v, r, c));
            }
        }
    }
    cand.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(m.previous_ids[a.2].cmp(&m.previous_ids[b.2]))
            .then(m.current_ids[a.1].cmp(&m.current_ids[b.1]))
    });
    let mut row_used = vec![false; m.rows()];
    let mut col_used = vec![false; m.cols()];
    let mut out = Vec::new();
    for (_, r, c) in cand {
        if !row_used[r] && !col_used[c] {
            row_used[r] = true;
            col_used[c] = true;
            out.push((r, c));
        }
    }
    out
}

fn optimal_pairs(m: &IoUMatrix, threshold: f64) -> Vec<(usize, usize)> {
    let weight = |r: usize, c: usize| {
        let v = m.get(r, c);
        if admissible(v, threshold) {
            v
        } else {
            0.0
        }
    };
    let transpose = m.rows() > m.cols();
    let (n, k) = if transpose {
        (m.cols(), m.rows())
    } else {
        (m.rows(), m.cols())
    };
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if transpose {
                        -weight(j, i)
                    } else {
                        -weight(i, j)
                    }
                })
                .collect()
        })
        .collect();
    hungarian(&cost)
        .into_iter()
        .enumerate()
        .map(|(i, j)| if transpose { (j, i) } else { (i, j) })
        .filter(|&(r, c)| weight(r, c) > 0.0)
        .collect()
}

/// Minimum-cost assignment of every row to a distinct column for an
/// `n × k` cost matrix with `n <= k`. Returns the column of each row.
pub(crate) fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let k = cost[0].len();
    assert!(n <= k, "hungarian needs rows <= cols");
    // 1-based potentials; column 0 is a virtual start
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut row_of = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=k {
        if row_of[j] != 0 {
            col_of[row_of[j] - 1] = j - 1;
        }
    }
    col_of
}

/// Carries ID consistency from one frame to the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackerState {
    /// Strictly greater than every id emitted so far.
    pub next_fresh_id: u32,
    /// Previous output frame.
    pub prev_map: PanopticMap,
}

impl TrackerState {
    /// State after emitting `first` unchanged.
    pub fn start(first: PanopticMap) -> Self {
        let max = first
            .instances()
            .values()
            .iter()
            .copied()
            .max()
            .unwrap_or(0);
        TrackerState {
            next_fresh_id: max + 1,
            prev_map: first,
        }
    }
}

/// Renames the instances of `curr` according to `assignment`. Matched ids
/// take their previous id; fresh ids take consecutive ids from the state
/// counter in ascending order of their original id. The class grid is left
/// untouched and the relabeled frame becomes the new `prev_map`.
pub fn relabel(
    curr: &PanopticMap,
    assignment: &IdAssignment,
    state: TrackerState,
) -> Result<(PanopticMap, TrackerState)> {
    let mut next = state.next_fresh_id;
    let mut rename: HashMap<u32, u32> = assignment.matches.iter().map(|(&c, &p)| (c, p)).collect();
    for &id in &assignment.fresh {
        rename.insert(id, next);
        next += 1;
    }
    let mut max_emitted = 0;
    let mut instances = Vec::with_capacity(curr.instances().len());
    for &i in curr.instances().values() {
        if i == NO_INSTANCE {
            instances.push(NO_INSTANCE);
            continue;
        }
        let new = *rename.get(&i).ok_or(Error::IncompleteAssignment(i))?;
        max_emitted = max_emitted.max(new);
        instances.push(new);
    }
    let (w, h) = curr.dims();
    let out = PanopticMap::new(
        curr.classes().clone(),
        LabelGrid::from_vec(w, h, instances)?,
    )?;
    let state = TrackerState {
        next_fresh_id: next.max(max_emitted + 1),
        prev_map: out.clone(),
    };
    Ok((out, state))
}
