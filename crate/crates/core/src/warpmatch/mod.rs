//! Warp & Match: make per-frame panoptic outputs time-consistent.
//!
//! For every frame `t >= 1` the instance masks of `t` are warped back onto
//! the `t-1` grid with optical flow, compared against the previous *output*
//! frame by IoU, matched, and renamed. Frame 0 passes through unchanged.
//! Class grids are never modified.
//!
//! Memory spans a single frame: an instance that disappears for one frame
//! and comes back is given a new id.

mod matching;
mod warp;

pub use matching::{
    build_iou_matrix, match_ids, match_ids_with, relabel, IdAssignment, IoUMatrix, Matcher,
    TrackerState,
};
pub use warp::{invert_flow, warp_backward};

use crate::error::{Error, Result};
use crate::grid::FlowField;
use crate::panoptic::PanopticMap;
use crate::taxonomy::ClassTaxonomy;

pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpMatchConfig {
    /// Minimum IoU for a current mask to inherit a previous id.
    pub threshold: f64,
    /// Only inherit ids from instances of the same class.
    pub class_strict: bool,
    pub matcher: Matcher,
}

impl Default for WarpMatchConfig {
    fn default() -> Self {
        WarpMatchConfig {
            threshold: DEFAULT_THRESHOLD,
            class_strict: true,
            matcher: Matcher::Greedy,
        }
    }
}

impl WarpMatchConfig {
    pub fn with_threshold(threshold: f64) -> Self {
        WarpMatchConfig {
            threshold,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidArgument(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Processes one frame against the tracker state.
pub fn step(
    curr: &PanopticMap,
    flow_prev_to_curr: &FlowField,
    taxonomy: &ClassTaxonomy,
    config: &WarpMatchConfig,
    state: TrackerState,
) -> Result<(PanopticMap, TrackerState)> {
    let (wi, wc) = warp_backward(
        curr.instances(),
        curr.classes(),
        flow_prev_to_curr,
        taxonomy.void_class_id(),
    )?;
    let matrix = build_iou_matrix(&wi, &wc, &state.prev_map, taxonomy, config.class_strict)?;
    let mut assignment = match_ids_with(&matrix, config.threshold, config.matcher);
    // instances warped entirely out of view are not in the matrix
    assignment.complete_with(curr.instance_ids());
    relabel(curr, &assignment, state)
}

/// Runs Warp & Match over a whole sequence. `flows[t - 1]` is the flow from
/// frame `t - 1` to frame `t`, defined on the `t - 1` grid.
pub fn run_warpmatch_sequence(
    panoptic_seq: &[PanopticMap],
    flows_prev_to_curr: &[FlowField],
    taxonomy: &ClassTaxonomy,
    config: &WarpMatchConfig,
) -> Result<Vec<PanopticMap>> {
    config.validate()?;
    let expected = panoptic_seq.len().saturating_sub(1);
    if flows_prev_to_curr.len() != expected {
        return Err(Error::SequenceLengthMismatch {
            expected,
            found: flows_prev_to_curr.len(),
        });
    }
    let Some(first) = panoptic_seq.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(panoptic_seq.len());
    out.push(first.clone());
    let mut state = TrackerState::start(first.clone());
    for (curr, flow) in panoptic_seq[1..].iter().zip(flows_prev_to_curr) {
        let (frame, next) = step(curr, flow, taxonomy, config, state)?;
        out.push(frame);
        state = next;
    }
    Ok(out)
}
