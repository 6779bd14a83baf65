//! Video panoptic segmentation from ordinary perception outputs.
//!
//! Two post-processing pipelines turn per-frame network outputs into
//! panoptic frames whose instance ids stay consistent over time:
//!
//! * [`fillfuse`]: semantic segmentation + multi-object tracking boxes.
//! * [`warpmatch`]: per-frame panoptic segmentation + optical flow.
//!
//! [`metrics`] scores the result with PQ and VPQ, [`synth`] generates
//! moving-shape scenes with exact ground truth to test against, [`io`]
//! reads and writes the on-disk formats and [`render`] draws frames as PPM.
//!
//! ```
//! use vpskit::{metrics, synth, warpmatch};
//!
//! let scene = synth::SceneConfig::from_json(r#"{
//!     "width": 32, "height": 16, "frames": 4,
//!     "background": [{"class_id": 1, "y0": 0, "y1": 16}],
//!     "actors": [
//!         {"shape": "rectangle", "class_id": 11, "size": 4, "start": [2, 2], "velocity": [2, 0]},
//!         {"shape": "disk", "class_id": 13, "size": 6, "start": [20, 8], "velocity": [-1, 0]}
//!     ]
//! }"#).unwrap();
//! let gt = synth::generate(&scene).unwrap();
//! let noisy = synth::corrupt_shuffle_ids(&gt.panoptic, 7);
//! let fixed = warpmatch::run_warpmatch_sequence(
//!     &noisy.frames, &gt.flows, &gt.taxonomy, &Default::default()).unwrap();
//! let report = metrics::vpq(&fixed, &gt.panoptic, &gt.taxonomy, &[1, 2, 3, 4]).unwrap();
//! assert_eq!(report.vpq.unwrap().mean, 1.0);
//! ```

pub mod cli;
pub mod error;
pub mod fillfuse;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod panoptic;
pub mod render;
pub mod synth;
pub mod taxonomy;
pub mod warpmatch;

pub use error::{Error, Result};
pub use fillfuse::{
    fill_and_fuse, rasterize_ownership, run_fillfuse_sequence, TrackClassBinding, TrackedBox,
};
pub use grid::{FlowField, FlowVector, LabelGrid, Pixel};
pub use metrics::{match_segments, pq, vpq, MetricReport};
pub use panoptic::{extract_segments, iou, validate_panoptic, PanopticMap, Segment, Violation};
pub use taxonomy::{ClassEntry, ClassKind, ClassTaxonomy};
pub use warpmatch::{run_warpmatch_sequence, WarpMatchConfig};
