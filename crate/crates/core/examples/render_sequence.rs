//! Renders a synthetic scene to PPM frames.
//!
//! ```text
//! cargo run --example render_sequence -- out_dir
//! ```

use std::path::PathBuf;

use vpskit::render;
use vpskit::synth::{self, SceneConfig};

fn main() -> vpskit::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "rendered".into()));
    std::fs::create_dir_all(&out).expect("output directory");
    let gt = synth::generate(&SceneConfig::from_json(include_str!("data/crossing.json"))?)?;
    for (t, frame) in gt.panoptic.iter().enumerate() {
        let path = out.join(render::frame_file_name(t));
        render::write_ppm(&render::colorize(frame, &gt.taxonomy)?, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}
