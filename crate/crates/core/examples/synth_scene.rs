//! Generates a synthetic street scene and prints what it contains.
//!
//! ```text
//! cargo run --example synth_scene [scene.json]
//! ```

use vpskit::synth::{self, SceneConfig};

fn main() -> vpskit::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/crossing.json").to_string()
    });
    let text = std::fs::read_to_string(&path).expect("readable scene file");
    let config = SceneConfig::from_json(&text)?;
    let gt = synth::generate(&config)?;

    println!(
        "{}x{}, {} frames, {} actors",
        config.width,
        config.height,
        gt.frames(),
        config.actors.len()
    );
    for (t, frame) in gt.panoptic.iter().enumerate() {
        let ids: Vec<_> = frame.instance_ids().into_iter().collect();
        let boxes: Vec<_> = gt.boxes[t]
            .iter()
            .map(|b| {
                format!(
                    "#{} [{:.0},{:.0})x[{:.0},{:.0})",
                    b.track_id, b.x0, b.x1, b.y0, b.y1
                )
            })
            .collect();
        println!("frame {t:2}: ids {ids:?}  {}", boxes.join("  "));
    }
    Ok(())
}
