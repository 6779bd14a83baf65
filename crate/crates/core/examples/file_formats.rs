//! Writes and reads back every on-disk format: label maps, flow fields,
//! track files and sequence manifests.

use vpskit::io::{self, FlowDirection, Sequence};
use vpskit::synth::{self, SceneConfig};

fn main() -> vpskit::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let gt = synth::generate(&SceneConfig::from_json(include_str!("data/crossing.json"))?)?;

    let lmap = dir.path().join("classes.lmap");
    io::write_lmap(&lmap, gt.panoptic[0].classes())?;
    assert_eq!(&io::read_lmap(&lmap)?, gt.panoptic[0].classes());

    let flo = dir.path().join("flow.flo");
    io::write_flo(&flo, &gt.flows[0])?;
    assert_eq!(io::read_flo(&flo)?, gt.flows[0]);

    let tracks = dir.path().join("tracks.jsonl");
    io::write_tracks(&tracks, &gt.tracks())?;
    let text = std::fs::read_to_string(&tracks).expect("tracks written");
    println!("{} boxes; first line:", io::read_tracks(&tracks)?.len());
    println!("{}", text.lines().next().unwrap_or(""));

    let seq = Sequence {
        taxonomy: Some(gt.taxonomy.clone()),
        classes: gt.panoptic.iter().map(|m| m.classes().clone()).collect(),
        instances: gt.panoptic.iter().map(|m| m.instances().clone()).collect(),
        flows: Some((FlowDirection::PrevToCurr, gt.flows.clone())),
    };
    let manifest = io::write_sequence(&dir.path().join("seq"), &seq)?;
    assert_eq!(io::read_sequence(&manifest)?, seq);
    println!(
        "sequence of {} frames round-trips through {}",
        seq.frame_count(),
        manifest.display()
    );

    match io::decode_lmap(b"LMAP\x02\x00\x00\x00") {
        Err(e) => println!("truncated header -> {}: {e}", e.kind()),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
