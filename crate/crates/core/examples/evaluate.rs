//! Scores a prediction with PQ and VPQ and prints the JSON report.

use vpskit::{metrics, ClassTaxonomy, LabelGrid, PanopticMap};

fn frame(person_cols: std::ops::Range<usize>, id: u32) -> vpskit::Result<PanopticMap> {
    let mut map = PanopticMap::uniform(8, 4, 1)?;
    for y in 0..4 {
        for x in person_cols.clone() {
            map.set(x, y, 11, id);
        }
    }
    Ok(map)
}

fn main() -> vpskit::Result<()> {
    let tax = ClassTaxonomy::street();
    let gt = vec![frame(1..4, 1)?, frame(2..5, 1)?, frame(3..6, 1)?];
    // right masks, but the id flips in the middle frame
    let pred = vec![frame(1..4, 5)?, frame(2..5, 6)?, frame(3..6, 5)?];

    let per_frame = metrics::pq(&pred[0], &gt[0], &tax)?;
    println!("frame 0 PQ = {:.3}", per_frame.pq);

    let report = metrics::vpq(&pred, &gt, &tax, &metrics::DEFAULT_WINDOWS)?;
    print!("{}", report.to_json(&tax));

    // a class-only map scores the stuff but misses every person
    let semantic_only = gt
        .iter()
        .map(|m| PanopticMap::new(m.classes().clone(), LabelGrid::filled(8, 4, 0)?))
        .collect::<vpskit::Result<Vec<_>>>()?;
    let r = metrics::vpq(&semantic_only, &gt, &tax, &[1])?;
    println!("semantic only: VPQ^1 = {:.3}", r.vpq.unwrap().mean);
    Ok(())
}
