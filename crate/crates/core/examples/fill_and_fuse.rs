//! Turns a semantic map and tracked boxes into a panoptic frame.
//!
//! Two pedestrians overlap; the smaller box owns the shared pixels, and
//! only pixels the segmenter labelled "person" receive an instance id.

use vpskit::{fill_and_fuse, ClassTaxonomy, LabelGrid, TrackClassBinding, TrackedBox};

fn main() -> vpskit::Result<()> {
    let tax = ClassTaxonomy::street();
    let person = tax.by_name("person").unwrap().class_id;
    let road = tax.by_name("road").unwrap().class_id;

    let mut semantic = LabelGrid::filled(12, 6, road)?;
    for y in 1..6 {
        for x in 2..10 {
            if (x + y) % 5 != 0 {
                semantic.set(x, y, person);
            }
        }
    }
    let boxes = [
        TrackedBox::new(0, 4, person, 1.0, 0.0, 8.0, 6.0)?,
        TrackedBox::new(0, 9, person, 6.0, 1.0, 11.0, 6.0)?,
    ];
    let binding = TrackClassBinding::pedestrians(&tax)?;
    let frame = fill_and_fuse(&semantic, &boxes, &tax, &binding)?;

    println!("class / instance");
    for y in 0..frame.height() {
        let c: String = (0..frame.width())
            .map(|x| {
                if frame.classes().get(x, y) == person {
                    'P'
                } else {
                    '.'
                }
            })
            .collect();
        let i: String = (0..frame.width())
            .map(|x| match frame.instances().get(x, y) {
                0 => '.',
                id => char::from_digit(id, 36).unwrap(),
            })
            .collect();
        println!("{c}   {i}");
    }
    Ok(())
}
