//! Approximates the backward flow from a forward flow field.

use vpskit::warpmatch::invert_flow;
use vpskit::{FlowField, FlowVector};

fn show(name: &str, f: &FlowField) {
    println!("{name}");
    for y in 0..f.height() {
        let row: Vec<_> = (0..f.width())
            .map(|x| {
                let v = f.get(x, y);
                format!("({:+.0},{:+.0})", v.dx, v.dy)
            })
            .collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> vpskit::Result<()> {
    // two rows sliding right by 2 over a static background; the first two
    // columns of those rows receive no vote and stay zero
    let mut forward = FlowField::zeros(6, 4)?;
    for y in 1..3 {
        for x in 0..6 {
            forward.set(x, y, FlowVector::new(2.0, 0.0))?;
        }
    }
    show("forward", &forward);
    show("inverse", &invert_flow(&forward));
    Ok(())
}
