mod common;

use common::*;
use proptest::prelude::*;
use vpskit::fillfuse::{
    fill_and_fuse_with, rasterize_ownership, rasterize_ownership_with, OverlapRule,
};
use vpskit::{fill_and_fuse, LabelGrid, TrackClassBinding, TrackedBox};

fn semantic(width: usize, height: usize) -> impl Strategy<Value = LabelGrid> {
    let class = prop::sample::select(vec![VOID, ROAD, SKY, PERSON, PERSON, CAR]);
    prop::collection::vec(class, width * height)
        .prop_map(move |v| LabelGrid::from_vec(width, height, v).unwrap())
}

fn case() -> impl Strategy<Value = (LabelGrid, Vec<TrackedBox>)> {
    (1usize..=16, 1usize..=16).prop_flat_map(|(w, h)| (semantic(w, h), boxes(w, h, 6)))
}

fn disjoint(a: &TrackedBox, b: &TrackedBox) -> bool {
    a.x1 <= b.x0 || b.x1 <= a.x0 || a.y1 <= b.y0 || b.y1 <= a.y0
}

proptest! {
    #[test]
    fn ownership_matches_brute_force((sem, bs) in case()) {
        let (w, h) = sem.dims();
        prop_assert_eq!(rasterize_ownership(&bs, w, h).unwrap(), brute_owner(&bs, w, h));
    }

    #[test]
    fn classes_untouched((sem, bs) in case()) {
        let tax = tax();
        let out = fill_and_fuse(&sem, &bs, &tax, &TrackClassBinding::all_things(&tax).unwrap()).unwrap();
        prop_assert_eq!(out.classes(), &sem);
    }

    #[test]
    fn instances_within_bound_class_and_box((sem, bs) in case(), all in any::<bool>()) {
        let tax = tax();
        let binding = if all {
            TrackClassBinding::all_things(&tax).unwrap()
        } else {
            TrackClassBinding::pedestrians(&tax).unwrap()
        };
        let out = fill_and_fuse(&sem, &bs, &tax, &binding).unwrap();
        for y in 0..sem.height() {
            for x in 0..sem.width() {
                let id = out.instances().get(x, y);
                if id == 0 {
                    continue;
                }
                let b = bs.iter().find(|b| b.track_id == id).unwrap();
                prop_assert_eq!(binding.class_for(b.class_id), Some(sem.get(x, y)));
                prop_assert!(center_inside(b, x, y));
            }
        }
    }

    #[test]
    fn box_order_irrelevant((sem, bs) in case(), seed in any::<u64>()) {
        let tax = tax();
        let binding = TrackClassBinding::all_things(&tax).unwrap();
        let mut shuffled = bs.clone();
        vpskit::synth::rng::Rng::new(seed).shuffle(&mut shuffled);
        let a = fill_and_fuse(&sem, &bs, &tax, &binding).unwrap();
        let b = fill_and_fuse(&sem, &shuffled, &tax, &binding).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn disjoint_boxes_rule_independent((sem, bs) in case()) {
        let mut kept: Vec<TrackedBox> = Vec::new();
        for b in bs {
            if kept.iter().all(|k| disjoint(k, &b)) {
                kept.push(b);
            }
        }
        let tax = tax();
        let binding = TrackClassBinding::all_things(&tax).unwrap();
        let a = fill_and_fuse_with(&sem, &kept, &tax, &binding, OverlapRule::SmallestArea).unwrap();
        let b = fill_and_fuse_with(&sem, &kept, &tax, &binding, OverlapRule::LowestTrackId).unwrap();
        prop_assert_eq!(a, b);
        let (w, h) = sem.dims();
        prop_assert_eq!(
            rasterize_ownership_with(&kept, w, h, OverlapRule::SmallestArea).unwrap(),
            rasterize_ownership_with(&kept, w, h, OverlapRule::LowestTrackId).unwrap()
        );
    }
}

#[test]
fn fragments_of_one_track_merge() {
    let tax = tax();
    let sem = LabelGrid::filled(6, 2, PERSON).unwrap();
    let bs = [
        TrackedBox::new(0, 3, PERSON, 0.0, 0.0, 2.0, 2.0).unwrap(),
        TrackedBox::new(0, 3, PERSON, 4.0, 0.0, 6.0, 2.0).unwrap(),
    ];
    let out = fill_and_fuse(
        &sem,
        &bs,
        &tax,
        &TrackClassBinding::pedestrians(&tax).unwrap(),
    )
    .unwrap();
    assert_eq!(
        out.instances(),
        &LabelGrid::from_rows(&[[3, 3, 0, 0, 3, 3], [3, 3, 0, 0, 3, 3]]).unwrap()
    );
}
