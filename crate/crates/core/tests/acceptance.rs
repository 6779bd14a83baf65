//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! reports one PASS/FAIL line; exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use vpskit::fillfuse::{rasterize_ownership, OverlapRule};
use vpskit::io::{
    self, decode_flo, decode_lmap, decode_tracks, encode_flo, encode_lmap, encode_tracks,
};
use vpskit::metrics;
use vpskit::synth::{self, corrupt_boxes, corrupt_shuffle_ids, SceneConfig};
use vpskit::warpmatch::{warp_backward, WarpMatchConfig};
use vpskit::{
    extract_segments, fill_and_fuse, iou, match_segments, run_fillfuse_sequence,
    run_warpmatch_sequence, Error, FlowField, FlowVector, LabelGrid, PanopticMap,
    TrackClassBinding, TrackedBox,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn sample<S: Strategy>(strategy: &S, runner: &mut TestRunner) -> S::Value {
    strategy
        .new_tree(runner)
        .expect("strategy produces values")
        .current()
}

fn static_scene() -> SceneConfig {
    street_scene(
        64,
        48,
        10,
        vec![
            rect(PERSON, 8, [8.0, 20.0], [0.0, 0.0]),
            disk(CAR, 10, [40.0, 18.0], [0.0, 0.0]),
        ],
        11,
    )
}

/// Three actors with integer velocities; the car drives out on the right.
fn translating_scene() -> SceneConfig {
    street_scene(
        256,
        128,
        30,
        vec![
            rect(PERSON, 12, [10.0, 70.0], [3.0, 0.0]),
            disk(CAR, 20, [200.0, 90.0], [2.0, -1.0]),
            rect(PERSON, 16, [120.0, 20.0], [-3.0, 1.0]),
        ],
        23,
    )
}

/// Actors on separate rows, so their boxes never touch.
fn disjoint_scene() -> SceneConfig {
    street_scene(
        128,
        64,
        12,
        vec![
            rect(PERSON, 10, [5.0, 6.0], [2.0, 0.0]),
            rect(PERSON, 8, [100.0, 26.0], [-3.0, 1.0]),
            disk(CAR, 12, [40.0, 46.0], [1.0, 0.0]),
            rect(PERSON, 6, [70.0, 8.0], [-1.0, 0.0]),
        ],
        5,
    )
}

fn zero_flows(seq: &[PanopticMap]) -> Vec<FlowField> {
    let (w, h) = seq[0].dims();
    vec![FlowField::zeros(w, h).unwrap(); seq.len() - 1]
}

fn fmt_per_k(per_k: &BTreeMap<usize, f64>) -> String {
    per_k
        .iter()
        .map(|(k, v)| format!("k{k}={v:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let gt = synth::generate(&static_scene()).map_err(|e| e.to_string())?;
    let noisy = corrupt_shuffle_ids(&gt.panoptic, 99).frames;
    let out = run_warpmatch_sequence(
        &noisy,
        &zero_flows(&noisy),
        &gt.taxonomy,
        &WarpMatchConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let report = metrics::vpq(&out, &gt.panoptic, &gt.taxonomy, &metrics::DEFAULT_WINDOWS)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let vpq = report.vpq.unwrap();
    let shuffled = metrics::vpq(&noisy, &gt.panoptic, &gt.taxonomy, &[2])
        .unwrap()
        .vpq
        .unwrap()
        .mean;
    ensure!(
        shuffled < 1.0,
        "shuffling did not break consistency (VPQ^2 {shuffled})"
    );
    ensure!(
        vpq.per_k.len() == 4,
        "missing window sizes: {:?}",
        vpq.per_k
    );
    ensure!(
        vpq.per_k.values().all(|&v| v == 1.0),
        "VPQ {}",
        fmt_per_k(&vpq.per_k)
    );
    ensure!(elapsed < Duration::from_secs(2), "took {elapsed:?}");
    Ok(format!(
        "{} (shuffled VPQ^2 {shuffled:.4}), {elapsed:.2?}",
        fmt_per_k(&vpq.per_k)
    ))
}

fn translating_vpq(threshold: f64) -> Result<BTreeMap<usize, f64>, String> {
    let gt = synth::generate(&translating_scene()).map_err(|e| e.to_string())?;
    let noisy = corrupt_shuffle_ids(&gt.panoptic, 3).frames;
    let config = WarpMatchConfig::with_threshold(threshold);
    let out = run_warpmatch_sequence(&noisy, &gt.flows, &gt.taxonomy, &config)
        .map_err(|e| e.to_string())?;
    let report = metrics::vpq(&out, &gt.panoptic, &gt.taxonomy, &metrics::DEFAULT_WINDOWS)
        .map_err(|e| e.to_string())?;
    Ok(report.vpq.unwrap().per_k)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let per_k = translating_vpq(0.3)?;
    let elapsed = start.elapsed();
    let mean = per_k.values().sum::<f64>() / per_k.len() as f64;
    ensure!(mean >= 0.99, "VPQ mean {mean:.4} ({})", fmt_per_k(&per_k));
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "VPQ mean {mean:.4} ({}), {elapsed:.2?}",
        fmt_per_k(&per_k)
    ))
}

fn criterion_3() -> Outcome {
    let loose = translating_vpq(0.3)?[&4];
    let strict = translating_vpq(0.95)?[&4];
    ensure!(
        strict < loose,
        "VPQ^4 at θ=0.95 {strict:.4} not below θ=0.3 {loose:.4}"
    );
    Ok(format!("VPQ^4 {strict:.4} at θ=0.95 < {loose:.4} at θ=0.3"))
}

fn criterion_4() -> Outcome {
    let gt = synth::generate(&disjoint_scene()).map_err(|e| e.to_string())?;
    let tax = &gt.taxonomy;
    let binding = TrackClassBinding::all_things(tax).unwrap();
    for t in 0..gt.frames() {
        for (i, a) in gt.boxes[t].iter().enumerate() {
            for b in &gt.boxes[t][i + 1..] {
                let apart = a.x1 <= b.x0 || b.x1 <= a.x0 || a.y1 <= b.y0 || b.y1 <= a.y0;
                ensure!(apart, "scene boxes overlap in frame {t}");
            }
        }
    }
    let fused = run_fillfuse_sequence(&gt.semantic, &gt.tracks(), tax, &binding)
        .map_err(|e| e.to_string())?;
    for (t, (f, g)) in fused.iter().zip(&gt.panoptic).enumerate() {
        ensure!(f == g, "frame {t} differs from ground truth");
    }

    let dropped = corrupt_boxes(&gt.boxes, 0, 0.2, 17).map_err(|e| e.to_string())?;
    let flat: Vec<TrackedBox> = dropped.iter().flatten().copied().collect();
    let n_dropped = gt.tracks().len() - flat.len();
    ensure!(n_dropped > 0, "no box was dropped");
    let fused =
        run_fillfuse_sequence(&gt.semantic, &flat, tax, &binding).map_err(|e| e.to_string())?;
    let mut lowered = 0;
    for (t, (f, g)) in fused.iter().zip(&gt.panoptic).enumerate() {
        let r = metrics::pq(f, g, tax).unwrap();
        let lost = dropped[t].len() < gt.boxes[t].len();
        for c in &r.classes {
            if tax.is_thing(c.class_id) {
                let lost_here = gt.boxes[t]
                    .iter()
                    .any(|b| b.class_id == c.class_id && !dropped[t].contains(b));
                ensure!(
                    lost_here == (c.pq < 1.0),
                    "frame {t}: class {} PQ {:.4}",
                    c.class_id,
                    c.pq
                );
                if lost_here {
                    lowered += 1;
                }
            } else {
                ensure!(
                    c.pq == 1.0,
                    "frame {t}: stuff class {} PQ {}",
                    c.class_id,
                    c.pq
                );
            }
        }
        ensure!(!lost || r.pq < 1.0, "frame {t} lost a box but PQ stayed 1");
    }
    Ok(format!(
        "exact on {} frames; {n_dropped}/{} boxes dropped, thing PQ lowered in {lowered} frame-classes, stuff PQ 1.0",
        gt.frames(),
        gt.tracks().len()
    ))
}

fn criterion_5() -> Outcome {
    let tax = tax();
    let binding = TrackClassBinding::pedestrians(&tax).unwrap();
    let sem = LabelGrid::filled(10, 10, PERSON).unwrap();
    let big = TrackedBox::new(0, 1, PERSON, 0.0, 0.0, 8.0, 8.0).unwrap();
    let small = TrackedBox::new(0, 2, PERSON, 4.0, 4.0, 10.0, 10.0).unwrap();
    let a = fill_and_fuse(&sem, &[big, small], &tax, &binding).unwrap();
    let b = fill_and_fuse(&sem, &[small, big], &tax, &binding).unwrap();
    ensure!(a == b, "box order changed the output");
    ensure!(
        a.instances().get(5, 5) == 2,
        "smaller box does not own the overlap"
    );

    let mut runner = TestRunner::deterministic();
    let cases = (1usize..=16, 1usize..=16)
        .prop_flat_map(|(w, h)| (proptest::strategy::Just((w, h)), boxes(w, h, 6)));
    let mut overlapping = 0;
    for _ in 0..500 {
        let ((w, h), bs) = sample(&cases, &mut runner);
        let got = rasterize_ownership(&bs, w, h).unwrap();
        ensure!(
            got == brute_owner(&bs, w, h),
            "ownership differs from brute force for {bs:?}"
        );
        let mut rev = bs.clone();
        rev.reverse();
        ensure!(
            got == rasterize_ownership(&rev, w, h).unwrap(),
            "order dependence for {bs:?}"
        );
        if (0..w * h).any(|i| bs.iter().filter(|b| center_inside(b, i % w, i / w)).count() > 1) {
            overlapping += 1;
        }
    }
    let _ = OverlapRule::SmallestArea;
    Ok(format!(
        "500 random grids ≤16×16 match brute force ({overlapping} with overlaps)"
    ))
}

fn criterion_6() -> Outcome {
    let tax = tax();
    let mut runner = TestRunner::deterministic();
    let pairs = map_pair();
    for n in 0..200 {
        let (a, b) = sample(&pairs, &mut runner);
        let pred = extract_segments(&a, &tax).unwrap();
        let gt = extract_segments(&b, &tax).unwrap();
        ensure!(
            pred.len() <= 6 && gt.len() <= 6,
            "case {n}: too many segments"
        );
        let m = match_segments(&pred, &gt);
        let mut got: Vec<(usize, usize)> = m.tp.iter().map(|&(p, g, _)| (p, g)).collect();
        got.sort();
        // every same-class pair, exhaustively
        let mut want = Vec::new();
        for (i, p) in pred.iter().enumerate() {
            for (j, g) in gt.iter().enumerate() {
                if p.class_id == g.class_id && iou(&p.pixels, &g.pixels) > 0.5 {
                    want.push((i, j));
                }
            }
        }
        ensure!(got == want, "case {n}: {got:?} vs {want:?}");
        let want_stats = brute_stats(&[&a], &[&b], &tax);
        ensure!(
            (metrics::pq(&a, &b, &tax).unwrap().pq - pq_of(&want_stats)).abs() < 1e-12,
            "case {n}: PQ differs from reference"
        );
        for x in [&a, &b] {
            let has = !extract_segments(x, &tax).unwrap().is_empty();
            ensure!(
                !has || metrics::pq(x, x, &tax).unwrap().pq == 1.0,
                "case {n}: pq(x, x) != 1"
            );
        }
    }

    // two people swap ids between frames on a void background
    let frame = |left: u32, right: u32| {
        let mut m = PanopticMap::uniform(8, 4, VOID).unwrap();
        for y in 0..4 {
            for x in 0..3 {
                m.set(x, y, PERSON, left);
                m.set(x + 5, y, PERSON, right);
            }
        }
        m
    };
    let gt = vec![frame(1, 2), frame(1, 2)];
    let pred = vec![frame(1, 2), frame(2, 1)];
    let v2 = metrics::vpq(&pred, &gt, &tax, &[2])
        .unwrap()
        .vpq
        .unwrap()
        .per_k[&2];
    ensure!(v2 == 0.0, "swap VPQ^2 = {v2}");
    Ok("200 random pairs match exhaustive matching; pq(x,x)=1; swap VPQ^2 = 0".into())
}

fn criterion_7() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let maps = (1usize..=16, 1usize..=16).prop_flat_map(|(w, h)| map_with_dims(w, h));
    for _ in 0..200 {
        let m = sample(&maps, &mut runner);
        let (w, h) = m.dims();
        let (wi, wc) = warp_backward(
            m.instances(),
            m.classes(),
            &FlowField::zeros(w, h).unwrap(),
            VOID,
        )
        .unwrap();
        ensure!(
            &wi == m.instances() && &wc == m.classes(),
            "zero flow changed a map"
        );
    }

    let mut block = LabelGrid::filled(4, 4, 0).unwrap();
    for (x, y) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
        block.set(x, y, 7);
    }
    let flow = FlowField::constant(4, 4, FlowVector::new(1.0, 0.0)).unwrap();
    let (wi, _) = warp_backward(&block, &block, &flow, VOID).unwrap();
    let mut expected = LabelGrid::filled(4, 4, 0).unwrap();
    for y in 0..4 {
        for x in 0..4 {
            if x + 1 < 4 {
                expected.set(x, y, block.get(x + 1, y));
            }
        }
    }
    ensure!(wi == expected, "shifted block {:?}", wi.values());

    let mut checked = 0usize;
    for seed in 0..20u64 {
        let config = sample(
            &random_scene(),
            &mut TestRunner::new_with_rng(
                Default::default(),
                proptest::test_runner::TestRng::from_seed(
                    proptest::test_runner::RngAlgorithm::ChaCha,
                    &[seed as u8; 32],
                ),
            ),
        );
        let gt = synth::generate(&config).unwrap();
        for t in 1..gt.frames() {
            let (prev, curr, flow) = (&gt.panoptic[t - 1], &gt.panoptic[t], &gt.flows[t - 1]);
            let (wi, _) = warp_backward(curr.instances(), curr.classes(), flow, VOID).unwrap();
            for y in 0..prev.height() {
                for x in 0..prev.width() {
                    let v = flow.get(x, y);
                    let (sx, sy) = (x as i64 + v.dx as i64, y as i64 + v.dy as i64);
                    if sx < 0 || sy < 0 || sx >= prev.width() as i64 || sy >= prev.height() as i64 {
                        continue;
                    }
                    if curr.instances().get(sx as usize, sy as usize) != prev.instances().get(x, y)
                    {
                        continue;
                    }
                    ensure!(
                        wi.get(x, y) == prev.instances().get(x, y),
                        "seed {seed} frame {t} ({x},{y})"
                    );
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "zero-flow identity, 4×4 shift exact, {checked} co-visible pixels agree"
    ))
}

fn criterion_8() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let grid = (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
        proptest::collection::vec(proptest::num::u32::ANY, w * h)
            .prop_map(move |v| LabelGrid::from_vec(w, h, v).unwrap())
    });
    let finite = proptest::num::f32::ANY.prop_filter("finite", |v| v.is_finite());
    let flow = (1usize..24, 1usize..24).prop_flat_map(move |(w, h)| {
        proptest::collection::vec((finite.clone(), finite.clone()), w * h).prop_map(move |v| {
            FlowField::from_vec(
                w,
                h,
                v.into_iter().map(|(a, b)| FlowVector::new(a, b)).collect(),
            )
            .unwrap()
        })
    });
    let track = (
        0u32..40,
        1u32..1000,
        0u32..20,
        -500.0f64..500.0,
        -500.0f64..500.0,
        0.01f64..300.0,
        0.01f64..300.0,
    )
        .prop_map(|(f, t, c, x, y, w, h)| TrackedBox::new(f, t, c, x, y, x + w, y + h).unwrap());
    let tracks = proptest::collection::vec(track, 0..20).prop_map(|mut v| {
        v.sort_by_key(|b| (b.frame, b.track_id));
        v.dedup_by_key(|b| (b.frame, b.track_id));
        v
    });
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for n in 0..1000 {
        let g = sample(&grid, &mut runner);
        let f = sample(&flow, &mut runner);
        let t = sample(&tracks, &mut runner);
        ensure!(decode_lmap(&encode_lmap(&g)).unwrap() == g, "lmap case {n}");
        let back = decode_flo(&encode_flo(&f)).unwrap();
        let bits = |x: &FlowField| {
            x.vectors()
                .iter()
                .map(|v| (v.dx.to_bits(), v.dy.to_bits()))
                .collect::<Vec<_>>()
        };
        ensure!(
            back.dims() == f.dims() && bits(&back) == bits(&f),
            "flo case {n}"
        );
        ensure!(
            decode_tracks(&encode_tracks(&t)).unwrap() == t,
            "tracks case {n}"
        );
        if n % 50 == 0 {
            let p = dir.path().join(format!("{n}"));
            io::write_lmap(&p.with_extension("lmap"), &g).unwrap();
            io::write_flo(&p.with_extension("flo"), &f).unwrap();
            io::write_tracks(&p.with_extension("jsonl"), &t).unwrap();
            ensure!(
                io::read_lmap(&p.with_extension("lmap")).unwrap() == g,
                "lmap file {n}"
            );
            ensure!(
                bits(&io::read_flo(&p.with_extension("flo")).unwrap()) == bits(&f),
                "flo file {n}"
            );
            ensure!(
                io::read_tracks(&p.with_extension("jsonl")).unwrap() == t,
                "tracks file {n}"
            );
        }
    }

    let mut lmap_trailing = encode_lmap(&LabelGrid::filled(1, 1, 7).unwrap());
    lmap_trailing.push(0);
    let mut flo_nan = encode_flo(&FlowField::zeros(1, 1).unwrap());
    flo_nan[12..16].copy_from_slice(&f32::NAN.to_le_bytes());
    let mut huge = b"LMAP".to_vec();
    huge.extend_from_slice(&u32::MAX.to_le_bytes());
    huge.extend_from_slice(&u32::MAX.to_le_bytes());
    let cases: Vec<(&str, Result<(), Error>, &str)> = vec![
        ("empty lmap", decode_lmap(b"").map(drop), "Truncated"),
        (
            "wrong lmap magic",
            decode_lmap(b"PIEH\x01\0\0\0\x01\0\0\0\0\0\0\0").map(drop),
            "BadMagic",
        ),
        (
            "short lmap header",
            decode_lmap(b"LMAP\x02\0").map(drop),
            "Truncated",
        ),
        (
            "lmap body short",
            decode_lmap(b"LMAP\x02\0\0\0\x01\0\0\0\0\0\0\0").map(drop),
            "Truncated",
        ),
        (
            "lmap trailing bytes",
            decode_lmap(&lmap_trailing).map(drop),
            "TrailingData",
        ),
        ("lmap huge dims", decode_lmap(&huge).map(drop), "Overflow"),
        (
            "zero-size lmap",
            decode_lmap(b"LMAP\0\0\0\0\x01\0\0\0").map(drop),
            "EmptyGrid",
        ),
        (
            "wrong flo magic",
            decode_flo(b"LMAP\x01\0\0\0\x01\0\0\0\0\0\0\0\0\0\0\0").map(drop),
            "BadMagic",
        ),
        (
            "short flo",
            decode_flo(&202021.25f32.to_le_bytes()).map(drop),
            "Truncated",
        ),
        ("NaN flow", decode_flo(&flo_nan).map(drop), "NonFinite"),
        (
            "bad track json",
            decode_tracks("{\"frame\":").map(drop),
            "ParseError",
        ),
    ];
    let mut bad = Vec::new();
    for (name, r, kind) in &cases {
        match r {
            Err(e) if e.kind() == *kind => {}
            other => bad.push(format!("{name}: expected {kind}, got {other:?}")),
        }
    }
    ensure!(bad.is_empty(), "{}", bad.join("; "));

    let noise = proptest::collection::vec(proptest::num::u8::ANY, 0..48);
    for _ in 0..1000 {
        let mut bytes = sample(&noise, &mut runner);
        let crashed = std::panic::catch_unwind(|| {
            let _ = decode_lmap(&bytes);
            let _ = decode_flo(&bytes);
            let _ = decode_tracks(&String::from_utf8_lossy(&bytes));
        })
        .is_err();
        ensure!(!crashed, "decoder panicked on {bytes:?}");
        bytes.splice(0..0, b"LMAP".iter().copied());
        ensure!(
            std::panic::catch_unwind(|| decode_lmap(&bytes)).is_ok(),
            "lmap decoder panicked"
        );
    }
    Ok(format!(
        "1000 round trips per format; {} malformed inputs give the expected errors",
        cases.len()
    ))
}

// ---------------------------------------------------------------------------
// Criterion 9: the command line, twice
// ---------------------------------------------------------------------------

fn vpskit(args: &[&str]) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vpskit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "vpskit {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_scene(dir: &Path, name: &str, config: &SceneConfig) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, serde_json::to_string_pretty(config).unwrap()).unwrap();
    p
}

/// Criteria 1-4 through the command line; returns the VPQ means.
fn cli_pipeline(root: &Path) -> Result<Vec<f64>, String> {
    let mut means = Vec::new();
    for (name, config, thresholds) in [
        ("static", static_scene(), vec!["0.3"]),
        ("translating", translating_scene(), vec!["0.3", "0.95"]),
    ] {
        let dir = root.join(name);
        let cfg = write_scene(root, name, &config);
        vpskit(&[
            "synth",
            "--config",
            s(&cfg),
            "--out",
            s(&dir),
            "--shuffle-ids",
            "--corrupt-seed",
            "3",
        ])?;
        let gt = dir.join("gt/manifest.json");
        for th in thresholds {
            let fixed = dir.join(format!("fixed_{th}"));
            vpskit(&[
                "warpmatch",
                "--panoptic",
                s(&dir.join("corrupted/manifest.json")),
                "--flows",
                s(&gt),
                "--threshold",
                th,
                "--out",
                s(&fixed),
            ])?;
            let report = dir.join(format!("report_{th}.json"));
            let summary = vpskit(&[
                "eval",
                "--pred",
                s(&fixed.join("manifest.json")),
                "--gt",
                s(&gt),
                "--report",
                s(&report),
            ])?;
            means.push(summary["vpq_mean"].as_f64().unwrap());
            vpskit(&[
                "render",
                "--in",
                s(&fixed.join("manifest.json")),
                "--out",
                s(&dir.join(format!("render_{th}"))),
            ])?;
        }
    }

    let dir = root.join("disjoint");
    let cfg = write_scene(root, "disjoint", &disjoint_scene());
    vpskit(&[
        "synth",
        "--config",
        s(&cfg),
        "--out",
        s(&dir),
        "--box-drop",
        "0.2",
        "--corrupt-seed",
        "17",
    ])?;
    let gt = dir.join("gt/manifest.json");
    let tax = dir.join("taxonomy.json");
    for (tracks, out) in [
        ("tracks.jsonl", "fused"),
        ("tracks_corrupted.jsonl", "fused_dropped"),
    ] {
        let fused = dir.join(out);
        vpskit(&[
            "fillfuse",
            "--semantic",
            s(&gt),
            "--tracks",
            s(&dir.join(tracks)),
            "--taxonomy",
            s(&tax),
            "--out",
            s(&fused),
            "--all-things",
        ])?;
        let report = dir.join(format!("report_{out}.json"));
        let summary = vpskit(&[
            "eval",
            "--pred",
            s(&fused.join("manifest.json")),
            "--gt",
            s(&gt),
            "--report",
            s(&report),
        ])?;
        means.push(summary["vpq_mean"].as_f64().unwrap());
        vpskit(&[
            "render",
            "--in",
            s(&fused.join("manifest.json")),
            "--out",
            s(&dir.join(format!("render_{out}"))),
        ])?;
    }
    Ok(means)
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(
                    p.strip_prefix(root).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let means_a = cli_pipeline(a.path())?;
    let means_b = cli_pipeline(b.path())?;
    ensure!(
        means_a == means_b,
        "reported VPQ differs: {means_a:?} vs {means_b:?}"
    );
    ensure!(
        means_a[0] == 1.0,
        "static scene VPQ {} via the CLI",
        means_a[0]
    );
    ensure!(
        means_a[1] >= 0.99,
        "translating scene VPQ {} via the CLI",
        means_a[1]
    );
    ensure!(
        means_a[3] == 1.0,
        "fill & fuse with exact boxes VPQ {}",
        means_a[3]
    );
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    ensure!(ta.keys().eq(tb.keys()), "file sets differ");
    let differing: Vec<_> = ta
        .iter()
        .filter(|(k, v)| tb[*k] != **v)
        .map(|(k, _)| k.display().to_string())
        .collect();
    ensure!(differing.is_empty(), "files differ: {differing:?}");
    let ppms = ta
        .keys()
        .filter(|k| k.extension().is_some_and(|e| e == "ppm"))
        .count();
    ensure!(ppms > 0, "no PPM written");
    Ok(format!(
        "{} files ({ppms} PPM) byte-identical across two runs",
        ta.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("static-scene recovery", criterion_1),
        ("translating-scene recovery", criterion_2),
        ("threshold sensitivity", criterion_3),
        ("fill & fuse fidelity", criterion_4),
        ("overlap determinism", criterion_5),
        ("metric oracle equivalence", criterion_6),
        ("warp identity and shift", criterion_7),
        ("round-trip I/O", criterion_8),
        ("end-to-end determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
