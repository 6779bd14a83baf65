//! `vpskit` command line.
//!
//! Every subcommand reads and writes only the documented file formats. On
//! success a one-line JSON summary goes to stdout and the exit code is 0.
//! On failure a one-line JSON error `{"error": <kind>, "message": <text>}`
//! goes to stderr and the exit code is 1 (2 for usage errors).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fillfuse::{run_fillfuse_sequence, TrackClassBinding};
use crate::io::{self, FlowDirection, Sequence};
use crate::metrics;
use crate::render;
use crate::synth::{self, SceneConfig};
use crate::taxonomy::ClassTaxonomy;
use crate::warpmatch::{self, invert_flow, Matcher, WarpMatchConfig};

#[derive(Debug, Parser)]
#[command(
    name = "vpskit",
    version,
    about = "Video panoptic segmentation post-processing toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic scene with ground truth (and optional corruptions).
    Synth(SynthArgs),
    /// Semantic maps + tracked boxes -> panoptic sequence.
    Fillfuse(FillfuseArgs),
    /// Time-inconsistent panoptic sequence + optical flow -> consistent ids.
    Warpmatch(WarpmatchArgs),
    /// PQ and VPQ of a prediction against ground truth.
    Eval(EvalArgs),
    /// Colourise a panoptic sequence into PPM frames.
    Render(RenderArgs),
    /// Approximate inverse of a flow field.
    InvertFlow(InvertFlowArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Permute instance ids independently in every frame.
    #[arg(long)]
    pub shuffle_ids: bool,
    /// Maximum integer offset applied to each box edge.
    #[arg(long, default_value_t = 0)]
    pub box_jitter: u32,
    /// Probability of dropping each box.
    #[arg(long, default_value_t = 0.0)]
    pub box_drop: f64,
    /// Erosion radius applied to instance masks.
    #[arg(long, default_value_t = 0)]
    pub erode: u32,
    /// Seed for the corruptions; defaults to the scene seed.
    #[arg(long)]
    pub corrupt_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FillfuseArgs {
    #[arg(long)]
    pub semantic: PathBuf,
    #[arg(long)]
    pub tracks: PathBuf,
    #[arg(long)]
    pub taxonomy: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Bind every thing class to tracks instead of pedestrians only.
    #[arg(long)]
    pub all_things: bool,
}

#[derive(Debug, Args)]
pub struct WarpmatchArgs {
    #[arg(long)]
    pub panoptic: PathBuf,
    #[arg(long)]
    pub flows: PathBuf,
    #[arg(long, default_value_t = warpmatch::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub class_strict: bool,
    #[arg(long, default_value = "greedy", value_parser = ["greedy", "optimal"])]
    pub matcher: String,
    /// Taxonomy file, when the panoptic manifest does not carry one.
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = metrics::DEFAULT_WINDOWS)]
    pub windows: Vec<usize>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertFlowArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn read_taxonomy(path: &Path) -> Result<ClassTaxonomy> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Taxonomy from an explicit file, falling back to the manifest's own.
fn pick_taxonomy(explicit: Option<&Path>, seq: &Sequence) -> Result<ClassTaxonomy> {
    match explicit {
        Some(p) => read_taxonomy(p),
        None => seq.taxonomy().cloned(),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    io::write_atomic(path, text.as_bytes())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn panoptic_sequence(
    taxonomy: &ClassTaxonomy,
    frames: &[crate::panoptic::PanopticMap],
) -> Sequence {
    let (classes, instances) = frames
        .iter()
        .map(|m| (m.classes().clone(), m.instances().clone()))
        .unzip();
    Sequence {
        taxonomy: Some(taxonomy.clone()),
        classes,
        instances,
        flows: None,
    }
}

fn synth_cmd(a: &SynthArgs) -> Result<Value> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| Error::io(&a.config, e))?;
    let config = SceneConfig::from_json(&text)?;
    let bundle = synth::generate(&config)?;
    let seed = a.corrupt_seed.unwrap_or(config.seed);
    create_dir(&a.out)?;

    let taxonomy_path = a.out.join("taxonomy.json");
    write_json(&taxonomy_path, &bundle.taxonomy)?;

    let mut gt = panoptic_sequence(&bundle.taxonomy, &bundle.panoptic);
    gt.flows = Some((FlowDirection::PrevToCurr, bundle.flows.clone()));
    let gt_manifest = io::write_sequence(&a.out.join("gt"), &gt)?;
    let tracks_path = a.out.join("tracks.jsonl");
    io::write_tracks(&tracks_path, &bundle.tracks())?;

    let mut summary = json!({
        "command": "synth",
        "frames": bundle.frames(),
        "taxonomy": taxonomy_path,
        "gt": gt_manifest,
        "tracks": tracks_path,
    });

    if a.shuffle_ids || a.erode > 0 {
        let mut frames = synth::corrupt_masks(&bundle, a.erode);
        if a.shuffle_ids {
            frames = synth::corrupt_shuffle_ids(&frames, seed).frames;
        }
        let mut seq = panoptic_sequence(&bundle.taxonomy, &frames);
        seq.flows = Some((FlowDirection::PrevToCurr, bundle.flows.clone()));
        summary["corrupted"] = json!(io::write_sequence(&a.out.join("corrupted"), &seq)?);
    }
    if a.box_jitter > 0 || a.box_drop > 0.0 {
        let boxes = synth::corrupt_boxes(&bundle.boxes, a.box_jitter, a.box_drop, seed)?;
        let flat: Vec<_> = boxes.into_iter().flatten().collect();
        let p = a.out.join("tracks_corrupted.jsonl");
        io::write_tracks(&p, &flat)?;
        summary["corrupted_tracks"] = json!(p);
    }
    Ok(summary)
}

fn fillfuse_cmd(a: &FillfuseArgs) -> Result<Value> {
    let taxonomy = read_taxonomy(&a.taxonomy)?;
    let semantic = io::read_sequence(&a.semantic)?;
    let tracks = io::read_tracks(&a.tracks)?;
    let binding = if a.all_things {
        TrackClassBinding::all_things(&taxonomy)?
    } else {
        TrackClassBinding::pedestrians(&taxonomy)?
    };
    let frames = run_fillfuse_sequence(&semantic.classes, &tracks, &taxonomy, &binding)?;
    let manifest = io::write_sequence(&a.out, &panoptic_sequence(&taxonomy, &frames))?;
    Ok(json!({
        "command": "fillfuse",
        "frames": frames.len(),
        "boxes": tracks.len(),
        "out": manifest,
    }))
}

fn warpmatch_cmd(a: &WarpmatchArgs) -> Result<Value> {
    if !(0.0..=1.0).contains(&a.threshold) {
        return Err(Error::InvalidArgument(format!(
            "threshold {} outside [0, 1]",
            a.threshold
        )));
    }
    let panoptic = io::read_sequence(&a.panoptic)?;
    let taxonomy = pick_taxonomy(a.taxonomy.as_deref(), &panoptic)?;
    let frames = panoptic.panoptic()?;
    let flow_seq = io::read_sequence(&a.flows)?;
    let (direction, fields) = flow_seq.flows.ok_or_else(|| Error::Manifest {
        path: a.flows.clone(),
        message: "no flows listed".into(),
    })?;
    let flows: Vec<_> = match direction {
        FlowDirection::PrevToCurr => fields,
        FlowDirection::CurrToPrev => fields.iter().map(invert_flow).collect(),
    };
    let config = WarpMatchConfig {
        threshold: a.threshold,
        class_strict: a.class_strict,
        matcher: a.matcher.parse::<Matcher>()?,
    };
    let out = warpmatch::run_warpmatch_sequence(&frames, &flows, &taxonomy, &config)?;
    let manifest = io::write_sequence(&a.out, &panoptic_sequence(&taxonomy, &out))?;
    let ids: std::collections::BTreeSet<u32> = out.iter().flat_map(|m| m.instance_ids()).collect();
    Ok(json!({
        "command": "warpmatch",
        "frames": out.len(),
        "distinct_ids": ids.len(),
        "out": manifest,
    }))
}

fn eval_cmd(a: &EvalArgs) -> Result<Value> {
    let gt = io::read_sequence(&a.gt)?;
    let taxonomy = pick_taxonomy(a.taxonomy.as_deref(), &gt)?;
    let pred = io::read_sequence(&a.pred)?;
    let report = metrics::vpq(&pred.panoptic()?, &gt.panoptic()?, &taxonomy, &a.windows)?;
    io::write_atomic(&a.report, report.to_json(&taxonomy).as_bytes())?;
    let vpq = report.vpq.as_ref().expect("vpq always computed");
    let per_k: serde_json::Map<String, Value> = vpq
        .per_k
        .iter()
        .map(|(k, v)| (format!("k={k}"), json!(v)))
        .collect();
    Ok(json!({
        "command": "eval",
        "pq": report.pq,
        "vpq": per_k,
        "vpq_mean": vpq.mean,
        "report": a.report,
    }))
}

fn render_cmd(a: &RenderArgs) -> Result<Value> {
    let seq = io::read_sequence(&a.input)?;
    let taxonomy = pick_taxonomy(a.taxonomy.as_deref(), &seq)?;
    let frames = seq.panoptic()?;
    create_dir(&a.out)?;
    for (t, m) in frames.iter().enumerate() {
        render::write_ppm(
            &render::colorize(m, &taxonomy)?,
            &a.out.join(render::frame_file_name(t)),
        )?;
    }
    Ok(json!({"command": "render", "frames": frames.len(), "out": a.out}))
}

fn invert_flow_cmd(a: &InvertFlowArgs) -> Result<Value> {
    let flow = io::read_flo(&a.input)?;
    io::write_flo(&a.out, &invert_flow(&flow))?;
    Ok(
        json!({"command": "invert-flow", "width": flow.width(), "height": flow.height(), "out": a.out}),
    )
}

/// Executes a parsed command and returns its summary.
pub fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Synth(a) => synth_cmd(a),
        Command::Fillfuse(a) => fillfuse_cmd(a),
        Command::Warpmatch(a) => warpmatch_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Render(a) => render_cmd(a),
        Command::InvertFlow(a) => invert_flow_cmd(a),
    }
}

/// Parses `args` (including the program name), runs, prints, and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let message = e.to_string();
            let first = message
                .lines()
                .next()
                .unwrap_or("usage error")
                .trim_start_matches("error: ");
            eprintln!("{}", json!({"error": "UsageError", "message": first}));
            return 2;
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            1
        }
    }
}
