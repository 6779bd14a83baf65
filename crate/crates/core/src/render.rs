//! Colour rendering of panoptic frames.
//!
//! Stuff pixels, and thing pixels without an instance, take their class
//! colour from [`PALETTE`] (`class_id % 16`; the void class is black).
//! Instances take the low 24 bits of `splitmix64(class_id << 32 | instance_id)`
//! as `0xRRGGBB`, so a (class, instance) pair looks the same in every frame
//! and in every run. Distinct instances can collide, with probability
//! roughly `n² / 2²⁵` for `n` instances.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::panoptic::{PanopticMap, NO_INSTANCE};
use crate::synth::rng::splitmix64;
use crate::taxonomy::{ClassKind, ClassTaxonomy};

/// Class colours, indexed by `class_id % 16`.
pub const PALETTE: [[u8; 3]; 16] = [
    [0, 0, 0],
    [128, 64, 128],
    [244, 35, 232],
    [70, 70, 70],
    [107, 142, 35],
    [70, 130, 180],
    [102, 102, 156],
    [190, 153, 153],
    [153, 153, 153],
    [250, 170, 30],
    [220, 220, 0],
    [220, 20, 60],
    [255, 0, 0],
    [0, 0, 142],
    [0, 0, 70],
    [0, 60, 100],
];

pub const VOID_COLOR: [u8; 3] = [0, 0, 0];

/// Packed 8-bit RGB, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        RgbImage {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

pub fn class_color(class_id: u32) -> [u8; 3] {
    PALETTE[(class_id % 16) as usize]
}

pub fn instance_color(class_id: u32, instance_id: u32) -> [u8; 3] {
    let mut s = ((class_id as u64) << 32) | instance_id as u64;
    let h = splitmix64(&mut s);
    [(h >> 16) as u8, (h >> 8) as u8, h as u8]
}

pub fn colorize(map: &PanopticMap, taxonomy: &ClassTaxonomy) -> Result<RgbImage> {
    let kinds = taxonomy.kind_table();
    let void = taxonomy.void_class_id();
    let (w, h) = map.dims();
    let mut img = RgbImage::new(w, h);
    for (i, (&c, &inst)) in map
        .classes()
        .values()
        .iter()
        .zip(map.instances().values())
        .enumerate()
    {
        let kind = kinds.get(c).ok_or(Error::UnknownClass(c))?;
        let rgb = match kind {
            _ if c == void => VOID_COLOR,
            ClassKind::Thing if inst != NO_INSTANCE => instance_color(c, inst),
            _ => class_color(c),
        };
        img.data[i * 3..i * 3 + 3].copy_from_slice(&rgb);
    }
    Ok(img)
}

/// Binary P6 bytes: `"P6\n{w} {h}\n255\n"` followed by the pixels.
pub fn encode_ppm(image: &RgbImage) -> Result<Vec<u8>> {
    if image.width == 0 || image.height == 0 {
        return Err(Error::EmptyGrid {
            width: image.width,
            height: image.height,
        });
    }
    if image.data.len() != image.width * image.height * 3 {
        return Err(Error::GridLength {
            width: image.width,
            height: image.height,
            expected: image.width * image.height * 3,
            found: image.data.len(),
        });
    }
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.data);
    Ok(out)
}

pub fn write_ppm(image: &RgbImage, path: &Path) -> Result<()> {
    write_atomic(path, &encode_ppm(image)?)
}

/// File name used for frame `t` of a rendered sequence.
pub fn frame_file_name(t: usize) -> String {
    format!("frame_{t:05}.ppm")
}
