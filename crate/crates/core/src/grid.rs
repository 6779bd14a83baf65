//! Row-major raster containers.
//!
//! Both grids use a top-left origin with `x` growing rightward and `y`
//! growing downward; the value of pixel `(x, y)` lives at `y * width + x`.

use crate::error::{Error, Result};

/// Integer pixel coordinate.
///
/// Ordered row-major (by `y`, then `x`) so that sorted pixel sets iterate in
/// the same order as grid storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pixel {
    pub y: u32,
    pub x: u32,
}

impl Pixel {
    pub const fn new(x: u32, y: u32) -> Self {
        Pixel { y, x }
    }
}

fn check_dims(width: usize, height: usize) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyGrid { width, height });
    }
    width.checked_mul(height).ok_or(Error::Overflow {
        what: "grid",
        width: width as u64,
        height: height as u64,
    })
}

/// Grid of non-negative integer labels (class ids or instance ids).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelGrid {
    width: usize,
    height: usize,
    values: Vec<u32>,
}

impl LabelGrid {
    /// Grid filled with a single value.
    pub fn filled(width: usize, height: usize, value: u32) -> Result<Self> {
        let len = check_dims(width, height)?;
        Ok(LabelGrid {
            width,
            height,
            values: vec![value; len],
        })
    }

    pub fn from_vec(width: usize, height: usize, values: Vec<u32>) -> Result<Self> {
        let len = check_dims(width, height)?;
        if values.len() != len {
            return Err(Error::GridLength {
                width,
                height,
                expected: len,
                found: values.len(),
            });
        }
        Ok(LabelGrid {
            width,
            height,
            values,
        })
    }

    /// Build from rows given top to bottom. All rows must have equal length.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(width * height);
        for row in rows {
            values.extend_from_slice(row.as_ref());
        }
        Self::from_vec(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [u32] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.values[self.index(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u32) {
        let i = self.index(x, y);
        self.values[i] = value;
    }

    #[inline]
    pub fn pixel_at(&self, index: usize) -> Pixel {
        Pixel::new((index % self.width) as u32, (index / self.width) as u32)
    }

    /// Checks that `other` has the same dimensions.
    pub fn ensure_same_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::DimensionMismatch {
                expected_width: width,
                expected_height: height,
                found_width: self.width,
                found_height: self.height,
            });
        }
        Ok(())
    }

    /// Applies `f` to every value.
    pub fn map(&self, mut f: impl FnMut(u32) -> u32) -> LabelGrid {
        LabelGrid {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Per-pixel displacement in fractional pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlowVector {
    pub dx: f32,
    pub dy: f32,
}

impl FlowVector {
    pub const ZERO: FlowVector = FlowVector { dx: 0.0, dy: 0.0 };

    pub const fn new(dx: f32, dy: f32) -> Self {
        FlowVector { dx, dy }
    }

    pub fn norm_squared(self) -> f32 {
        self.dx * self.dx + self.dy * self.dy
    }

    pub fn is_finite(self) -> bool {
        self.dx.is_finite() && self.dy.is_finite()
    }
}

/// Dense optical flow field. The vector at `p` says where the content at
/// `p` moves to: `p + flow(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    vectors: Vec<FlowVector>,
}

impl FlowField {
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::constant(width, height, FlowVector::ZERO)
    }

    pub fn constant(width: usize, height: usize, v: FlowVector) -> Result<Self> {
        let len = check_dims(width, height)?;
        Self::from_vec(width, height, vec![v; len])
    }

    pub fn from_vec(width: usize, height: usize, vectors: Vec<FlowVector>) -> Result<Self> {
        let len = check_dims(width, height)?;
        if vectors.len() != len {
            return Err(Error::GridLength {
                width,
                height,
                expected: len,
                found: vectors.len(),
            });
        }
        if let Some(i) = vectors.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: i % width,
                y: i / width,
            });
        }
        Ok(FlowField {
            width,
            height,
            vectors,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn vectors(&self) -> &[FlowVector] {
        &self.vectors
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> FlowVector {
        self.vectors[y * self.width + x]
    }

    /// Sets one vector. Non-finite components are rejected.
    pub fn set(&mut self, x: usize, y: usize, v: FlowVector) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::NonFinite { x, y });
        }
        self.vectors[y * self.width + x] = v;
        Ok(())
    }

    pub fn ensure_same_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::DimensionMismatch {
                expected_width: width,
                expected_height: height,
                found_width: self.width,
                found_height: self.height,
            });
        }
        Ok(())
    }
}
