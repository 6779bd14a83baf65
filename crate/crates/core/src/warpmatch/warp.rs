use crate::error::Result;
use crate::grid::{FlowField, FlowVector, LabelGrid};
use crate::panoptic::NO_INSTANCE;

/// Nearest-neighbour source index for target `(x, y)` displaced by `v`, or
/// `None` when the rounded position leaves the grid.
#[inline]
fn sample_index(x: usize, y: usize, v: FlowVector, width: usize, height: usize) -> Option<usize> {
    let sx = (x as f64 + v.dx as f64 + 0.5).floor();
    let sy = (y as f64 + v.dy as f64 + 0.5).floor();
    if sx < 0.0 || sy < 0.0 || sx >= width as f64 || sy >= height as f64 {
        return None;
    }
    Some(sy as usize * width + sx as usize)
}

/// Pulls frame-`t` labels back onto the frame `t-1` grid.
///
/// `flow_prev_to_curr` lives on the `t-1` grid: content at `p` in `t-1`
/// moves to `p + flow(p)` in `t`, so target `p` samples the `t` grids at
/// `round(p + flow(p))`. Positions outside the image give instance 0 and
/// `void_class`.
pub fn warp_backward(
    inst_t: &LabelGrid,
    class_t: &LabelGrid,
    flow_prev_to_curr: &FlowField,
    void_class: u32,
) -> Result<(LabelGrid, LabelGrid)> {
    let (width, height) = inst_t.dims();
    class_t.ensure_same_dims(width, height)?;
    flow_prev_to_curr.ensure_same_dims(width, height)?;

    let mut inst = Vec::with_capacity(width * height);
    let mut class = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            match sample_index(x, y, flow_prev_to_curr.get(x, y), width, height) {
                Some(i) => {
                    inst.push(inst_t.values()[i]);
                    class.push(class_t.values()[i]);
                }
                None => {
                    inst.push(NO_INSTANCE);
                    class.push(void_class);
                }
            }
        }
    }
    Ok((
        LabelGrid::from_vec(width, height, inst)?,
        LabelGrid::from_vec(width, height, class)?,
    ))
}

/// Approximate inverse of a flow field by forward splatting.
///
/// Every source pixel `p` votes `-flow(p)` at `round(p + flow(p))`. When
/// several votes land on one target the shortest displacement wins (first
/// in row-major order on exact ties). Targets nobody votes for get zero.
pub fn invert_flow(flow: &FlowField) -> FlowField {
    let (width, height) = flow.dims();
    let mut out = vec![FlowVector::ZERO; width * height];
    let mut best: Vec<Option<f32>> = vec![None; width * height];
    for y in 0..height {
        for x in 0..width {
            let v = flow.get(x, y);
            let Some(t) = sample_index(x, y, v, width, height) else {
                continue;
            };
            let mag = v.norm_squared();
            if best[t].is_none_or(|b| mag < b) {
                best[t] = Some(mag);
                // + 0.0 keeps zero votes from turning into -0.0
                out[t] = FlowVector::new(-v.dx + 0.0, -v.dy + 0.0);
            }
        }
    }
    FlowField::from_vec(width, height, out).expect("same dimensions, finite values")
}
