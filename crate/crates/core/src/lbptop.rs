//! LBP-TOP: uniform local binary pattern histograms on the three orthogonal
//! planes (XY, XT, YT) of a video volume, computed per spatial block.
//!
//! Sampling convention, shared by every plane: neighbor `k` sits at angle
//! `2πk/8` on an ellipse with the plane's two radii. The offset along the
//! plane's horizontal axis is `r_h·cos θ` and along its vertical axis
//! `-r_v·sin θ` (counter-clockwise with the vertical axis pointing down).
//! Horizontal/vertical axes are `x/y` for XY, `x/t` for XT and `y/t` for YT.
//! Off-lattice samples are bilinearly interpolated; bit `k` is set when the
//! sample is `>=` the center. Centers whose sampling ellipse leaves the
//! volume are skipped.

use crate::data::VideoVolume;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Number of circular neighbors per plane.
pub const NEIGHBORS: usize = 8;
/// Bins of the uniform mapping for 8 neighbors (58 uniform codes + 1 shared bin).
pub const BINS: usize = 59;
/// Planes per block.
pub const PLANES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    Xy,
    Xt,
    Yt,
}

impl Plane {
    pub const ALL: [Plane; PLANES] = [Plane::Xy, Plane::Xt, Plane::Yt];
}

/// Maps 8-bit LBP codes to the 59 uniform-pattern bins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMapping {
    table: [u8; 256],
}

/// Circular 0↔1 transitions in an 8-bit code.
pub fn transitions(code: u8) -> u32 {
    (code ^ code.rotate_right(1)).count_ones()
}

impl UniformMapping {
    /// Uniform codes get bins 0..58 in ascending code order; everything else shares bin 58.
    pub fn build() -> Self {
        let mut table = [(BINS - 1) as u8; 256];
        let mut next = 0u8;
        for code in 0..=255u8 {
            if transitions(code) <= 2 {
                table[code as usize] = next;
                next += 1;
            }
        }
        debug_assert_eq!(next as usize, BINS - 1);
        UniformMapping { table }
    }

    #[inline]
    pub fn bin(&self, code: u8) -> usize {
        self.table[code as usize] as usize
    }

    pub fn table(&self) -> &[u8; 256] {
        &self.table
    }
}

impl Default for UniformMapping {
    fn default() -> Self {
        Self::build()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LbpTopParams {
    pub radius_x: usize,
    pub radius_y: usize,
    pub radius_t: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub normalize_histograms: bool,
}

impl Default for LbpTopParams {
    fn default() -> Self {
        LbpTopParams {
            radius_x: 1,
            radius_y: 1,
            radius_t: 1,
            grid_rows: 4,
            grid_cols: 4,
            normalize_histograms: true,
        }
    }
}

impl LbpTopParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius_x == 0 || self.radius_y == 0 || self.radius_t == 0 {
            return Err(Error::InvalidParameter("LBP-TOP radii must be >= 1".into()));
        }
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return Err(Error::InvalidParameter("block grid must be at least 1x1".into()));
        }
        Ok(())
    }

    pub fn descriptor_len(&self) -> usize {
        self.grid_rows * self.grid_cols * PLANES * BINS
    }

    /// (horizontal, vertical) radii of a plane.
    pub fn plane_radii(&self, plane: Plane) -> (usize, usize) {
        match plane {
            Plane::Xy => (self.radius_x, self.radius_y),
            Plane::Xt => (self.radius_x, self.radius_t),
            Plane::Yt => (self.radius_y, self.radius_t),
        }
    }
}

/// Offset of neighbor `k` on an ellipse with radii `(rh, rv)`, snapped to
/// the lattice when within 1e-9 of an integer.
pub fn neighbor_offset(k: usize, rh: usize, rv: usize) -> (f64, f64) {
    let theta = 2.0 * std::f64::consts::PI * k as f64 / NEIGHBORS as f64;
    let snap = |v: f64| if (v - v.round()).abs() < 1e-9 { v.round() } else { v };
    (snap(rh as f64 * theta.cos()), snap(-(rv as f64) * theta.sin()))
}

/// Bilinear weights `[w00, w01, w10, w11]` for fractional parts `(fh, fv)`,
/// where the first index is vertical.
#[inline]
pub fn bilinear_weights(fh: f64, fv: f64) -> [f64; 4] {
    [(1.0 - fh) * (1.0 - fv), fh * (1.0 - fv), (1.0 - fh) * fv, fh * fv]
}

/// Half-open ranges partitioning `len` into `parts` nearly equal pieces;
/// the first `len % parts` pieces get one extra element.
pub fn partition(len: usize, parts: usize) -> Vec<(usize, usize)> {
    let base = len / parts;
    let extra = len % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let size = base + usize::from(i < extra);
            let range = (start, start + size);
            start += size;
            range
        })
        .collect()
}

/// The descriptor vector, laid out block-major (row-major blocks), then plane, then bin.
#[derive(Clone, Debug, PartialEq)]
pub struct LbpTopDescriptor {
    pub values: Vec<f64>,
}

/// One sampling tap: a flat index offset and its weight.
#[derive(Clone, Copy, Debug)]
struct Tap {
    offset: isize,
    weight: f64,
}

/// Precomputed neighbor taps for one plane of one volume shape.
#[derive(Clone, Debug)]
enum Neighbor {
    Lattice(isize),
    Bilinear([Tap; 4]),
}

struct PlaneKernel {
    neighbors: [Neighbor; NEIGHBORS],
}

impl PlaneKernel {
    fn new(plane: Plane, params: &LbpTopParams, volume: &VideoVolume) -> Self {
        let w = volume.width() as isize;
        let hw = (volume.height() * volume.width()) as isize;
        let (h_stride, v_stride) = match plane {
            Plane::Xy => (1, w),
            Plane::Xt => (1, hw),
            Plane::Yt => (w, hw),
        };
        let (rh, rv) = params.plane_radii(plane);
        let neighbors = std::array::from_fn(|k| {
            let (dh, dv) = neighbor_offset(k, rh, rv);
            if dh.fract() == 0.0 && dv.fract() == 0.0 {
                Neighbor::Lattice(dh as isize * h_stride + dv as isize * v_stride)
            } else {
                let (h0, v0) = (dh.floor(), dv.floor());
                let weights = bilinear_weights(dh - h0, dv - v0);
                let (h0, v0) = (h0 as isize, v0 as isize);
                let corners = [(v0, h0), (v0, h0 + 1), (v0 + 1, h0), (v0 + 1, h0 + 1)];
                Neighbor::Bilinear(std::array::from_fn(|c| Tap {
                    offset: corners[c].0 * v_stride + corners[c].1 * h_stride,
                    weight: weights[c],
                }))
            }
        });
        PlaneKernel { neighbors }
    }

    #[inline]
    fn code(&self, data: &[f64], center: usize) -> u8 {
        let c = data[center];
        let mut code = 0u8;
        for (k, n) in self.neighbors.iter().enumerate() {
            let sample = match n {
                Neighbor::Lattice(off) => data[(center as isize + off) as usize],
                Neighbor::Bilinear(taps) => {
                    let at = |t: &Tap| data[(center as isize + t.offset) as usize];
                    taps[0].weight * at(&taps[0])
                        + taps[1].weight * at(&taps[1])
                        + taps[2].weight * at(&taps[2])
                        + taps[3].weight * at(&taps[3])
                }
            };
            if sample >= c {
                code |= 1 << k;
            }
        }
        code
    }
}

/// Inclusive-exclusive range of valid centers along an axis of `extent`
/// for margin `r`, intersected with `[lo, hi)`.
fn valid_range(lo: usize, hi: usize, extent: usize, r: usize) -> (usize, usize) {
    let start = lo.max(r);
    let end = hi.min(extent.saturating_sub(r));
    (start, end.max(start))
}

fn check_inputs(volume: &VideoVolume, params: &LbpTopParams) -> Result<()> {
    params.validate()?;
    if volume.as_slice().is_empty() {
        return Err(Error::InvalidVolume("empty volume".into()));
    }
    if params.grid_rows > volume.height() || params.grid_cols > volume.width() {
        return Err(Error::GridLargerThanFrame {
            rows: params.grid_rows,
            cols: params.grid_cols,
            height: volume.height(),
            width: volume.width(),
        });
    }
    Ok(())
}

/// Raw (unnormalized) bin counts in descriptor layout.
pub fn lbp_top_histograms(volume: &VideoVolume, params: &LbpTopParams) -> Result<Vec<u64>> {
    lbp_top_histograms_with(volume, params, Execution::default())
}

pub fn lbp_top_histograms_with(
    volume: &VideoVolume,
    params: &LbpTopParams,
    exec: Execution,
) -> Result<Vec<u64>> {
    check_inputs(volume, params)?;
    let mapping = UniformMapping::build();
    let kernels: Vec<PlaneKernel> = Plane::ALL.iter().map(|p| PlaneKernel::new(*p, params, volume)).collect();
    let row_blocks = partition(volume.height(), params.grid_rows);
    let col_blocks = partition(volume.width(), params.grid_cols);
    let (t_len, h, w) = (volume.frames(), volume.height(), volume.width());
    let data = volume.as_slice();

    let jobs = params.grid_rows * params.grid_cols * PLANES;
    let hists = exec.map(jobs, |job| {
        let block = job / PLANES;
        let plane = Plane::ALL[job % PLANES];
        let (y_lo, y_hi) = row_blocks[block / params.grid_cols];
        let (x_lo, x_hi) = col_blocks[block % params.grid_cols];
        // (t, y, x) center ranges per plane
        let (t_range, y_range, x_range) = match plane {
            Plane::Xy => (
                (0, t_len),
                valid_range(y_lo, y_hi, h, params.radius_y),
                valid_range(x_lo, x_hi, w, params.radius_x),
            ),
            Plane::Xt => (
                valid_range(0, t_len, t_len, params.radius_t),
                (y_lo, y_hi),
                valid_range(x_lo, x_hi, w, params.radius_x),
            ),
            Plane::Yt => (
                valid_range(0, t_len, t_len, params.radius_t),
                valid_range(y_lo, y_hi, h, params.radius_y),
                (x_lo, x_hi),
            ),
        };
        let kernel = &kernels[job % PLANES];
        let mut hist = [0u64; BINS];
        for t in t_range.0..t_range.1 {
            for y in y_range.0..y_range.1 {
                let row = (t * h + y) * w;
                for x in x_range.0..x_range.1 {
                    hist[mapping.bin(kernel.code(data, row + x))] += 1;
                }
            }
        }
        hist
    });
    Ok(hists.into_iter().flatten().collect())
}

/// Computes the LBP-TOP descriptor of a clip.
pub fn lbp_top_descriptor(volume: &VideoVolume, params: &LbpTopParams) -> Result<LbpTopDescriptor> {
    lbp_top_descriptor_with(volume, params, Execution::default())
}

pub fn lbp_top_descriptor_with(
    volume: &VideoVolume,
    params: &LbpTopParams,
    exec: Execution,
) -> Result<LbpTopDescriptor> {
    let counts = lbp_top_histograms_with(volume, params, exec)?;
    Ok(LbpTopDescriptor {
        values: counts_to_descriptor(&counts, params.normalize_histograms),
    })
}

/// Converts raw counts to descriptor values, L1-normalizing each 59-bin
/// segment when requested. Empty segments stay zero.
pub fn counts_to_descriptor(counts: &[u64], normalize: bool) -> Vec<f64> {
    counts
        .chunks(BINS)
        .flat_map(|seg| {
            let total: u64 = seg.iter().sum();
            seg.iter().map(move |&c| {
                if normalize && total > 0 {
                    c as f64 / total as f64
                } else {
                    c as f64
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping_edge_codes() {
        let m = UniformMapping::build();
        assert_eq!(m.bin(0b0000_0000), 0);
        assert_eq!(m.bin(0b0101_0101), 58);
        assert_eq!(m.bin(0b1111_1111), 57);
        let uniform: std::collections::BTreeSet<usize> =
            (0..=255u8).map(|c| m.bin(c)).filter(|&b| b < 58).collect();
        assert_eq!(uniform.len(), 58);
    }

    #[test]
    fn uniform_count_by_enumeration() {
        // count codes with <= 2 circular transitions by walking the bits directly
        let count = (0..256u32)
            .filter(|&c| {
                (0..8)
                    .filter(|&i| ((c >> i) & 1) != ((c >> ((i + 1) % 8)) & 1))
                    .count()
                    <= 2
            })
            .count();
        assert_eq!(count, 58);
    }

    #[test]
    fn partition_is_even() {
        assert_eq!(partition(10, 4), vec![(0, 3), (3, 6), (6, 8), (8, 10)]);
        assert_eq!(partition(8, 4), vec![(0, 2), (2, 4), (4, 6), (6, 8)]);
    }

    #[test]
    fn offsets_snap_to_lattice() {
        assert_eq!(neighbor_offset(0, 1, 1), (1.0, 0.0));
        assert_eq!(neighbor_offset(2, 1, 1), (0.0, -1.0));
        assert_eq!(neighbor_offset(4, 2, 3), (-2.0, 0.0));
        let (dh, dv) = neighbor_offset(1, 1, 1);
        assert!((dh - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((dv + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn constant_volume_single_code() {
        let v = VideoVolume::from_fn(5, 12, 12, |_, _, _| 128.0).unwrap();
        let d = lbp_top_descriptor(&v, &LbpTopParams::default()).unwrap();
        let bin255 = UniformMapping::build().bin(255);
        for seg in d.values.chunks(BINS) {
            assert_eq!(seg[bin255], 1.0);
            assert!((seg.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        let v = VideoVolume::from_fn(3, 3, 8, |_, _, _| 0.0).unwrap();
        assert!(matches!(
            lbp_top_descriptor(&v, &LbpTopParams::default()),
            Err(Error::GridLargerThanFrame { .. })
        ));
        let params = LbpTopParams {
            radius_t: 0,
            ..Default::default()
        };
        assert!(lbp_top_descriptor(&v, &params).is_err());
    }

    #[test]
    fn short_clip_uses_single_temporal_slice() {
        let v = VideoVolume::from_fn(3, 60, 60, |t, y, x| ((t * 31 + y * 7 + x * 13) % 256) as f64).unwrap();
        let params = LbpTopParams::default();
        let counts = lbp_top_histograms(&v, &params).unwrap();
        assert_eq!(counts.len(), 2832);
        // first block spans rows/cols 0..15; valid x and y run 1..15
        let block0: Vec<u64> = counts[..3 * BINS].chunks(BINS).map(|s| s.iter().sum()).collect();
        assert_eq!(block0, vec![3 * 14 * 14, 15 * 14, 14 * 15]);
    }

    #[test]
    fn parallel_matches_sequential() {
        let v = VideoVolume::from_fn(6, 20, 17, |t, y, x| ((t * 97 + y * 31 + x * 57) % 251) as f64).unwrap();
        let p = LbpTopParams::default();
        assert_eq!(
            lbp_top_histograms_with(&v, &p, Execution::Sequential).unwrap(),
            lbp_top_histograms_with(&v, &p, Execution::Parallel).unwrap()
        );
    }
}
