//! Inner/outer density profiles at boundary points: per-radius minima of
//! |E ∩ B(x,r)| / |B(x,r)| and |B(x,r) \ E| / |B(x,r)| over x ∈ ∂E, with
//! the ball measured by the same cell counting as the set (so the two
//! ratios sum to one pointwise).

use crate::boundary::boundary;
use crate::error::{Error, Result};
use crate::grid::BinarySet;

#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub radii: Vec<f64>,
    pub inner_min: Vec<f64>,
    pub outer_min: Vec<f64>,
}

pub fn density_profile(e: &BinarySet, radii: &[f64]) -> Result<DensityProfile> {
    let b = boundary(e);
    density_profile_at(e, &b.points, radii)
}

/// Same as [`density_profile`] but over a caller-supplied set of boundary
/// points (used to restrict to points away from a reference boundary).
pub fn density_profile_at(
    e: &BinarySet,
    points: &[(f64, f64)],
    radii: &[f64],
) -> Result<DensityProfile> {
    if e.is_empty() || e.is_full() {
        return Err(Error::EmptyInput("density profile needs a set with boundary"));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("density profile over no boundary points"));
    }
    let g = e.grid;
    for &r in radii {
        if !(r > 0.0) || r > g.min_extent() / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "density radius {r} outside (0, extent/2]"
            )));
        }
    }
    // row prefix sums of the mask
    let mut prefix = vec![0u32; (g.nx + 1) * g.ny];
    for iy in 0..g.ny {
        let row = iy * g.nx;
        let prow = iy * (g.nx + 1);
        for ix in 0..g.nx {
            prefix[prow + ix + 1] = prefix[prow + ix] + if e.mask[row + ix] { 1 } else { 0 };
        }
    }
    let row_count = |iy: usize, ix0: i64, ix1: i64| -> (u64, u64) {
        // cells in [ix0, ix1] clipped; returns (true cells, total cells)
        let lo = ix0.max(0) as usize;
        let hi = ix1.min(g.nx as i64 - 1);
        if hi < lo as i64 {
            return (0, 0);
        }
        let hi = hi as usize;
        let prow = iy * (g.nx + 1);
        (
            (prefix[prow + hi + 1] - prefix[prow + lo]) as u64,
            (hi - lo + 1) as u64,
        )
    };

    let mut inner_min = vec![f64::INFINITY; radii.len()];
    let mut outer_min = vec![f64::INFINITY; radii.len()];
    for &(px, py) in points {
        for (k, &r) in radii.iter().enumerate() {
            let mut t_in = 0u64;
            let mut t_all = 0u64;
            let iy0 = ((py - r - g.origin.1) / g.h).ceil() as i64;
            let iy1 = ((py + r - g.origin.1) / g.h).floor() as i64;
            for iy in iy0.max(0)..=iy1.min(g.ny as i64 - 1) {
                let cy = g.origin.1 + iy as f64 * g.h;
                let dy = cy - py;
                let span2 = r * r - dy * dy;
                if span2 < 0.0 {
                    continue;
                }
                let dx = span2.sqrt();
                let ix0 = ((px - dx - g.origin.0) / g.h).ceil() as i64;
                let ix1 = ((px + dx - g.origin.0) / g.h).floor() as i64;
                let (ti, ta) = row_count(iy as usize, ix0, ix1);
                t_in += ti;
                t_all += ta;
            }
            if t_all == 0 {
                continue;
            }
            let inner = t_in as f64 / t_all as f64;
            inner_min[k] = inner_min[k].min(inner);
            outer_min[k] = outer_min[k].min(1.0 - inner);
        }
    }
    Ok(DensityProfile {
        radii: radii.to_vec(),
        inner_min,
        outer_min,
    })
}
