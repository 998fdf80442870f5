//! Convex hull of a mask, rasterized back onto the grid.
//!
//! Hull vertices are true-cell centers (integer lattice points), so
//! membership tests are exact integer cross products and the rasterization
//! is idempotent: re-hulling the rasterized hull reproduces the same
//! polygon and therefore the same mask.

use crate::error::{Error, Result};
use crate::grid::BinarySet;

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew monotone chain; returns hull vertices in counter-clockwise
/// order, without repetition. Collinear input collapses to 1–2 points.
fn hull_of(points: &mut Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    points.sort();
    points.dedup();
    let n = points.len();
    if n <= 2 {
        return points.clone();
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in points.iter() {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.is_empty() {
        // fully collinear
        let mut ends = vec![*points.first().unwrap(), *points.last().unwrap()];
        ends.dedup();
        return ends;
    }
    lower
}

pub fn convex_hull(e: &BinarySet) -> Result<BinarySet> {
    if e.is_empty() {
        return Err(Error::EmptyInput("convex hull of the empty set"));
    }
    let g = e.grid;
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            if e.get(ix, iy) {
                pts.push((ix as i64, iy as i64));
            }
        }
    }
    let hull = hull_of(&mut pts);
    let mut out = BinarySet::empty(g);
    if hull.len() <= 2 {
        // degenerate hull: thicken the segment to the cells whose centers
        // lie within half a spacing of it, which is stable under re-hulling
        // (the hull of those centers stays inside the same tube).
        let a = hull[0];
        let b = *hull.last().unwrap();
        let (ax, ay) = (a.0 as f64, a.1 as f64);
        let (bx, by) = (b.0 as f64, b.1 as f64);
        let len2 = (bx - ax).powi(2) + (by - ay).powi(2);
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let (px, py) = (ix as f64, iy as f64);
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / len2).clamp(0.0, 1.0)
                };
                let (qx, qy) = (ax + t * (bx - ax), ay + t * (by - ay));
                if (px - qx).powi(2) + (py - qy).powi(2) <= 0.25 + 1e-12 {
                    out.mask[g.idx(ix, iy)] = true;
                }
            }
        }
        return Ok(out);
    }
    // per-row exact integer scan: each hull edge restricts ix to a
    // half-line on the given row
    let m = hull.len();
    for iy in 0..g.ny {
        let y = iy as i64;
        let mut lo: i64 = 0;
        let mut hi: i64 = g.nx as i64 - 1;
        let mut feasible = true;
        for k in 0..m {
            let p = hull[k];
            let q = hull[(k + 1) % m];
            // inside: cross(p, q, (x, y)) = (q.0-p.0)(y-p.1) - (q.1-p.1)(x-p.0) >= 0,
            // i.e. c0 - a·x >= 0 with the constants below
            let a = q.1 - p.1;
            let c0 = (q.0 - p.0) * (y - p.1) + (q.1 - p.1) * p.0;
            if a == 0 {
                if c0 < 0 {
                    feasible = false;
                    break;
                }
            } else if a > 0 {
                hi = hi.min(c0.div_euclid(a)); // x <= floor(c0/a)
            } else {
                let (na, nc) = (-a, -c0);
                lo = lo.max((nc + na - 1).div_euclid(na)); // x >= ceil(nc/na)
            }
        }
        if !feasible || lo > hi {
            continue;
        }
        for ix in lo..=hi {
            out.mask[g.idx(ix as usize, iy)] = true;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BinarySet, Grid};
    use crate::perimeter::{perimeter, PerimeterScheme};

    #[test]
    fn rectangle_is_its_own_hull() {
        let g = Grid::centered(64, 2.0);
        let e = BinarySet::rect(g, -0.5, -0.25, 0.5, 0.25);
        let h = convex_hull(&e).unwrap();
        assert_eq!(h, e);
    }

    #[test]
    fn idempotent_on_disks() {
        let g = Grid::centered(96, 2.0);
        let e = BinarySet::disk(g, (0.05, -0.1), 0.6);
        let h1 = convex_hull(&e).unwrap();
        let h2 = convex_hull(&h1).unwrap();
        assert_eq!(h1, h2);
        assert!(e.is_subset_of(&h1));
    }

    #[test]
    fn two_distant_cells_give_thickened_segment() {
        let g = Grid::centered(48, 2.0);
        let mut e = BinarySet::empty(g);
        e.mask[g.idx(5, 7)] = true;
        e.mask[g.idx(40, 30)] = true;
        let h = convex_hull(&e).unwrap();
        assert!(e.is_subset_of(&h));
        assert!(h.count() >= 36); // roughly one cell per step along the segment
        let h2 = convex_hull(&h).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn hull_of_square_plus_far_ball_has_larger_perimeter() {
        let g = Grid::centered(256, 3.0);
        let s = BinarySet::rect(g, -0.5, -0.5, 0.5, 0.5);
        let b = BinarySet::disk(g, (-1.1, -1.1), 0.05);
        let e = s.union(&b);
        let h = convex_hull(&e).unwrap();
        assert!(e.is_subset_of(&h));
        assert!(h.count() > e.count());
        let scheme = PerimeterScheme::default_16();
        assert!(perimeter(&h, &scheme) > perimeter(&e, &scheme));
    }
}
