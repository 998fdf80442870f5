//! Measure-theoretic boundary representative: the midpoints of grid edges
//! separating a true cell from a false cell. Symmetric in the set and its
//! complement by construction, and empty exactly for the empty set and the
//! full grid (the border is treated as lying in the complement's far
//! field, not as a transition).

use crate::grid::{BinarySet, Grid};

#[derive(Debug, Clone)]
pub struct BoundarySet {
    pub grid: Grid,
    /// Physical coordinates of edge midpoints.
    pub points: Vec<(f64, f64)>,
}

impl BoundarySet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn boundary(e: &BinarySet) -> BoundarySet {
    let g = e.grid;
    let mut points = Vec::new();
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let a = e.get(ix, iy);
            if ix + 1 < g.nx && a != e.get(ix + 1, iy) {
                let (x, y) = g.center(ix, iy);
                points.push((x + g.h / 2.0, y));
            }
            if iy + 1 < g.ny && a != e.get(ix, iy + 1) {
                let (x, y) = g.center(ix, iy);
                points.push((x, y + g.h / 2.0));
            }
        }
    }
    BoundarySet { grid: g, points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BinarySet, Grid};

    #[test]
    fn full_grid_has_empty_boundary() {
        let g = Grid::centered(16, 2.0);
        assert!(boundary(&BinarySet::full(g)).is_empty());
        assert!(boundary(&BinarySet::empty(g)).is_empty());
    }

    #[test]
    fn single_cell_has_four_midpoints() {
        let g = Grid::centered(9, 1.0);
        let mut e = BinarySet::empty(g);
        e.mask[g.idx(4, 4)] = true;
        let b = boundary(&e);
        assert_eq!(b.points.len(), 4);
        let (cx, cy) = g.center(4, 4);
        for (x, y) in b.points {
            let d = ((x - cx).abs() + (y - cy).abs() - g.h / 2.0).abs();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn boundary_symmetric_under_complement() {
        let g = Grid::centered(24, 2.0);
        let mut e = BinarySet::disk(g, (0.2, -0.1), 0.55);
        // poke some holes to make it irregular
        e.mask[g.idx(12, 12)] = false;
        e.mask[g.idx(4, 18)] = true;
        let mut a = boundary(&e).points;
        let mut b = boundary(&e.complement()).points;
        let key = |p: &(f64, f64)| ((p.0 * 1e9) as i64, (p.1 * 1e9) as i64);
        a.sort_by_key(key);
        b.sort_by_key(key);
        assert_eq!(a, b);
    }
}
