//! The shared discrete domain: a uniform pixel grid standing in for a
//! bounded patch of the plane, plus scalar fields and binary sets on it.
//!
//! Conventions used throughout the crate:
//! - cell (ix, iy) has its center at `origin + (ix·h, iy·h)`, row-major
//!   storage with index `iy·nx + ix`;
//! - a set's measure is `h²·(number of true cells)`;
//! - the grid border belongs to the complement of every set of interest,
//!   i.e. inputs are padded so they never touch the border.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    /// Cell spacing in physical length units.
    pub h: f64,
    /// Physical coordinates of the center of cell (0, 0).
    pub origin: (f64, f64),
}

impl Grid {
    pub fn new(nx: usize, ny: usize, h: f64, origin: (f64, f64)) -> Result<Grid> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("cell spacing h = {h} must be positive")));
        }
        Ok(Grid { nx, ny, h, origin })
    }

    /// Square grid of `n` cells per side covering `[-extent/2, extent/2]²`
    /// centered at the physical origin.
    pub fn centered(n: usize, extent: f64) -> Grid {
        let h = extent / n as f64;
        let o = -extent / 2.0 + h / 2.0;
        Grid { nx: n, ny: n, h, origin: (o, o) }
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.origin.0 + ix as f64 * self.h, self.origin.1 + iy as f64 * self.h)
    }

    #[inline]
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Measure of one cell.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Physical bounding box `(xmin, ymin, xmax, ymax)` including the
    /// half-cell skirt around the outermost centers.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.origin.0 - self.h / 2.0,
            self.origin.1 - self.h / 2.0,
            self.origin.0 + (self.nx as f64 - 0.5) * self.h,
            self.origin.1 + (self.ny as f64 - 0.5) * self.h,
        )
    }

    /// Shorter physical side length.
    pub fn min_extent(&self) -> f64 {
        (self.nx.min(self.ny) as f64) * self.h
    }

    /// Whether the closed disk B(c, r) lies inside the grid.
    pub fn contains_disk(&self, c: (f64, f64), r: f64) -> bool {
        let (x0, y0, x1, y1) = self.bounds();
        c.0 - r >= x0 && c.1 - r >= y0 && c.0 + r <= x1 && c.1 + r <= y1
    }
}

/// Real-valued function sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> ScalarField {
        ScalarField { grid, values: vec![0.0; grid.cell_count()] }
    }

    pub fn constant(grid: Grid, c: f64) -> ScalarField {
        ScalarField { grid, values: vec![c; grid.cell_count()] }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> ScalarField {
        let mut values = Vec::with_capacity(grid.cell_count());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let (x, y) = grid.center(ix, iy);
                values.push(f(x, y));
            }
        }
        ScalarField { grid, values }
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.idx(ix, iy)]
    }

    /// Value at the cell containing the physical point, if inside the grid.
    pub fn at_point(&self, x: f64, y: f64) -> Option<f64> {
        let ix = ((x - self.grid.origin.0) / self.grid.h).round();
        let iy = ((y - self.grid.origin.1) / self.grid.h).round();
        if ix < 0.0 || iy < 0.0 || ix >= self.grid.nx as f64 || iy >= self.grid.ny as f64 {
            return None;
        }
        Some(self.values[self.grid.idx(ix as usize, iy as usize)])
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid L^p norm with cell-measure weighting: (Σ |v|^p h²)^{1/p}.
    pub fn norm_lp(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (s * self.grid.cell_area()).powf(1.0 / p)
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Σ a·b h².
    pub fn dot(&self, other: &ScalarField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        s * self.grid.cell_area()
    }

    pub fn zip_with(&self, other: &ScalarField, mut f: impl FnMut(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl FnMut(&f64) -> f64) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.iter().map(f).collect() }
    }

    /// Radius of the support: max |x| over cells with |v| > tol.
    pub fn support_radius(&self, tol: f64) -> f64 {
        let mut r: f64 = 0.0;
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                if self.get(ix, iy).abs() > tol {
                    let (x, y) = self.grid.center(ix, iy);
                    r = r.max((x * x + y * y).sqrt());
                }
            }
        }
        r
    }
}

/// Pixel mask: a measurable subset of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySet {
    pub grid: Grid,
    pub mask: Vec<bool>,
}

impl BinarySet {
    pub fn empty(grid: Grid) -> BinarySet {
        BinarySet { grid, mask: vec![false; grid.cell_count()] }
    }

    pub fn full(grid: Grid) -> BinarySet {
        BinarySet { grid, mask: vec![true; grid.cell_count()] }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> bool) -> BinarySet {
        let mut mask = Vec::with_capacity(grid.cell_count());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let (x, y) = grid.center(ix, iy);
                mask.push(f(x, y));
            }
        }
        BinarySet { grid, mask }
    }

    pub fn disk(grid: Grid, c: (f64, f64), r: f64) -> BinarySet {
        let r2 = r * r;
        Self::from_fn(grid, |x, y| {
            let (dx, dy) = (x - c.0, y - c.1);
            dx * dx + dy * dy <= r2
        })
    }

    /// Axis-aligned rectangle by half-open physical extents [x0,x1)×[y0,y1)
    /// on cell centers.
    pub fn rect(grid: Grid, x0: f64, y0: f64, x1: f64, y1: f64) -> BinarySet {
        Self::from_fn(grid, |x, y| x >= x0 && x < x1 && y >= y0 && y < y1)
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.mask[self.grid.idx(ix, iy)]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// |E| = h² · #cells.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn complement(&self) -> BinarySet {
        BinarySet { grid: self.grid, mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub fn union(&self, other: &BinarySet) -> BinarySet {
        debug_assert_eq!(self.grid, other.grid);
        BinarySet {
            grid: self.grid,
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| a | b).collect(),
        }
    }

    pub fn intersect(&self, other: &BinarySet) -> BinarySet {
        debug_assert_eq!(self.grid, other.grid);
        BinarySet {
            grid: self.grid,
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| a & b).collect(),
        }
    }

    pub fn minus(&self, other: &BinarySet) -> BinarySet {
        debug_assert_eq!(self.grid, other.grid);
        BinarySet {
            grid: self.grid,
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| a & !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &BinarySet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn sym_diff_count(&self, other: &BinarySet) -> usize {
        self.mask.iter().zip(&other.mask).filter(|(&a, &b)| a != b).count()
    }

    /// |E Δ F| in physical units.
    pub fn sym_diff_area(&self, other: &BinarySet) -> f64 {
        self.sym_diff_count(other) as f64 * self.grid.cell_area()
    }

    pub fn touches_border(&self) -> bool {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for ix in 0..nx {
            if self.get(ix, 0) || self.get(ix, ny - 1) {
                return true;
            }
        }
        for iy in 0..ny {
            if self.get(0, iy) || self.get(nx - 1, iy) {
                return true;
            }
        }
        false
    }

    /// Centers of the true cells.
    pub fn centers(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                if self.get(ix, iy) {
                    pts.push(self.grid.center(ix, iy));
                }
            }
        }
        pts
    }

    /// Erosion by `k` cells in the 4-neighborhood metric.
    pub fn erode(&self, k: usize) -> BinarySet {
        let mut cur = self.clone();
        for _ in 0..k {
            let mut next = cur.clone();
            let (nx, ny) = (self.grid.nx, self.grid.ny);
            for iy in 0..ny {
                for ix in 0..nx {
                    if !cur.get(ix, iy) {
                        continue;
                    }
                    let on_border = ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1;
                    let keep = !on_border
                        && cur.get(ix - 1, iy)
                        && cur.get(ix + 1, iy)
                        && cur.get(ix, iy - 1)
                        && cur.get(ix, iy + 1);
                    if !keep {
                        next.mask[self.grid.idx(ix, iy)] = false;
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Connected-component labels (4-neighborhood); label 0 = background.
    /// Returns (labels, number of components).
    pub fn components(&self) -> (Vec<u32>, usize) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut labels = vec![0u32; self.grid.cell_count()];
        let mut next = 0u32;
        let mut stack = Vec::new();
        for start in 0..self.grid.cell_count() {
            if !self.mask[start] || labels[start] != 0 {
                continue;
            }
            next += 1;
            labels[start] = next;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (ix, iy) = self.grid.coords(i);
                let mut visit = |jx: usize, jy: usize, stack: &mut Vec<usize>| {
                    let j = self.grid.idx(jx, jy);
                    if self.mask[j] && labels[j] == 0 {
                        labels[j] = next;
                        stack.push(j);
                    }
                };
                if ix > 0 {
                    visit(ix - 1, iy, &mut stack);
                }
                if ix + 1 < nx {
                    visit(ix + 1, iy, &mut stack);
                }
                if iy > 0 {
                    visit(ix, iy - 1, &mut stack);
                }
                if iy + 1 < ny {
                    visit(ix, iy + 1, &mut stack);
                }
            }
        }
        (labels, next as usize)
    }

    /// Indicator as a scalar field.
    pub fn indicator(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}
