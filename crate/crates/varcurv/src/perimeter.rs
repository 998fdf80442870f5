//! Discrete perimeter as a weighted graph-cut length.
//!
//! The perimeter of a mask is the total weight of the neighborhood edges
//! that separate a true cell from a false cell (Cauchy–Crofton style cut
//! metrics). Edges leaving the grid are not counted, so the empty set and
//! the full grid both have zero perimeter and a set touching the border is
//! measured with a free (Neumann) boundary there.
//!
//! Weight selection per neighborhood:
//! - 4: unit axis weights; this is the l¹ (anisotropic) perimeter, exact on
//!   axis-aligned cuts and +41% on diagonals.
//! - 8: exact on axis-aligned and 45° cuts, ≤ 8.3% error in between.
//! - 16: exact on axis-aligned and 45° cuts; the remaining error
//!   equioscillates at ≈ ±1.87%, which is the minimum attainable once the
//!   axis response is pinned to 1 (on [0, atan(1/2)] the directional
//!   response is cos θ + (w_axis/h) sin θ regardless of the other weights).

use crate::grid::BinarySet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    N4,
    N8,
    N16,
}

/// One undirected edge family: offset vector (in cells) and weight
/// coefficient in units of the cell spacing h.
#[derive(Debug, Clone, Copy)]
pub struct Family {
    pub dx: i32,
    pub dy: i32,
    /// Physical edge weight is `coeff * h`.
    pub coeff: f64,
}

#[derive(Debug, Clone)]
pub struct PerimeterScheme {
    pub neighborhood: Neighborhood,
    pub families: Vec<Family>,
}

/// Axis coefficient of the 16-neighborhood scheme: the root of
/// 4A² + (4√5−4)A + (8√5−19) = 0 in (0, 1/2), which equalizes the bump
/// √(1+A²)−1 against the dip 1−(2+A)/√5 of the directional response.
fn n16_axis_coeff() -> f64 {
    let s5 = 5.0_f64.sqrt();
    (1.0 - s5 + (25.0 - 10.0 * s5).sqrt()) / 2.0
}

/// Axis coefficient of the 8-neighborhood scheme: the octagonal metric
/// exact on axis and diagonal cuts, response cos θ + (√2−1) sin θ in
/// between (max error +8.24% at 22.5°).
fn n8_axis_coeff() -> f64 {
    2.0_f64.sqrt() - 1.0
}

impl PerimeterScheme {
    pub fn new(neighborhood: Neighborhood) -> PerimeterScheme {
        let families = match neighborhood {
            Neighborhood::N4 => vec![
                Family { dx: 1, dy: 0, coeff: 1.0 },
                Family { dx: 0, dy: 1, coeff: 1.0 },
            ],
            Neighborhood::N8 => {
                let a = n8_axis_coeff();
                let b = (1.0 - a) / 2.0;
                vec![
                    Family { dx: 1, dy: 0, coeff: a },
                    Family { dx: 0, dy: 1, coeff: a },
                    Family { dx: 1, dy: 1, coeff: b },
                    Family { dx: 1, dy: -1, coeff: b },
                ]
            }
            Neighborhood::N16 => {
                let a = n16_axis_coeff();
                // diagonal exactness: (1 + a + 2c)/√2 = 1
                let c = (2.0_f64.sqrt() - 1.0 - a) / 2.0;
                // axis exactness: a + 2b + 6c = 1
                let b = (1.0 - a - 6.0 * c) / 2.0;
                vec![
                    Family { dx: 1, dy: 0, coeff: a },
                    Family { dx: 0, dy: 1, coeff: a },
                    Family { dx: 1, dy: 1, coeff: b },
                    Family { dx: 1, dy: -1, coeff: b },
                    Family { dx: 2, dy: 1, coeff: c },
                    Family { dx: 1, dy: 2, coeff: c },
                    Family { dx: 2, dy: -1, coeff: c },
                    Family { dx: 1, dy: -2, coeff: c },
                ]
            }
        };
        PerimeterScheme { neighborhood, families }
    }

    pub fn default_16() -> PerimeterScheme {
        PerimeterScheme::new(Neighborhood::N16)
    }

    /// Cut response per unit length of a straight boundary with unit
    /// normal `n`; equals 1 for an exact scheme in that direction.
    pub fn directional_response(&self, n: (f64, f64)) -> f64 {
        self.families
            .iter()
            .map(|f| f.coeff * (n.0 * f.dx as f64 + n.1 * f.dy as f64).abs())
            .sum()
    }

    /// Number of separating edges per family.
    pub fn transition_counts(&self, e: &BinarySet) -> Vec<u64> {
        let (nx, ny) = (e.grid.nx, e.grid.ny);
        let mut counts = vec![0u64; self.families.len()];
        for (fi, fam) in self.families.iter().enumerate() {
            let mut c = 0u64;
            for iy in 0..ny {
                let jy = iy as i64 + fam.dy as i64;
                if jy < 0 || jy >= ny as i64 {
                    continue;
                }
                let row = iy * nx;
                let jrow = jy as usize * nx;
                let (x_lo, x_hi) = if fam.dx >= 0 {
                    (0usize, nx - fam.dx as usize)
                } else {
                    ((-fam.dx) as usize, nx)
                };
                for ix in x_lo..x_hi {
                    let j = (jrow as i64 + ix as i64 + fam.dx as i64) as usize;
                    if e.mask[row + ix] != e.mask[j] {
                        c += 1;
                    }
                }
            }
            counts[fi] = c;
        }
        counts
    }
}

/// Weighted cut length of the mask-transition edges.
pub fn perimeter(e: &BinarySet, scheme: &PerimeterScheme) -> f64 {
    let counts = scheme.transition_counts(e);
    let h = e.grid.h;
    counts
        .iter()
        .zip(&scheme.families)
        .map(|(&c, fam)| c as f64 * fam.coeff * h)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BinarySet, Grid};

    fn schemes() -> Vec<PerimeterScheme> {
        vec![
            PerimeterScheme::new(Neighborhood::N4),
            PerimeterScheme::new(Neighborhood::N8),
            PerimeterScheme::new(Neighborhood::N16),
        ]
    }

    #[test]
    fn weights_strictly_positive() {
        for s in schemes() {
            for f in &s.families {
                assert!(f.coeff > 0.0, "{:?} has nonpositive weight", s.neighborhood);
            }
        }
    }

    #[test]
    fn empty_and_full_have_zero_perimeter() {
        let g = Grid::centered(32, 2.0);
        for s in schemes() {
            assert_eq!(perimeter(&BinarySet::empty(g), &s), 0.0);
            assert_eq!(perimeter(&BinarySet::full(g), &s), 0.0);
        }
    }

    #[test]
    fn axis_rectangle_perimeter() {
        let g = Grid::centered(128, 2.0);
        // 0.75 x 0.5 rectangle aligned to cell boundaries: pick extents at
        // multiples of h so the rasterization is exact.
        let h = g.h;
        let (a, b) = (48.0 * h, 32.0 * h);
        let e = BinarySet::rect(g, -a / 2.0, -b / 2.0, a / 2.0, b / 2.0);
        for s in schemes() {
            let p = perimeter(&e, &s);
            let exact = 2.0 * (a + b);
            match s.neighborhood {
                // the 4-scheme cut counts exactly the side cells
                Neighborhood::N4 => assert!((p - exact).abs() < 1e-12, "N4: {p} vs {exact}"),
                // diagonal/knight families see each convex corner once
                // less than a straight side would, an O(h) defect
                _ => assert!(
                    p <= exact + 1e-12 && (p - exact).abs() <= 10.0 * h,
                    "{:?}: {} vs {}",
                    s.neighborhood,
                    p,
                    exact
                ),
            }
        }
    }

    #[test]
    fn directional_response_error_bounds() {
        let n16 = PerimeterScheme::new(Neighborhood::N16);
        let n8 = PerimeterScheme::new(Neighborhood::N8);
        let mut worst16: f64 = 0.0;
        let mut worst8: f64 = 0.0;
        for k in 0..=3600 {
            let th = k as f64 * std::f64::consts::PI / 3600.0;
            let n = (th.cos(), th.sin());
            worst16 = worst16.max((n16.directional_response(n) - 1.0).abs());
            worst8 = worst8.max((n8.directional_response(n) - 1.0).abs());
        }
        assert!(worst16 <= 0.0188, "16-scheme worst error {worst16}");
        assert!(worst8 <= 0.0825, "8-scheme worst error {worst8}");
        // exactness in the stencil axis/diagonal directions
        for s in [&n16, &n8] {
            assert!((s.directional_response((1.0, 0.0)) - 1.0).abs() < 1e-12);
            assert!((s.directional_response((0.0, 1.0)) - 1.0).abs() < 1e-12);
            let d = 0.5_f64.sqrt();
            assert!((s.directional_response((d, d)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn halfplane_cut_matches_analytic_segment_length() {
        // A half-plane mask cuts the grid along a straight chord; the cut
        // weight over the chord length equals the directional response up
        // to O(1/n) end effects.
        let g = Grid::centered(512, 2.0);
        let s = PerimeterScheme::new(Neighborhood::N16);
        for &deg in &[0.0, 10.0, 26.565, 30.0, 45.0, 60.0, 77.0, 90.0] {
            let th = deg as f64 * std::f64::consts::PI / 180.0;
            let n = (th.cos(), th.sin());
            let e = BinarySet::from_fn(g, |x, y| n.0 * x + n.1 * y <= 0.013);
            if e.is_empty() || e.is_full() {
                continue;
            }
            let p = perimeter(&e, &s);
            // chord of the square [-1,1]^2 through offset 0.013
            let chord = chord_length(n, 0.013, 1.0);
            let ratio = p / chord;
            let expected = s.directional_response(n);
            assert!(
                (ratio - expected).abs() < 0.01,
                "angle {deg}: ratio {ratio} vs response {expected}"
            );
            // response error (<= 1.87%) plus chord end effects O(1/n)
            assert!((ratio - 1.0).abs() < 0.022, "angle {deg}: {ratio}");
        }
    }

    fn chord_length(n: (f64, f64), c: f64, half: f64) -> f64 {
        // length of the line n·x = c clipped to the square [-half, half]^2
        let d = (-n.1, n.0);
        let p0 = (n.0 * c, n.1 * c);
        let mut ts = Vec::new();
        for (p, v, b) in [
            (p0.0, d.0, half),
            (p0.0, d.0, -half),
            (p0.1, d.1, half),
            (p0.1, d.1, -half),
        ] {
            if v.abs() > 1e-15 {
                ts.push((b - p) / v);
            }
        }
        let inside = |t: f64| {
            let x = p0.0 + t * d.0;
            let y = p0.1 + t * d.1;
            x.abs() <= half + 1e-9 && y.abs() <= half + 1e-9
        };
        let mut hits: Vec<f64> = ts.into_iter().filter(|&t| inside(t)).collect();
        hits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        hits.last().unwrap() - hits.first().unwrap()
    }

    #[test]
    fn disk_perimeter_within_two_percent() {
        let g = Grid::centered(512, 1.0);
        let r = 0.25;
        let e = BinarySet::disk(g, (0.0, 0.0), r);
        let p = perimeter(&e, &PerimeterScheme::new(Neighborhood::N16));
        let exact = 2.0 * std::f64::consts::PI * r;
        assert!((p - exact).abs() / exact < 0.02, "disk perimeter {p} vs {exact}");
    }

    #[test]
    fn submodularity_exact_per_family() {
        // Per(E∩F) + Per(E∪F) <= Per(E) + Per(F), edge family by edge family
        // in integer counts.
        let g = Grid::centered(48, 2.0);
        let scheme = PerimeterScheme::new(Neighborhood::N16);
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..20 {
            let (cx, cy) = ((rng() % 20) as f64 * 0.05 - 0.5, (rng() % 20) as f64 * 0.05 - 0.5);
            let e = BinarySet::disk(g, (cx, cy), 0.3 + (rng() % 10) as f64 * 0.04);
            let f = BinarySet::rect(
                g,
                -0.9 + (rng() % 10) as f64 * 0.05,
                -0.9 + (rng() % 10) as f64 * 0.05,
                0.1 + (rng() % 10) as f64 * 0.08,
                0.1 + (rng() % 10) as f64 * 0.08,
            );
            let ci = scheme.transition_counts(&e.intersect(&f));
            let cu = scheme.transition_counts(&e.union(&f));
            let ce = scheme.transition_counts(&e);
            let cf = scheme.transition_counts(&f);
            for k in 0..ce.len() {
                assert!(ci[k] + cu[k] <= ce[k] + cf[k], "family {k} violates submodularity");
            }
        }
    }
}
