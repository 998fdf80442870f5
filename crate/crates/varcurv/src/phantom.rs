//! Test images with known level-set geometry: indicators of disks,
//! squares and polygons, a square with a far-away small ball, stacks of
//! nested disks, and a truncated family of alternating-offset balls whose
//! level sets swing between two distant columns (the adversarial case for
//! geometric convergence of level sets).

use crate::error::{Error, Result};
use crate::grid::{BinarySet, Grid, ScalarField};

#[derive(Debug, Clone)]
pub struct Phantom {
    pub name: String,
    pub f: ScalarField,
    /// Distinct attained values, ascending (including the background 0).
    pub attained: Vec<f64>,
    /// For indicator phantoms, the underlying set.
    pub indicator_set: Option<BinarySet>,
}

impl Phantom {
    /// Ground-truth level set G^s = {f > s} for s > 0, {f < s} for s < 0.
    pub fn level_set(&self, s: f64) -> BinarySet {
        let g = self.f.grid;
        if s >= 0.0 {
            BinarySet { grid: g, mask: self.f.values.iter().map(|&v| v > s).collect() }
        } else {
            BinarySet { grid: g, mask: self.f.values.iter().map(|&v| v < s).collect() }
        }
    }

    fn from_set(name: &str, set: BinarySet) -> Phantom {
        Phantom {
            name: name.into(),
            f: set.indicator(),
            attained: vec![0.0, 1.0],
            indicator_set: Some(set),
        }
    }

    pub fn disk(grid: Grid, center: (f64, f64), r: f64) -> Phantom {
        Phantom::from_set("disk", BinarySet::disk(grid, center, r))
    }

    pub fn square(grid: Grid, center: (f64, f64), side: f64) -> Phantom {
        let h = side / 2.0;
        Phantom::from_set(
            "square",
            BinarySet::rect(grid, center.0 - h, center.1 - h, center.0 + h, center.1 + h),
        )
    }

    /// Simple polygon by even-odd rasterization of cell centers.
    pub fn polygon(grid: Grid, verts: &[(f64, f64)]) -> Result<Phantom> {
        if verts.len() < 3 {
            return Err(Error::InvalidParameter("polygon needs at least 3 vertices".into()));
        }
        let vs = verts.to_vec();
        let set = BinarySet::from_fn(grid, |x, y| {
            let mut inside = false;
            let n = vs.len();
            for i in 0..n {
                let (x1, y1) = vs[i];
                let (x2, y2) = vs[(i + 1) % n];
                if (y1 > y) != (y2 > y) {
                    let xi = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
                    if x < xi {
                        inside = !inside;
                    }
                }
            }
            inside
        });
        Ok(Phantom::from_set("polygon", set))
    }

    /// L-shaped hexagon inside the centered unit square.
    pub fn l_shape(grid: Grid) -> Phantom {
        Phantom::polygon(
            grid,
            &[
                (-0.5, -0.5),
                (0.5, -0.5),
                (0.5, 0.0),
                (0.0, 0.0),
                (0.0, 0.5),
                (-0.5, 0.5),
            ],
        )
        .expect("fixed vertex list")
    }

    /// Unit square centered at the origin together with a ball of radius
    /// `r` at distance `gap` from the square's lower-left corner along
    /// the diagonal.
    pub fn square_plus_far_ball(grid: Grid, gap: f64, r: f64) -> Phantom {
        let s = BinarySet::rect(grid, -0.5, -0.5, 0.5, 0.5);
        let off = (gap + r) / 2f64.sqrt();
        let c = (-0.5 - off, -0.5 - off);
        let b = BinarySet::disk(grid, c, r);
        let mut p = Phantom::from_set("square_plus_far_ball", s.union(&b));
        p.name = format!("square_plus_far_ball(gap={gap},r={r})");
        p
    }

    /// Center of the far ball for [`Phantom::square_plus_far_ball`].
    pub fn far_ball_center(gap: f64, r: f64) -> (f64, f64) {
        let off = (gap + r) / 2f64.sqrt();
        (-0.5 - off, -0.5 - off)
    }

    /// Two nested disks: f = 1_{B(r_outer)} + 1_{B(r_inner)}, values
    /// {0, 1, 2}.
    pub fn stack(grid: Grid, r_outer: f64, r_inner: f64) -> Phantom {
        let outer = BinarySet::disk(grid, (0.0, 0.0), r_outer);
        let inner = BinarySet::disk(grid, (0.0, 0.0), r_inner);
        let f = outer.indicator().zip_with(&inner.indicator(), |a, b| a + b);
        Phantom {
            name: format!("stack(r_outer={r_outer},r_inner={r_inner})"),
            f,
            attained: vec![0.0, 1.0, 2.0],
            indicator_set: None,
        }
    }

    /// Truncated alternating-offset ball family of the given depth.
    ///
    /// Block ℓ (1 ≤ ℓ ≤ depth) holds the 2^{ℓ−1} dyadic values
    /// (2j+1)/2^ℓ, each on its own ball of radius ∝ 2^{−ℓ−1}; every ball
    /// is shifted horizontally by ±3/2 with the sign flipping between a
    /// value and its parent (the value with the last binary digit
    /// removed), i.e. sign = (−1)^{popcount of the dyadic numerator}.
    /// The whole construction is scaled to fit inside B(0, 1).
    pub fn truncated_pingpong(grid: Grid, depth: usize) -> Phantom {
        assert!(depth >= 1 && depth <= 8);
        struct Ball {
            c: (f64, f64),
            r: f64,
            value: f64,
        }
        let mut balls: Vec<Ball> = Vec::new();
        let radius_scale = 0.8;
        let col_dx = 0.36;
        let x0 = -col_dx * (depth as f64 - 1.0) / 2.0;
        for l in 1..=depth {
            let nb = 1usize << (l - 1);
            let rho = radius_scale * 2f64.powi(-(l as i32) - 1);
            let pitch = 2.0 * rho * 1.4;
            for j in 0..nb {
                let numerator = 2 * j as u64 + 1;
                let value = numerator as f64 / (1u64 << l) as f64;
                let sign = if (numerator.count_ones() % 2) == 1 { -1.0 } else { 1.0 };
                let y = (j as f64 - (nb as f64 - 1.0) / 2.0) * pitch;
                let x = x0 + (l as f64 - 1.0) * col_dx + sign * 1.5;
                balls.push(Ball { c: (x, y), r: rho, value });
            }
        }
        // fit everything inside B(0, 0.98)
        let r_max = balls
            .iter()
            .map(|b| (b.c.0 * b.c.0 + b.c.1 * b.c.1).sqrt() + b.r)
            .fold(0.0f64, f64::max);
        let q = 0.98 / r_max;
        for b in &mut balls {
            b.c = (b.c.0 * q, b.c.1 * q);
            b.r *= q;
        }
        let f = ScalarField::from_fn(grid, |x, y| {
            for b in &balls {
                let (dx, dy) = (x - b.c.0, y - b.c.1);
                if dx * dx + dy * dy <= b.r * b.r {
                    return b.value;
                }
            }
            0.0
        });
        let mut attained: Vec<f64> = std::iter::once(0.0)
            .chain(balls.iter().map(|b| b.value))
            .collect();
        attained.sort_by(|a, b| a.partial_cmp(b).unwrap());
        attained.dedup();
        Phantom {
            name: format!("pingpong{depth}"),
            f,
            attained,
            indicator_set: None,
        }
    }
}

/// Offset sign of a dyadic value in the alternating construction; kept
/// public for the experiments that need to know which column a level's
/// swing ball lives in.
pub fn pingpong_sign(numerator: u64) -> f64 {
    if numerator.count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}
