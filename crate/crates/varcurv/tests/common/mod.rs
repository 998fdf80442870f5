//! Closed-form oracles shared by the acceptance tests. These implement
//! the analytic formulas independently of the library's solvers.

use varcurv::{BinarySet, Grid};

#[allow(dead_code)]
pub const SQRT_PI: f64 = 1.7724538509055159;
/// Cheeger constant of the unit square, 2 + √π.
#[allow(dead_code)]
pub const H_SQUARE: f64 = 2.0 + SQRT_PI;

/// Axis-aligned square of side `side` centered at `c`, with corners
/// rounded inward at radius `r` (the rolling-ball inner approximation).
#[allow(dead_code)]
pub fn rounded_square_mask(g: Grid, c: (f64, f64), side: f64, r: f64) -> BinarySet {
    let half = side / 2.0;
    BinarySet::from_fn(g, |x, y| {
        let dx = (x - c.0).abs();
        let dy = (y - c.1).abs();
        if dx > half || dy > half {
            return false;
        }
        let ex = (dx - (half - r)).max(0.0);
        let ey = (dy - (half - r)).max(0.0);
        ex * ex + ey * ey <= r * r
    })
}

/// Optimal curvature of the unit square at a point, in coordinates where
/// the square is (0,1)²: the Cheeger constant on the Cheeger set, and
/// 1/(x₁+x₂+√(2x₁x₂)) in the corner regions (by symmetry, x is folded
/// into the lower-left quadrant). Points outside the square return None.
#[allow(dead_code)]
pub fn square_kappa(x1: f64, x2: f64) -> Option<f64> {
    if !(0.0..1.0).contains(&x1) || !(0.0..1.0).contains(&x2) {
        return None;
    }
    let a = x1.min(1.0 - x1);
    let b = x2.min(1.0 - x2);
    let r_s = 1.0 / H_SQUARE;
    // inside the Cheeger set: distance to the inner square of half-width
    // 1/2 − r_s is at most r_s
    let ex = (0.5 - r_s - (x1 - 0.5).abs()).min(0.0).abs();
    let ey = (0.5 - r_s - (x2 - 0.5).abs()).min(0.0).abs();
    if ex * ex + ey * ey <= r_s * r_s {
        return Some(H_SQUARE);
    }
    Some(1.0 / (a + b + (2.0 * a * b).sqrt()))
}

/// Noiseless quadratic-fidelity denoising of the centered unit square:
/// u = (1 − α κ_S)⁺ 1_S with κ_S the closed form above; coordinates here
/// are centered (square = [−1/2, 1/2]²).
#[allow(dead_code)]
pub fn square_denoised(x: f64, y: f64, alpha: f64) -> f64 {
    match square_kappa(x + 0.5, y + 0.5) {
        None => 0.0,
        Some(k) => (1.0 - alpha * k).max(0.0),
    }
}

/// Noiseless quadratic-fidelity denoising of a disk indicator:
/// u = (1 − 2α/r)⁺ inside, 0 outside.
#[allow(dead_code)]
pub fn disk_denoised(x: f64, y: f64, c: (f64, f64), r: f64, alpha: f64) -> f64 {
    let d2 = (x - c.0).powi(2) + (y - c.1).powi(2);
    if d2 <= r * r {
        (1.0 - 2.0 * alpha / r).max(0.0)
    } else {
        0.0
    }
}

#[allow(dead_code)]
pub fn assert_runtime(name: &str, secs: f64, budget: f64) {
    println!("    [{name}] runtime {secs:.1}s (budget {budget:.0}s)");
    assert!(secs <= budget, "{name} took {secs:.1}s, budget {budget:.0}s");
}
