//! Exact Euclidean distance transforms and Hausdorff distances.
//!
//! Cell centers and edge midpoints both live on the half-step lattice
//! (spacing h/2), so Hausdorff distances between any of the point sets
//! this crate produces are computed exactly (up to float rounding) by a
//! two-pass Felzenszwalb–Huttenlocher squared-distance transform on that
//! lattice. Off-lattice inputs fall back to the quadratic direct scan.

use crate::error::{Error, Result};
use crate::grid::{BinarySet, Grid, ScalarField};

/// 1-D squared distance transform (lower envelope of parabolas).
fn dt1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        if f[q] == f64::INFINITY {
            continue;
        }
        loop {
            if f[v[k]] == f64::INFINITY {
                // parabola at v[k] is absent; replace it
                if k == 0 {
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
                continue;
            }
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    if f[v[0]] == f64::INFINITY {
        for q in 0..n {
            out[q] = f64::INFINITY;
        }
        return;
    }
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        out[q] = d * d + f[p];
    }
}

/// Squared EDT of a site mask on a w×h lattice, distances in lattice units.
pub fn edt_squared(sites: &[bool], w: usize, h: usize) -> Vec<f64> {
    assert_eq!(sites.len(), w * h);
    let mut d = vec![f64::INFINITY; w * h];
    // pass 1: along columns
    let mut col_f = vec![0.0f64; h.max(w)];
    let mut col_o = vec![0.0f64; h.max(w)];
    let mut v = vec![0usize; h.max(w)];
    let mut z = vec![0.0f64; h.max(w) + 1];
    for x in 0..w {
        for y in 0..h {
            col_f[y] = if sites[y * w + x] { 0.0 } else { f64::INFINITY };
        }
        dt1d(&col_f[..h], &mut col_o[..h], &mut v, &mut z);
        for y in 0..h {
            d[y * w + x] = col_o[y];
        }
    }
    // pass 2: along rows
    for y in 0..h {
        col_f[..w].copy_from_slice(&d[y * w..(y + 1) * w]);
        dt1d(&col_f[..w], &mut col_o[..w], &mut v, &mut z);
        d[y * w..(y + 1) * w].copy_from_slice(&col_o[..w]);
    }
    d
}

/// Half-step lattice index of a physical point, if it is (numerically) a
/// lattice site within the grid.
fn half_lattice_index(grid: &Grid, p: (f64, f64), w: usize, h: usize) -> Option<usize> {
    let ux = 2.0 * (p.0 - grid.origin.0) / grid.h;
    let uy = 2.0 * (p.1 - grid.origin.1) / grid.h;
    let rx = ux.round();
    let ry = uy.round();
    if (ux - rx).abs() > 1e-6 || (uy - ry).abs() > 1e-6 {
        return None;
    }
    if rx < 0.0 || ry < 0.0 || rx >= w as f64 || ry >= h as f64 {
        return None;
    }
    Some(ry as usize * w + rx as usize)
}

/// Directed Hausdorff distance sup_{a∈A} dist(a, B) between point sets.
fn directed(a: &[(f64, f64)], b: &[(f64, f64)], grid: &Grid) -> f64 {
    let w = 2 * grid.nx - 1;
    let h = 2 * grid.ny - 1;
    let mut sites = vec![false; w * h];
    let mut on_lattice = true;
    for &p in b {
        match half_lattice_index(grid, p, w, h) {
            Some(i) => sites[i] = true,
            None => {
                on_lattice = false;
                break;
            }
        }
    }
    if on_lattice {
        let mut queries = Vec::with_capacity(a.len());
        for &p in a {
            match half_lattice_index(grid, p, w, h) {
                Some(i) => queries.push(i),
                None => {
                    on_lattice = false;
                    break;
                }
            }
        }
        if on_lattice {
            let d2 = edt_squared(&sites, w, h);
            let unit = grid.h / 2.0;
            let m = queries.iter().map(|&i| d2[i]).fold(0.0f64, f64::max);
            return m.sqrt() * unit;
        }
    }
    // off-lattice fallback: direct scan
    let mut worst = 0.0f64;
    for &(ax, ay) in a {
        let mut best = f64::INFINITY;
        for &(bx, by) in b {
            let d = (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
            if d < best {
                best = d;
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

/// Hausdorff distance between two nonempty point sets living on `grid`.
pub fn hausdorff_points(a: &[(f64, f64)], b: &[(f64, f64)], grid: &Grid) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("hausdorff of an empty point set"));
    }
    Ok(directed(a, b, grid).max(directed(b, a, grid)))
}

/// Hausdorff distance between two masks, interpreted as their true-cell
/// center point clouds.
pub fn hausdorff_sets(e: &BinarySet, f: &BinarySet) -> Result<f64> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::EmptyInput("hausdorff of an empty set"));
    }
    hausdorff_points(&e.centers(), &f.centers(), &e.grid)
}

/// Distance from every cell center to the nearest of `points`.
pub fn distance_field(points: &[(f64, f64)], grid: &Grid) -> Result<ScalarField> {
    if points.is_empty() {
        return Err(Error::EmptyInput("distance field to an empty point set"));
    }
    let w = 2 * grid.nx - 1;
    let h = 2 * grid.ny - 1;
    let mut sites = vec![false; w * h];
    let mut all_on = true;
    for &p in points {
        match half_lattice_index(grid, p, w, h) {
            Some(i) => sites[i] = true,
            None => {
                all_on = false;
                break;
            }
        }
    }
    let mut out = ScalarField::zeros(*grid);
    if all_on {
        let d2 = edt_squared(&sites, w, h);
        let unit = grid.h / 2.0;
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                out.values[grid.idx(ix, iy)] = d2[(2 * iy) * w + 2 * ix].sqrt() * unit;
            }
        }
    } else {
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let (x, y) = grid.center(ix, iy);
                let mut best = f64::INFINITY;
                for &(px, py) in points {
                    best = best.min((x - px) * (x - px) + (y - py) * (y - py));
                }
                out.values[grid.idx(ix, iy)] = best.sqrt();
            }
        }
    }
    Ok(out)
}

/// The three distances of the boundary comparison: dh(∂E,∂F), dh(E,F),
/// dh(E^c,F^c), plus whether dh(∂E,∂F) ≤ max of the other two within the
/// discretization slack 2h.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryHausdorffReport {
    pub boundary: f64,
    pub sets: f64,
    pub complements: f64,
    pub inequality_holds: bool,
}

pub fn boundary_hausdorff_bound_check(e: &BinarySet, f: &BinarySet) -> Result<BoundaryHausdorffReport> {
    use crate::boundary::boundary;
    if e.is_empty() || f.is_empty() {
        return Err(Error::EmptyInput("set"));
    }
    let (ec, fc) = (e.complement(), f.complement());
    if ec.is_empty() || fc.is_empty() {
        return Err(Error::EmptyInput("complement"));
    }
    let be = boundary(e);
    let bf = boundary(f);
    let bdy = if be.is_empty() && bf.is_empty() {
        0.0
    } else {
        hausdorff_points(&be.points, &bf.points, &e.grid)?
    };
    let sets = hausdorff_sets(e, f)?;
    let complements = hausdorff_sets(&ec, &fc)?;
    Ok(BoundaryHausdorffReport {
        boundary: bdy,
        sets,
        complements,
        inequality_holds: bdy <= sets.max(complements) + 2.0 * e.grid.h + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::boundary;
    use crate::grid::{BinarySet, Grid};

    fn brute_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        let dir = |p: &[(f64, f64)], q: &[(f64, f64)]| {
            p.iter()
                .map(|&(x, y)| {
                    q.iter()
                        .map(|&(u, v)| ((x - u).powi(2) + (y - v).powi(2)).sqrt())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0f64, f64::max)
        };
        dir(a, b).max(dir(b, a))
    }

    #[test]
    fn identical_sets_have_zero_distance() {
        let g = Grid::centered(32, 2.0);
        let e = BinarySet::disk(g, (0.1, 0.0), 0.4);
        assert_eq!(hausdorff_sets(&e, &e).unwrap(), 0.0);
    }

    #[test]
    fn translated_square_distance_is_translation() {
        let g = Grid::centered(64, 2.0);
        let h = g.h;
        let t = 8.0 * h;
        let a = BinarySet::rect(g, -0.5, -0.5, 0.5, 0.5);
        let b = BinarySet::rect(g, -0.5 + t, -0.5, 0.5 + t, 0.5);
        let d = hausdorff_sets(&a, &b).unwrap();
        assert!((d - t).abs() <= h + 1e-12, "{d} vs {t}");
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let g = Grid::centered(40, 2.0);
        let mut seed = 123456789u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..10 {
            let e = BinarySet::disk(
                g,
                ((rng() % 16) as f64 * 0.05 - 0.4, (rng() % 16) as f64 * 0.05 - 0.4),
                0.2 + (rng() % 8) as f64 * 0.05,
            );
            let f = BinarySet::rect(
                g,
                -0.8,
                -0.8,
                -0.1 + (rng() % 12) as f64 * 0.07,
                -0.1 + (rng() % 12) as f64 * 0.07,
            );
            if e.is_empty() || f.is_empty() {
                continue;
            }
            let exact = hausdorff_sets(&e, &f).unwrap();
            let brute = brute_hausdorff(&e.centers(), &f.centers());
            assert!((exact - brute).abs() < 1e-9, "{exact} vs {brute}");
        }
    }

    #[test]
    fn metric_axioms_hold() {
        let g = Grid::centered(32, 2.0);
        let a = BinarySet::disk(g, (0.0, 0.0), 0.3);
        let b = BinarySet::rect(g, -0.6, -0.6, 0.2, 0.1);
        let c = BinarySet::disk(g, (0.3, 0.3), 0.45);
        let dab = hausdorff_sets(&a, &b).unwrap();
        let dba = hausdorff_sets(&b, &a).unwrap();
        let dac = hausdorff_sets(&a, &c).unwrap();
        let dcb = hausdorff_sets(&c, &b).unwrap();
        assert_eq!(dab, dba);
        assert!(dab > 0.0);
        assert!(dab <= dac + dcb + 1e-12);
    }

    #[test]
    fn empty_input_is_an_error() {
        let g = Grid::centered(8, 1.0);
        let e = BinarySet::empty(g);
        let f = BinarySet::full(g);
        assert!(hausdorff_sets(&e, &f).is_err());
    }

    #[test]
    fn boundary_inequality_on_disk_pair() {
        let g = Grid::centered(64, 2.0);
        let e = BinarySet::disk(g, (0.0, 0.0), 0.5);
        let f = BinarySet::disk(g, (0.1, 0.0), 0.45);
        let rep = boundary_hausdorff_bound_check(&e, &f).unwrap();
        assert!(rep.inequality_holds);
        assert!(rep.boundary > 0.0);
    }

    #[test]
    fn thin_slit_separates_set_and_boundary_convergence() {
        // Removing a thin triangular slit moves the boundary a long way
        // while the sets stay close: dh(E_n, E_0) small, dh(∂E_n, ∂E_0)
        // about the slit depth.
        let n = 256;
        let h = 2.0 / n as f64;
        // align (0.5, 0.5) with a cell center
        let o = 0.5 - (n / 2) as f64 * h;
        let g = Grid::new(n, n, h, (o, o)).unwrap();
        let e0 = BinarySet::rect(g, 0.0, 0.0, 1.0, 1.0);
        let nn = 8.0;
        let halfw = 1.0 / (nn + 2.0);
        let en = BinarySet::from_fn(g, |x, y| {
            let inside = x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0;
            let t = 1.0 - y / 0.5; // 1 at base, 0 at apex height 0.5
            let slit = y >= 0.0 && y < 0.5 && (x - 0.5).abs() < halfw * t;
            inside && !slit
        });
        let dsets = hausdorff_sets(&en, &e0).unwrap();
        assert!(dsets <= halfw + 2.0 * h, "sets: {dsets}");
        let dbdy =
            hausdorff_points(&boundary(&en).points, &boundary(&e0).points, &g).unwrap();
        assert!((dbdy - 0.5).abs() <= 2.0 * h, "boundaries: {dbdy}");
        let rep = boundary_hausdorffs(&en, &e0);
        assert!(rep.inequality_holds);
        // the complements dominate
        assert!((rep.complements - 0.5).abs() <= 2.0 * h);
    }

    fn boundary_hausdorffs(e: &BinarySet, f: &BinarySet) -> BoundaryHausdorffReport {
        boundary_hausdorff_bound_check(e, f).unwrap()
    }
}
