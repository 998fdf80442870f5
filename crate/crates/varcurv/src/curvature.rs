//! Variational mean curvatures of pixel sets.
//!
//! For a mask D, the inner sets D^λ (maximal minimizers of Per(E) − λ|E|
//! inside D) and the outer sets D^{-λ} (complements of the maximal
//! minimizers of Per(F) − λ∫_F g outside D, g ≡ 1 on a ball of radius 2
//! and a constant below 1 beyond) are nested monotone families. The
//! optimal curvature reads off the first parameter at which each cell is
//! captured: positive on D, negative outside.
//!
//! Sets not contained in the unit ball are handled through the standard
//! affine normalization x ↦ q(x−c); λ values and results are expressed in
//! the normalized frame and curvatures mapped back to physical units by
//! the factor q. The normalization is the identity whenever D already
//! lies in B(0,1).

use crate::error::{Error, Result};
use crate::grid::{BinarySet, Grid, ScalarField};
use crate::perimeter::{perimeter, PerimeterScheme};
use crate::pmc::{pmc_energy, BinaryEnergy, CellState, CutScale, Select};

/// The density g used by the outer problems: 1 on B(0, radius) in
/// normalized coordinates, a constant in (0, 1] beyond. The far value is
/// irrelevant for any set confined to B(0, radius); it only affects how
/// far-field cells are priced.
#[derive(Debug, Clone, Copy)]
pub struct DensitySpec {
    pub radius: f64,
    pub g_far: f64,
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec { radius: 2.0, g_far: 0.5 }
    }
}

impl DensitySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 1.0) {
            return Err(Error::InvalidParameter("density radius must exceed 1".into()));
        }
        if !(self.g_far > 0.0 && self.g_far <= 1.0) {
            return Err(Error::InvalidParameter("far density must lie in (0, 1]".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        if x * x + y * y <= self.radius * self.radius {
            1.0
        } else {
            self.g_far
        }
    }
}

/// Affine normalization onto the unit ball: x' = q(x − c).
#[derive(Debug, Clone, Copy)]
pub struct Normalization {
    pub q: f64,
    pub c: (f64, f64),
}

impl Normalization {
    pub fn identity() -> Normalization {
        Normalization { q: 1.0, c: (0.0, 0.0) }
    }

    /// Identity if D (inflated by half a cell) fits in B(0,1), otherwise
    /// the rescaling that shrinks D into a ball of radius 0.98.
    pub fn for_set(d: &BinarySet) -> Result<Normalization> {
        if d.is_empty() {
            return Err(Error::EmptyInput("normalization of the empty set"));
        }
        let g = d.grid;
        let half = g.h / 2.0;
        let mut r_origin: f64 = 0.0;
        let (mut xmin, mut xmax, mut ymin, mut ymax) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                if d.get(ix, iy) {
                    let (x, y) = g.center(ix, iy);
                    r_origin = r_origin.max((x * x + y * y).sqrt() + half);
                    xmin = xmin.min(x);
                    xmax = xmax.max(x);
                    ymin = ymin.min(y);
                    ymax = ymax.max(y);
                }
            }
        }
        if r_origin <= 1.0 {
            return Ok(Normalization::identity());
        }
        let c = ((xmin + xmax) / 2.0, (ymin + ymax) / 2.0);
        let mut r_c: f64 = 0.0;
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                if d.get(ix, iy) {
                    let (x, y) = g.center(ix, iy);
                    r_c = r_c.max(((x - c.0).powi(2) + (y - c.1).powi(2)).sqrt() + half);
                }
            }
        }
        Ok(Normalization { q: 0.98 / r_c, c })
    }

    #[inline]
    pub fn to_virtual(&self, x: f64, y: f64) -> (f64, f64) {
        (self.q * (x - self.c.0), self.q * (y - self.c.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyDirection {
    Inner,
    Outer,
}

/// The nested map λ ↦ D^λ (inner) or λ ↦ D^{-λ} (outer).
#[derive(Debug, Clone)]
pub struct ParametricFamily {
    pub direction: FamilyDirection,
    /// Increasing λ values in the normalized frame.
    pub lambdas: Vec<f64>,
    pub sets: Vec<BinarySet>,
    pub normalization: Normalization,
}

impl ParametricFamily {
    /// Set for the smallest λ at/above the given value, if within range.
    pub fn set_at(&self, lambda: f64) -> Option<&BinarySet> {
        self.lambdas.iter().position(|&l| l >= lambda).map(|k| &self.sets[k])
    }
}

pub fn geometric_lambdas(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && n >= 2);
    let ratio = (max / min).powf(1.0 / (n - 1) as f64);
    (0..n).map(|k| min * ratio.powi(k as i32)).collect()
}

/// Default λ grid: 64 geometrically spaced values from 0.5 to 4/h.
pub fn default_lambda_grid(grid: &Grid) -> Vec<f64> {
    geometric_lambdas(0.5, 4.0 / grid.h, 64)
}

/// Local spacing of the λ grid around a value (the capture resolution of
/// curvatures near that magnitude).
pub fn lambda_step_at(lambdas: &[f64], value: f64) -> f64 {
    let v = value.abs();
    for w in lambdas.windows(2) {
        if v <= w[1] {
            return w[1] - w[0];
        }
    }
    let n = lambdas.len();
    if n >= 2 {
        lambdas[n - 1] - lambdas[n - 2]
    } else {
        0.0
    }
}

fn validate_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty λ grid".into()));
    }
    if !lambdas.windows(2).all(|w| w[0] < w[1]) || lambdas[0] <= 0.0 {
        return Err(Error::InvalidParameter("λ grid must be increasing and positive".into()));
    }
    Ok(())
}

/// Shared solver for the monotone inner sweep. Returns the maximal
/// minimizer of Per(E) − λ_phys |E| inside D for each λ, fixing the
/// previous solution in (the families are provably nested, so this is
/// exact and keeps late solves small).
fn inner_sweep(
    d: &BinarySet,
    lambdas_phys: &[f64],
    scheme: &PerimeterScheme,
) -> Result<Vec<BinarySet>> {
    let g = d.grid;
    let h2 = g.cell_area();
    let max_w = scheme.families.iter().fold(0.0f64, |m, f| m.max(f.coeff)) * g.h;
    let lam_max = *lambdas_phys.last().unwrap();
    let scale = CutScale::for_magnitude((lam_max * h2).max(max_w));
    let mut fixed_in = BinarySet::empty(g);
    let mut sets = Vec::with_capacity(lambdas_phys.len());
    for (k, &lam) in lambdas_phys.iter().enumerate() {
        let mut energy = BinaryEnergy::new(g, scheme);
        for i in 0..g.cell_count() {
            if !d.mask[i] {
                energy.state[i] = CellState::Out;
            } else if fixed_in.mask[i] {
                energy.state[i] = CellState::In;
            } else {
                energy.unary[i] = -lam * h2;
            }
        }
        let set = energy.solve(scale, Select::Maximal);
        if !fixed_in.is_subset_of(&set) {
            return Err(Error::NestednessViolation(k));
        }
        fixed_in = set.clone();
        sets.push(set);
    }
    Ok(sets)
}

/// Monotone outer sweep: maximal minimizers F^λ of Per(F) − λ_phys ∫_F g
/// over F in the complement of D (g in physical units via the
/// normalization). Returns the F sets.
fn outer_sweep(
    d: &BinarySet,
    lambdas_phys: &[f64],
    g_field: &ScalarField,
    scheme: &PerimeterScheme,
) -> Result<Vec<BinarySet>> {
    let g = d.grid;
    let h2 = g.cell_area();
    let max_w = scheme.families.iter().fold(0.0f64, |m, f| m.max(f.coeff)) * g.h;
    let lam_max = *lambdas_phys.last().unwrap();
    let scale = CutScale::for_magnitude((lam_max * h2).max(max_w));
    let mut fixed_in = BinarySet::empty(g);
    let mut sets = Vec::with_capacity(lambdas_phys.len());
    for (k, &lam) in lambdas_phys.iter().enumerate() {
        let mut energy = BinaryEnergy::new(g, scheme);
        for i in 0..g.cell_count() {
            if d.mask[i] {
                energy.state[i] = CellState::Out;
            } else if fixed_in.mask[i] {
                energy.state[i] = CellState::In;
            } else {
                energy.unary[i] = -lam * g_field.values[i] * h2;
            }
        }
        let set = energy.solve(scale, Select::Maximal);
        if !fixed_in.is_subset_of(&set) {
            return Err(Error::NestednessViolation(k));
        }
        fixed_in = set.clone();
        sets.push(set);
    }
    Ok(sets)
}

fn g_on_grid(grid: &Grid, norm: &Normalization, density: &DensitySpec) -> ScalarField {
    ScalarField::from_fn(*grid, |x, y| {
        let (vx, vy) = norm.to_virtual(x, y);
        density.value(vx, vy)
    })
}

fn require_outer_domain(grid: &Grid, norm: &Normalization, density: &DensitySpec) -> Result<()> {
    // the grid must contain the normalized ball B(0, radius)
    let r_phys = density.radius / norm.q;
    if !grid.contains_disk(norm.c, r_phys) {
        return Err(Error::DomainTooSmall("the density ball B(0, 2) in normalized coordinates"));
    }
    Ok(())
}

/// The nested family λ ↦ D^λ (inner) or λ ↦ D^{-λ} (outer) over an
/// increasing λ grid in the normalized frame.
pub fn level_family(
    d: &BinarySet,
    direction: FamilyDirection,
    lambdas: &[f64],
    density: &DensitySpec,
    scheme: &PerimeterScheme,
) -> Result<ParametricFamily> {
    validate_lambdas(lambdas)?;
    density.validate()?;
    if d.is_empty() {
        return Err(Error::EmptyInput("level family of the empty set"));
    }
    if d.touches_border() {
        return Err(Error::InvalidParameter("set must be padded away from the grid border".into()));
    }
    let norm = Normalization::for_set(d)?;
    let lambdas_phys: Vec<f64> = lambdas.iter().map(|&l| l * norm.q).collect();
    match direction {
        FamilyDirection::Inner => {
            let sets = inner_sweep(d, &lambdas_phys, scheme)?;
            Ok(ParametricFamily {
                direction,
                lambdas: lambdas.to_vec(),
                sets,
                normalization: norm,
            })
        }
        FamilyDirection::Outer => {
            require_outer_domain(&d.grid, &norm, density)?;
            let g_field = g_on_grid(&d.grid, &norm, density);
            let fs = outer_sweep(d, &lambdas_phys, &g_field, scheme)?;
            let sets: Vec<BinarySet> = fs.iter().map(|f| f.complement()).collect();
            // D^{-λ} shrinks as λ grows
            for k in 1..sets.len() {
                if !sets[k].is_subset_of(&sets[k - 1]) {
                    return Err(Error::NestednessViolation(k));
                }
            }
            Ok(ParametricFamily {
                direction,
                lambdas: lambdas.to_vec(),
                sets,
                normalization: norm,
            })
        }
    }
}

/// Output of [`variational_curvature`]: the curvature field in physical
/// 1/length units, plus the cells the λ grid never captured (their values
/// are capped at ±λ_max and should be treated as unresolved).
#[derive(Debug, Clone)]
pub struct CurvatureResult {
    pub field: ScalarField,
    pub uncaptured: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub normalization: Normalization,
}

/// The optimal variational curvature of D read off the λ sweeps:
/// κ(x ∈ D) = smallest λ whose inner set contains x, κ(x ∉ D) =
/// −(smallest λ whose outer minimizer contains x)·g(x).
pub fn variational_curvature(
    d: &BinarySet,
    lambdas: &[f64],
    density: &DensitySpec,
    scheme: &PerimeterScheme,
) -> Result<CurvatureResult> {
    validate_lambdas(lambdas)?;
    density.validate()?;
    if d.is_empty() {
        return Err(Error::EmptyInput("curvature of the empty set"));
    }
    if d.touches_border() {
        return Err(Error::InvalidParameter("set must be padded away from the grid border".into()));
    }
    let g = d.grid;
    let norm = Normalization::for_set(d)?;
    require_outer_domain(&g, &norm, density)?;
    let lam_max = *lambdas.last().unwrap();
    // full capture needs λ_max of order d/h (a cell at distance ~h/2 from
    // the boundary has curvature ~ 4/h in the normalized frame); smaller
    // ranges are allowed and simply leave cells flagged as uncaptured
    let lambdas_phys: Vec<f64> = lambdas.iter().map(|&l| l * norm.q).collect();
    let g_field = g_on_grid(&g, &norm, density);

    let inner = inner_sweep(d, &lambdas_phys, scheme)?;
    let outer_f = outer_sweep(d, &lambdas_phys, &g_field, scheme)?;

    let mut field = ScalarField::zeros(g);
    let mut captured = vec![false; g.cell_count()];
    for i in 0..g.cell_count() {
        if d.mask[i] {
            for (k, set) in inner.iter().enumerate() {
                if set.mask[i] {
                    field.values[i] = norm.q * lambdas[k];
                    captured[i] = true;
                    break;
                }
            }
            if !captured[i] {
                field.values[i] = norm.q * lam_max;
            }
        } else {
            for (k, set) in outer_f.iter().enumerate() {
                if set.mask[i] {
                    field.values[i] = -norm.q * lambdas[k] * g_field.values[i];
                    captured[i] = true;
                    break;
                }
            }
            if !captured[i] {
                field.values[i] = -norm.q * lam_max * g_field.values[i];
            }
        }
    }
    let uncaptured: Vec<usize> = (0..g.cell_count()).filter(|&i| !captured[i]).collect();
    Ok(CurvatureResult { field, uncaptured, lambdas: lambdas.to_vec(), normalization: norm })
}

#[derive(Debug, Clone)]
pub struct CheegerResult {
    /// Per(C)/|C| of the returned set; within the bisection tolerance of
    /// the smallest λ whose inner minimizer is nonempty.
    pub h: f64,
    pub set: BinarySet,
}

/// Cheeger constant and maximal Cheeger set of D by bisection over the
/// inner prescribed-curvature problem.
pub fn cheeger(d: &BinarySet, tol: f64, scheme: &PerimeterScheme) -> Result<CheegerResult> {
    if d.is_empty() {
        return Err(Error::EmptyInput("cheeger set of the empty set"));
    }
    if d.touches_border() {
        return Err(Error::InvalidParameter("set must be padded away from the grid border".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let g = d.grid;
    let h2 = g.cell_area();
    // h(D) <= Per(D)/|D|, and the maximal minimizer at that ratio is
    // nonempty (D itself has energy 0 there)
    let mut hi = perimeter(d, scheme) / d.area();
    let mut lo = 0.0f64;
    let max_w = scheme.families.iter().fold(0.0f64, |m, f| m.max(f.coeff)) * g.h;
    let scale = CutScale::for_magnitude((hi * h2).max(max_w));
    let solve = |lam: f64| -> BinarySet {
        let mut energy = BinaryEnergy::new(g, scheme);
        for i in 0..g.cell_count() {
            if d.mask[i] {
                energy.unary[i] = -lam * h2;
            } else {
                energy.state[i] = CellState::Out;
            }
        }
        energy.solve(scale, Select::Maximal)
    };
    let mut best = solve(hi);
    if best.is_empty() {
        // ratio rounding landed just below the discrete threshold
        hi *= 1.0 + 1e-9;
        best = solve(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let s = solve(mid);
        if s.is_empty() {
            lo = mid;
        } else {
            hi = mid;
            best = s;
        }
    }
    let ratio = perimeter(&best, scheme) / best.area();
    Ok(CheegerResult { h: ratio, set: best })
}

/// Randomized falsifier for the small-scale curvature-vs-perimeter
/// inequality: over sampled test sets A ∩ B(x, r) it reports the largest
/// observed ∫ κ⁺ / Per and ∫ κ⁻ / Per ratios.
#[derive(Debug, Clone)]
pub struct CurvatureInequalityReport {
    pub max_pos_ratio: f64,
    pub max_neg_ratio: f64,
    pub xi: f64,
    pub passes: bool,
    /// Center and radius of the worst sample.
    pub witness: (f64, f64, f64),
    pub samples_evaluated: usize,
}

pub fn check_curvature_inequality(
    kappa: &ScalarField,
    xi: f64,
    r0: f64,
    samples: usize,
    seed: u64,
    scheme: &PerimeterScheme,
) -> Result<CurvatureInequalityReport> {
    use rand::{Rng, SeedableRng};
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter("ξ must lie in (0,1)".into()));
    }
    let g = kappa.grid;
    if !(r0 > 0.0 && r0 <= g.min_extent() / 4.0) {
        return Err(Error::InvalidParameter("r₀ must lie in (0, extent/4]".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (x0, y0, x1, y1) = g.bounds();
    let h2 = g.cell_area();

    let mut max_pos = 0.0f64;
    let mut max_neg = 0.0f64;
    let mut witness = (0.0, 0.0, 0.0);
    let mut evaluated = 0usize;

    // deterministic first samples centered on the extreme curvature
    // regions (centroid of the top decile, so a constant spike is probed
    // at its center rather than its edge)
    let mut centers: Vec<(f64, f64, f64)> = Vec::new();
    let arg = |pick_max: bool| {
        let score = |v: f64| if pick_max { v } else { -v };
        let best = kappa.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(score(v)));
        let cutoff = best - 0.1 * best.abs().max(1e-300);
        let (mut sx, mut sy, mut n) = (0.0f64, 0.0f64, 0usize);
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                if score(kappa.get(ix, iy)) >= cutoff {
                    let (x, y) = g.center(ix, iy);
                    sx += x;
                    sy += y;
                    n += 1;
                }
            }
        }
        (sx / n as f64, sy / n as f64)
    };
    // radius sweep at the extreme cells: a spike of scale ρ only shows a
    // bad ratio against balls of comparable radius
    let pmax = arg(true);
    let pmin = arg(false);
    let r_lo = (2.0 * g.h).min(r0 * 0.5);
    for k in 0..6 {
        let r = r_lo * (r0 / r_lo).powf(k as f64 / 5.0);
        centers.push((pmax.0, pmax.1, r));
        centers.push((pmin.0, pmin.1, r));
    }
    while centers.len() < samples {
        let x = rng.gen_range(x0 + r0..x1 - r0);
        let y = rng.gen_range(y0 + r0..y1 - r0);
        let r = rng.gen_range((2.0 * g.h).min(r0 * 0.5)..=r0);
        centers.push((x, y, r));
    }

    let det_count = 12.min(centers.len());
    for (si, &(cx, cy, r)) in centers.iter().enumerate() {
        // test set: a ball intersected with a random mask shape; the
        // deterministic extreme-cell samples use the plain ball
        let ball = BinarySet::disk(g, (cx, cy), r);
        let a = match if si < det_count { 0 } else { si % 4 } {
            0 => BinarySet::full(g),
            1 => {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let c: f64 = rng.gen_range(-r..r);
                BinarySet::from_fn(g, |x, y| {
                    (x - cx) * th.cos() + (y - cy) * th.sin() <= c
                })
            }
            2 => BinarySet::disk(g, (cx + rng.gen_range(-r..r), cy + rng.gen_range(-r..r)), r),
            _ => BinarySet::rect(
                g,
                cx - rng.gen_range(0.2 * r..r),
                cy - rng.gen_range(0.2 * r..r),
                cx + rng.gen_range(0.2 * r..r),
                cy + rng.gen_range(0.2 * r..r),
            ),
        };
        let e = ball.intersect(&a);
        if e.is_empty() {
            continue;
        }
        let per = perimeter(&e, scheme);
        if per <= 0.0 {
            continue;
        }
        let mut pos = 0.0f64;
        let mut neg = 0.0f64;
        for (i, &m) in e.mask.iter().enumerate() {
            if m {
                let v = kappa.values[i];
                if v > 0.0 {
                    pos += v;
                } else {
                    neg -= v;
                }
            }
        }
        let (rp, rn) = (pos * h2 / per, neg * h2 / per);
        if rp.max(rn) > max_pos.max(max_neg) {
            witness = (cx, cy, r);
        }
        max_pos = max_pos.max(rp);
        max_neg = max_neg.max(rn);
        evaluated += 1;
    }
    Ok(CurvatureInequalityReport {
        max_pos_ratio: max_pos,
        max_neg_ratio: max_neg,
        xi,
        passes: max_pos <= xi && max_neg <= xi,
        witness,
        samples_evaluated: evaluated,
    })
}

/// Energy of a set under the inner prescribed-curvature functional, for
/// diagnostics: Per(E) − λ|E|.
pub fn inner_energy(e: &BinarySet, lambda: f64, scheme: &PerimeterScheme) -> f64 {
    let kappa = ScalarField::constant(e.grid, lambda);
    pmc_energy(e, &kappa, scheme)
}
