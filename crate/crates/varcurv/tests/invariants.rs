//! Module-level invariants that cut across the library: monotone capture
//! bounds, Cheeger floors, rolling-ball offsets, far-field curvature
//! structure, curvature-vs-perimeter ratios for the square, density
//! estimates for denoised square level sets, stack convergence, the
//! L¹-plus-density route to Hausdorff convergence, and the config
//! round trip.

mod common;

use common::*;
use varcurv::*;

fn scheme() -> PerimeterScheme {
    PerimeterScheme::default_16()
}

/// A cell's capture parameter in the inner family is at most
/// d/dist(x, ∂D) up to a grid-step factor.
#[test]
fn monotone_capture_bound() {
    let g = Grid::centered(192, 4.2);
    let d = BinarySet::disk(g, (0.0, 0.0), 0.4);
    let lams = geometric_lambdas(2.0, 4.0 / g.h, 48);
    let res = variational_curvature(&d, &lams, &DensitySpec::default(), &scheme()).unwrap();
    let bd = boundary(&d);
    let dist = distance_field(&bd.points, &g).unwrap();
    let ratio = lams[1] / lams[0];
    let mut checked = 0;
    for i in 0..g.cell_count() {
        if d.mask[i] && dist.values[i] > 4.0 * g.h {
            let bound = 2.0 / (dist.values[i] - 2.0 * g.h) * ratio;
            assert!(
                res.field.values[i] <= bound + 1e-9,
                "cell {i}: κ = {} vs d/dist bound {bound}",
                res.field.values[i]
            );
            checked += 1;
        }
    }
    assert!(checked > 300, "only {checked} interior cells checked");
}

/// min_D κ_D ≥ h(D) − one λ-step.
#[test]
fn curvature_floor_is_cheeger_constant() {
    let g = Grid::centered(192, 4.2);
    let d = BinarySet::rect(g, -0.5, -0.5, 0.5, 0.5);
    let sch = scheme();
    let lams = geometric_lambdas(2.0, 4.0 / g.h, 48);
    let res = variational_curvature(&d, &lams, &DensitySpec::default(), &sch).unwrap();
    let ch = cheeger(&d, 1e-3, &sch).unwrap();
    let min_kappa = (0..g.cell_count())
        .filter(|&i| d.mask[i])
        .map(|i| res.field.values[i])
        .fold(f64::INFINITY, f64::min);
    let step = lambda_step_at(&lams, ch.h);
    assert!(
        min_kappa >= ch.h - step - 1e-9,
        "min κ = {min_kappa} vs h(D) − step = {}",
        ch.h - step
    );
}

/// The inner set of the square at λ = 8 is the square with corners
/// rounded at radius 1/8 (rolling-ball oracle), and its boundary gap to
/// the square is the corner sagitta (1 − 1/√2)/λ.
#[test]
fn rolling_ball_offsets_of_the_square() {
    let g = Grid::centered(384, 2.05);
    let d = BinarySet::rect(g, -0.5, -0.5, 0.5, 0.5);
    let sch = scheme();
    for lam in [8.0, 16.0] {
        let fam = level_family(&d, FamilyDirection::Inner, &[lam], &DensitySpec::default(), &sch)
            .unwrap();
        let oracle = rounded_square_mask(g, (0.0, 0.0), 1.0, 1.0 / lam);
        let gap = fam.sets[0].sym_diff_area(&oracle);
        assert!(gap <= 4.0 * g.h * 4.0, "λ = {lam}: |Δ| = {gap}");
        let dh = hausdorff_points(
            &boundary(&fam.sets[0]).points,
            &boundary(&d).points,
            &g,
        )
        .unwrap();
        let sagitta = (1.0 - 0.5f64.sqrt()) * 2f64.sqrt() / lam;
        assert!(
            (dh - sagitta).abs() <= 3.0 * g.h,
            "λ = {lam}: corner gap {dh} vs sagitta {sagitta}"
        );
    }
}

/// Outside the convex hull the curvature is −λ_g·g with one common
/// breakpoint λ_g for the whole far field.
#[test]
fn far_field_curvature_has_a_single_breakpoint() {
    let g = Grid::centered(160, 4.4);
    let d = BinarySet::rect(g, -0.4, -0.25, 0.4, 0.25);
    let sch = scheme();
    let density = DensitySpec::default();
    let lams = geometric_lambdas(0.05, 4.0 / g.h, 48);
    let res = variational_curvature(&d, &lams, &density, &sch).unwrap();
    let hull = convex_hull(&d).unwrap();
    // ratio κ/(−g) should be one common λ value far from the hull
    let mut far_values = Vec::new();
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let i = g.idx(ix, iy);
            if !hull.mask[i] {
                let (x, y) = g.center(ix, iy);
                if x * x + y * y > 1.0 {
                    let gval = density.value(x, y);
                    far_values.push(-res.field.values[i] / gval);
                }
            }
        }
    }
    let lo = far_values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = far_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (hi - lo).abs() < 1e-12,
        "far-field breakpoint not unique: [{lo}, {hi}]"
    );
    // and it is the first λ whose outer minimizer is nonempty
    let fam = level_family(&d, FamilyDirection::Outer, &lams, &density, &sch).unwrap();
    let first = fam
        .lambdas
        .iter()
        .zip(&fam.sets)
        .find(|(_, s)| !s.is_full())
        .map(|(&l, _)| l)
        .unwrap();
    assert!((lo - first).abs() < 1e-12, "far value {lo} vs first breakpoint {first}");
}

/// The square's optimal curvature passes the small-scale ratio check at
/// ξ = 0.5 (the sharp corner constant is ≈ 0.26).
#[test]
fn square_curvature_ratio_check() {
    let g = Grid::centered(256, 4.2);
    let d = BinarySet::rect(g, -0.5, -0.5, 0.5, 0.5);
    let sch = scheme();
    let lams = geometric_lambdas(2.0, 4.0 / g.h, 64);
    let res = variational_curvature(&d, &lams, &DensitySpec::default(), &sch).unwrap();
    let rep = check_curvature_inequality(&res.field, 0.5, 0.1, 48, 11, &sch).unwrap();
    assert!(
        rep.passes,
        "max ratios {} / {} exceed 0.5",
        rep.max_pos_ratio, rep.max_neg_ratio
    );
    // the positive ratio is dominated by the Cheeger plateau h(S)·r/2 at
    // the probe radius, comfortably above the corner constant 0.26·r/r₀
    assert!(rep.max_pos_ratio > 0.1, "{}", rep.max_pos_ratio);
}

/// Density estimates for denoised square level sets: the rounded corners
/// put boundary points beyond δ of ∂S, and their density stays bounded
/// below across the α schedule.
#[test]
fn density_estimates_square_corners() {
    let g = Grid::centered(256, 2.05);
    let d = BinarySet::rect(g, -0.5, -0.5, 0.5, 0.5);
    let f = d.indicator();
    let zero = ScalarField::zeros(g);
    let sch = scheme();
    let psi = FidelitySpec::quadratic();
    let radii = [0.02, 0.05, 0.1];
    let mut far_seen = false;
    for alpha in [0.2, 0.1, 0.05] {
        let res = denoise(&f, &zero, alpha, &psi, &DenoiseOptions::default(), &sch).unwrap();
        let rep = verify_density_estimates(&res, &d, 0.5, 0.021, &radii, &sch).unwrap();
        assert!(
            rep.curvature_bound_holds,
            "α = {alpha}: sup |v| far = {} vs {}",
            rep.sup_v_far, rep.bound
        );
        if rep.far_boundary_points > 0 {
            far_seen = true;
            let c = rep.c_k.unwrap();
            assert!(c >= 0.2, "α = {alpha}: density floor {c}");
        }
    }
    assert!(far_seen, "no boundary points beyond δ at any α; test is vacuous");
}

/// Two-level stack: both level boundaries converge along the schedule.
#[test]
fn stack_levels_both_converge() {
    let g = Grid::centered(192, 2.05);
    let phantom = Phantom::stack(g, 0.6, 0.3);
    let cfg = RunConfig { s_list: vec![0.5, 1.5], levels: 256, ..Default::default() };
    let alphas = [0.04, 0.02, 0.01, 0.005];
    let rep = run_noiseless_convergence(&phantom, &alphas, &cfg, &scheme()).unwrap();
    assert!(rep.passed(), "{:#?}", rep.checks);
}

/// L¹ convergence plus uniform inner density forces Hausdorff
/// convergence of the sets, and adding boundary convergence forces set
/// convergence; checked on a shrinking-perturbation family.
#[test]
fn density_plus_measure_gives_hausdorff() {
    let g = Grid::centered(256, 2.0);
    let e0 = BinarySet::disk(g, (0.0, 0.0), 0.5);
    let mut prev_dh = f64::INFINITY;
    for k in 1..=4 {
        let eps = 0.2 / k as f64;
        // wobbled disk: radius modulated at a fixed frequency with
        // shrinking amplitude; inner density stays uniform
        let ek = BinarySet::from_fn(g, |x, y| {
            let r = (x * x + y * y).sqrt();
            let th = y.atan2(x);
            r <= 0.5 + eps * (6.0 * th).sin() * 0.5
        });
        let dh = hausdorff_sets(&ek, &e0).unwrap();
        let dsym = ek.sym_diff_area(&e0);
        assert!(dh <= prev_dh + g.h, "dh not shrinking: {dh} vs {prev_dh}");
        assert!(dh <= 0.6 * eps + 2.0 * g.h, "dh = {dh} vs amplitude {eps}");
        assert!(dsym <= 2.0 * eps);
        // boundary distance controls the set distance from above as well
        let rep = boundary_hausdorff_bound_check(&ek, &e0).unwrap();
        assert!(rep.sets <= rep.boundary + 2.0 * g.h);
        prev_dh = dh;
    }
}

/// Config round trip: serialize(parse(toml)) is semantically identical.
#[test]
fn config_round_trip() {
    let text = r#"
seed = 9
out_dir = "out/x"

[grid]
n = 128
extent = 4.1

[phantom]
kind = "square"
side = 1.0

[solver]
backend = "cut"
levels = 256
p = 2.0
neighborhood = 16

[run]
kind = "noisy"
s_list = [0.25, 0.5]

[noise]
kind = "gaussian"
scales = [0.05, 0.02]

[rule]
kind = "hard"
c = 0.88
"#;
    let cfg = parse_config(text).unwrap();
    let serialized = toml::to_string(&cfg).unwrap();
    let back = parse_config(&serialized).unwrap();
    assert_eq!(cfg, back);
}
