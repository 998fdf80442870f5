//! Scripted verification runs: how denoised level sets track the data's
//! level sets as the regularization weight (and noise) go to zero, the
//! two-sided approximation of a set by its curvature families, and the
//! far-field density estimates. Each run returns a metric table (one row
//! per (step, threshold)) plus named check outcomes; nothing is asserted
//! here so callers can decide what is fatal.

use crate::boundary::boundary;
use crate::curvature::{
    lambda_step_at, level_family, variational_curvature, DensitySpec, FamilyDirection,
};
use crate::density::{density_profile_at, DensityProfile};
use crate::dist::{distance_field, hausdorff_points, hausdorff_sets};
use crate::error::Result;
use crate::fidelity::FidelitySpec;
use crate::grid::{BinarySet, ScalarField};
use crate::noise::{realize_noise, NoiseModel, ParameterRule};
use crate::perimeter::{perimeter, PerimeterScheme};
use crate::phantom::Phantom;
use crate::rof::{denoise, level_set, snap_threshold, DenoiseOptions, DenoiseResult};

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub step: usize,
    pub alpha: f64,
    pub noise_scale: f64,
    pub noise_norm: f64,
    pub s: f64,
    pub dh_boundary: Option<f64>,
    pub dh_sets: Option<f64>,
    pub dh_complements: Option<f64>,
    pub sym_diff: Option<f64>,
    pub support_radius: f64,
    pub density_inner_min: Option<f64>,
    pub density_outer_min: Option<f64>,
    pub sandwich_inner: Option<bool>,
    pub sandwich_outer: Option<bool>,
    pub curv_domination_violations: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub checks: Vec<CheckOutcome>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "step,alpha,noise_scale,noise_norm,s,dh_boundary,dh_sets,dh_complements,\
             sym_diff,support_radius,density_inner_min,density_outer_min,\
             sandwich_inner,sandwich_outer,curv_domination_violations\n",
        );
        let opt = |v: &Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
        let optb = |v: &Option<bool>| v.map_or(String::new(), |x| format!("{x}"));
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.step,
                r.alpha,
                r.noise_scale,
                r.noise_norm,
                r.s,
                opt(&r.dh_boundary),
                opt(&r.dh_sets),
                opt(&r.dh_complements),
                opt(&r.sym_diff),
                r.support_radius,
                opt(&r.density_inner_min),
                opt(&r.density_outer_min),
                optb(&r.sandwich_inner),
                optb(&r.sandwich_outer),
                opt(&r.curv_domination_violations),
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub s_list: Vec<f64>,
    pub levels: usize,
    pub psi: FidelitySpec,
    /// Radii for the per-level-set density profiles (empty to skip).
    pub density_radii: Vec<f64>,
    /// Check the level-set sandwich D^λ ⊂ E^s ⊂ D^{−λ'} per row
    /// (indicator phantoms only; needs room for B(0,2)).
    pub sandwich: bool,
    /// Compare |v| against the phantom's optimal curvature per step
    /// (indicator phantoms only).
    pub curvature_domination: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            s_list: vec![0.25, 0.5, 0.75],
            levels: 256,
            psi: FidelitySpec::quadratic(),
            density_radii: Vec::new(),
            sandwich: false,
            curvature_domination: false,
        }
    }
}

fn metrics_against_truth(
    res: &DenoiseResult,
    truth: &BinarySet,
    s: f64,
    cfg: &RunConfig,
) -> (BinarySet, ReportRow) {
    let e = level_set(res, s);
    let g = e.grid;
    let support_radius = res.u.support_radius(1e-9);
    let mut row = ReportRow {
        step: 0,
        alpha: res.alpha,
        noise_scale: 0.0,
        noise_norm: 0.0,
        s,
        dh_boundary: None,
        dh_sets: None,
        dh_complements: None,
        sym_diff: None,
        support_radius,
        density_inner_min: None,
        density_outer_min: None,
        sandwich_inner: None,
        sandwich_outer: None,
        curv_domination_violations: None,
    };
    row.sym_diff = Some(e.sym_diff_area(truth));
    if !e.is_empty() && !truth.is_empty() {
        row.dh_sets = hausdorff_sets(&e, truth).ok();
        row.dh_complements = hausdorff_sets(&e.complement(), &truth.complement()).ok();
        let be = boundary(&e);
        let bt = boundary(truth);
        if !be.is_empty() && !bt.is_empty() {
            row.dh_boundary = hausdorff_points(&be.points, &bt.points, &g).ok();
        }
        if !cfg.density_radii.is_empty() && !e.is_full() {
            if let Ok(p) = crate::density::density_profile(&e, &cfg.density_radii) {
                row.density_inner_min =
                    Some(p.inner_min.iter().copied().fold(f64::INFINITY, f64::min));
                row.density_outer_min =
                    Some(p.outer_min.iter().copied().fold(f64::INFINITY, f64::min));
            }
        }
    }
    (e, row)
}

/// Noiseless run over a decreasing α schedule. Checks: the boundary
/// Hausdorff distance at the final α is below 3h for every tested s, and
/// it is non-increasing over the last (up to) four steps up to 1h jitter.
pub fn run_noiseless_convergence(
    phantom: &Phantom,
    alphas: &[f64],
    cfg: &RunConfig,
    scheme: &PerimeterScheme,
) -> Result<ConvergenceReport> {
    let g = phantom.f.grid;
    let zero = ScalarField::zeros(g);
    let opts = DenoiseOptions { levels: cfg.levels, ..Default::default() };
    let mut report = ConvergenceReport::default();
    let mut kappa_field: Option<ScalarField> = None;
    let mut kappa_step: Option<ScalarField> = None;
    if cfg.curvature_domination {
        if let Some(d) = &phantom.indicator_set {
            let lams = crate::curvature::default_lambda_grid(&g);
            let res =
                variational_curvature(d, &lams, &DensitySpec::default(), scheme)?;
            let step = res.field.map(|v| lambda_step_at(&lams, *v));
            kappa_field = Some(res.field);
            kappa_step = Some(step);
        }
    }
    let quant = (phantom.f.max() - phantom.f.min()) / (cfg.levels.max(2) - 1) as f64;

    for (step, &alpha) in alphas.iter().enumerate() {
        let res = denoise(&phantom.f, &zero, alpha, &cfg.psi, &opts, scheme)?;
        let viol = kappa_field.as_ref().map(|kappa| {
            // |v| may exceed |κ_D| by one λ-step plus the certificate
            // perturbation induced by value quantization and O(h)
            // geometry, which scales like 1/α
            let steps = kappa_step.as_ref().unwrap();
            let slack = (quant + 3.0 * g.h) / alpha;
            let n = g.cell_count();
            let bad = (0..n)
                .filter(|&i| {
                    res.v.values[i].abs() > kappa.values[i].abs() + steps.values[i] + slack
                })
                .count();
            bad as f64 / n as f64
        });
        for &s in &cfg.s_list {
            let s_snap = snap_threshold(&res, s);
            let truth = phantom.level_set(s_snap);
            let (e, mut row) = metrics_against_truth(&res, &truth, s_snap, cfg);
            row.step = step;
            row.curv_domination_violations = viol;
            if cfg.sandwich {
                if let Some(d) = &phantom.indicator_set {
                    let (si, so) = sandwich_flags(d, &e, s_snap, alpha, &cfg.psi, scheme)?;
                    row.sandwich_inner = Some(si);
                    row.sandwich_outer = Some(so);
                }
            }
            report.rows.push(row);
        }
    }

    let h = g.h;
    for &s in &cfg.s_list {
        let series: Vec<&ReportRow> = report
            .rows
            .iter()
            .filter(|r| (r.s - s).abs() < 0.5 / cfg.levels as f64 + 1e-9)
            .collect();
        if let Some(last) = series.last() {
            let final_ok = last.dh_boundary.map_or(false, |d| d <= 3.0 * h);
            report.checks.push(CheckOutcome {
                name: format!("final dh(∂E^{s:.3}, ∂G) <= 3h"),
                passed: final_ok,
                detail: format!("{:?} vs 3h = {}", last.dh_boundary, 3.0 * h),
            });
            report.checks.push(equivalence_check(last, h, s));
        }
        let tail: Vec<f64> = series
            .iter()
            .rev()
            .take(4)
            .filter_map(|r| r.dh_boundary)
            .collect();
        let monotone = tail.windows(2).all(|w| w[1] >= w[0] - h);
        report.checks.push(CheckOutcome {
            name: format!("dh(∂E^{s:.3}, ∂G) non-increasing (1h jitter)"),
            passed: monotone,
            detail: format!("last distances (final first): {tail:?}"),
        });
    }
    Ok(report)
}

/// Instrumented equivalence of boundary and set convergence: at the
/// final step the boundary distance and max(dh(E,G), dh(E^c,G^c)) agree
/// within the 2h discretization slack.
fn equivalence_check(row: &ReportRow, h: f64, s: f64) -> CheckOutcome {
    match (row.dh_boundary, row.dh_sets, row.dh_complements) {
        (Some(db), Some(ds), Some(dc)) => {
            let m = ds.max(dc);
            CheckOutcome {
                name: format!("boundary/set Hausdorff equivalence at s = {s:.3}"),
                passed: (db - m).abs() <= 2.0 * h,
                detail: format!("dh(∂) = {db}, max(dh(E,G), dh(E^c,G^c)) = {m}"),
            }
        }
        _ => CheckOutcome {
            name: format!("boundary/set Hausdorff equivalence at s = {s:.3}"),
            passed: false,
            detail: "final level set empty".into(),
        },
    }
}

/// The level-set sandwich for indicator data: D^λ ⊂ E^s for
/// λ = 0.95·ψ'(1−s)/α and E^s ⊂ D^{−μ} for μ = 0.95·ψ'(s)/α, both
/// cell-exact on the shared cut metric.
pub fn sandwich_flags(
    d: &BinarySet,
    e: &BinarySet,
    s: f64,
    alpha: f64,
    psi: &FidelitySpec,
    scheme: &PerimeterScheme,
) -> Result<(bool, bool)> {
    let density = DensitySpec::default();
    let lam = 0.95 * psi.psi_prime(1.0 - s) / alpha;
    let mu = 0.95 * psi.psi_prime(s) / alpha;
    let inner = level_family(d, FamilyDirection::Inner, &[lam], &density, scheme)?;
    let outer = level_family(d, FamilyDirection::Outer, &[mu], &density, scheme)?;
    Ok((
        inner.sets[0].is_subset_of(e),
        e.is_subset_of(&outer.sets[0]),
    ))
}

/// Noisy run along a shrinking noise schedule with α from the parameter
/// rule. Checks: the rule's inequality at every step, a common support
/// radius, and dh(∂E^s, ∂D) ≤ 5h at the final step for every tested s.
#[allow(clippy::too_many_arguments)]
pub fn run_noisy_convergence(
    phantom: &Phantom,
    noise: &NoiseModel,
    rule: &ParameterRule,
    scales: &[f64],
    seed: u64,
    cfg: &RunConfig,
    scheme: &PerimeterScheme,
) -> Result<ConvergenceReport> {
    let d = phantom
        .indicator_set
        .as_ref()
        .ok_or_else(|| crate::error::Error::InvalidParameter(
            "noisy convergence runs need an indicator phantom".into(),
        ))?;
    rule.validate(&cfg.psi)?;
    let g = phantom.f.grid;
    let opts = DenoiseOptions { levels: cfg.levels, ..Default::default() };
    let mut report = ConvergenceReport::default();
    for (step, &scale) in scales.iter().enumerate() {
        let nr = realize_noise(noise, g, scale, seed.wrapping_add(step as u64));
        let alpha = rule.alpha_for(&nr.w, &cfg.psi, step)?;
        rule.check_pair(&nr.w, alpha, &cfg.psi, step)?;
        let res = denoise(&phantom.f, &nr.w, alpha, &cfg.psi, &opts, scheme)?;
        for &s in &cfg.s_list {
            let s_snap = snap_threshold(&res, s);
            let truth = phantom.level_set(s_snap);
            let (e, mut row) = metrics_against_truth(&res, &truth, s_snap, cfg);
            row.step = step;
            row.noise_scale = scale;
            row.noise_norm = nr.norm;
            if cfg.sandwich {
                let (si, so) = sandwich_flags(d, &e, s_snap, alpha, &cfg.psi, scheme)?;
                row.sandwich_inner = Some(si);
                row.sandwich_outer = Some(so);
            }
            report.rows.push(row);
        }
    }
    let h = g.h;
    let (x0, y0, x1, y1) = g.bounds();
    let r_grid = x1.min(y1).min(-x0).min(-y0);
    let r_emp = report.rows.iter().fold(0.0f64, |m, r| m.max(r.support_radius));
    report.checks.push(CheckOutcome {
        name: "common support radius".into(),
        passed: r_emp <= 0.95 * r_grid,
        detail: format!("max support radius {r_emp} vs grid radius {r_grid}"),
    });
    let last_step = scales.len() - 1;
    for &s in &cfg.s_list {
        let last = report
            .rows
            .iter()
            .filter(|r| r.step == last_step && (r.s - s).abs() < 0.5 / cfg.levels as f64 + 1e-9)
            .next_back();
        let ok = last.and_then(|r| r.dh_boundary).map_or(false, |d| d <= 5.0 * h);
        report.checks.push(CheckOutcome {
            name: format!("final dh(∂E^{s:.3}, ∂D) <= 5h"),
            passed: ok,
            detail: format!("{:?} vs 5h = {}", last.and_then(|r| r.dh_boundary), 5.0 * h),
        });
        if let Some(row) = last {
            report.checks.push(equivalence_check(row, h, s));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ApproximationRow {
    pub lambda: f64,
    pub inner_mass_gap: f64,
    pub outer_mass_gap: f64,
    pub dh_inner_boundary: Option<f64>,
    pub dh_outer_boundary: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ApproximationReport {
    pub rows: Vec<ApproximationRow>,
    pub checks: Vec<CheckOutcome>,
}

impl ApproximationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Two-sided approximation of D by its curvature families: |D \ D^λ| and
/// |D^{−λ} \ D| decrease (h²-jitter) to ≤ 4h·Per(D), and for convex
/// phantoms the boundary Hausdorff gaps obey the rolling-ball bound
/// d/λ + 2h.
pub fn verify_approximation_lemmas(
    d: &BinarySet,
    lambdas: &[f64],
    convex: bool,
    scheme: &PerimeterScheme,
) -> Result<ApproximationReport> {
    let density = DensitySpec::default();
    let inner = level_family(d, FamilyDirection::Inner, lambdas, &density, scheme)?;
    let outer = level_family(d, FamilyDirection::Outer, lambdas, &density, scheme)?;
    let bd = boundary(d);
    let g = d.grid;
    let mut report = ApproximationReport::default();
    for (k, &lam) in lambdas.iter().enumerate() {
        let din = &inner.sets[k];
        let dout = &outer.sets[k];
        let dh_in = if din.is_empty() {
            None
        } else {
            let b = boundary(din);
            (!b.is_empty())
                .then(|| hausdorff_points(&b.points, &bd.points, &g))
                .transpose()?
        };
        let dh_out = if dout.is_full() {
            None
        } else {
            let b = boundary(dout);
            (!b.is_empty())
                .then(|| hausdorff_points(&b.points, &bd.points, &g))
                .transpose()?
        };
        report.rows.push(ApproximationRow {
            lambda: lam,
            inner_mass_gap: d.minus(din).area(),
            outer_mass_gap: dout.minus(d).area(),
            dh_inner_boundary: dh_in,
            dh_outer_boundary: dh_out,
        });
    }
    let per_d = perimeter(d, scheme);
    let h = g.h;
    let jitter = 4.0 * g.cell_area();
    let mono = |gaps: Vec<f64>| gaps.windows(2).all(|w| w[1] <= w[0] + jitter);
    let inner_gaps: Vec<f64> = report.rows.iter().map(|r| r.inner_mass_gap).collect();
    let outer_gaps: Vec<f64> = report.rows.iter().map(|r| r.outer_mass_gap).collect();
    report.checks.push(CheckOutcome {
        name: "inner mass gap decreases to 4h·Per(D)".into(),
        passed: mono(inner_gaps.clone())
            && inner_gaps.last().map_or(false, |&v| v <= 4.0 * h * per_d),
        detail: format!("gaps {inner_gaps:?}, bound {}", 4.0 * h * per_d),
    });
    report.checks.push(CheckOutcome {
        name: "outer mass gap decreases to 4h·Per(D)".into(),
        passed: mono(outer_gaps.clone())
            && outer_gaps.last().map_or(false, |&v| v <= 4.0 * h * per_d),
        detail: format!("gaps {outer_gaps:?}, bound {}", 4.0 * h * per_d),
    });
    if convex {
        let mut ok = true;
        let mut worst = String::new();
        for r in &report.rows {
            let bound = 2.0 / r.lambda + 2.0 * h;
            for (side, v) in [("inner", r.dh_inner_boundary), ("outer", r.dh_outer_boundary)] {
                if let Some(v) = v {
                    if v > bound {
                        ok = false;
                        worst = format!("λ = {}: {side} gap {v} > {bound}", r.lambda);
                    }
                }
            }
        }
        report.checks.push(CheckOutcome {
            name: "rolling-ball boundary bound d/λ + 2h (convex)".into(),
            passed: ok,
            detail: worst,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct DensityEstimateReport {
    /// sup |v| over {dist(·, ∂D) ≥ δ}.
    pub sup_v_far: f64,
    /// The curvature bound d/δ (times the 10% slack) it must stay below.
    pub bound: f64,
    pub curvature_bound_holds: bool,
    /// Density profile over ∂E^s points at distance ≥ δ from ∂D, when any
    /// exist (no such points means no spurious far structure).
    pub far_profile: Option<DensityProfile>,
    pub far_boundary_points: usize,
    /// Empirical density floor over the far boundary points.
    pub c_k: Option<f64>,
    pub r_k: Option<f64>,
}

/// Far-field density estimates for a noiseless denoising result on
/// indicator data: (i) |v| ≤ d/δ away from ∂D; (ii) density-profile
/// minima of E^s at boundary points away from ∂D admit a floor.
pub fn verify_density_estimates(
    res: &DenoiseResult,
    d: &BinarySet,
    s: f64,
    delta: f64,
    radii: &[f64],
    scheme: &PerimeterScheme,
) -> Result<DensityEstimateReport> {
    let g = d.grid;
    if !(delta > 2.0 * g.h) {
        return Err(crate::error::Error::InvalidParameter(
            "δ must exceed 2h".into(),
        ));
    }
    let _ = scheme;
    let bd = boundary(d);
    let dist = distance_field(&bd.points, &g)?;
    let mut sup_v_far = 0.0f64;
    for i in 0..g.cell_count() {
        if dist.values[i] >= delta {
            sup_v_far = sup_v_far.max(res.v.values[i].abs());
        }
    }
    let bound = 2.0 / delta * 1.1;
    let e = level_set(res, snap_threshold(res, s));
    let far_points: Vec<(f64, f64)> = if e.is_empty() || e.is_full() {
        Vec::new()
    } else {
        boundary(&e)
            .points
            .iter()
            .copied()
            .filter(|&(x, y)| {
                let ix = ((x - g.origin.0) / g.h).round().clamp(0.0, g.nx as f64 - 1.0);
                let iy = ((y - g.origin.1) / g.h).round().clamp(0.0, g.ny as f64 - 1.0);
                dist.values[g.idx(ix as usize, iy as usize)] >= delta
            })
            .collect()
    };
    let far_profile = if far_points.is_empty() {
        None
    } else {
        Some(density_profile_at(&e, &far_points, radii)?)
    };
    let (c_k, r_k) = match &far_profile {
        None => (None, None),
        Some(p) => {
            let c = p
                .inner_min
                .iter()
                .zip(&p.outer_min)
                .map(|(&a, &b)| a.min(b))
                .fold(f64::INFINITY, f64::min);
            (Some(c), p.radii.first().copied())
        }
    };
    Ok(DensityEstimateReport {
        sup_v_far,
        bound,
        curvature_bound_holds: sup_v_far <= bound,
        far_profile,
        far_boundary_points: far_points.len(),
        c_k,
        r_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn noiseless_disk_run_converges() {
        let g = Grid::centered(128, 1.0);
        let r = 0.25;
        let phantom = Phantom::disk(g, (0.0, 0.0), r);
        let cfg = RunConfig { s_list: vec![0.5], levels: 128, ..Default::default() };
        let scheme = PerimeterScheme::default_16();
        let alphas = [0.2 * r, 0.1 * r, 0.05 * r, 0.025 * r];
        let rep = run_noiseless_convergence(&phantom, &alphas, &cfg, &scheme).unwrap();
        assert!(rep.passed(), "checks: {:#?}", rep.checks);
        // csv round structure
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 1 + rep.rows.len());
    }

    #[test]
    fn approximation_lemmas_on_disk() {
        let g = Grid::centered(160, 4.2);
        let d = BinarySet::disk(g, (0.0, 0.0), 0.4);
        let scheme = PerimeterScheme::default_16();
        let lams: Vec<f64> = crate::curvature::geometric_lambdas(4.0, 60.0, 10);
        let rep = verify_approximation_lemmas(&d, &lams, true, &scheme).unwrap();
        assert!(rep.passed(), "{:#?}", rep.checks);
    }

    #[test]
    fn density_estimates_far_field_disk() {
        let g = Grid::centered(128, 1.0);
        let r = 0.25;
        let d = BinarySet::disk(g, (0.0, 0.0), r);
        let phantom = Phantom::disk(g, (0.0, 0.0), r);
        let scheme = PerimeterScheme::default_16();
        let zero = ScalarField::zeros(g);
        let res = denoise(
            &phantom.f,
            &zero,
            r / 4.0,
            &FidelitySpec::quadratic(),
            &DenoiseOptions { levels: 128, ..Default::default() },
            &scheme,
        )
        .unwrap();
        let rep = verify_density_estimates(&res, &d, 0.5, 0.1, &[0.02, 0.05], &scheme).unwrap();
        // d/δ = 20, and the plateau certificate is ~ 2/r = 8
        assert!(rep.curvature_bound_holds, "sup {} vs {}", rep.sup_v_far, rep.bound);
        assert!(rep.sup_v_far > 1.0);
        // the clean solve has no far boundary points
        assert_eq!(rep.far_boundary_points, 0);
    }
}
