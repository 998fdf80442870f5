//! Noise models (reproducible from a seed) and the parameter-choice
//! rules coupling the regularization weight to the noise magnitude.

use crate::error::{Error, Result};
use crate::fidelity::{FidelitySpec, THETA_2};
use crate::grid::{Grid, ScalarField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone)]
pub enum NoiseModel {
    /// scale · cos²(π|x−c|/(2·width)) on B(c, width).
    ScaledBump { center: (f64, f64), width: f64 },
    /// Per-cell independent N(0, scale²), truncated at 4 standard
    /// deviations and supported on B(0, 2).
    IidGaussian,
    /// scale · indicator of a far ball at distance `gap` from the
    /// centered unit square along the lower-left diagonal.
    FarIndicator { gap: f64, radius: f64 },
}

#[derive(Debug, Clone)]
pub struct NoiseRealization {
    pub w: ScalarField,
    /// Grid L² norm (the planar d/(d−1) norm).
    pub norm: f64,
    pub scale: f64,
}

pub fn realize_noise(
    model: &NoiseModel,
    grid: Grid,
    scale: f64,
    seed: u64,
) -> NoiseRealization {
    let w = match model {
        NoiseModel::ScaledBump { center, width } => {
            let (cx, cy) = *center;
            let wd = *width;
            ScalarField::from_fn(grid, |x, y| {
                let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                if d < wd {
                    let t = (std::f64::consts::PI * d / (2.0 * wd)).cos();
                    scale * t * t
                } else {
                    0.0
                }
            })
        }
        NoiseModel::IidGaussian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let mut w = ScalarField::zeros(grid);
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    // one draw per cell keeps realizations seed-stable
                    let xi: f64 = normal.sample(&mut rng);
                    let (x, y) = grid.center(ix, iy);
                    if x * x + y * y <= 4.0 {
                        w.values[grid.idx(ix, iy)] = scale * xi.clamp(-4.0, 4.0);
                    }
                }
            }
            w
        }
        NoiseModel::FarIndicator { gap, radius } => {
            let c = crate::phantom::Phantom::far_ball_center(*gap, *radius);
            let r2 = radius * radius;
            ScalarField::from_fn(grid, |x, y| {
                let (dx, dy) = (x - c.0, y - c.1);
                if dx * dx + dy * dy <= r2 {
                    scale
                } else {
                    0.0
                }
            })
        }
    };
    let norm = w.norm_lp(2.0);
    NoiseRealization { w, norm, scale }
}

/// Coupling between noise magnitude and regularization weight.
#[derive(Debug, Clone, Copy)]
pub enum ParameterRule {
    /// ‖w‖₂/α ≤ C with C strictly below the admissible ceiling
    /// m_{ψ*}(Θ₂)/Θ₂; α is taken as ‖w‖₂/C.
    Hard { c: f64 },
    /// (1/α)∫ψ(w) ≤ C; α = ∫ψ(w)/C.
    Easy { c: f64 },
    /// α = C·‖w‖₂ (the linear choice; the interesting threshold is
    /// C vs 1/Θ₂).
    Linear { c: f64 },
}

impl ParameterRule {
    pub fn validate(&self, psi: &FidelitySpec) -> Result<()> {
        match *self {
            ParameterRule::Hard { c } => {
                let ceiling = psi.hard_rule_ceiling(THETA_2);
                if !(c > 0.0 && c < ceiling) {
                    return Err(Error::RuleViolation {
                        step: 0,
                        detail: format!("hard-rule constant {c} not in (0, {ceiling})"),
                    });
                }
            }
            ParameterRule::Easy { c } | ParameterRule::Linear { c } => {
                if !(c > 0.0) {
                    return Err(Error::RuleViolation {
                        step: 0,
                        detail: format!("rule constant {c} must be positive"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Regularization weight for a noise realization.
    pub fn alpha_for(
        &self,
        w: &ScalarField,
        psi: &FidelitySpec,
        step: usize,
    ) -> Result<f64> {
        let alpha = match *self {
            ParameterRule::Hard { c } => w.norm_lp(2.0) / c,
            ParameterRule::Easy { c } => {
                let integral: f64 =
                    w.values.iter().map(|&t| psi.psi(t)).sum::<f64>() * w.grid.cell_area();
                integral / c
            }
            ParameterRule::Linear { c } => c * w.norm_lp(2.0),
        };
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::RuleViolation {
                step,
                detail: format!("rule produced α = {alpha} (zero-noise step?)"),
            });
        }
        Ok(alpha)
    }

    /// Check the rule's inequality for a given (w, α) pair.
    pub fn check_pair(
        &self,
        w: &ScalarField,
        alpha: f64,
        psi: &FidelitySpec,
        step: usize,
    ) -> Result<()> {
        let ok = match *self {
            ParameterRule::Hard { c } => w.norm_lp(2.0) / alpha <= c * (1.0 + 1e-12),
            ParameterRule::Easy { c } => {
                let integral: f64 =
                    w.values.iter().map(|&t| psi.psi(t)).sum::<f64>() * w.grid.cell_area();
                integral / alpha <= c * (1.0 + 1e-12)
            }
            ParameterRule::Linear { c } => {
                (alpha - c * w.norm_lp(2.0)).abs() <= 1e-9 * alpha.max(1.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::RuleViolation {
                step,
                detail: format!("pair (‖w‖ = {}, α = {alpha}) violates {self:?}", w.norm_lp(2.0)),
            })
        }
    }
}
