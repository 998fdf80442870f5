//! Exact discrete minimizers of prescribed-curvature energies on pixel
//! grids, variational curvatures of finite-perimeter sets, Cheeger sets,
//! and total-variation denoising with dual certificates, plus the
//! geometric toolbox (perimeters, boundaries, Hausdorff distances, density
//! profiles) used to study how denoised level sets track the data's level
//! sets.

pub mod boundary;
pub mod cli;
pub mod config;
pub mod density;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod grid;
pub mod hull;
pub mod io;
pub mod maxflow;
pub mod noise;
pub mod pd;
pub mod phantom;
pub mod perimeter;
pub mod curvature;
pub mod pmc;
pub mod rof;
pub mod svg;

pub use boundary::{boundary, BoundarySet};
pub use cli::run_cli;
pub use config::{parse_config, run_experiment, ExperimentConfig};
pub use density::{density_profile, DensityProfile};
pub use dist::{
    boundary_hausdorff_bound_check, distance_field, hausdorff_points, hausdorff_sets,
};
pub use error::{Error, Result};
pub use experiments::{
    run_noiseless_convergence, run_noisy_convergence, verify_approximation_lemmas,
    verify_density_estimates, ApproximationReport, CheckOutcome, ConvergenceReport,
    DensityEstimateReport, ReportRow, RunConfig,
};
pub use fidelity::{FidelitySpec, THETA_2};
pub use noise::{realize_noise, NoiseModel, NoiseRealization, ParameterRule};
pub use phantom::Phantom;
pub use grid::{BinarySet, Grid, ScalarField};
pub use hull::convex_hull;
pub use perimeter::{perimeter, Neighborhood, PerimeterScheme};
pub use curvature::{
    cheeger, check_curvature_inequality, default_lambda_grid, geometric_lambdas, lambda_step_at,
    level_family, variational_curvature, CheegerResult, CurvatureInequalityReport,
    CurvatureResult, DensitySpec, FamilyDirection, Normalization, ParametricFamily,
};
pub use pmc::{minimize_pmc, Constraint, CutScale, PmcSolution, Select};
pub use rof::{
    denoise, dual_stability_bound, level_optimality_check, level_set, snap_threshold,
    verify_comparison, verify_dual_stability, Backend, ComparisonReport, DenoiseOptions,
    DenoiseResult, DualStabilityReport,
};
