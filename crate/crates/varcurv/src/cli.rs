//! Command-line surface. Exit codes: 0 on success, 1 on solver or
//! assertion failures, 2 on usage/input errors; errors go to stderr with
//! a machine-parsable `ERROR <code>:` prefix.

use crate::boundary::boundary;
use crate::config::{parse_config, run_experiment, scheme_for};
use crate::curvature::{cheeger, geometric_lambdas, variational_curvature, DensitySpec};
use crate::dist::hausdorff_points;
use crate::error::{Error, Result};
use crate::fidelity::FidelitySpec;
use crate::grid::ScalarField;
use crate::io;
use crate::rof::{denoise, Backend, DenoiseOptions};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "varcurv",
    version,
    about = "Prescribed-curvature minimizers, variational curvatures, Cheeger sets and exact ROF level sets on pixel grids"
)]
struct Cli {
    /// Seed for all randomized components.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total-variation denoising with dual certificate output.
    Denoise {
        /// Input data: 8-bit PGM mapped to [0,1] (with optional sidecar).
        #[arg(long)]
        input: PathBuf,
        /// Optional additive noise field (f64 raster).
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long)]
        alpha: f64,
        /// Fidelity exponent in (1, 2].
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Backend: cut | pd.
        #[arg(long, default_value = "cut")]
        backend: String,
        #[arg(long, default_value_t = 256)]
        levels: usize,
        #[arg(long, default_value_t = 16)]
        neighborhood: usize,
        /// Output path for the denoised field (f64 raster); the dual
        /// certificate goes to <out>.cert and metadata to <out>.meta.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimal variational curvature of a mask.
    Curvature {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        lambda_min: f64,
        /// Defaults to 4/h when omitted.
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 64)]
        levels: usize,
        #[arg(long, default_value_t = 16)]
        neighborhood: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cheeger constant and maximal Cheeger set of a mask.
    Cheeger {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        neighborhood: usize,
        /// Output mask path for the Cheeger set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff distance between two masks (or their boundaries).
    Hausdorff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Compare boundary point sets instead of the sets themselves.
        #[arg(long, default_value_t = false)]
        boundary: bool,
    },
    /// Run an experiment described by a TOML config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Denoise {
            input,
            noise,
            alpha,
            p,
            backend,
            levels,
            neighborhood,
            out,
        } => {
            let f = io::load_image(&input)?;
            let w = match noise {
                Some(path) => {
                    let w = io::load_field(&path)?;
                    if w.grid != f.grid {
                        return Err(Error::GridMismatch("noise grid differs from data grid"));
                    }
                    w
                }
                None => ScalarField::zeros(f.grid),
            };
            let psi = FidelitySpec::new(p)?;
            let backend = match backend.as_str() {
                "cut" => Backend::LevelwiseCut,
                "pd" => Backend::PrimalDual,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown backend {other}")))
                }
            };
            let opts = DenoiseOptions { backend, levels, ..Default::default() };
            let scheme = scheme_for(neighborhood);
            let start = std::time::Instant::now();
            let res = denoise(&f, &w, alpha, &psi, &opts, &scheme)?;
            let runtime = start.elapsed().as_secs_f64();
            io::save_field(&out, &res.u)?;
            let cert = out.with_extension("cert");
            io::save_field(&cert, &res.v)?;
            let energy: f64 = {
                let fid: f64 = res
                    .u
                    .values
                    .iter()
                    .zip(&f.values)
                    .zip(&w.values)
                    .map(|((&u, &fv), &wv)| psi.psi(u - fv - wv))
                    .sum::<f64>()
                    * f.grid.cell_area();
                let tv: f64 = crate::pd::build_edges(&f.grid, &scheme)
                    .w
                    .iter()
                    .zip(level_differences(&res.u, &scheme))
                    .map(|(&w, d)| w * d.abs())
                    .sum();
                fid + alpha * tv
            };
            let meta = serde_json::json!({
                "alpha": alpha,
                "p": p,
                "backend": format!("{:?}", res.backend),
                "gap": res.gap,
                "energy": energy,
                "runtime_seconds": runtime,
            });
            std::fs::write(
                out.with_extension("meta.json"),
                serde_json::to_string_pretty(&meta).unwrap(),
            )?;
            println!("energy {energy} gap {} runtime {runtime:.3}s", res.gap);
            Ok(0)
        }
        Command::Curvature {
            input,
            lambda_min,
            lambda_max,
            levels,
            neighborhood,
            out,
        } => {
            let d = io::load_mask(&input)?;
            if d.is_empty() {
                return Err(Error::EmptyInput("curvature of an empty mask"));
            }
            let scheme = scheme_for(neighborhood);
            let lmax = lambda_max.unwrap_or(4.0 / d.grid.h);
            let lams = geometric_lambdas(lambda_min, lmax, levels);
            let res = variational_curvature(&d, &lams, &DensitySpec::default(), &scheme)?;
            io::save_field(&out, &res.field)?;
            let meta = serde_json::json!({
                "lambda_min": lambda_min,
                "lambda_max": lmax,
                "levels": levels,
                "uncaptured_cells": res.uncaptured.len(),
                "normalization_q": res.normalization.q,
            });
            std::fs::write(
                out.with_extension("meta.json"),
                serde_json::to_string_pretty(&meta).unwrap(),
            )?;
            if !res.uncaptured.is_empty() {
                eprintln!(
                    "warning: {} cells not captured within the λ grid",
                    res.uncaptured.len()
                );
            }
            println!(
                "curvature range [{}, {}]",
                res.field.min(),
                res.field.max()
            );
            Ok(0)
        }
        Command::Cheeger { input, tol, neighborhood, out } => {
            let d = io::load_mask(&input)?;
            let scheme = scheme_for(neighborhood);
            let res = cheeger(&d, tol, &scheme)?;
            println!("{}", res.h);
            if let Some(path) = out {
                io::save_mask(&path, &res.set)?;
            }
            Ok(0)
        }
        Command::Hausdorff { a, b, boundary: bdy } => {
            let ea = io::load_mask(&a)?;
            let eb = io::load_mask(&b)?;
            if ea.grid != eb.grid {
                return Err(Error::GridMismatch("masks on different grids"));
            }
            let dist = if bdy {
                let ba = boundary(&ea);
                let bb = boundary(&eb);
                if ba.is_empty() && bb.is_empty() {
                    0.0
                } else {
                    hausdorff_points(&ba.points, &bb.points, &ea.grid)?
                }
            } else {
                crate::dist::hausdorff_sets(&ea, &eb)?
            };
            println!("{dist}");
            Ok(0)
        }
        Command::Experiment { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = parse_config(&text)?;
            let report = run_experiment(&cfg)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if report.passed() {
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}

/// Edge differences of a field under the scheme graph (for energy
/// reporting).
fn level_differences<'a>(
    u: &'a ScalarField,
    scheme: &crate::perimeter::PerimeterScheme,
) -> impl Iterator<Item = f64> + 'a {
    let edges = crate::pd::build_edges(&u.grid, scheme);
    (0..edges.from.len())
        .map(move |e| u.values[edges.to[e] as usize] - u.values[edges.from[e] as usize])
        .collect::<Vec<_>>()
        .into_iter()
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("ERROR USAGE: {e}");
            return 2;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ERROR {}: {e}", e.code());
            e.exit_code()
        }
    }
}
