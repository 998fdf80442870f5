//! Exact minimization of E ↦ Per(E) − ∫_E κ over pixel masks, with
//! optional inclusion constraints, as an s-t minimum cut.
//!
//! Capacities are scaled to integers, so the solver's optimality and the
//! lattice structure of minimizers (minimal/maximal by inclusion) are
//! exact. Sweeps that need nested solutions across a monotone parameter
//! must share one capacity scale so that rounding stays monotone; callers
//! pass it explicitly via [`CutScale`].

use crate::error::{Error, Result};
use crate::grid::{BinarySet, Grid, ScalarField};
use crate::maxflow::MaxFlow;
use crate::perimeter::{perimeter, PerimeterScheme};

#[derive(Debug, Clone)]
pub enum Constraint {
    None,
    /// E ⊂ D
    Inside(BinarySet),
    /// E ⊂ complement of D
    Outside(BinarySet),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Select {
    Minimal,
    Maximal,
}

/// Fixed-point scale for capacities. One scale must be shared by all cut
/// problems whose solutions are compared or asserted nested.
#[derive(Debug, Clone, Copy)]
pub struct CutScale(pub f64);

impl CutScale {
    /// Scale that puts the largest magnitude near 2^42, leaving headroom
    /// for total-flow sums in i64.
    pub fn for_magnitude(max_abs: f64) -> CutScale {
        let m = max_abs.max(1e-12);
        CutScale((1u64 << 42) as f64 / m)
    }

    #[inline]
    pub fn to_int(&self, x: f64) -> i64 {
        (x * self.0).round() as i64
    }
}

/// Per-cell membership state when building a cut problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Var,
    In,
    Out,
}

/// A binary energy Σ_edges w·|x_i − x_j| + Σ_i c_i·x_i over the grid, with
/// some cells fixed. `unary[i]` is the energy of including cell i, in
/// physical units (the caller folds in h² and any sign conventions).
pub struct BinaryEnergy<'a> {
    pub grid: Grid,
    pub scheme: &'a PerimeterScheme,
    pub unary: Vec<f64>,
    pub state: Vec<CellState>,
}

impl<'a> BinaryEnergy<'a> {
    pub fn new(grid: Grid, scheme: &'a PerimeterScheme) -> BinaryEnergy<'a> {
        BinaryEnergy {
            grid,
            scheme,
            unary: vec![0.0; grid.cell_count()],
            state: vec![CellState::Var; grid.cell_count()],
        }
    }

    /// Largest per-cell |unary|, for scale selection.
    pub fn max_abs_unary(&self) -> f64 {
        self.unary.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Solve exactly; returns the selected extremal minimizer.
    pub fn solve(&self, scale: CutScale, select: Select) -> BinarySet {
        let g = self.grid;
        let n = g.cell_count();
        // variable numbering
        let mut var_of = vec![u32::MAX; n];
        let mut cells = Vec::new();
        for i in 0..n {
            if self.state[i] == CellState::Var {
                var_of[i] = cells.len() as u32;
                cells.push(i as u32);
            }
        }
        let nv = cells.len();
        let mut mf = MaxFlow::new(nv, nv * self.scheme.families.len());
        let mut acc = vec![0.0f64; nv];

        let h = g.h;
        for fam in &self.scheme.families {
            let w = fam.coeff * h;
            let wi = scale.to_int(w);
            for iy in 0..g.ny {
                let jy = iy as i64 + fam.dy as i64;
                if jy < 0 || jy >= g.ny as i64 {
                    continue;
                }
                let (x_lo, x_hi) = if fam.dx >= 0 {
                    (0usize, g.nx - fam.dx as usize)
                } else {
                    ((-fam.dx) as usize, g.nx)
                };
                for ix in x_lo..x_hi {
                    let i = g.idx(ix, iy);
                    let j = g.idx((ix as i64 + fam.dx as i64) as usize, jy as usize);
                    match (self.state[i], self.state[j]) {
                        (CellState::Var, CellState::Var) => {
                            mf.add_edge(var_of[i], var_of[j], wi, wi);
                        }
                        (CellState::Var, CellState::In) => acc[var_of[i] as usize] -= w,
                        (CellState::Var, CellState::Out) => acc[var_of[i] as usize] += w,
                        (CellState::In, CellState::Var) => acc[var_of[j] as usize] -= w,
                        (CellState::Out, CellState::Var) => acc[var_of[j] as usize] += w,
                        _ => {}
                    }
                }
            }
        }
        for (v, &cell) in cells.iter().enumerate() {
            let c = scale.to_int(self.unary[cell as usize] + acc[v]);
            mf.add_tweight(v as u32, -c);
        }
        mf.maxflow();
        let side = match select {
            Select::Minimal => mf.min_source_side(),
            Select::Maximal => mf.max_source_side(),
        };
        let mut mask = vec![false; n];
        for i in 0..n {
            match self.state[i] {
                CellState::In => mask[i] = true,
                CellState::Out => {}
                CellState::Var => mask[i] = side[var_of[i] as usize],
            }
        }
        BinarySet { grid: g, mask }
    }
}

#[derive(Debug, Clone)]
pub struct PmcSolution {
    pub set: BinarySet,
    /// Per(E) − Σ_E κ h², recomputed from the returned mask; this is the
    /// reported optimum.
    pub energy: f64,
}

pub fn pmc_energy(set: &BinarySet, kappa: &ScalarField, scheme: &PerimeterScheme) -> f64 {
    let mass: f64 = set
        .mask
        .iter()
        .zip(&kappa.values)
        .filter(|(&m, _)| m)
        .map(|(_, &k)| k)
        .sum();
    perimeter(set, scheme) - mass * set.grid.cell_area()
}

/// Global minimizer of Per(E) − ∫_E κ subject to the constraint, with
/// minimal/maximal tie-breaking.
pub fn minimize_pmc(
    kappa: &ScalarField,
    constraint: &Constraint,
    select: Select,
    scheme: &PerimeterScheme,
) -> Result<PmcSolution> {
    if !kappa.values.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("curvature field must be finite".into()));
    }
    let g = kappa.grid;
    let mut energy = BinaryEnergy::new(g, scheme);
    let h2 = g.cell_area();
    for i in 0..g.cell_count() {
        energy.unary[i] = -kappa.values[i] * h2;
    }
    match constraint {
        Constraint::None => {}
        Constraint::Inside(d) => {
            if d.grid != g {
                return Err(Error::GridMismatch("constraint set on a different grid"));
            }
            for i in 0..g.cell_count() {
                if !d.mask[i] {
                    energy.state[i] = CellState::Out;
                }
            }
        }
        Constraint::Outside(d) => {
            if d.grid != g {
                return Err(Error::GridMismatch("constraint set on a different grid"));
            }
            for i in 0..g.cell_count() {
                if d.mask[i] {
                    energy.state[i] = CellState::Out;
                }
            }
        }
    }
    let max_w = scheme.families.iter().fold(0.0f64, |m, f| m.max(f.coeff)) * g.h;
    let scale = CutScale::for_magnitude(energy.max_abs_unary().max(max_w));
    let set = energy.solve(scale, select);
    // sets of interest are padded away from the border; reaching it means
    // the continuum problem would be unbounded below
    if !matches!(constraint, Constraint::Outside(_)) && set.touches_border() {
        return Err(Error::UnboundedBelow);
    }
    let energy_val = pmc_energy(&set, kappa, scheme);
    Ok(PmcSolution { set, energy: energy_val })
}
