//! Frozen parameter sets for each figure, written as CSV panels.
//!
//! Windows the captions leave open:
//! - fig2: Δ₁ ∈ [−6, 6], Δ₂ = 0.
//! - fig3: Δ₁ ∈ [−6, 6], Ω₁ − Ω₂ ∈ [−6, 6] at Ω₂ = 6.
//! - fig4: δ ∈ [−0.5, 0.5], dX ∈ [−0.3, 0.3] at Ω = 6√2.
//! - fig5: Δ₁ ∈ [−3, 3].
//! - fig6: Δ₁ ∈ [−2, 2], Ω₁ − Ω₂ ∈ [−4, 4] at Ω₂ = 6.
//!
//! Each run also writes `<id>.meta` listing the values actually used.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gpdiag_core::analytic::{dominant_eigenvector, IdealParams};
use gpdiag_core::cascade::{Param, Scheme, SystemParams, DEFAULT_GAMMA2};
use gpdiag_core::gp::{linspace, unwrap_phases};
use gpdiag_core::linops::inner;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::{Axis, Output};
use crate::sweep::{evaluate_grid, segment_derivative, RunError, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecipeId {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
}

impl RecipeId {
    pub const ALL: [RecipeId; 6] = [
        RecipeId::Fig2,
        RecipeId::Fig3a,
        RecipeId::Fig3b,
        RecipeId::Fig4,
        RecipeId::Fig5,
        RecipeId::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecipeId::Fig2 => "fig2",
            RecipeId::Fig3a => "fig3a",
            RecipeId::Fig3b => "fig3b",
            RecipeId::Fig4 => "fig4",
            RecipeId::Fig5 => "fig5",
            RecipeId::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for RecipeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecipeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RecipeId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown recipe '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecipeOptions {
    /// Samples per axis.
    pub samples: usize,
    pub gamma2: Option<f64>,
    /// Scheme I only.
    pub gamma3: Option<f64>,
}

impl Default for RecipeOptions {
    fn default() -> Self {
        Self {
            samples: 601,
            gamma2: None,
            gamma3: None,
        }
    }
}

impl RecipeOptions {
    pub fn params(&self, scheme: Scheme) -> SystemParams {
        let gamma2 = self.gamma2.unwrap_or(DEFAULT_GAMMA2);
        let gamma3 = match scheme {
            Scheme::I => self.gamma3.unwrap_or(scheme.gamma3()),
            Scheme::II => 0.0,
        };
        SystemParams::scheme(scheme).with_decay(gamma2, gamma3)
    }
}

/// One CSV file of a recipe.
pub struct Panel {
    pub file: String,
    pub table: Table,
}

pub struct RecipeRun {
    pub panels: Vec<Panel>,
    pub meta: String,
    pub failed_states: usize,
    pub resolution_warnings: usize,
}

/// Rabi frequencies and Δ₂ of the five two-panel rows of fig5.
pub const FIG5_PANELS: [(&str, f64, f64, f64); 5] = [
    ("ab", 6.0, 6.0, 0.0),
    ("cd", 3.0, 6.0, 0.0),
    ("ef", 6.0, 3.0, 0.0),
    ("gh", 6.0, 6.0, 3.0),
    ("ij", 1.5, 6.0, 0.0),
];
pub const FIG5_RANGE: (f64, f64) = (-3.0, 3.0);
pub const FIG4_DELTA: (f64, f64) = (-0.5, 0.5);
pub const FIG4_DX: (f64, f64) = (-0.3, 0.3);
pub const FIG4_OMEGA: f64 = 6.0 * std::f64::consts::SQRT_2;
pub const FIG6_DELTA: (f64, f64) = (-2.0, 2.0);
pub const FIG6_SPLIT: (f64, f64) = (-4.0, 4.0);

fn axis(param: Param, range: (f64, f64), samples: usize) -> Axis {
    Axis {
        param,
        start: range.0,
        end: range.1,
        samples,
    }
}

/// Computes every panel of a recipe without touching the file system.
pub fn compute_recipe(id: RecipeId, opts: &RecipeOptions, pool: &ThreadPool) -> Result<RecipeRun, RunError> {
    if opts.samples < 3 {
        return Err(RunError::Numerical(format!(
            "recipes need at least 3 samples per axis, got {}",
            opts.samples
        )));
    }
    let mut run = RecipeRun {
        panels: Vec::new(),
        meta: format!("recipe = {id}\nsamples = {}\n", opts.samples),
        failed_states: 0,
        resolution_warnings: 0,
    };
    match id {
        RecipeId::Fig2 => fig2(opts, pool, &mut run)?,
        RecipeId::Fig3a => fig3(Scheme::II, opts, pool, &mut run)?,
        RecipeId::Fig3b => fig3(Scheme::I, opts, pool, &mut run)?,
        RecipeId::Fig4 => fig4(opts, pool, &mut run)?,
        RecipeId::Fig5 => fig5(opts, pool, &mut run)?,
        RecipeId::Fig6 => fig6(opts, pool, &mut run)?,
    }
    Ok(run)
}

/// Computes a recipe and writes its panels and metadata into `out_dir`.
pub fn run_recipe(
    id: RecipeId,
    opts: &RecipeOptions,
    out_dir: &Path,
    pool: &ThreadPool,
) -> Result<(RecipeRun, Vec<PathBuf>), RunError> {
    let run = compute_recipe(id, opts, pool)?;
    let mut files = Vec::new();
    for panel in &run.panels {
        let path = out_dir.join(&panel.file);
        panel.table.write(&path)?;
        files.push(path);
    }
    let meta = out_dir.join(format!("{id}.meta"));
    std::fs::write(&meta, &run.meta).map_err(|source| RunError::Io {
        path: meta.clone(),
        source,
    })?;
    Ok((run, files))
}

fn fig2(opts: &RecipeOptions, pool: &ThreadPool, run: &mut RecipeRun) -> Result<(), RunError> {
    let delta = axis(Param::Delta1, (-6.0, 6.0), opts.samples);
    run.meta.push_str("delta1 = [-6, 6]\ndelta2 = 0\n");
    for (panel, o1, o2) in [("ab", 6.0, 6.0), ("cd", 3.0, 6.0)] {
        for scheme in [Scheme::I, Scheme::II] {
            let base = opts.params(scheme).with_rabi(o1, o2);
            run.meta.push_str(&format!("fig2_{panel}_scheme_{scheme}: {}\n", describe(&base)));
            let grid = evaluate_grid(&base, &delta, None, &[Output::Eigenvalues], pool)?;
            run.failed_states += grid.failed_states;
            let mut table = Table::new(&["delta", "lambda1", "lambda2", "lambda3"]);
            for (i, &d) in grid.values1.iter().enumerate() {
                let mut row = vec![Some(d)];
                match grid.cell(i, 0).eigenvalues {
                    Some(ev) => row.extend(ev.map(Some)),
                    None => row.extend([None; 3]),
                }
                table.rows.push(row);
            }
            run.panels.push(Panel {
                file: format!("fig2_{panel}_scheme_{scheme}.csv"),
                table,
            });
        }
    }
    Ok(())
}

fn fig3(scheme: Scheme, opts: &RecipeOptions, pool: &ThreadPool, run: &mut RecipeRun) -> Result<(), RunError> {
    let omega2 = 6.0;
    let base = opts.params(scheme).with_rabi(omega2, omega2);
    let delta = axis(Param::Delta1, (-6.0, 6.0), opts.samples);
    let omega1 = axis(Param::Omega1, (0.0, 12.0), opts.samples);
    run.meta.push_str(&format!(
        "{}\ndelta1 = [-6, 6]\nomega1_minus_omega2 = [-6, 6]\n",
        describe(&base)
    ));
    let grid = evaluate_grid(&base, &delta, Some(&omega1), &[Output::Concurrence], pool)?;
    run.failed_states += grid.failed_states;
    let mut table = Table::new(&["delta", "omega1_minus_omega2", "concurrence"]);
    for (i1, &d) in grid.values1.iter().enumerate() {
        for (i2, &o1) in grid.values2.iter().enumerate() {
            table.rows.push(vec![Some(d), Some(o1 - omega2), grid.cell(i1, i2).concurrence]);
        }
    }
    let tag = if scheme == Scheme::II { "fig3a" } else { "fig3b" };
    run.panels.push(Panel {
        file: format!("{tag}.csv"),
        table,
    });
    Ok(())
}

/// Slope dγ/dΔ̄ of the phase `Arg⟨ψ(0, X)|ψ(δ, X + dX)⟩` of the dominant
/// eigenvector of the ideal-system state, over a `(δ, dX)` window.
/// Rows are `(δ, dX, slope)`, δ major.
pub fn fig4_surface(
    x: f64,
    gamma2: f64,
    samples: usize,
    pool: &ThreadPool,
) -> Result<Table, RunError> {
    let gamma21 = gamma2 / (2.0 * FIG4_OMEGA);
    let system = |x: f64, d: f64| {
        IdealParams::new(x, d, gamma21).and_then(|p| p.to_system(gamma2, 0.0))
    };
    let reference = system(x, 0.0)
        .and_then(|p| dominant_eigenvector(&p))
        .map_err(|e| RunError::Numerical(format!("reference state at X = {x}: {e}")))?;
    let deltas = linspace(FIG4_DELTA.0, FIG4_DELTA.1, samples);
    let offsets = linspace(FIG4_DX.0, FIG4_DX.1, samples);
    let columns: Vec<Vec<Option<f64>>> = pool.install(|| {
        offsets
            .par_iter()
            .map(|&dx| {
                let phases: Vec<Option<f64>> = deltas
                    .iter()
                    .map(|&d| {
                        system(x + dx, d)
                            .and_then(|p| dominant_eigenvector(&p))
                            .ok()
                            .map(|v| inner(&reference, &v))
                            .filter(|z| z.norm() > gpdiag_core::gp::EPS_VIS)
                            .map(|z| z.arg())
                    })
                    .collect();
                let curve: Vec<(f64, Option<f64>)> =
                    deltas.iter().copied().zip(unwrap_phases(&phases)).collect();
                segment_derivative(&curve)
            })
            .collect()
    });
    let mut table = Table::new(&["delta_offset", "dX", "dgamma_dDelta"]);
    for (i, &d) in deltas.iter().enumerate() {
        for (j, &dx) in offsets.iter().enumerate() {
            table.rows.push(vec![Some(d), Some(dx), columns[j][i]]);
        }
    }
    Ok(table)
}

fn fig4(opts: &RecipeOptions, pool: &ThreadPool, run: &mut RecipeRun) -> Result<(), RunError> {
    let gamma2 = opts.gamma2.unwrap_or(DEFAULT_GAMMA2);
    run.meta.push_str(&format!(
        "scheme = II\ngamma2 = {gamma2}\nomega = {FIG4_OMEGA}\ngamma21 = {}\n\
         delta_offset = [{}, {}]\ndX = [{}, {}]\ndelta1 = delta_bar * omega, delta2 = 0\n",
        gamma2 / (2.0 * FIG4_OMEGA),
        FIG4_DELTA.0,
        FIG4_DELTA.1,
        FIG4_DX.0,
        FIG4_DX.1
    ));
    for (panel, x) in [("a", 0.0), ("b", FRAC_PI_4)] {
        let table = fig4_surface(x, gamma2, opts.samples, pool)?;
        run.panels.push(Panel {
            file: format!("fig4{panel}.csv"),
            table,
        });
    }
    Ok(())
}

fn fig5(opts: &RecipeOptions, pool: &ThreadPool, run: &mut RecipeRun) -> Result<(), RunError> {
    let delta = axis(Param::Delta1, FIG5_RANGE, opts.samples);
    run.meta.push_str(&format!("delta1 = [{}, {}]\n", FIG5_RANGE.0, FIG5_RANGE.1));
    for (panel, o1, o2, d2) in FIG5_PANELS {
        let base = opts.params(Scheme::I).with_rabi(o1, o2).with_detunings(0.0, d2);
        run.meta.push_str(&format!("fig5_{panel}: {}\n", describe(&base)));
        let grid = evaluate_grid(&base, &delta, None, &[Output::GammaG, Output::DGamma], pool)?;
        run.failed_states += grid.failed_states;
        run.resolution_warnings += grid.resolution_warnings;
        let mut table = Table::new(&["delta1", "gamma_g", "dgamma"]);
        for (i, &d) in grid.values1.iter().enumerate() {
            let c = grid.cell(i, 0);
            table.rows.push(vec![Some(d), c.gamma_g, c.dgamma]);
        }
        run.panels.push(Panel {
            file: format!("fig5_{panel}.csv"),
            table,
        });
    }
    Ok(())
}

fn nearest(values: &[f64], target: f64) -> usize {
    (0..values.len())
        .min_by(|&a, &b| (values[a] - target).abs().total_cmp(&(values[b] - target).abs()))
        .expect("non-empty axis")
}

fn fig6(opts: &RecipeOptions, pool: &ThreadPool, run: &mut RecipeRun) -> Result<(), RunError> {
    let omega2 = 6.0;
    let base = opts.params(Scheme::I).with_rabi(omega2, omega2);
    let delta = axis(Param::Delta1, FIG6_DELTA, opts.samples);
    let omega1 = axis(Param::Omega1, (omega2 + FIG6_SPLIT.0, omega2 + FIG6_SPLIT.1), opts.samples);
    run.meta.push_str(&format!(
        "{}\ndelta1 = [{}, {}]\nomega1_minus_omega2 = [{}, {}]\n\
         gamma_g anchored at delta1 = {}; change relative to the cell nearest (0, 0)\n",
        describe(&base),
        FIG6_DELTA.0,
        FIG6_DELTA.1,
        FIG6_SPLIT.0,
        FIG6_SPLIT.1,
        FIG6_DELTA.0
    ));
    let grid = evaluate_grid(&base, &delta, Some(&omega1), &[Output::GammaG], pool)?;
    run.failed_states += grid.failed_states;
    run.resolution_warnings += grid.resolution_warnings;
    let centre = grid
        .cell(nearest(&grid.values1, 0.0), nearest(&grid.values2, omega2))
        .gamma_g
        .filter(|g| *g != 0.0);
    let mut table = Table::new(&["delta", "omega1_minus_omega2", "gamma_g_change_percent"]);
    for (i1, &d) in grid.values1.iter().enumerate() {
        for (i2, &o1) in grid.values2.iter().enumerate() {
            let change = match (grid.cell(i1, i2).gamma_g, centre) {
                (Some(g), Some(c)) => Some(100.0 * (g - c) / c.abs()),
                _ => None,
            };
            table.rows.push(vec![Some(d), Some(o1 - omega2), change]);
        }
    }
    run.panels.push(Panel {
        file: "fig6.csv".into(),
        table,
    });
    Ok(())
}

fn describe(p: &SystemParams) -> String {
    format!(
        "omega1 = {}, omega2 = {}, delta1 = {}, delta2 = {}, gamma2 = {}, gamma3 = {}",
        p.omega1, p.omega2, p.delta1, p.delta2, p.gamma2, p.gamma3
    )
}
