//! Grid evaluation and CSV output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gpdiag_core::cascade::{steady_state, SystemParams};
use gpdiag_core::gp::{gp_curve_from_trajectory, gp_derivative, track_spectrum, EPS_LAMBDA};
use gpdiag_core::photonstate::{atomic_to_photon, concurrence, embed_two_qubit, purity, TwoPhotonState};
use rayon::prelude::*;
use rayon::ThreadPool;
use thiserror::Error;

use crate::config::{Axis, Output, SweepSpec};

#[derive(Error, Debug)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn thread_pool(jobs: Option<usize>) -> Result<ThreadPool, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| RunError::Pool(e.to_string()))
}

/// Everything computed at one grid point. `None` marks an undefined value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cell {
    /// Descending.
    pub eigenvalues: Option<[f64; 3]>,
    pub purity: Option<f64>,
    pub concurrence: Option<f64>,
    pub gamma_g: Option<f64>,
    pub dgamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub values1: Vec<f64>,
    /// A single `NaN` placeholder when there is no second axis.
    pub values2: Vec<f64>,
    /// Indexed `[i2][i1]`: each inner vector is one path along axis 1.
    pub paths: Vec<Vec<Cell>>,
    pub failed_states: usize,
    pub resolution_warnings: usize,
}

impl Grid {
    pub fn cell(&self, i1: usize, i2: usize) -> &Cell {
        &self.paths[i2][i1]
    }
}

/// Evaluates `outputs` on the grid spanned by `axis1` (and `axis2`).
/// Geometric phases run along axis 1, anchored at its first value.
pub fn evaluate_grid(
    base: &SystemParams,
    axis1: &Axis,
    axis2: Option<&Axis>,
    outputs: &[Output],
    pool: &ThreadPool,
) -> Result<Grid, RunError> {
    let values1 = axis1.values();
    let values2 = axis2.map_or(vec![f64::NAN], Axis::values);
    let params = |i1: usize, i2: usize| {
        let p = base.with(axis1.param, values1[i1]);
        match axis2 {
            Some(a) => p.with(a.param, values2[i2]),
            None => p,
        }
    };
    let n1 = values1.len();
    let want = |o: Output| outputs.contains(&o);
    let need_phase = want(Output::GammaG) || want(Output::DGamma);

    let states: Vec<Option<TwoPhotonState>> = pool.install(|| {
        (0..n1 * values2.len())
            .into_par_iter()
            .map(|k| steady_state(&params(k % n1, k / n1)).ok().map(|a| atomic_to_photon(&a)))
            .collect()
    });
    let failed_states = states.iter().filter(|s| s.is_none()).count();

    let results: Vec<(Vec<Cell>, bool)> = pool.install(|| {
        states
            .par_chunks(n1)
            .map(|path| evaluate_path(path, &values1, outputs, need_phase))
            .collect()
    });
    if let Some(i2) = (0..values2.len()).find(|&i2| states[i2 * n1..(i2 + 1) * n1].iter().all(Option::is_none)) {
        return Err(RunError::Numerical(format!(
            "no steady state anywhere on the path along {}{}",
            axis1.param,
            axis2.map_or(String::new(), |a| format!(" at {} = {}", a.param, values2[i2]))
        )));
    }
    let resolution_warnings = results.iter().filter(|(_, w)| *w).count();
    Ok(Grid {
        values1,
        values2,
        paths: results.into_iter().map(|(cells, _)| cells).collect(),
        failed_states,
        resolution_warnings,
    })
}

fn evaluate_path(
    states: &[Option<TwoPhotonState>],
    values: &[f64],
    outputs: &[Output],
    need_phase: bool,
) -> (Vec<Cell>, bool) {
    let want = |o: Output| outputs.contains(&o);
    let mut cells: Vec<Cell> = states
        .iter()
        .map(|s| match s {
            None => Cell::default(),
            Some(st) => Cell {
                eigenvalues: want(Output::Eigenvalues).then(|| {
                    let v = st.rho().eig().values;
                    [v[2], v[1], v[0]]
                }),
                purity: want(Output::Purity).then(|| purity(st.rho())),
                concurrence: want(Output::Concurrence).then(|| concurrence(&embed_two_qubit(st)).value()),
                gamma_g: None,
                dgamma: None,
            },
        })
        .collect();
    let mut warning = false;
    if need_phase {
        // The phase is anchored at the first sample, so it is carried only up
        // to the first point without a steady state.
        let run = states.iter().take_while(|s| s.is_some()).count();
        let prefix: Vec<&TwoPhotonState> = states[..run].iter().flatten().collect();
        if run >= 2 {
            if let Ok(traj) = track_spectrum(&prefix, EPS_LAMBDA) {
                warning = traj.resolution_warning();
                let curve = gp_curve_from_trajectory(&traj, &values[..run], EPS_LAMBDA);
                let derivative = segment_derivative(&curve.points);
                for (j, (&(_, g), d)) in curve.points.iter().zip(derivative).enumerate() {
                    if want(Output::GammaG) {
                        cells[j].gamma_g = g;
                    }
                    if want(Output::DGamma) {
                        cells[j].dgamma = d;
                    }
                }
            }
        }
    }
    (cells, warning)
}

/// dγ/ds over every run of at least three consecutive defined points.
pub fn segment_derivative(points: &[(f64, Option<f64>)]) -> Vec<Option<f64>> {
    let mut out = vec![None; points.len()];
    let mut start = 0;
    while start < points.len() {
        if points[start].1.is_none() {
            start += 1;
            continue;
        }
        let end = start + points[start..].iter().take_while(|p| p.1.is_some()).count();
        let seg: Vec<(f64, f64)> = points[start..end].iter().map(|&(s, g)| (s, g.unwrap())).collect();
        if let Ok(d) = gp_derivative(&seg) {
            for (k, (_, v)) in d.into_iter().enumerate() {
                out[start + k] = Some(v);
            }
        }
        start = end;
    }
    out
}

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e12)`.
pub fn format_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| v.map(format_g).unwrap_or_default()).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn undefined_fields(&self) -> usize {
        self.rows.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let mut f = fs::File::create(path).map_err(io_err(path))?;
        f.write_all(self.to_csv().as_bytes()).map_err(io_err(path))
    }
}

/// Tabulates a grid: axis values first, then the requested outputs.
pub fn grid_table(grid: &Grid, axis1: &Axis, axis2: Option<&Axis>, outputs: &[Output]) -> Table {
    let mut header = vec![axis1.param.name().to_string()];
    if let Some(a) = axis2 {
        header.push(a.param.name().to_string());
    }
    for o in outputs {
        match o {
            Output::Eigenvalues => header.extend(["lambda1", "lambda2", "lambda3"].map(String::from)),
            other => header.push(other.name().to_string()),
        }
    }
    let mut rows = Vec::with_capacity(grid.values1.len() * grid.values2.len());
    for (i1, &v1) in grid.values1.iter().enumerate() {
        for (i2, &v2) in grid.values2.iter().enumerate() {
            let cell = grid.cell(i1, i2);
            let mut row = vec![Some(v1)];
            if axis2.is_some() {
                row.push(Some(v2));
            }
            for o in outputs {
                match o {
                    Output::Eigenvalues => match cell.eigenvalues {
                        Some(ev) => row.extend(ev.map(Some)),
                        None => row.extend([None; 3]),
                    },
                    Output::Purity => row.push(cell.purity),
                    Output::Concurrence => row.push(cell.concurrence),
                    Output::GammaG => row.push(cell.gamma_g),
                    Output::DGamma => row.push(cell.dgamma),
                }
            }
            rows.push(row);
        }
    }
    Table { header, rows }
}

pub struct SweepSummary {
    pub rows: usize,
    pub undefined_fields: usize,
    pub failed_states: usize,
    pub resolution_warnings: usize,
}

/// Evaluates a configured sweep and writes its CSV.
pub fn run_sweep(spec: &SweepSpec, pool: &ThreadPool) -> Result<SweepSummary, RunError> {
    let grid = evaluate_grid(&spec.base, &spec.axis1, spec.axis2.as_ref(), &spec.outputs, pool)?;
    let table = grid_table(&grid, &spec.axis1, spec.axis2.as_ref(), &spec.outputs);
    table.write(&spec.output)?;
    Ok(SweepSummary {
        rows: table.rows.len(),
        undefined_fields: table.undefined_fields(),
        failed_states: grid.failed_states,
        resolution_warnings: grid.resolution_warnings,
    })
}
