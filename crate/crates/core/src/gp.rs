//! Mixed-state geometric phase along paths in control-parameter space.
//!
//! A path is sampled as a sequence of steady states. Each state is
//! eigen-decomposed, eigenvector branches are matched between neighbouring
//! samples, and the kinematic phase
//!
//! ```text
//! γ_g = Arg Σ_k √(λ_k(0) λ_k(τ)) ⟨φ_k(0)|φ_k(τ)⟩ exp(−i Σ_j Arg⟨φ_k(j)|φ_k(j+1)⟩)
//! ```
//!
//! is evaluated. The sum of consecutive-overlap arguments is the discrete form
//! of the parallel transport integral; any per-sample rephasing of an
//! eigenvector cancels between the endpoint overlap and the sum, so the result
//! is exactly gauge invariant.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use thiserror::Error;

use crate::cascade::{steady_state, CascadeError, Param, SystemParams};
use crate::linops::{inner, norm, DensityMatrix};
use crate::photonstate::{atomic_to_photon, TwoPhotonState};

/// Branches whose eigenvalue falls below this anywhere on the path are dropped.
pub const EPS_LAMBDA: f64 = 1e-10;
/// Minimum visibility `|Σ_k terms|` for the phase to be defined.
pub const EPS_VIS: f64 = 1e-9;
/// Two overlaps closer than this make a branch assignment ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GpError {
    #[error("a path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("path range must satisfy start < end (got [{start}, {end}])")]
    InvalidRange { start: f64, end: f64 },
    #[error("steady state failed at sample {index}: {source}")]
    SteadyState { index: usize, source: CascadeError },
    #[error("states have inconsistent dimensions")]
    DimensionMismatch,
    #[error("no eigenvalue branch stays above the threshold along the path")]
    NoKeptBranch,
    #[error("geometric phase undefined: visibility {visibility:e} below threshold")]
    UndefinedPhase { visibility: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("derivative needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("samples are not uniformly spaced (at index {index})")]
    NonUniformSpacing { index: usize },
}

/// Maps any angle into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

fn arg(z: Complex64) -> f64 {
    wrap_phase(z.arg())
}

/// One control parameter swept over `[start, end]` with all others fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub base: SystemParams,
    pub varying: Param,
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl PathSpec {
    pub fn new(
        base: SystemParams,
        varying: Param,
        start: f64,
        end: f64,
        samples: usize,
    ) -> Result<Self, GpError> {
        let spec = Self {
            base,
            varying,
            start,
            end,
            samples,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        if self.samples < 2 {
            return Err(GpError::TooFewSamples(self.samples));
        }
        if !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(GpError::InvalidRange {
                start: self.start,
                end: self.end,
            });
        }
        Ok(())
    }

    /// Uniformly spaced parameter values; both endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.end, self.samples)
    }

    pub fn params_at(&self, value: f64) -> SystemParams {
        self.base.with(self.varying, value)
    }
}

/// `n` points from `start` to `end`, symmetric ranges hitting 0 exactly at odd `n`.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|j| {
            let t = j as f64;
            (start * (last - t) + end * t) / last
        })
        .collect()
}

/// Steady states (photon basis) at every sample of the path.
pub fn sample_path(spec: &PathSpec) -> Result<Vec<TwoPhotonState>, GpError> {
    spec.validate()?;
    spec.values()
        .into_iter()
        .enumerate()
        .map(|(index, s)| {
            steady_state(&spec.params_at(s))
                .map(|a| atomic_to_photon(&a))
                .map_err(|source| GpError::SteadyState { index, source })
        })
        .collect()
}

/// Eigenvalues and eigenvectors at one sample, indexed by branch.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl SpectralPoint {
    pub fn branches(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Eigen-branches followed continuously along a path.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTrajectory {
    points: Vec<SpectralPoint>,
    kept: Vec<usize>,
    resolution_warning: bool,
}

impl SpectralTrajectory {
    /// Wraps branches that are already aligned across samples (no matching).
    pub fn from_points(points: Vec<SpectralPoint>, eps_lambda: f64) -> Result<Self, GpError> {
        Self::assemble(points, eps_lambda, false)
    }

    fn assemble(
        points: Vec<SpectralPoint>,
        eps_lambda: f64,
        resolution_warning: bool,
    ) -> Result<Self, GpError> {
        let first = points.first().ok_or(GpError::TooFewSamples(0))?;
        let n = first.branches();
        let dim = first.eigenvectors.first().map_or(0, Vec::len);
        let consistent = points.iter().all(|p| {
            p.branches() == n
                && p.eigenvectors.len() == n
                && p.eigenvectors.iter().all(|v| v.len() == dim)
        });
        if !consistent {
            return Err(GpError::DimensionMismatch);
        }
        let kept = (0..n)
            .filter(|&k| points.iter().all(|p| p.eigenvalues[k] >= eps_lambda))
            .collect();
        Ok(Self {
            points,
            kept,
            resolution_warning,
        })
    }

    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kept_branches(&self) -> &[usize] {
        &self.kept
    }

    pub fn resolution_warning(&self) -> bool {
        self.resolution_warning
    }

    /// Same trajectory with eigenvector `k` at sample `j` multiplied by
    /// `exp(i·phase(j, k))`.
    pub fn rephased(&self, mut phase: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = self.clone();
        for (j, p) in out.points.iter_mut().enumerate() {
            for (k, v) in p.eigenvectors.iter_mut().enumerate() {
                let u = Complex64::from_polar(1.0, phase(j, k));
                v.iter_mut().for_each(|z| *z *= u);
            }
        }
        out
    }

    /// The path traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.points.reverse();
        out
    }

    /// Sub-trajectory over samples `0..=end`, with branches re-filtered.
    pub fn prefix(&self, end: usize, eps_lambda: f64) -> Result<Self, GpError> {
        Self::assemble(self.points[..=end].to_vec(), eps_lambda, self.resolution_warning)
    }
}

/// Eigen-decomposes each state and matches branches between consecutive
/// samples by greedy maximal overlap (ties broken by branch index).
///
/// The first sample orders branches by descending eigenvalue. Ambiguous
/// assignments and steps where an eigenvector moved further than first-order
/// perturbation theory allows set the resolution warning; they never abort.
pub fn track_spectrum<S: AsRef<DensityMatrix>>(
    states: &[S],
    eps_lambda: f64,
) -> Result<SpectralTrajectory, GpError> {
    if states.len() < 2 {
        return Err(GpError::TooFewSamples(states.len()));
    }
    let dim = states[0].as_ref().dim();
    if states.iter().any(|s| s.as_ref().dim() != dim) {
        return Err(GpError::DimensionMismatch);
    }

    let mut warning = false;
    let mut points: Vec<SpectralPoint> = Vec::with_capacity(states.len());
    for (j, state) in states.iter().enumerate() {
        let es = state.as_ref().eig();
        // Descending eigenvalue order.
        let mut values: Vec<f64> = es.values.iter().rev().copied().collect();
        let mut vectors: Vec<Vec<Complex64>> = (0..dim).rev().map(|k| es.vector(k)).collect();

        if let Some(prev) = points.last() {
            let overlaps: Vec<Vec<f64>> = prev
                .eigenvectors
                .iter()
                .map(|phi| vectors.iter().map(|psi| inner(phi, psi).norm()).collect())
                .collect();
            let assignment = greedy_assignment(&overlaps);

            for k in 0..dim {
                let relevant = prev.eigenvalues[k] >= eps_lambda || values[assignment[k]] >= eps_lambda;
                if !relevant {
                    continue;
                }
                let mut row = overlaps[k].clone();
                row.sort_by(|a, b| b.total_cmp(a));
                if dim > 1 && row[0] - row[1] < AMBIGUITY_TOL {
                    warning = true;
                }
                // Eigenvectors inside a degenerate subspace are arbitrary.
                let lk = values[assignment[k]];
                if (0..dim).any(|m| m != assignment[k] && (values[m] - lk).abs() < AMBIGUITY_TOL) {
                    warning = true;
                }
            }

            values = assignment.iter().map(|&m| values[m]).collect();
            vectors = assignment.iter().map(|&m| vectors[m].clone()).collect();

            let spacing = states[j]
                .as_ref()
                .matrix()
                .max_abs_diff(states[j - 1].as_ref().matrix());
            for k in 0..dim {
                if prev.eigenvalues[k] < eps_lambda {
                    continue;
                }
                let gap = (0..dim)
                    .filter(|&m| m != k)
                    .map(|m| (prev.eigenvalues[k] - prev.eigenvalues[m]).abs())
                    .fold(f64::INFINITY, f64::min);
                if gap == 0.0 || !gap.is_finite() {
                    continue;
                }
                let angle = spacing / gap;
                let loss = 1.0 - inner(&prev.eigenvectors[k], &vectors[k]).norm();
                if loss > 10.0 * angle * angle + 1e-12 {
                    warning = true;
                }
            }
        }
        points.push(SpectralPoint {
            eigenvalues: values,
            eigenvectors: vectors,
        });
    }
    SpectralTrajectory::assemble(points, eps_lambda, warning)
}

/// `assignment[k]` is the new index matched to previous branch `k`.
fn greedy_assignment(overlaps: &[Vec<f64>]) -> Vec<usize> {
    let n = overlaps.len();
    let mut candidates: Vec<(usize, usize)> =
        (0..n).flat_map(|k| (0..n).map(move |m| (k, m))).collect();
    candidates.sort_by(|&(k1, m1), &(k2, m2)| {
        overlaps[k2][m2]
            .total_cmp(&overlaps[k1][m1])
            .then(k1.cmp(&k2))
            .then(m1.cmp(&m2))
    });
    let mut assignment = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (k, m) in candidates {
        if assignment[k] == usize::MAX && !taken[m] {
            assignment[k] = m;
            taken[m] = true;
        }
    }
    assignment
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricPhaseResult {
    /// Radians in `(−π, π]`.
    pub gamma_g: f64,
    /// `(branch, √(λ_k(0)λ_k(τ)) z_k)` for every kept branch.
    pub branch_terms: Vec<(usize, Complex64)>,
    /// `|Σ branch_terms|`
    pub visibility: f64,
    pub resolution_warning: bool,
}

/// Geometric phase of the whole trajectory.
pub fn mixed_state_gp(traj: &SpectralTrajectory) -> Result<GeometricPhaseResult, GpError> {
    if traj.kept.is_empty() {
        return Err(GpError::NoKeptBranch);
    }
    let last = traj.len() - 1;
    let terms: Vec<(usize, Complex64)> = traj
        .kept
        .iter()
        .map(|&k| {
            let transport: f64 = traj.points.windows(2).map(|w| {
                arg(inner(&w[0].eigenvectors[k], &w[1].eigenvectors[k]))
            }).sum();
            (k, branch_term(traj, k, last, transport))
        })
        .collect();
    finish(terms, traj.resolution_warning)
}

fn branch_term(traj: &SpectralTrajectory, k: usize, end: usize, transport: f64) -> Complex64 {
    let p0 = &traj.points[0];
    let pj = &traj.points[end];
    let weight = (p0.eigenvalues[k] * pj.eigenvalues[k]).sqrt();
    let overlap = inner(&p0.eigenvectors[k], &pj.eigenvectors[k]);
    weight * overlap * Complex64::from_polar(1.0, -transport)
}

fn finish(
    terms: Vec<(usize, Complex64)>,
    resolution_warning: bool,
) -> Result<GeometricPhaseResult, GpError> {
    let total: Complex64 = terms.iter().map(|(_, z)| z).sum();
    let visibility = total.norm();
    if visibility <= EPS_VIS {
        return Err(GpError::UndefinedPhase { visibility });
    }
    Ok(GeometricPhaseResult {
        gamma_g: arg(total),
        branch_terms: terms,
        visibility,
        resolution_warning,
    })
}

/// `Arg⟨ψ₀|ψ₁⟩` for normalized states.
pub fn pancharatnam_phase(psi0: &[Complex64], psi1: &[Complex64]) -> Result<f64, GpError> {
    if psi0.len() != psi1.len() {
        return Err(GpError::DimensionMismatch);
    }
    for v in [psi0, psi1] {
        let n = norm(v);
        if (n - 1.0).abs() > 1e-10 {
            return Err(GpError::NotNormalized { norm: n });
        }
    }
    let z = inner(psi0, psi1);
    if z.norm() < EPS_VIS {
        return Err(GpError::UndefinedPhase { visibility: z.norm() });
    }
    Ok(arg(z))
}

/// γ_g against the swept parameter, anchored to 0 at the first sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GpCurve {
    /// `(s_j, γ_g(s_j))`, unwrapped; `None` where the phase is undefined.
    pub points: Vec<(f64, Option<f64>)>,
    pub resolution_warning: bool,
}

impl GpCurve {
    pub fn defined(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|&(s, g)| g.map(|g| (s, g)))
            .collect()
    }

    pub fn undefined_count(&self) -> usize {
        self.points.iter().filter(|(_, g)| g.is_none()).count()
    }
}

/// Samples the path, tracks its spectrum once, and evaluates γ_g over every
/// prefix `[s_0, s_j]`.
pub fn gp_curve(spec: &PathSpec) -> Result<GpCurve, GpError> {
    let states = sample_path(spec)?;
    let traj = track_spectrum(&states, EPS_LAMBDA)?;
    Ok(gp_curve_from_trajectory(&traj, &spec.values(), EPS_LAMBDA))
}

/// Prefix phases of an existing trajectory. Equal to running
/// [`mixed_state_gp`] on each prefix, in O(M) total.
pub fn gp_curve_from_trajectory(
    traj: &SpectralTrajectory,
    values: &[f64],
    eps_lambda: f64,
) -> GpCurve {
    assert_eq!(values.len(), traj.len(), "one parameter value per sample");
    let n = traj.points[0].branches();
    let mut alive: Vec<bool> = (0..n)
        .map(|k| traj.points[0].eigenvalues[k] >= eps_lambda)
        .collect();
    let mut transport = vec![0.0; n];
    let mut raw = Vec::with_capacity(traj.len());
    for j in 0..traj.len() {
        if j > 0 {
            let (prev, cur) = (&traj.points[j - 1], &traj.points[j]);
            for k in 0..n {
                alive[k] &= cur.eigenvalues[k] >= eps_lambda;
                transport[k] += arg(inner(&prev.eigenvectors[k], &cur.eigenvectors[k]));
            }
        }
        let terms: Vec<(usize, Complex64)> = (0..n)
            .filter(|&k| alive[k])
            .map(|k| (k, branch_term(traj, k, j, transport[k])))
            .collect();
        let gamma = if terms.is_empty() {
            None
        } else {
            finish(terms, false).ok().map(|r| r.gamma_g)
        };
        raw.push(gamma);
    }
    let unwrapped = unwrap_phases(&raw);
    GpCurve {
        points: values.iter().copied().zip(unwrapped).collect(),
        resolution_warning: traj.resolution_warning,
    }
}

/// Removes 2π jumps between consecutive defined values; gaps are skipped.
pub fn unwrap_phases(phases: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut last: Option<f64> = None;
    phases
        .iter()
        .map(|p| {
            p.map(|x| {
                let y = match last {
                    None => x,
                    Some(prev) => prev + wrap_phase(x - prev),
                };
                last = Some(y);
                y
            })
        })
        .collect()
}

/// dγ/ds by central differences inside and second-order one-sided
/// differences at both ends. Requires uniform spacing.
pub fn gp_derivative(curve: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, GpError> {
    let n = curve.len();
    if n < 3 {
        return Err(GpError::TooFewPoints(n));
    }
    let h = (curve[n - 1].0 - curve[0].0) / (n - 1) as f64;
    if h == 0.0 || !h.is_finite() {
        return Err(GpError::NonUniformSpacing { index: 0 });
    }
    for (index, w) in curve.windows(2).enumerate() {
        if ((w[1].0 - w[0].0) - h).abs() > 1e-9 * h.abs() {
            return Err(GpError::NonUniformSpacing { index });
        }
    }
    let f: Vec<f64> = curve.iter().map(|p| p.1).collect();
    let mut out = Vec::with_capacity(n);
    out.push((curve[0].0, (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)));
    for i in 1..n - 1 {
        out.push((curve[i].0, (f[i + 1] - f[i - 1]) / (2.0 * h)));
    }
    out.push((
        curve[n - 1].0,
        (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::Scheme;
    use crate::linops::CMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_circle(theta: f64, samples: usize) -> SpectralTrajectory {
        let points = (0..samples)
            .map(|j| {
                let phi = TAU * j as f64 / (samples - 1) as f64;
                SpectralPoint {
                    eigenvalues: vec![1.0],
                    eigenvectors: vec![vec![
                        c((theta / 2.0).cos(), 0.0),
                        Complex64::from_polar((theta / 2.0).sin(), phi),
                    ]],
                }
            })
            .collect();
        SpectralTrajectory::from_points(points, EPS_LAMBDA).unwrap()
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(-PI), PI);
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_trajectory_has_zero_phase() {
        let rho = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8)]).unwrap();
        let states = vec![rho; 5];
        let traj = track_spectrum(&states, EPS_LAMBDA).unwrap();
        assert_eq!(traj.kept_branches(), &[0]);
        for w in traj.points().windows(2) {
            assert!((inner(&w[0].eigenvectors[0], &w[1].eigenvectors[0]).norm() - 1.0).abs() < 1e-12);
        }
        let r = mixed_state_gp(&traj).unwrap();
        assert!(r.gamma_g.abs() < 1e-12);
        assert!((r.visibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_circle_half_solid_angle() {
        for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
            let r = mixed_state_gp(&qubit_circle(theta, 10_000)).unwrap();
            let want = -TAU * (theta / 2.0).sin().powi(2);
            assert!(wrap_phase(r.gamma_g - want).abs() < 1e-4, "theta {theta}: {} vs {want}", r.gamma_g);
        }
    }

    #[test]
    fn parallel_transported_frame_reduces_to_pancharatnam() {
        // Frame along a great circle has real positive consecutive overlaps.
        let points: Vec<SpectralPoint> = (0..50)
            .map(|j| {
                let a = 1.2 * j as f64 / 49.0;
                SpectralPoint {
                    eigenvalues: vec![1.0],
                    eigenvectors: vec![vec![c(a.cos(), 0.0), c(a.sin(), 0.0)]],
                }
            })
            .collect();
        let traj = SpectralTrajectory::from_points(points.clone(), EPS_LAMBDA).unwrap();
        // A global phase on the final vector only: consecutive overlaps stay
        // positive except the last step, which the transport term removes.
        let r = mixed_state_gp(&traj).unwrap();
        let p = pancharatnam_phase(&points[0].eigenvectors[0], &points[49].eigenvectors[0]).unwrap();
        assert!((r.gamma_g - p).abs() <= 1e-10);
    }

    #[test]
    fn branch_swap_follows_eigenvectors() {
        let a = DensityMatrix::new(CMatrix::from_diagonal(&[0.6, 0.3, 0.1])).unwrap();
        let b = DensityMatrix::new(CMatrix::from_diagonal(&[0.3, 0.6, 0.1])).unwrap();
        let traj = track_spectrum(&[a, b], EPS_LAMBDA).unwrap();
        let p1 = &traj.points()[1];
        assert_eq!(p1.eigenvalues, vec![0.3, 0.6, 0.1]);
        assert!((p1.eigenvectors[0][0].norm() - 1.0).abs() < 1e-15);
        assert!((p1.eigenvectors[1][1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_relevant_branches_warn() {
        let a = DensityMatrix::new(CMatrix::from_diagonal(&[0.5, 0.5, 0.0])).unwrap();
        let traj = track_spectrum(&[a.clone(), a], EPS_LAMBDA).unwrap();
        assert!(traj.resolution_warning());
        assert_eq!(traj.kept_branches().len(), 2);
    }

    #[test]
    fn scheme2_resonance_keeps_one_branch() {
        let base = SystemParams::scheme(Scheme::II).with_rabi(6.0, 6.0);
        let states = [
            atomic_to_photon(&steady_state(&base).unwrap()),
            atomic_to_photon(&steady_state(&base.with_rabi(3.0, 6.0)).unwrap()),
        ];
        let traj = track_spectrum(&states, EPS_LAMBDA).unwrap();
        assert_eq!(traj.kept_branches(), &[0]);
        assert!((traj.points()[0].eigenvalues[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pancharatnam_examples() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        assert_eq!(pancharatnam_phase(&psi, &psi).unwrap(), 0.0);
        let u = Complex64::from_polar(1.0, PI / 3.0);
        let shifted: Vec<Complex64> = psi.iter().map(|z| z * u).collect();
        assert!((pancharatnam_phase(&psi, &shifted).unwrap() - PI / 3.0).abs() < 1e-14);
        assert!(matches!(
            pancharatnam_phase(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]),
            Err(GpError::UndefinedPhase { .. })
        ));
        assert!(matches!(
            pancharatnam_phase(&[c(1.0, 0.0), c(1.0, 0.0)], &psi),
            Err(GpError::NotNormalized { .. })
        ));
    }

    #[test]
    fn path_spec_validation() {
        let base = SystemParams::scheme(Scheme::I).with_rabi(6.0, 6.0);
        assert!(matches!(PathSpec::new(base, Param::Delta1, 1.0, 1.0, 5), Err(GpError::InvalidRange { .. })));
        assert!(matches!(PathSpec::new(base, Param::Delta1, 0.0, 1.0, 1), Err(GpError::TooFewSamples(1))));
        let spec = PathSpec::new(base, Param::Delta1, -3.0, 3.0, 601).unwrap();
        let v = spec.values();
        assert_eq!(v[0], -3.0);
        assert_eq!(v[300], 0.0);
        assert_eq!(v[600], 3.0);
    }

    #[test]
    fn two_sample_curve() {
        let base = SystemParams::scheme(Scheme::I).with_rabi(6.0, 6.0);
        let spec = PathSpec::new(base, Param::Delta1, -1.0, 1.0, 2).unwrap();
        let curve = gp_curve(&spec).unwrap();
        assert_eq!(curve.points[0], (-1.0, Some(0.0)));
        let traj = track_spectrum(&sample_path(&spec).unwrap(), EPS_LAMBDA).unwrap();
        let whole = mixed_state_gp(&traj).unwrap().gamma_g;
        assert!((curve.points[1].1.unwrap() - whole).abs() < 1e-15);
    }

    #[test]
    fn sample_path_reports_failing_index() {
        // Undriven upper level is stationary when it cannot decay.
        let base = SystemParams::scheme(Scheme::II).with_rabi(0.0, 0.0);
        let spec = PathSpec::new(base, Param::Omega2, -1.0, 1.0, 3).unwrap();
        match sample_path(&spec) {
            Err(GpError::SteadyState { index: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unwrap_removes_injected_jump() {
        let series: Vec<f64> = (0..20).map(|j| 0.3 * j as f64).collect();
        let mut jumped: Vec<Option<f64>> = series.iter().map(|&x| Some(wrap_phase(x))).collect();
        jumped[10] = jumped[10].map(|x| x + TAU);
        jumped[4] = None;
        let un = unwrap_phases(&jumped);
        for (j, x) in series.iter().enumerate() {
            match un[j] {
                Some(y) => assert!((y - x).abs() < 1e-12, "index {j}"),
                None => assert_eq!(j, 4),
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let lin: Vec<(f64, f64)> = (0..7).map(|j| (0.5 * j as f64, 2.0 * 0.5 * j as f64)).collect();
        for (_, d) in gp_derivative(&lin).unwrap() {
            assert!((d - 2.0).abs() < 1e-12);
        }
        let quad: Vec<(f64, f64)> = (0..7).map(|j| { let s = 0.1 * j as f64 - 0.3; (s, 3.0 * s * s - s) }).collect();
        let d = gp_derivative(&quad).unwrap();
        for (i, &(s, v)) in d.iter().enumerate() {
            // Second-order differences are exact for quadratics, ends included.
            assert!((v - (6.0 * s - 1.0)).abs() < 1e-10, "index {i}");
        }
        assert!(matches!(gp_derivative(&lin[..2]), Err(GpError::TooFewPoints(2))));
        let mut bad = lin.clone();
        bad[3].0 += 0.01;
        assert!(matches!(gp_derivative(&bad), Err(GpError::NonUniformSpacing { .. })));
    }
}
