//! Small dense complex linear algebra.
//!
//! Everything here operates on square matrices of dimension at most a few
//! tens (the Liouvillian of a three-level system is 9×9), so the algorithms
//! favour unconditional convergence over speed: cyclic Jacobi for Hermitian
//! eigenproblems and one-sided Jacobi for the singular value decomposition.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Largest tolerated `max |A - A†|` for inputs declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative singular-value threshold below which a direction counts as null.
pub const RANK_EPS: f64 = 1e-9;

/// Tolerance used when validating density matrices.
pub const STATE_TOL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |A - A†| = {defect:e}")]
    NotHermitian { defect: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("operator dimension {0} is not a perfect square")]
    NotSuperoperator(usize),
    #[error("operator has full rank: no steady state")]
    NoSteadyState,
    #[error("operator has a {deficiency}-dimensional null space: steady state is not unique")]
    DegenerateSteadyState { deficiency: usize },
    #[error("null vector has vanishing trace and cannot be normalized")]
    TracelessNullVector,
    #[error("trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },
    #[error("eigenvalue {eigenvalue:e} is negative")]
    NotPositive { eigenvalue: f64 },
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != dim * dim {
            return Err(LinalgError::BadLength {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Like [`CMatrix::from_vec`] but additionally requires the input to be
    /// Hermitian within [`HERMITIAN_TOL`].
    pub fn hermitian(dim: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        let m = Self::from_vec(dim, data)?;
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { defect });
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries, which is also the vectorization used by superoperators.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, k)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†) / 2`
    pub fn hermitize(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = other.dim;
        Self::from_fn(self.dim * n, |i, j| {
            self[(i / n, j / n)] * other[(i % n, j % n)]
        })
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch in matvec");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Reshapes a row-major vectorized operator of length `n²` into an `n×n` matrix.
    pub fn unvec(v: &[Complex64]) -> Result<Self, LinalgError> {
        let n = exact_sqrt(v.len()).ok_or(LinalgError::NotSuperoperator(v.len()))?;
        Self::from_vec(n, v.to_vec())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// `⟨a|b⟩`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector paired with `values[k]`.
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `Σ λ_k v_k v_k†`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.values[k] * self.vectors[(i, k)] * self.vectors[(j, k)].conj())
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies the
/// real symmetric Schur rotation that annihilates it. Degenerate eigenvalues
/// come back with an arbitrary orthonormal basis of their eigenspace.
pub fn hermitian_eig(a: &CMatrix) -> Result<EigenSystem, LinalgError> {
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    let n = a.dim;
    let mut m = a.hermitize();
    let mut v = CMatrix::identity(n);
    let frob = m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re).then(x.cmp(&y)));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

fn jacobi_rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let phase = Complex64::from_polar(1.0, -apq.arg());
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
    let g_qp = -s * phase;
    let g_qq = c * phase;
    let n = m.dim;
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c + mkq * g_qp;
        m[(k, q)] = mkp * s + mkq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c + mqk * g_qp.conj();
        m[(q, k)] = mpk * s + mqk * g_qq.conj();
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Full singular value decomposition `A = U Σ V†`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Descending, non-negative.
    pub values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Pairs of columns are rotated until mutually orthogonal; the column norms
/// are then the singular values. Small singular values come out with high
/// relative accuracy, which is what rank decisions need.
pub fn svd(a: &CMatrix) -> Result<Svd, LinalgError> {
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let n = a.dim;
    // Work column-major so column updates are contiguous.
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = w[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&w[i], &w[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = gamma / g;
                let (wi, wj) = pair_mut(&mut w, i, j);
                rotate_columns(wi, wj, c, s, e);
                let (vi, vj) = pair_mut(&mut v, i, j);
                rotate_columns(vi, vj, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = w.iter().map(|col| norm(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]).then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&k| sigma[k]).collect();
    let u = CMatrix::from_fn(n, |r, c| {
        let k = order[c];
        if sigma[k] > 0.0 {
            w[k][r] / sigma[k]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let v = CMatrix::from_fn(n, |r, c| v[order[c]][r]);
    Ok(Svd { values, u, v })
}

fn pair_mut<T>(xs: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    debug_assert!(i < j);
    let (lo, hi) = xs.split_at_mut(j);
    (&mut lo[i], &mut hi[0])
}

// [a_i, a_j] <- [a_i, a_j] [[c, s e], [-s e*, c]]
fn rotate_columns(ai: &mut [Complex64], aj: &mut [Complex64], c: f64, s: f64, e: Complex64) {
    let ec = e.conj();
    for (x, y) in ai.iter_mut().zip(aj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = xi * c - yj * (ec * s);
        *y = xi * (e * s) + yj * c;
    }
}

/// Number of singular values at or below `RANK_EPS · σ_max`.
pub fn rank_deficiency(svd: &Svd) -> usize {
    let smax = svd.values.first().copied().unwrap_or(0.0);
    let thresh = RANK_EPS * smax;
    svd.values.iter().filter(|&&s| s <= thresh).count()
}

/// Extracts the unique null vector of a superoperator acting on row-major
/// vectorized `n×n` matrices, reshaped, normalized to unit trace and
/// Hermitized.
pub fn null_space_unit_trace(l: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = exact_sqrt(l.dim()).ok_or(LinalgError::NotSuperoperator(l.dim()))?;
    let dec = svd(l)?;
    match rank_deficiency(&dec) {
        0 => return Err(LinalgError::NoSteadyState),
        1 => {}
        deficiency => return Err(LinalgError::DegenerateSteadyState { deficiency }),
    }
    let null = dec.v.column(l.dim() - 1);
    let m = CMatrix::from_vec(n, null)?;
    let tr = m.trace();
    if tr.norm() < 1e-12 * m.max_abs() || tr.norm() == 0.0 {
        return Err(LinalgError::TracelessNullVector);
    }
    Ok(m.scale(tr.inv()).hermitize())
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite,
/// each within [`STATE_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl AsRef<DensityMatrix> for DensityMatrix {
    fn as_ref(&self) -> &DensityMatrix {
        self
    }
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self, LinalgError> {
        let defect = m.hermitian_defect();
        if defect > STATE_TOL {
            return Err(LinalgError::NotHermitian { defect });
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > STATE_TOL {
            return Err(LinalgError::NotUnitTrace { trace: tr.re });
        }
        let eig = hermitian_eig(&m.hermitize())?;
        if let Some(&lo) = eig.values.first() {
            if lo < -STATE_TOL {
                return Err(LinalgError::NotPositive { eigenvalue: lo });
            }
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self, LinalgError> {
        Self::new(CMatrix::outer(psi))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eig(&self) -> EigenSystem {
        // Validated as Hermitian on construction.
        hermitian_eig(&self.0).expect("density matrix is Hermitian")
    }
}
