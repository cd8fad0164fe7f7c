//! The driven three-level cascade `|1⟩ → |2⟩ → |3⟩` in the rotating frame.
//!
//! Units: all frequencies and rates are in units of γ = 1 MHz, times in 1/γ,
//! ħ = 1. Basis order is `{|1⟩, |2⟩, |3⟩}` (ground, intermediate, top).
//! Dissipation is the trace-preserving Lindblad form with collapse operators
//! `|1⟩⟨2|` at rate Γ₂ and `|2⟩⟨3|` at rate Γ₃; the ground state is stable.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::linops::{null_space_unit_trace, CMatrix, DensityMatrix, LinalgError};

/// Decay rate of the intermediate level, Γ₂ (first excited state linewidth).
pub const DEFAULT_GAMMA2: f64 = 6.0;
/// Decay rate of the top level in scheme I (metastable state).
pub const SCHEME_I_GAMMA3: f64 = 1.0;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CascadeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no steady state: Liouvillian has full rank")]
    NoSteadyState,
    #[error("steady state is not unique (null space dimension {deficiency})")]
    DegenerateSteadyState { deficiency: usize },
    #[error("time step {dt} must be positive and at most {bound}")]
    InvalidStep { dt: f64, bound: f64 },
    #[error("integration horizon {0} must be finite and non-negative")]
    InvalidHorizon(f64),
    #[error("expected a 3x3 atomic state, got dimension {0}")]
    WrongDimension(usize),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for CascadeError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NoSteadyState => CascadeError::NoSteadyState,
            LinalgError::DegenerateSteadyState { deficiency } => {
                CascadeError::DegenerateSteadyState { deficiency }
            }
            other => CascadeError::Linalg(other),
        }
    }
}

/// Decoherence preset for the top level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Real system: metastable top level, Γ₃ = 1.
    I,
    /// Ideal system: infinitely long-lived top level, Γ₃ = 0.
    II,
}

impl Scheme {
    pub fn gamma3(self) -> f64 {
        match self {
            Scheme::I => SCHEME_I_GAMMA3,
            Scheme::II => 0.0,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::I => f.write_str("I"),
            Scheme::II => f.write_str("II"),
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "i" | "1" => Ok(Scheme::I),
            "II" | "ii" | "2" => Ok(Scheme::II),
            other => Err(format!("unknown scheme '{other}' (expected I or II)")),
        }
    }
}

/// A control parameter that a path or sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Delta1,
    Delta2,
    Omega1,
    Omega2,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Delta1, Param::Delta2, Param::Omega1, Param::Omega2];

    pub fn name(self) -> &'static str {
        match self {
            Param::Delta1 => "delta1",
            Param::Delta2 => "delta2",
            Param::Omega1 => "omega1",
            Param::Omega2 => "omega2",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| format!("unknown parameter '{}'", s.trim()))
    }
}

/// Control and decay parameters of the driven cascade.
///
/// Rabi frequencies may carry a sign (the phase of the drive field); every
/// rate must be finite and non-negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub omega1: f64,
    pub omega2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl SystemParams {
    /// Undriven, resonant system with the decay rates of `scheme`.
    pub fn scheme(scheme: Scheme) -> Self {
        Self {
            omega1: 0.0,
            omega2: 0.0,
            delta1: 0.0,
            delta2: 0.0,
            gamma2: DEFAULT_GAMMA2,
            gamma3: scheme.gamma3(),
        }
    }

    pub fn with_rabi(mut self, omega1: f64, omega2: f64) -> Self {
        self.omega1 = omega1;
        self.omega2 = omega2;
        self
    }

    pub fn with_detunings(mut self, delta1: f64, delta2: f64) -> Self {
        self.delta1 = delta1;
        self.delta2 = delta2;
        self
    }

    pub fn with_decay(mut self, gamma2: f64, gamma3: f64) -> Self {
        self.gamma2 = gamma2;
        self.gamma3 = gamma3;
        self
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::Delta1 => self.delta1,
            Param::Delta2 => self.delta2,
            Param::Omega1 => self.omega1,
            Param::Omega2 => self.omega2,
        }
    }

    pub fn with(mut self, param: Param, value: f64) -> Self {
        match param {
            Param::Delta1 => self.delta1 = value,
            Param::Delta2 => self.delta2 = value,
            Param::Omega1 => self.omega1 = value,
            Param::Omega2 => self.omega2 = value,
        }
        self
    }

    pub fn validate(&self) -> Result<(), CascadeError> {
        let fields = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(CascadeError::InvalidParams(format!("{name} = {v} is not finite")));
        }
        if self.gamma2 < 0.0 || self.gamma3 < 0.0 {
            return Err(CascadeError::InvalidParams(format!(
                "decay rates must be non-negative (gamma2 = {}, gamma3 = {})",
                self.gamma2, self.gamma3
            )));
        }
        Ok(())
    }

    /// Δ = Δ₁ + Δ₂
    pub fn two_photon_detuning(&self) -> f64 {
        self.delta1 + self.delta2
    }

    /// √(Ω₁² + Ω₂²)
    pub fn rabi_norm(&self) -> f64 {
        self.omega1.hypot(self.omega2)
    }

    /// X = arctan(Ω₁/Ω₂), the entanglement control angle.
    pub fn mixing_angle(&self) -> f64 {
        self.omega1.atan2(self.omega2)
    }

    /// Δ̄ = Δ / √(Ω₁² + Ω₂²)
    pub fn reduced_detuning(&self) -> f64 {
        self.two_photon_detuning() / self.rabi_norm()
    }

    /// γ₂₁ = Γ₂ / (2√(Ω₁² + Ω₂²))
    pub fn gamma21(&self) -> f64 {
        self.gamma2 / (2.0 * self.rabi_norm())
    }
}

/// Atomic density matrix in the basis `{|1⟩, |2⟩, |3⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicState(DensityMatrix);

impl AsRef<DensityMatrix> for AtomicState {
    fn as_ref(&self) -> &DensityMatrix {
        &self.0
    }
}

impl AtomicState {
    pub fn new(rho: DensityMatrix) -> Result<Self, CascadeError> {
        if rho.dim() != 3 {
            return Err(CascadeError::WrongDimension(rho.dim()));
        }
        Ok(Self(rho))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self, CascadeError> {
        Self::new(DensityMatrix::new(m)?)
    }

    /// Projector onto basis level `level` (0 = |1⟩, 1 = |2⟩, 2 = |3⟩).
    pub fn level(level: usize) -> Self {
        let mut m = CMatrix::zeros(3);
        m[(level, level)] = Complex64::new(1.0, 0.0);
        Self(DensityMatrix::new(m).expect("basis projector is a valid state"))
    }

    pub fn ground() -> Self {
        Self::level(0)
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Rotating-wave Hamiltonian
/// `H = −Δ₁|2⟩⟨2| − (Δ₁+Δ₂)|3⟩⟨3| + Ω₁(|2⟩⟨1| + h.c.) + Ω₂(|3⟩⟨2| + h.c.)`.
pub fn build_hamiltonian(p: &SystemParams) -> CMatrix {
    let mut h = CMatrix::zeros(3);
    h[(1, 1)] = re(-p.delta1);
    h[(2, 2)] = re(-(p.delta1 + p.delta2));
    h[(0, 1)] = re(p.omega1);
    h[(1, 0)] = re(p.omega1);
    h[(1, 2)] = re(p.omega2);
    h[(2, 1)] = re(p.omega2);
    h
}

/// Collapse operators with their rates: `(|1⟩⟨2|, Γ₂)` and `(|2⟩⟨3|, Γ₃)`.
pub fn collapse_operators(p: &SystemParams) -> [(CMatrix, f64); 2] {
    let mut l2 = CMatrix::zeros(3);
    l2[(0, 1)] = re(1.0);
    let mut l3 = CMatrix::zeros(3);
    l3[(1, 2)] = re(1.0);
    [(l2, p.gamma2), (l3, p.gamma3)]
}

/// `ρ̇ = −i[H, ρ] + Σ Γ (LρL† − ½{L†L, ρ})` for any 3×3 operator `rho`.
pub fn lindblad_rhs(p: &SystemParams, rho: &CMatrix) -> CMatrix {
    let h = build_hamiltonian(p);
    let mut out = h.commutator(rho).scale(Complex64::new(0.0, -1.0));
    for (l, rate) in collapse_operators(p) {
        if rate == 0.0 {
            continue;
        }
        let ld = l.adjoint();
        let ldl = &ld * &l;
        let jump = &(&l * rho) * &ld;
        let anti = &(&ldl * rho) + &(rho * &ldl);
        let d = &jump - &anti.scale(re(0.5));
        out = &out + &d.scale(re(rate));
    }
    out
}

/// 9×9 superoperator acting on row-major `vec(ρ)`.
///
/// With row-major vectorization `vec(AXB) = (A ⊗ Bᵀ) vec(X)`.
pub fn liouvillian(p: &SystemParams) -> CMatrix {
    let id = CMatrix::identity(3);
    let h = build_hamiltonian(p);
    let mut sup = (&h.kron(&id) - &id.kron(&h.transpose())).scale(Complex64::new(0.0, -1.0));
    for (l, rate) in collapse_operators(p) {
        if rate == 0.0 {
            continue;
        }
        let ldl = &l.adjoint() * &l;
        let jump = l.kron(&l.conj());
        let left = ldl.kron(&id);
        let right = id.kron(&ldl.transpose());
        let d = &jump - &(&left + &right).scale(re(0.5));
        sup = &sup + &d.scale(re(rate));
    }
    sup
}

/// Unique fixed point of the master equation, from the null space of the
/// Liouvillian.
pub fn steady_state(p: &SystemParams) -> Result<AtomicState, CascadeError> {
    p.validate()?;
    let rho = null_space_unit_trace(&liouvillian(p))?;
    AtomicState::from_matrix(rho)
}

/// Largest step accepted by [`evolve`] for the given parameters.
pub fn max_stable_step(p: &SystemParams) -> f64 {
    let scale = [
        1.0,
        p.omega1.abs(),
        p.omega2.abs(),
        p.delta1.abs() + p.delta2.abs(),
        p.gamma2,
        p.gamma3,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    0.01 / scale
}

type Dense = [Complex64; 9];

fn dense(m: &CMatrix) -> Dense {
    let mut out = [Complex64::new(0.0, 0.0); 9];
    out.copy_from_slice(m.as_slice());
    out
}

/// [`lindblad_rhs`] specialised to the two ladder decays, on row-major
/// arrays. For `L = |a⟩⟨b|`: `LρL† = ρ_bb|a⟩⟨a|` and `{L†L, ρ}` touches row
/// and column `b` only.
fn fast_rhs(p: &SystemParams, h: &Dense, rho: &Dense) -> Dense {
    let mut out = [Complex64::new(0.0, 0.0); 9];
    let minus_i = Complex64::new(0.0, -1.0);
    for i in 0..3 {
        for j in 0..3 {
            let mut comm = Complex64::new(0.0, 0.0);
            for k in 0..3 {
                comm += h[3 * i + k] * rho[3 * k + j] - rho[3 * i + k] * h[3 * k + j];
            }
            out[3 * i + j] = minus_i * comm;
        }
    }
    for (a, b, rate) in [(0, 1, p.gamma2), (1, 2, p.gamma3)] {
        if rate == 0.0 {
            continue;
        }
        out[3 * a + a] += rho[3 * b + b] * rate;
        for k in 0..3 {
            out[3 * b + k] -= rho[3 * b + k] * (0.5 * rate);
            out[3 * k + b] -= rho[3 * k + b] * (0.5 * rate);
        }
    }
    out
}

/// Classical RK4 integration of [`lindblad_rhs`] without any renormalization.
///
/// The horizon is split into `ceil(t_final/dt)` equal steps, so the step
/// actually used never exceeds `dt`.
pub fn integrate(
    p: &SystemParams,
    rho0: &CMatrix,
    t_final: f64,
    dt: f64,
) -> Result<CMatrix, CascadeError> {
    p.validate()?;
    if rho0.dim() != 3 {
        return Err(CascadeError::WrongDimension(rho0.dim()));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(CascadeError::InvalidHorizon(t_final));
    }
    let bound = max_stable_step(p);
    if !dt.is_finite() || dt <= 0.0 || dt > bound * (1.0 + 1e-12) {
        return Err(CascadeError::InvalidStep { dt, bound });
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let hamiltonian = dense(&build_hamiltonian(p));
    let mut rho = dense(rho0);
    let axpy = |x: &Dense, k: &Dense, a: f64| -> Dense {
        let mut out = *x;
        for (o, v) in out.iter_mut().zip(k) {
            *o += v * a;
        }
        out
    };
    for _ in 0..steps {
        let k1 = fast_rhs(p, &hamiltonian, &rho);
        let k2 = fast_rhs(p, &hamiltonian, &axpy(&rho, &k1, 0.5 * h));
        let k3 = fast_rhs(p, &hamiltonian, &axpy(&rho, &k2, 0.5 * h));
        let k4 = fast_rhs(p, &hamiltonian, &axpy(&rho, &k3, h));
        for i in 0..9 {
            rho[i] += (k1[i] + k4[i] + (k2[i] + k3[i]) * 2.0) * (h / 6.0);
        }
    }
    let rho = CMatrix::from_vec(3, rho.to_vec()).map_err(CascadeError::Linalg)?;
    Ok(rho)
}

/// Time evolution by [`integrate`], re-Hermitized and trace-renormalized.
pub fn evolve(
    p: &SystemParams,
    rho0: &AtomicState,
    t_final: f64,
    dt: f64,
) -> Result<AtomicState, CascadeError> {
    let raw = integrate(p, rho0.matrix(), t_final, dt)?.hermitize();
    let tr = raw.trace();
    AtomicState::from_matrix(raw.scale(tr.inv()))
}
