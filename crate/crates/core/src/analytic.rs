//! Closed-form results for the ideal cascade (no top-level decay) near
//! two-photon resonance, and the numeric quantities they approximate.
//!
//! Coordinates: `X = arctan(Ω₁/Ω₂)`, `Δ̄ = Δ/Ω`, `γ₂₁ = Γ₂/(2Ω)` with
//! `Ω = √(Ω₁² + Ω₂²)`. Matrices and vectors are in the photon basis
//! `{|00⟩, |01⟩, |11⟩}`.

use num_complex::Complex64;

use crate::cascade::{steady_state, CascadeError, SystemParams};
use crate::linops::{inner, CMatrix};
use crate::photonstate::atomic_to_photon;

/// Amplitudes below this count as zero when fixing an eigenvector's phase.
const GAUGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealParams {
    pub x: f64,
    pub delta_bar: f64,
    pub gamma21: f64,
}

impl IdealParams {
    pub fn new(x: f64, delta_bar: f64, gamma21: f64) -> Result<Self, CascadeError> {
        if !(x.is_finite() && delta_bar.is_finite() && gamma21.is_finite()) || gamma21 < 0.0 {
            return Err(CascadeError::InvalidParams(format!(
                "need finite X, Δ̄ and γ₂₁ ≥ 0 (got {x}, {delta_bar}, {gamma21})"
            )));
        }
        Ok(Self {
            x,
            delta_bar,
            gamma21,
        })
    }

    /// Reads `X`, `Δ̄ = (Δ₁+Δ₂)/Ω` and `γ₂₁` off a parameter set.
    pub fn from_system(p: &SystemParams) -> Result<Self, CascadeError> {
        if p.rabi_norm() == 0.0 {
            return Err(CascadeError::InvalidParams(
                "ideal coordinates need a nonzero drive".into(),
            ));
        }
        Self::new(p.mixing_angle(), p.reduced_detuning(), p.gamma21())
    }

    /// Inverse of [`IdealParams::from_system`]: `Ω = Γ₂/(2γ₂₁)`,
    /// `Ω₁ = Ω sinX`, `Ω₂ = Ω cosX`, `Δ₁ = Δ̄Ω`, `Δ₂ = 0`.
    pub fn to_system(&self, gamma2: f64, gamma3: f64) -> Result<SystemParams, CascadeError> {
        if self.gamma21 <= 0.0 || gamma2 <= 0.0 {
            return Err(CascadeError::InvalidParams(
                "recovering Ω needs γ₂₁ > 0 and Γ₂ > 0".into(),
            ));
        }
        let omega = gamma2 / (2.0 * self.gamma21);
        let p = SystemParams {
            omega1: omega * self.x.sin(),
            omega2: omega * self.x.cos(),
            delta1: self.delta_bar * omega,
            delta2: 0.0,
            gamma2,
            gamma3,
        };
        p.validate()?;
        Ok(p)
    }
}

/// First-order-in-Δ̄ steady state of the ideal system.
///
/// Returned as a plain matrix: with `ρ₀₁ ≠ 0` and `ρ₁₁ = 0` it is not
/// positive semidefinite once `Δ̄ ≠ 0`.
pub fn ideal_density_matrix(p: &IdealParams) -> CMatrix {
    let (s, c) = p.x.sin_cos();
    let d = p.delta_bar;
    let r = |x: f64| Complex64::new(x, 0.0);
    let upper = [
        [r(s * s), r(d * c * s * s), -s * c * Complex64::new(1.0, -p.gamma21 * d)],
        [r(0.0), r(0.0), r(-d * c * c * s)],
        [r(0.0), r(0.0), r(c * c)],
    ];
    CMatrix::from_fn(3, |i, j| {
        if i <= j {
            upper[i][j]
        } else {
            upper[j][i].conj()
        }
    })
}

/// `−sinX |00⟩ + cosX |11⟩`
pub fn dark_state(x: f64) -> [Complex64; 3] {
    [
        Complex64::new(-x.sin(), 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(x.cos(), 0.0),
    ]
}

/// Concurrence of the dark state, `sin 2X`.
pub fn pure_concurrence(x: f64) -> f64 {
    (2.0 * x).sin()
}

/// Second-order coefficient of the real part of the overlap in δ.
pub fn beta_coefficient(x: f64, gamma21: f64) -> f64 {
    let g2 = gamma21 * gamma21;
    let c = x.cos();
    let conc = pure_concurrence(x);
    -(1.0 / 8.0)
        * c.powi(4)
        * (4.0 + 16.0 * g2 - (5.0 + 8.0 * g2) * (2.0 * x).cos() + (4.0 * x).cos())
        + conc * conc * ((1.0 + 8.0 * g2) * (2.0 * x).cos() + (4.0 * x).cos()) / 16.0
}

/// Second-order expansion of the phase around `(Δ̄ = 0, X)` in the offsets
/// `(δ, dX)`.
pub fn taylor_gp(x: f64, delta: f64, dx: f64, gamma21: f64) -> f64 {
    let c = x.cos();
    let num = -gamma21 * c * c * delta - gamma21 * pure_concurrence(x) * delta * dx / 4.0;
    let den = 1.0 - dx * dx / 2.0 + beta_coefficient(x, gamma21) * delta * delta;
    num.atan2(den)
}

/// Dominant eigenvector of the numeric ideal-system steady state, phased so
/// the `|00⟩` amplitude is real and non-positive (or, if that amplitude
/// vanishes, the `|11⟩` amplitude real and non-negative).
pub fn dominant_eigenvector(p: &SystemParams) -> Result<Vec<Complex64>, CascadeError> {
    let photon = atomic_to_photon(&steady_state(p)?);
    let es = photon.rho().eig();
    let mut v = es.vector(es.values.len() - 1);
    let phase = if v[0].norm() >= GAUGE_TOL {
        -v[0] / v[0].norm()
    } else {
        v[2] / v[2].norm()
    };
    let u = phase.conj();
    v.iter_mut().for_each(|z| *z *= u);
    Ok(v)
}

/// `Arg⟨ψ(χ₀)|ψ(χ)⟩` between the pure state at `χ₀ = (0, X)` and the
/// dominant eigenvector at `χ = (δ, X + dX)`, both from the numeric steady
/// state with `Γ₂ = gamma2` and `Γ₃ = 0`.
pub fn numeric_overlap(
    x: f64,
    delta: f64,
    dx: f64,
    gamma21: f64,
    gamma2: f64,
) -> Result<Complex64, CascadeError> {
    let at = |x, d| {
        IdealParams::new(x, d, gamma21)?
            .to_system(gamma2, 0.0)
            .and_then(|p| dominant_eigenvector(&p))
    };
    Ok(inner(&at(x, 0.0)?, &at(x + dx, delta)?))
}

pub fn numeric_gp(x: f64, delta: f64, dx: f64, gamma21: f64, gamma2: f64) -> Result<f64, CascadeError> {
    Ok(numeric_overlap(x, delta, dx, gamma21, gamma2)?.arg())
}

/// Second-order coefficient of `Re⟨ψ(χ₀)|ψ(δ, X)⟩` extracted from the
/// numerics by symmetric differences at `h` and `h/2` with Richardson
/// extrapolation.
pub fn beta_numeric(x: f64, gamma21: f64, gamma2: f64, h: f64) -> Result<f64, CascadeError> {
    let second = |h: f64| -> Result<f64, CascadeError> {
        let plus = numeric_overlap(x, h, 0.0, gamma21, gamma2)?.re;
        let minus = numeric_overlap(x, -h, 0.0, gamma21, gamma2)?.re;
        Ok((plus + minus - 2.0) / (2.0 * h * h))
    };
    let coarse = second(h)?;
    let fine = second(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
