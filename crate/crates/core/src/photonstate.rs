//! Two-photon state emitted by the cascade, its two-qubit embedding, purity
//! and concurrence.
//!
//! The emitted two-mode field at time t equals the atomic state at the
//! retarded time, with the levels relabelled by photon occupancy
//! `n₂n₁`: `|3⟩ → |00⟩`, `|2⟩ → |01⟩`, `|1⟩ → |11⟩`.

use crate::cascade::AtomicState;
use crate::linops::{svd, CMatrix, DensityMatrix, LinalgError};

/// Photon-basis index → atomic level index.
const PHOTON_TO_ATOM: [usize; 3] = [2, 1, 0];
/// Photon-basis index → two-qubit index in `{|00⟩, |01⟩, |10⟩, |11⟩}`.
const PHOTON_TO_QUBITS: [usize; 3] = [0, 1, 3];

/// Density matrix in the basis `{|00⟩, |01⟩, |11⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonState(DensityMatrix);

impl TwoPhotonState {
    pub fn new(rho: DensityMatrix) -> Result<Self, LinalgError> {
        if rho.dim() != 3 {
            return Err(LinalgError::BadLength {
                expected: 9,
                got: rho.dim() * rho.dim(),
            });
        }
        Ok(Self(rho))
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }
}

impl AsRef<DensityMatrix> for TwoPhotonState {
    fn as_ref(&self) -> &DensityMatrix {
        &self.0
    }
}

/// Density matrix in `{|00⟩, |01⟩, |10⟩, |11⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState(DensityMatrix);

impl TwoQubitState {
    pub fn new(rho: DensityMatrix) -> Result<Self, LinalgError> {
        if rho.dim() != 4 {
            return Err(LinalgError::BadLength {
                expected: 16,
                got: rho.dim() * rho.dim(),
            });
        }
        Ok(Self(rho))
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }
}

/// Concurrence, in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    pub fn new(c: f64) -> Self {
        Self(c.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn atomic_to_photon(a: &AtomicState) -> TwoPhotonState {
    let m = a.matrix();
    let p = CMatrix::from_fn(3, |i, j| m[(PHOTON_TO_ATOM[i], PHOTON_TO_ATOM[j])]);
    // A permutation similarity preserves every state invariant.
    TwoPhotonState(DensityMatrix::new(p).expect("relabelled state stays valid"))
}

pub fn embed_two_qubit(p: &TwoPhotonState) -> TwoQubitState {
    let src = p.matrix();
    let mut m = CMatrix::zeros(4);
    for i in 0..3 {
        for j in 0..3 {
            m[(PHOTON_TO_QUBITS[i], PHOTON_TO_QUBITS[j])] = src[(i, j)];
        }
    }
    TwoQubitState(DensityMatrix::new(m).expect("embedding preserves validity"))
}

/// `σ_y ⊗ σ_y`
fn spin_flip_operator() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 0.0, 0.0],
    ])
}

/// Spin-flip concurrence `max(0, √μ₁ − √μ₂ − √μ₃ − √μ₄)`.
///
/// The `μᵢ` are the eigenvalues of `ρ ρ̃` with `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`. With
/// `ρ = ΦΦ†`, `Φ = V√Λ`, the `√μᵢ` are the singular values of `Φᵀ (Y⊗Y) Φ`,
/// which avoids square roots of near-zero eigenvalues of `ρ ρ̃`.
pub fn concurrence(q: &TwoQubitState) -> Concurrence {
    let es = q.rho().eig();
    let weights: Vec<f64> = es.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let phi = CMatrix::from_fn(4, |i, k| es.vectors[(i, k)] * weights[k]);
    let tau = &(&phi.transpose() * &spin_flip_operator()) * &phi;
    let roots = svd(&tau).expect("finite 4x4 matrix").values;
    Concurrence::new(roots[0] - roots[1] - roots[2] - roots[3])
}

/// `Tr ρ²`
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{steady_state, Scheme, SystemParams};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_qubit_pure(v: [Complex64; 4]) -> TwoQubitState {
        TwoQubitState::new(DensityMatrix::pure(&v).unwrap()).unwrap()
    }

    #[test]
    fn ground_maps_to_both_photons() {
        let p = atomic_to_photon(&AtomicState::ground());
        assert_eq!(p.matrix()[(2, 2)], c(1.0, 0.0));
        let q = embed_two_qubit(&p);
        assert_eq!(q.matrix(), &CMatrix::from_diagonal(&[0.0, 0.0, 0.0, 1.0]));
        assert_eq!(concurrence(&q).value(), 0.0);
    }

    #[test]
    fn relabelling_preserves_spectrum() {
        let a = steady_state(&SystemParams::scheme(Scheme::I).with_rabi(3.0, 6.0).with_detunings(0.7, 0.0))
            .unwrap();
        let p = atomic_to_photon(&a);
        let ea = a.rho().eig();
        let ep = p.rho().eig();
        for (x, y) in ea.values.iter().zip(&ep.values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((p.matrix().trace() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn embedding_leaves_ten_empty() {
        let a = steady_state(&SystemParams::scheme(Scheme::I).with_rabi(6.0, 3.0)).unwrap();
        let q = embed_two_qubit(&atomic_to_photon(&a));
        for k in 0..4 {
            assert_eq!(q.matrix()[(2, k)], c(0.0, 0.0));
            assert_eq!(q.matrix()[(k, 2)], c(0.0, 0.0));
        }
        let es = q.rho().eig();
        assert!(es.values[0].abs() < 1e-12, "rank must be at most 3");
    }

    #[test]
    fn bell_concurrence_is_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = two_qubit_pure([c(-s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        assert!((concurrence(&q).value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_mixture_has_no_concurrence() {
        // ρ̃ = ρ here, so √μ = (½, ½, 0, 0) and C = max(0, 0).
        let q = TwoQubitState::new(
            DensityMatrix::new(CMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5])).unwrap(),
        )
        .unwrap();
        assert!(concurrence(&q).value().abs() < 1e-12);
    }

    #[test]
    fn purity_limits() {
        let pure = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]).unwrap();
        assert!((purity(&pure) - 1.0).abs() < 1e-14);
        let mixed = DensityMatrix::new(CMatrix::from_diagonal(&[1.0 / 3.0; 3])).unwrap();
        assert!((purity(&mixed) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn scheme1_purity_matches_eigenvalues() {
        let a = steady_state(&SystemParams::scheme(Scheme::I).with_rabi(6.0, 6.0)).unwrap();
        let p = atomic_to_photon(&a);
        let pur = purity(p.rho());
        let from_eig: f64 = p.rho().eig().values.iter().map(|l| l * l).sum();
        assert!((pur - from_eig).abs() < 1e-12);
        assert!(pur > 1.0 / 3.0 && pur < 1.0);
    }

    proptest! {
        #[test]
        fn pure_state_concurrence(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU) {
            let a = c(theta.cos(), 0.0);
            let b = Complex64::from_polar(theta.sin(), phi);
            let q = two_qubit_pure([a, c(0.0, 0.0), c(0.0, 0.0), b]);
            let want = 2.0 * (a * b).norm();
            prop_assert!((concurrence(&q).value() - want).abs() < 1e-10);
        }

        #[test]
        fn local_phases_leave_concurrence_invariant(
            theta in 0.1..1.4f64, t1 in 0.0..6.3f64, t2 in 0.0..6.3f64, d1 in -3.0..3.0f64,
        ) {
            let om = 6.0;
            let a = steady_state(&SystemParams::scheme(Scheme::I)
                .with_rabi(om * theta.sin(), om * theta.cos())
                .with_detunings(d1, 0.0)).unwrap();
            let q = embed_two_qubit(&atomic_to_photon(&a));
            let u1 = CMatrix::from_fn(2, |i, j| if i != j { c(0.0, 0.0) } else if i == 0 { c(1.0, 0.0) } else { Complex64::from_polar(1.0, t1) });
            let u2 = CMatrix::from_fn(2, |i, j| if i != j { c(0.0, 0.0) } else if i == 0 { c(1.0, 0.0) } else { Complex64::from_polar(1.0, t2) });
            let u = u1.kron(&u2);
            let rotated = &(&u * q.matrix()) * &u.adjoint();
            let q2 = TwoQubitState::new(DensityMatrix::new(rotated).unwrap()).unwrap();
            prop_assert!((concurrence(&q).value() - concurrence(&q2).value()).abs() < 1e-10);
        }
    }
}
