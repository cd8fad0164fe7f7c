use gpdiag_core::cascade::{liouvillian, Scheme, SystemParams};
use gpdiag_core::linops::{hermitian_eig, null_space_unit_trace, CMatrix, DensityMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian_strategy(max_dim: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), n * n).prop_map(move |raw| {
            let a = CMatrix::from_fn(n, |i, j| Complex64::new(raw[i * n + j].0, raw[i * n + j].1));
            (&a + &a.adjoint()).scale(Complex64::new(0.5, 0.0))
        })
    })
}

/// Random mixed state as the partial trace of a random purification.
fn purified_state(n: usize, raw: &[(f64, f64)]) -> DensityMatrix {
    let k = raw.len() / n;
    let amp = |i: usize, a: usize| Complex64::new(raw[i * k + a].0, raw[i * k + a].1);
    let m = CMatrix::from_fn(n, |i, j| (0..k).map(|a| amp(i, a) * amp(j, a).conj()).sum());
    let tr = m.trace();
    DensityMatrix::new(m.scale(tr.inv())).unwrap()
}

proptest! {
    #[test]
    fn eigen_reconstruction(a in hermitian_strategy(9)) {
        let es = hermitian_eig(&a).unwrap();
        prop_assert!(es.reconstruct().max_abs_diff(&a) <= 1e-9);
        for w in es.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let n = a.dim();
        let gram = CMatrix::from_fn(n, |i, j| {
            (0..n).map(|r| es.vectors[(r, i)].conj() * es.vectors[(r, j)]).sum()
        });
        prop_assert!(gram.max_abs_diff(&CMatrix::identity(n)) <= 1e-10);
    }

    #[test]
    fn purified_spectra_are_probabilities(
        n in 1usize..=9,
        raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 81 * 3),
    ) {
        let rho = purified_state(n, &raw[..n * n * 3]);
        let es = rho.eig();
        let total: f64 = es.values.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        for l in es.values {
            prop_assert!((-1e-10..=1.0 + 1e-10).contains(&l));
        }
    }

    #[test]
    fn steady_state_annihilated(
        o1 in 0.5..6.0f64, o2 in 0.5..6.0f64, d1 in -6.0..6.0f64, d2 in -3.0..3.0f64, scheme_one in any::<bool>(),
    ) {
        let scheme = if scheme_one { Scheme::I } else { Scheme::II };
        let l = liouvillian(&SystemParams::scheme(scheme).with_rabi(o1, o2).with_detunings(d1, d2));
        let m = null_space_unit_trace(&l).unwrap();
        let r = l.matvec(m.as_slice());
        let res = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-8 * l.norm_inf());
    }
}
