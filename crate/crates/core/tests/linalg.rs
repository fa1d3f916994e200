use ctqc::linalg::*;
use ctqc::rng::{haar_unitary, random_density, random_hermitian, random_pure_state};
use ctqc::Rng;
use proptest::prelude::*;

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    max_abs(&(a - b)) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..7) {
        let h = random_hermitian(d, &mut Rng::new(seed));
        let e = herm_eig(&h).unwrap();
        prop_assert!(close(&e.reconstruct(), &h, 1e-10));
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let u = &e.vectors;
        prop_assert!(close(&(u.adjoint() * u), &identity(d), 1e-10));
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = Rng::new(seed);
        let a = random_density(da, &mut rng);
        let b = random_density(db, &mut rng);
        let ab = a.tensor(&b);
        prop_assert!(close(&partial_trace(ab.matrix(), &[da, db], &[0]).unwrap(), a.matrix(), 1e-12));
        prop_assert!(close(&partial_trace(ab.matrix(), &[da, db], &[1]).unwrap(), b.matrix(), 1e-12));
        let swapped = permute_subsystems(ab.matrix(), &[da, db], &[1, 0]).unwrap();
        prop_assert!(close(&swapped, b.tensor(&a).matrix(), 1e-12));
    }

    #[test]
    fn norms_are_ordered(seed in any::<u64>(), d in 1usize..6) {
        let h = random_hermitian(d, &mut Rng::new(seed));
        let (t, f) = (trace_norm(&h), frobenius(&h));
        prop_assert!(f <= t + 1e-12);
        prop_assert!(t <= (d as f64).sqrt() * f + 1e-12);
    }

    #[test]
    fn exponential_of_anti_hermitian_is_unitary(seed in any::<u64>(), d in 1usize..6, t in 0.0f64..5.0) {
        let h = random_hermitian(d, &mut Rng::new(seed));
        let u = expm(&(h.clone() * c64(0.0, -t))).unwrap();
        prop_assert!(close(&(u.adjoint() * &u), &identity(d), 1e-10));
        let e = herm_eig(&h).unwrap();
        let spectral = &e.vectors * ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(d, e.values.iter().map(|l| c64(0.0, -t * l).exp()))) * e.vectors.adjoint();
        prop_assert!(close(&u, &spectral, 1e-9));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = Rng::new(seed);
        let a = random_density(d, &mut rng);
        let b = random_density(d, &mut rng);
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-9);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
        // Fuchs–van de Graaf, with F the root fidelity.
        let t = a.trace_distance(&b);
        prop_assert!(1.0 - f <= t + 1e-9 && t <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }
}

#[test]
fn exponential_known_cases() {
    let rot = real_matrix(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let e = expm(&(rot * c64(0.7, 0.0))).unwrap();
    let expected = real_matrix(2, 2, &[0.7f64.cos(), 0.7f64.sin(), -0.7f64.sin(), 0.7f64.cos()]);
    assert!(close(&e, &expected, 1e-14));

    let nil = real_matrix(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let expected = real_matrix(3, 3, &[1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
    assert!(close(&expm(&nil).unwrap(), &expected, 1e-14));

    assert!(close(&expm(&zeros(4, 4)).unwrap(), &identity(4), 0.0));
    assert!(expm(&(identity(2) * c64(1e5, 0.0))).is_err());
}

#[test]
fn scaled_exponential_handles_large_times() {
    // A decaying generator whose 1-norm at t = 1e4 exceeds the direct limit.
    let g = real_matrix(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
    let p = expm_scaled(&g, 1e4).unwrap();
    let half = real_matrix(2, 2, &[0.5, 0.5, 0.5, 0.5]);
    assert!(close(&p, &half, 1e-12));
}

#[test]
fn haar_moments() {
    // E|U_00|² = 1/d and E|U_00|⁴ = 2/(d(d+1)).
    let d = 3;
    let n = 20_000;
    let mut rng = Rng::new(99);
    let (mut m2, mut m4) = (0.0, 0.0);
    for _ in 0..n {
        let u = haar_unitary(d, &mut rng);
        let p = u[(0, 0)].norm_sqr();
        m2 += p;
        m4 += p * p;
    }
    let (m2, m4) = (m2 / n as f64, m4 / n as f64);
    assert!((m2 - 1.0 / 3.0).abs() < 0.01, "{m2}");
    assert!((m4 - 2.0 / 12.0).abs() < 0.01, "{m4}");
}

#[test]
fn seeded_streams_are_reproducible() {
    let a = haar_unitary(4, &mut Rng::new(5));
    let b = haar_unitary(4, &mut Rng::new(5));
    assert_eq!(a, b);
    let root = Rng::new(5);
    let s1 = random_pure_state(3, &mut root.substream(1));
    let s1_again = random_pure_state(3, &mut root.substream(1));
    let s2 = random_pure_state(3, &mut root.substream(2));
    assert_eq!(s1.amplitudes(), s1_again.amplitudes());
    assert_ne!(s1.amplitudes(), s2.amplitudes());
}

#[test]
fn density_matrix_validation() {
    assert!(DensityMatrix::new(diag(&[0.5, 0.6])).is_err());
    assert!(DensityMatrix::new(diag(&[1.2, -0.2])).is_err());
    assert!(DensityMatrix::new(real_matrix(2, 2, &[0.5, 0.5, 0.0, 0.5])).is_err());
    assert!(DensityMatrix::new(diag(&[0.25, 0.75])).is_ok());
    let omega = DensityMatrix::maximally_entangled(3);
    assert!((omega.eigenvalues().unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn partial_transpose_detects_entanglement() {
    let omega = DensityMatrix::maximally_entangled(2);
    let pt = partial_transpose(omega.matrix(), &[2, 2], &[1]).unwrap();
    assert!((min_eigenvalue(&pt).unwrap() + 0.5).abs() < 1e-12);
}
