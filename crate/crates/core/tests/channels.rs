use ctqc::channels::*;
use ctqc::linalg::*;
use ctqc::rng::{haar_isometry, haar_unitary, random_density};
use ctqc::Rng;
use proptest::prelude::*;

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    max_abs(&(a - b)) <= tol
}

fn random_channel(seed: u64, d_in: usize, d_out: usize, k: usize) -> QuantumChannel {
    QuantumChannel::random(d_in, d_out, k, &mut Rng::new(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn representations_round_trip(seed in any::<u64>(), d_in in 1usize..4, d_out in 1usize..4, k in 1usize..4) {
        prop_assume!(d_out * k >= d_in);
        let t = random_channel(seed, d_in, d_out, k);
        let from_choi = QuantumChannel::from_choi(t.choi(), d_in, d_out).unwrap();
        let from_superop = QuantumChannel::from_superop(t.superop(), d_in, d_out).unwrap();
        prop_assert!(close(from_choi.superop(), t.superop(), 1e-10));
        prop_assert!(close(from_superop.choi(), t.choi(), 1e-10));
        prop_assert!(close(&superop_to_choi(t.superop(), d_in, d_out).unwrap(), t.choi(), 1e-12));
        prop_assert!(close(&choi_to_superop(t.choi(), d_in, d_out).unwrap(), t.superop(), 1e-12));
    }

    #[test]
    fn outputs_are_states(seed in any::<u64>(), d_in in 1usize..4, d_out in 1usize..4, k in 1usize..4) {
        prop_assume!(d_out * k >= d_in);
        let t = random_channel(seed, d_in, d_out, k);
        let rho = random_density(d_in, &mut Rng::new(seed ^ 1));
        let out = t.apply(&rho).unwrap();
        prop_assert!((trace(out.matrix()).re - 1.0).abs() < 1e-12);
        prop_assert!(out.eigenvalues().unwrap().last().copied().unwrap() > -1e-12);
        let via_superop = unvectorize(&(t.superop() * vectorize(rho.matrix())), d_out, d_out);
        prop_assert!(close(&via_superop, out.matrix(), 1e-12));
    }

    #[test]
    fn stinespring_and_complement(seed in any::<u64>(), d_in in 1usize..4, d_out in 1usize..4, k in 1usize..4) {
        prop_assume!(d_out * k >= d_in);
        let t = random_channel(seed, d_in, d_out, k);
        let v = t.stinespring();
        prop_assert!(close(&(v.matrix().adjoint() * v.matrix()), &identity(d_in), 1e-12));
        let rho = random_density(d_in, &mut Rng::new(seed ^ 2));
        let joint = DensityMatrix::new(v.matrix() * rho.matrix() * v.matrix().adjoint()).unwrap();
        let b = joint.partial_trace(&[d_out, t.env_dim()], &[0]).unwrap();
        let e = joint.partial_trace(&[d_out, t.env_dim()], &[1]).unwrap();
        prop_assert!(close(b.matrix(), t.apply(&rho).unwrap().matrix(), 1e-12));
        prop_assert!(close(e.matrix(), t.complementary().apply(&rho).unwrap().matrix(), 1e-12));
        // Pure input: both outputs share a spectrum.
        let psi = DensityMatrix::basis(d_in, 0);
        let sb = t.apply(&psi).unwrap().eigenvalues().unwrap();
        let se = t.complementary().apply(&psi).unwrap().eigenvalues().unwrap();
        for i in 0..sb.len().min(se.len()) {
            prop_assert!((sb[i] - se[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn composition_and_tensor(seed in any::<u64>()) {
        let s = random_channel(seed, 2, 3, 2);
        let t = random_channel(seed ^ 3, 3, 2, 2);
        let u = random_channel(seed ^ 4, 2, 2, 3);
        let left = u.compose(&t).unwrap().compose(&s).unwrap();
        let right = u.compose(&t.compose(&s).unwrap()).unwrap();
        prop_assert!(close(left.superop(), right.superop(), 1e-12));
        let st = s.tensor(&u);
        prop_assert!(st.validate().is_ok());
        let a = random_density(2, &mut Rng::new(seed ^ 5));
        let b = random_density(2, &mut Rng::new(seed ^ 6));
        let out = st.apply(&a.tensor(&b)).unwrap();
        prop_assert!(close(out.matrix(), s.apply(&a).unwrap().tensor(&u.apply(&b).unwrap()).matrix(), 1e-12));
    }

    #[test]
    fn diamond_bounds_are_ordered(seed in any::<u64>()) {
        let s = random_channel(seed, 2, 2, 2);
        let t = random_channel(seed ^ 7, 2, 2, 3);
        let b = diamond_distance_bounds(&s, &t).unwrap();
        prop_assert!(0.0 <= b.lower && b.lower <= b.upper + 1e-12 && b.upper <= 2.0 * 2.0 + 1e-9);
        prop_assert!(diamond_distance_bounds(&s, &s).unwrap().upper < 1e-12);
    }

    #[test]
    fn isometry_extends_to_unitary(seed in any::<u64>(), d in 1usize..4, k in 1usize..4) {
        let v = Isometry::new(haar_isometry(d, d * k, &mut Rng::new(seed))).unwrap();
        let (u, phi) = isometry_to_unitary(&v).unwrap();
        prop_assert!(close(&(u.adjoint() * &u), &identity(d * k), 1e-10));
        prop_assert_eq!(phi.dim(), k);
        for j in 0..d {
            let input = PureState::basis(d, j).tensor(&phi);
            let diff = &u * input.amplitudes() - v.matrix().column(j);
            prop_assert!(diff.norm() < 1e-10);
        }
    }
}

#[test]
fn entanglement_fidelity_examples() {
    assert!((entanglement_fidelity(&QuantumChannel::identity(3)).unwrap() - 1.0).abs() < 1e-12);
    assert!((entanglement_fidelity(&QuantumChannel::completely_depolarizing(2)).unwrap() - 0.25).abs() < 1e-12);
    assert!(entanglement_fidelity(&QuantumChannel::pauli_depolarizing()).unwrap().abs() < 1e-12);
    let u = haar_unitary(2, &mut Rng::new(1));
    let f = entanglement_fidelity(&QuantumChannel::unitary(&u).unwrap()).unwrap();
    assert!((f - (trace(&u).norm_sqr() / 4.0)).abs() < 1e-12);
}

#[test]
fn ppt_examples() {
    assert!(!is_ppt_channel(&QuantumChannel::identity(2)).unwrap());
    assert!(is_ppt_channel(&QuantumChannel::completely_depolarizing(2)).unwrap());
    // The qubit depolarizing family turns PPT at λ = 1/3.
    assert!(is_ppt_channel(&QuantumChannel::qubit_depolarizing(1.0 / 3.0).unwrap()).unwrap());
    assert!(!is_ppt_channel(&QuantumChannel::qubit_depolarizing(0.34).unwrap()).unwrap());
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(QuantumChannel::random(3, 2, 1, &mut Rng::new(0)).is_err());
    let not_tp = vec![identity(2) * c64(0.9, 0.0)];
    assert!(QuantumChannel::from_kraus(not_tp).is_err());
    assert!(QuantumChannel::from_kraus(vec![]).is_err());
    let not_cp = diag(&[0.5, -0.1, 0.1, 0.5]);
    assert!(QuantumChannel::from_choi(&not_cp, 2, 2).is_err());
    assert!(QuantumChannel::qubit_depolarizing(-0.5).is_err());
    assert!(QuantumChannel::amplitude_damping(1.5).is_err());
    assert!(Isometry::new(real_matrix(2, 2, &[1.0, 1.0, 0.0, 0.0])).is_err());
}

#[test]
fn json_round_trip() {
    let t = random_channel(11, 2, 3, 2);
    let back = QuantumChannel::from_json(&t.to_json().unwrap()).unwrap();
    assert!(close(back.choi(), t.choi(), 1e-15));
    assert!(QuantumChannel::from_json("{\"kraus\": 3}").is_err());
}

#[test]
fn local_application_matches_embedding() {
    let t = random_channel(12, 2, 2, 3);
    let rho = random_density(8, &mut Rng::new(13));
    let direct = t.apply_local(&rho, &[2, 2, 2], 1).unwrap();
    let big = QuantumChannel::identity(2).tensor(&t).tensor(&QuantumChannel::identity(2));
    assert!(close(direct.matrix(), big.apply(&rho).unwrap().matrix(), 1e-12));
    let kraus = embedded_kraus(&t, 1, 3);
    let embedded = QuantumChannel::from_kraus(kraus).unwrap();
    assert!(close(embedded.superop(), big.superop(), 1e-12));
}
