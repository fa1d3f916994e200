use ctqc::bounds::*;
use ctqc::channels::QuantumChannel;
use ctqc::entropy::shannon;
use ctqc::linalg::*;
use ctqc::lindblad::{depolarizing_liouvillian, Liouvillian};
use ctqc::pauli::Pauli;
use proptest::prelude::*;

fn lowering_generator() -> Liouvillian {
    Liouvillian::build(zeros(2, 2), vec![real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])]).unwrap()
}

#[test]
fn upper_bound_examples() {
    let mixed = DensityMatrix::maximally_mixed(2);
    let b = unitary_upper_bound_depolarizing(1.0, 2f64.ln(), &mixed).unwrap();
    assert!((b.value - 0.5).abs() < 1e-15);
    assert_eq!(
        unitary_upper_bound_depolarizing(3.0, 0.0, &DensityMatrix::maximally_mixed(5)).unwrap().value,
        5f64.log2()
    );
    assert!(unitary_upper_bound_depolarizing(1.0, 60.0, &mixed).unwrap().value < 1e-20);
    assert!((cd_upper_bound(2.0, 1.0, 4).unwrap().value - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    assert_eq!(cd_upper_bound(2.0, 0.0, 4).unwrap().value, 2.0);
    assert!(cd_upper_bound(-1.0, 1.0, 2).is_err());
    assert!(unitary_upper_bound_depolarizing(1.0, f64::NAN, &mixed).is_err());
}

proptest! {
    #[test]
    fn upper_bounds_agree_at_maximally_mixed(r in 0.0f64..5.0, t in 0.0f64..5.0, d in 2usize..6) {
        let a = unitary_upper_bound_depolarizing(r, t, &DensityMatrix::maximally_mixed(d)).unwrap().value;
        let b = cd_upper_bound(r, t, d).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn upper_bound_monotone(r in 0.01f64..5.0, t in 0.0f64..5.0, dt in 0.0f64..1.0, p in 0.5f64..1.0, dp in 0.0f64..0.5) {
        let rho = DensityMatrix::diagonal(&[p, 1.0 - p]).unwrap();
        let a = unitary_upper_bound_depolarizing(r, t, &rho).unwrap().value;
        prop_assert!(unitary_upper_bound_depolarizing(r, t + dt, &rho).unwrap().value <= a + 1e-12);
        // Lower entropy at the same time: the bound cannot drop.
        let q = (p + dp).min(1.0);
        let purer = DensityMatrix::diagonal(&[q, 1.0 - q]).unwrap();
        prop_assert!(unitary_upper_bound_depolarizing(r, t, &purer).unwrap().value >= a - 1e-12);
    }
}

#[test]
fn delta_k_against_choi_spectrum() {
    // Depolarizing onto I/2 at rate 1: the Choi matrix is q|ω⟩⟨ω| + (1−q)I/4 with q = e^{−s}.
    let l = depolarizing_liouvillian(1.0, &DensityMatrix::maximally_mixed(2)).unwrap();
    let q = (-0.01f64).exp();
    let spectrum = [q + (1.0 - q) / 4.0, (1.0 - q) / 4.0, (1.0 - q) / 4.0, (1.0 - q) / 4.0];
    let expected = shannon(&spectrum);
    let got = delta_k(&l, 1.0, 100).unwrap();
    assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    assert!(got > 0.0);

    let zero = Liouvillian::zero(3).unwrap();
    for k in [1, 5, 50] {
        assert!(delta_k(&zero, 2.0, k).unwrap().abs() < 1e-12);
    }
    let sweep: Vec<f64> = [1, 2, 4, 8, 16, 32, 64, 128, 256].iter().map(|&k| delta_k(&l, 1.0, k).unwrap()).collect();
    assert!(sweep.windows(2).all(|w| w[1] < w[0]), "{sweep:?}");
    assert!(delta_k(&l, 1.0, 0).is_err());
}

#[test]
fn coherent_information_of_choi_matrices() {
    let id = QuantumChannel::identity(2);
    assert!((choi_coherent_information(id.choi(), 2, 2).unwrap() - 1.0).abs() < 1e-12);
    let cd = QuantumChannel::completely_depolarizing(2);
    assert!((choi_coherent_information(cd.choi(), 2, 2).unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn lower_bound_examples() {
    let zero = Liouvillian::zero(2).unwrap();
    let b = lower_bound_fixed_point(&zero, 1.0, &DensityMatrix::basis(2, 0), 8, 1.0).unwrap();
    assert!((b.value - 1.0).abs() < 1e-12);

    let ad = lowering_generator();
    let b = lower_bound_fixed_point(&ad, 1.0, &DensityMatrix::basis(2, 0), 64, 1.0).unwrap();
    assert!(b.value > 0.0 && b.value <= 1.0, "{}", b.value);
    assert_eq!(b.scan.len(), 64);
    assert!(b.scan.iter().all(|&(_, v)| v <= b.value));

    assert!(lower_bound_fixed_point(&ad, 1.0, &DensityMatrix::basis(2, 1), 8, 1.0).is_err());
    let mixed = DensityMatrix::maximally_mixed(2);
    let cd = depolarizing_liouvillian(1.0, &mixed).unwrap();
    assert!(lower_bound_fixed_point(&cd, 1.0, &mixed, 8, 1.0).is_err());
}

#[test]
fn lower_bound_stays_below_upper_bound() {
    for p in [0.6, 0.8, 0.95] {
        let rho0 = DensityMatrix::diagonal(&[p, 1.0 - p]).unwrap();
        let l = depolarizing_liouvillian(1.0, &rho0).unwrap();
        for t in [0.25, 0.5, 1.0, 2.0] {
            let upper = unitary_upper_bound_depolarizing(1.0, t, &rho0).unwrap().value;
            for c in [0.5, 1.0, 2.0] {
                let lower = lower_bound_fixed_point(&l, t, &rho0, 32, c).unwrap().value;
                assert!(lower <= upper + 1e-12, "p = {p}, t = {t}, c = {c}: {lower} > {upper}");
                assert!(lower <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn ppt_thresholds() {
    let cd = depolarizing_liouvillian(1.0, &DensityMatrix::maximally_mixed(2)).unwrap();
    let p = ppt_time(&cd, 3.0).unwrap();
    assert!((p.t - 3f64.ln()).abs() <= 1e-6, "{}", p.t);
    assert!(p.min_eig_before < -1e-9 && p.min_eig_after > -1e-9);

    let dep = Liouvillian::from_channel(&QuantumChannel::pauli_depolarizing()).unwrap();
    let p = ppt_time(&dep, 3.0).unwrap();
    assert!((p.t - 0.75 * 3f64.ln()).abs() <= 1e-6, "{}", p.t);
    assert!(ppt_margin(&dep, 1.5).unwrap() >= 0.0);

    let unitary = Liouvillian::build(Pauli::Z.matrix(), vec![]).unwrap();
    assert!(ppt_time(&unitary, 5.0).is_err());
}

#[test]
fn reports_serialize() {
    let b = cd_upper_bound(1.0, 1.0, 2).unwrap();
    let text = serde_json::to_string(&b).unwrap();
    let back: BoundReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, b);
}
