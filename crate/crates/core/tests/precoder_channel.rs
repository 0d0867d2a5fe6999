mod common;

use common::{random_geometry, reference_desired};
use fda_dm::channel::{
    achievable_rate, ber_monte_carlo, receive, secrecy_from_rates, secrecy_rate, sinr, Scenario,
};
use fda_dm::fda::{steering_matrix, steering_vector, PolarPosition};
use fda_dm::linalg::ComplexMatrix;
use fda_dm::precoder::{
    draw_an, span_relation, transmit_signal, verify_criteria, AnDims, Precoder, PrecoderMethod,
};
use fda_dm::rng::rng_from_seed;
use fda_dm::Error;
use proptest::prelude::*;
use rand::Rng;

fn scenario_from_seed(seed: u64) -> Scenario {
    let mut rng = rng_from_seed(seed);
    let (array, desired) = random_geometry(&mut rng);
    Scenario {
        array,
        desired,
        eavesdroppers: Vec::new(),
        beta1: rng.random_range(0.3..1.0),
        ps: rng.random_range(0.5..2.0),
        sigma_wd2: 0.1,
        sigma_we2: 0.1,
        sigma_z2: rng.random_range(0.5..2.0),
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthogonality_criteria_hold(seed in any::<u64>()) {
        let scn = scenario_from_seed(seed);
        let h = scn.steering_matrix().unwrap();
        for method in PrecoderMethod::ALL {
            for dims in [AnDims::Truncated, AnDims::Full] {
                let pre = scn.build_precoder(method, dims).unwrap();
                let rep = verify_criteria(&h, &pre, 1e-9).unwrap();
                prop_assert!(rep.all_pass(), "{:?}", rep.results);
                let power = pre.alpha.powi(2) * scn.sigma_z2 * pre.p2.frobenius_norm().powi(2);
                prop_assert!((power - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zf_projector_structure(seed in any::<u64>()) {
        let scn = scenario_from_seed(seed);
        let pre = scn.build_precoder(PrecoderMethod::Zf, AnDims::Truncated).unwrap();
        let p2 = &pre.p2;
        let (m, k) = (scn.array.m_dim(), scn.k());
        prop_assert_eq!(p2.shape(), (m, m));
        prop_assert!(p2.sub(&p2.hermitian_transpose()).unwrap().frobenius_norm() < 1e-10);
        prop_assert!(p2.matmul(p2).unwrap().sub(p2).unwrap().frobenius_norm() < 1e-9);
        prop_assert!((p2.trace().re - (m - k) as f64).abs() < 1e-6);
    }

    #[test]
    fn svd_columns_inside_zf_nullspace(seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let scn = scenario_from_seed(seed);
        let zf = scn.build_precoder(PrecoderMethod::Zf, AnDims::Truncated).unwrap();
        let full = scn.array.m_dim() - scn.k();
        let j = ((full as f64 * frac) as usize).clamp(1, full);
        let svd = scn.build_precoder(PrecoderMethod::Svd, AnDims::Fixed(j)).unwrap();
        prop_assert_eq!(svd.an_dim, j);
        prop_assert!(span_relation(&zf, &svd, 1e-9).unwrap().pass);
    }

    #[test]
    fn full_basis_reproduces_projector(seed in any::<u64>()) {
        let scn = scenario_from_seed(seed);
        let zf = scn.build_precoder(PrecoderMethod::Zf, AnDims::Full).unwrap();
        let svd = scn.build_precoder(PrecoderMethod::Svd, AnDims::Full).unwrap();
        let proj = svd.p2.matmul(&svd.p2.hermitian_transpose()).unwrap();
        prop_assert!(zf.p2.sub(&proj).unwrap().frobenius_norm() < 1e-9);
    }

    #[test]
    fn desired_links_are_exact(seed in any::<u64>()) {
        let scn = scenario_from_seed(seed);
        let h = scn.steering_matrix().unwrap();
        let mut rng = rng_from_seed(seed ^ 1);
        let bits: Vec<bool> = (0..2 * scn.k()).map(|_| rng.random()).collect();
        let x = ComplexMatrix::column_vector(fda_dm::channel::qpsk_modulate(&bits).unwrap().symbols);
        let gain = scn.beta1 * scn.ps.sqrt();
        for method in PrecoderMethod::ALL {
            let pre = scn.build_precoder(method, AnDims::Truncated).unwrap();
            let z = draw_an(&mut rng, pre.an_dim, scn.sigma_z2);
            let s = transmit_signal(&pre, &x, &z, scn.beta1, scn.ps).unwrap();
            let y = receive(&h, &s, &ComplexMatrix::zeros(scn.k(), 1)).unwrap();
            for (got, sym) in y.as_slice().iter().zip(x.as_slice()) {
                prop_assert!((got - sym * gain).norm() < 1e-9);
            }
            let an_only = transmit_signal(&pre, &ComplexMatrix::zeros(scn.k(), 1), &z, scn.beta1, scn.ps).unwrap();
            prop_assert!(h.hermitian_matmul(&an_only).unwrap().frobenius_norm() < 1e-9);
            let want = scn.beta1.powi(2) * scn.ps / scn.sigma_wd2;
            for p in &scn.desired {
                let g = sinr(p, &pre, &scn, scn.sigma_wd2);
                prop_assert!((g - want).abs() <= 1e-9 * want);
            }
        }
    }

    #[test]
    fn secrecy_is_non_negative_and_falls_with_eve_rate(
        desired in prop::collection::vec(0.0f64..10.0, 1..5),
        eves in prop::collection::vec(0.0f64..10.0, 1..5),
        idx in any::<prop::sample::Index>(),
        bump in 0.0f64..5.0,
    ) {
        let s = secrecy_from_rates(&desired, &eves);
        prop_assert!(s >= 0.0);
        let mut worse = eves.clone();
        let i = idx.index(worse.len());
        worse[i] += bump;
        prop_assert!(secrecy_from_rates(&desired, &worse) <= s);
    }
}

#[test]
fn eavesdropper_sees_artificial_noise() {
    let scn = Scenario::reference();
    let eve = PolarPosition::from_km_deg(300.0, 20.0).unwrap();
    let he = steering_vector(&scn.array, &eve);
    let mut rng = rng_from_seed(2);
    for method in PrecoderMethod::ALL {
        let pre = scn.build_precoder(method, AnDims::Truncated).unwrap();
        assert!(he.hermitian_matmul(&pre.p2).unwrap().frobenius_norm() > 1e-6);
        let z = draw_an(&mut rng, pre.an_dim, 1.0);
        let s = transmit_signal(&pre, &ComplexMatrix::zeros(3, 1), &z, scn.beta1, scn.ps).unwrap();
        let y = receive(&he, &s, &ComplexMatrix::zeros(1, 1)).unwrap();
        assert!(y.as_slice()[0].norm() > 0.0);
    }
}

fn reference_with_eves() -> Scenario {
    let mut scn = Scenario::reference();
    scn.eavesdroppers = vec![
        PolarPosition::from_km_deg(320.0, 15.0).unwrap(),
        PolarPosition::from_km_deg(90.0, -70.0).unwrap(),
    ];
    scn
}

#[test]
fn secrecy_positive_and_rising_with_snr() {
    let mut scn = reference_with_eves();
    for method in PrecoderMethod::ALL {
        let pre = scn.build_precoder(method, AnDims::Truncated).unwrap();
        scn.set_snr_db(10.0);
        assert!(secrecy_rate(&scn, &pre).unwrap() > 0.0);
        let mut last = f64::NEG_INFINITY;
        for i in 0..20 {
            scn.set_snr_db(-5.0 + 2.5 * i as f64);
            let s = secrecy_rate(&scn, &pre).unwrap();
            assert!(s >= last, "{method} at step {i}: {s} < {last}");
            last = s;
        }
    }
}

#[test]
fn secrecy_clamps_at_zero() {
    let scn = Scenario::reference();
    let pre = scn
        .build_precoder(PrecoderMethod::Zf, AnDims::Truncated)
        .unwrap();
    let strong = achievable_rate(1e6);
    assert_eq!(secrecy_from_rates(&[achievable_rate(8.1)], &[strong]), 0.0);
    let s = secrecy_from_rates(&[achievable_rate(8.1)], &[achievable_rate(1.0)]);
    assert!((s - (9.1f64.log2() - 1.0)).abs() < 1e-12);
    assert!(matches!(
        secrecy_rate(&scn, &pre),
        Err(Error::MissingEavesdroppers)
    ));
}

#[test]
fn ber_bounded_and_falls_with_snr_at_desired() {
    let mut scn = Scenario::reference();
    let n = 20_000;
    for method in PrecoderMethod::ALL {
        let pre = scn.build_precoder(method, AnDims::Truncated).unwrap();
        for (k, pos) in reference_desired().iter().enumerate() {
            let mut prev: Option<f64> = None;
            for snr in [0.0, 5.0, 10.0, 15.0] {
                scn.set_snr_db(snr);
                let mut rng = rng_from_seed(7 * k as u64 + snr as u64);
                let b = ber_monte_carlo(&scn, &pre, pos, k, n, &mut rng).unwrap();
                assert!((0.0..=1.0).contains(&b));
                if let Some(p) = prev {
                    let sd = (p * (1.0 - p) / (2 * n) as f64).sqrt();
                    assert!(
                        b <= p + 2.0 * sd,
                        "{method} rx{k} at {snr} dB: {b} after {p}"
                    );
                }
                prev = Some(b);
            }
        }
    }
}

#[test]
fn noiseless_desired_ber_is_zero() {
    let mut scn = Scenario::reference();
    scn.sigma_wd2 = 0.0;
    let pre = scn
        .build_precoder(PrecoderMethod::Svd, AnDims::Truncated)
        .unwrap();
    let mut rng = rng_from_seed(1);
    for (k, pos) in reference_desired().iter().enumerate() {
        assert_eq!(
            ber_monte_carlo(&scn, &pre, pos, k, 5_000, &mut rng).unwrap(),
            0.0
        );
    }
}

#[test]
fn near_colinear_positions_are_rejected() {
    let cfg = common::reference_array();
    let a = PolarPosition::from_km_deg(200.0, 10.0).unwrap();
    let b = PolarPosition::new(200e3, 10f64.to_radians() + 1e-9).unwrap();
    let h = steering_matrix(&cfg, &[a, b]).unwrap();
    match Precoder::build(PrecoderMethod::Zf, &h, 15, 1.0) {
        Err(Error::IllConditioned { condition_number }) => assert!(condition_number > 1e7),
        other => panic!("expected ill-conditioning, got {other:?}"),
    }
}
