mod common;

use std::f64::consts::PI;

use common::{max_abs_diff, naive_matmul, random_matrix, reference_array, reference_desired};
use fda_dm::channel::{ber_monte_carlo, qpsk_demodulate, qpsk_modulate, Scenario};
use fda_dm::fda::{carrier_frequency, element_phase, steering_vector, PolarPosition};
use fda_dm::linalg::ComplexMatrix;
use fda_dm::precoder::{draw_an, transmit_signal, AnDims, PrecoderMethod};
use fda_dm::rng::{complex_gaussian, rng_from_seed};
use num_complex::Complex64;
use rand::Rng;
use statrs::function::erf::erfc;

fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[test]
fn matmul_against_loops_3x5_by_5x2() {
    let mut rng = rng_from_seed(11);
    for _ in 0..100 {
        let a = random_matrix(&mut rng, 3, 5);
        let b = random_matrix(&mut rng, 5, 2);
        assert!(max_abs_diff(&a.matmul(&b).unwrap(), &naive_matmul(&a, &b)) < 1e-12);
    }
}

#[test]
fn carrier_plan_values() {
    let cfg = reference_array();
    assert_eq!(carrier_frequency(&cfg, 0, 0).unwrap(), 10e9);
    let f = carrier_frequency(&cfg, -3, 0).unwrap();
    assert!((f - (10e9 + 2000.0 * 4f64.ln())).abs() < 1e-6);
    assert!((f - 10e9 - 2_772.588_722_239_781).abs() < 1e-6);
    for n in -8..=8 {
        for l in 0..7 {
            assert_eq!(
                carrier_frequency(&cfg, n, l).unwrap(),
                carrier_frequency(&cfg, -n, l).unwrap()
            );
        }
    }
    assert!(carrier_frequency(&cfg, 9, 0).is_err());
    assert!(carrier_frequency(&cfg, 0, 7).is_err());
}

#[test]
fn phase_matches_scalar_formula() {
    let cfg = reference_array();
    let pos = PolarPosition::from_km_deg(150.0, 50.0).unwrap();
    let c = 2.997_924_58e8;
    let d = c / (2.0 * 10e9);
    let (r, th) = (150e3, 50f64.to_radians());
    let expected =
        2.0 * PI * (2e3 * (3.0f64 * 4.0).ln() * (0.0 - r / c) + 10e9 * 2.0 * d * th.sin() / c);
    let got = element_phase(&cfg, 2, 3, &pos).unwrap();
    assert!(
        (got - expected).abs() <= 1e-12 * expected.abs(),
        "{got} vs {expected}"
    );
}

#[test]
fn phase_degenerate_cases() {
    let pa = fda_dm::fda::ArrayConfig::new(4, 3, 10e9, 0.0).unwrap();
    let broadside = PolarPosition::from_km_deg(200.0, 0.0).unwrap();
    let tilted = PolarPosition::from_km_deg(200.0, 25.0).unwrap();
    for n in -4..=4 {
        for l in 0..3 {
            assert_eq!(element_phase(&pa, n, l, &broadside).unwrap(), 0.0);
            let want = PI * n as f64 * 25f64.to_radians().sin();
            assert!((element_phase(&pa, n, l, &tilted).unwrap() - want).abs() < 1e-12);
        }
    }
    let h = steering_vector(&pa, &broadside);
    let v = 1.0 / (27f64).sqrt();
    assert!(h
        .as_slice()
        .iter()
        .all(|z| (z - Complex64::new(v, 0.0)).norm() < 1e-15));
}

#[test]
fn steering_vector_matches_loop() {
    let cfg = reference_array();
    let pos = PolarPosition::from_km_deg(150.0, 50.0).unwrap();
    let h = steering_vector(&cfg, &pos);
    let scale = 1.0 / 119f64.sqrt();
    let mut idx = 0;
    for n in -8i64..=8 {
        for l in 0..7 {
            let want = Complex64::from_polar(scale, element_phase(&cfg, n, l, &pos).unwrap());
            assert!((h.as_slice()[idx] - want).norm() < 1e-15);
            idx += 1;
        }
    }
    assert_eq!(idx, 119);
}

#[test]
fn steering_norm_range_dependence() {
    let mut rng = rng_from_seed(3);
    for _ in 0..1000 {
        let cfg = fda_dm::fda::ArrayConfig::new(
            rng.random_range(1..=12),
            rng.random_range(1..=9),
            rng.random_range(1e9..30e9),
            rng.random_range(-5e3..5e3),
        )
        .unwrap()
        .with_t_obs(rng.random_range(0.0..1e-3))
        .unwrap();
        let pos =
            PolarPosition::from_km_deg(rng.random_range(1.0..500.0), rng.random_range(-89.0..89.0))
                .unwrap();
        assert!((steering_vector(&cfg, &pos).frobenius_norm() - 1.0).abs() < 1e-12);
    }
    let pa = fda_dm::fda::ArrayConfig::new(8, 7, 10e9, 0.0).unwrap();
    let near = PolarPosition::from_km_deg(120.0, 30.0).unwrap();
    let far = PolarPosition::from_km_deg(310.0, 30.0).unwrap();
    assert_eq!(steering_vector(&pa, &near), steering_vector(&pa, &far));
    let cfg = reference_array();
    let inner = steering_vector(&cfg, &near)
        .hermitian_matmul(&steering_vector(&cfg, &far))
        .unwrap();
    assert!(inner.as_slice()[0].norm() < 1.0 - 1e-6);
}

#[test]
fn transmit_power_matches_expectation() {
    let mut scn = Scenario::reference();
    scn.sigma_z2 = 1.0;
    let mut rng = rng_from_seed(5);
    for method in PrecoderMethod::ALL {
        let pre = scn.build_precoder(method, AnDims::Truncated).unwrap();
        let tr: f64 = pre.p1.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let expected = scn.beta1.powi(2) * scn.ps * tr + scn.beta2().powi(2) * scn.ps;
        let draws = 100_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let bits: Vec<bool> = (0..6).map(|_| rng.random()).collect();
            let x = ComplexMatrix::column_vector(qpsk_modulate(&bits).unwrap().symbols);
            let z = draw_an(&mut rng, pre.an_dim, scn.sigma_z2);
            let s = transmit_signal(&pre, &x, &z, scn.beta1, scn.ps).unwrap();
            total += s.frobenius_norm().powi(2);
        }
        let mean = total / draws as f64;
        assert!(
            (mean - expected).abs() < 0.02 * expected,
            "{method}: {mean} vs {expected}"
        );
    }
}

#[test]
fn an_draw_statistics() {
    let mut rng = rng_from_seed(9);
    let z = draw_an(&mut rng, 1_000_000, 2.5);
    let n = z.rows() as f64;
    let mean: Complex64 = z.as_slice().iter().sum::<Complex64>() / n;
    let var: f64 = z
        .as_slice()
        .iter()
        .map(|v| (v - mean).norm_sqr())
        .sum::<f64>()
        / (n - 1.0);
    assert!((var - 2.5).abs() < 0.01 * 2.5, "{var}");
    // each component has variance 1.25, so the mean's component sd is sqrt(1.25/n)
    let band = 3.0 * (1.25 / n).sqrt();
    assert!(mean.re.abs() < band && mean.im.abs() < band, "{mean}");
    assert_eq!(
        draw_an(&mut rng_from_seed(4), 8, 1.0),
        draw_an(&mut rng_from_seed(4), 8, 1.0)
    );
}

#[test]
fn qpsk_awgn_matches_q_function() {
    let mut rng = rng_from_seed(21);
    let gain = Complex64::new(0.9, 0.0);
    let symbols = 500_000;
    let mut errors = 0usize;
    for _ in 0..symbols {
        let bits = [rng.random::<bool>(), rng.random::<bool>()];
        let x = qpsk_modulate(&bits).unwrap().symbols[0];
        let y = gain * x + complex_gaussian(&mut rng, 0.1);
        let got = qpsk_demodulate(y, gain);
        errors += (got[0] != bits[0]) as usize + (got[1] != bits[1]) as usize;
    }
    let ber = errors as f64 / (2 * symbols) as f64;
    let oracle = q_function(8.1f64.sqrt());
    assert!((ber - oracle).abs() < 0.1 * oracle, "{ber} vs {oracle}");
}

#[test]
fn desired_ber_matches_q_function() {
    let scn = Scenario::reference();
    let oracle = q_function(8.1f64.sqrt());
    for method in PrecoderMethod::ALL {
        let pre = scn.build_precoder(method, AnDims::Truncated).unwrap();
        for (k, pos) in reference_desired().iter().enumerate() {
            let mut rng = rng_from_seed(100 + k as u64);
            let ber = ber_monte_carlo(&scn, &pre, pos, k, 100_000, &mut rng).unwrap();
            assert!(
                (ber - oracle).abs() < 0.15 * oracle,
                "{method} rx{k}: {ber} vs {oracle}"
            );
        }
    }
}
