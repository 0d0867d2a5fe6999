#![allow(dead_code)]

use fda_dm::fda::{ArrayConfig, PolarPosition};
use fda_dm::linalg::ComplexMatrix;
use num_complex::Complex64;
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Triple-loop product, independent of the library kernel.
pub fn naive_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols(), b.rows());
    let mut out = vec![Complex64::new(0.0, 0.0); a.rows() * b.cols()];
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..a.cols() {
                acc += a[(i, k)] * b[(k, j)];
            }
            out[i * b.cols() + j] = acc;
        }
    }
    ComplexMatrix::from_row_major(a.rows(), b.cols(), out).unwrap()
}

pub fn naive_adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)].conj())
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn reference_array() -> ArrayConfig {
    ArrayConfig::new(8, 7, 10e9, 2e3).unwrap()
}

pub fn reference_desired() -> Vec<PolarPosition> {
    vec![
        PolarPosition::from_km_deg(150.0, 50.0).unwrap(),
        PolarPosition::from_km_deg(180.0, -40.0).unwrap(),
        PolarPosition::from_km_deg(260.0, 0.0).unwrap(),
    ]
}

/// Random array with `N ∈ 2..=10`, `L ∈ 1..=7` and `K ∈ 1..=5` distinct
/// positions, keeping `K < 2N+1` so the default SVD basis is non-empty.
pub fn random_geometry<R: Rng>(rng: &mut R) -> (ArrayConfig, Vec<PolarPosition>) {
    let n = rng.random_range(2..=10usize);
    let l = rng.random_range(1..=7usize);
    let k = rng.random_range(1..=5usize).min(2 * n);
    let cfg = ArrayConfig::new(n, l, 10e9, 2e3).unwrap();
    let mut pos: Vec<PolarPosition> = Vec::with_capacity(k);
    while pos.len() < k {
        let p = PolarPosition::from_km_deg(
            rng.random_range(50.0..400.0),
            rng.random_range(-80.0..80.0),
        )
        .unwrap();
        if !pos.contains(&p) {
            pos.push(p);
        }
    }
    (cfg, pos)
}
