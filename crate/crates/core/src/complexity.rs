//! Storage and run-time cost of the two orthogonal-matrix constructions.
//!
//! Storage is counted exactly from the matrix shapes. Run time is measured:
//! each size builds a random steering matrix, then times `P2` construction
//! for both methods and keeps the median.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fda::{steering_matrix, ArrayConfig, PolarPosition};
use crate::precoder::{orthogonal_matrix_svd, orthogonal_matrix_zf, PrecoderMethod};
use crate::rng::rng_from_seed;
use rand::Rng;

/// Bytes per stored complex double.
pub const BYTES_PER_ELEMENT: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MemoryFootprint {
    pub p2_elements: u64,
    pub z_elements: u64,
    pub bytes: u64,
}

impl MemoryFootprint {
    fn new(p2_elements: u64, z_elements: u64) -> Self {
        Self {
            p2_elements,
            z_elements,
            bytes: BYTES_PER_ELEMENT * (p2_elements + z_elements),
        }
    }

    pub fn total_elements(&self) -> u64 {
        self.p2_elements + self.z_elements
    }
}

fn check_dims(n_half: usize, n_carriers: usize, k: usize) -> Result<()> {
    if n_half == 0 || n_carriers == 0 || k == 0 {
        return Err(Error::Domain(format!(
            "N, L and K must be positive, got N={n_half}, L={n_carriers}, K={k}"
        )));
    }
    Ok(())
}

fn check_svd_domain(n_half: usize, k: usize) -> Result<()> {
    if k > 2 * n_half {
        return Err(Error::Domain(format!(
            "K={k} must be below 2N+1={} for the truncated SVD basis",
            2 * n_half + 1
        )));
    }
    Ok(())
}

/// Elements held by `P2` and `z` for one method.
pub fn footprint(
    method: PrecoderMethod,
    n_half: usize,
    n_carriers: usize,
    k: usize,
) -> Result<MemoryFootprint> {
    check_dims(n_half, n_carriers, k)?;
    let e = (2 * n_half + 1) as u64;
    let m = e * n_carriers as u64;
    if k as u64 >= m {
        return Err(Error::Domain(format!("K={k} must be below (2N+1)L={m}")));
    }
    match method {
        PrecoderMethod::Zf => Ok(MemoryFootprint::new(m * m, m)),
        PrecoderMethod::Svd => {
            check_svd_domain(n_half, k)?;
            let j = e - k as u64;
            Ok(MemoryFootprint::new(m * j, j))
        }
    }
}

/// SVD-to-ZF storage ratio as an exact fraction `(numerator, denominator)`.
pub fn memory_ratio_exact(n_half: usize, n_carriers: usize, k: usize) -> Result<(u64, u64)> {
    let svd = footprint(PrecoderMethod::Svd, n_half, n_carriers, k)?;
    let zf = footprint(PrecoderMethod::Zf, n_half, n_carriers, k)?;
    Ok((svd.total_elements(), zf.total_elements()))
}

/// `ζ = [(2N+1)L(2N+1−K) + (2N+1−K)] / [((2N+1)L)² + (2N+1)L]`.
pub fn memory_ratio(n_half: usize, n_carriers: usize, k: usize) -> Result<f64> {
    let (num, den) = memory_ratio_exact(n_half, n_carriers, k)?;
    Ok(num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BenchSize {
    pub n_half: usize,
    pub n_carriers: usize,
    pub k: usize,
}

impl BenchSize {
    pub fn m_dim(&self) -> usize {
        (2 * self.n_half + 1) * self.n_carriers
    }

    /// `2N + 1 − K`, the default SVD basis width.
    pub fn an_dims(&self) -> usize {
        (2 * self.n_half + 1).saturating_sub(self.k)
    }
}

/// Size ladder `M ∈ {63, 119, 255, 511, 1023}` at `K = 3`. The `M = 119`
/// rung is the reference array; the others use the smallest element count
/// above `K` that divides `M`.
pub fn default_ladder() -> Vec<BenchSize> {
    [(3, 9), (8, 7), (2, 51), (3, 73), (5, 93)]
        .into_iter()
        .map(|(n_half, n_carriers)| BenchSize {
            n_half,
            n_carriers,
            k: 3,
        })
        .collect()
}

/// Published reference size `N = 8`, `L = 7`, `K = 3`.
pub fn reference_size() -> BenchSize {
    BenchSize {
        n_half: 8,
        n_carriers: 7,
        k: 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingRecord {
    pub method: PrecoderMethod,
    pub m_dim: usize,
    pub k_dim: usize,
    pub reps: usize,
    pub median_seconds: f64,
}

const WARMUP: usize = 2;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Times `P2` construction for every size and method, sequentially on the
/// calling thread. Steering-matrix construction is outside the timed region.
pub fn bench_precoder(sizes: &[BenchSize], reps: usize, seed: u64) -> Result<Vec<TimingRecord>> {
    if reps < 5 {
        return Err(Error::Domain(format!(
            "benchmark needs at least 5 reps, got {reps}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(sizes.len() * 2);
    for size in sizes {
        let cfg = ArrayConfig::new(size.n_half, size.n_carriers, 10e9, 2e3)?;
        let positions = random_positions(&mut rng, size.k);
        let h = steering_matrix(&cfg, &positions)?;
        let j = size.an_dims();
        for method in PrecoderMethod::ALL {
            let mut samples = Vec::with_capacity(reps);
            for rep in 0..WARMUP + reps {
                let start = Instant::now();
                let p2 = match method {
                    PrecoderMethod::Zf => orthogonal_matrix_zf(&h)?,
                    PrecoderMethod::Svd => orthogonal_matrix_svd(&h, j)?,
                };
                let elapsed = start.elapsed().as_secs_f64();
                std::hint::black_box(&p2);
                drop(p2);
                if rep >= WARMUP {
                    samples.push(elapsed);
                }
            }
            out.push(TimingRecord {
                method,
                m_dim: size.m_dim(),
                k_dim: size.k,
                reps,
                median_seconds: median(samples),
            });
        }
    }
    Ok(out)
}

fn random_positions<R: Rng>(rng: &mut R, k: usize) -> Vec<PolarPosition> {
    let mut out: Vec<PolarPosition> = Vec::with_capacity(k);
    while out.len() < k {
        let r = rng.random_range(50.0..400.0);
        let a = rng.random_range(-80.0..80.0);
        let p = PolarPosition::from_km_deg(r, a).expect("sampled inside the valid region");
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Least-squares slope of `log(time)` against `log(M)` for one method.
/// Needs at least four sizes spanning a factor of eight or more in `M`, all
/// at the same `K`.
pub fn fit_scaling(records: &[TimingRecord], method: PrecoderMethod) -> Result<f64> {
    let pts: Vec<&TimingRecord> = records.iter().filter(|r| r.method == method).collect();
    if pts.len() < 4 {
        return Err(Error::Domain(format!(
            "scaling fit needs at least 4 sizes, got {}",
            pts.len()
        )));
    }
    if pts.iter().any(|r| r.k_dim != pts[0].k_dim) {
        return Err(Error::Domain("scaling fit needs a fixed K".into()));
    }
    let lo = pts.iter().map(|r| r.m_dim).min().unwrap_or(0) as f64;
    let hi = pts.iter().map(|r| r.m_dim).max().unwrap_or(0) as f64;
    if hi < 8.0 * lo {
        return Err(Error::Domain(format!(
            "scaling fit needs an 8x span in M, got {lo}..{hi}"
        )));
    }
    if pts
        .iter()
        .any(|r| r.median_seconds.is_nan() || r.median_seconds <= 0.0)
    {
        return Err(Error::Domain("scaling fit needs positive timings".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|r| (r.m_dim as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|r| r.median_seconds.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
