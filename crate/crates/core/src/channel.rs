//! Line-of-sight reception, SINR, secrecy rate and Monte Carlo BER.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fda::{steering_entries, steering_matrix, ArrayConfig, PolarPosition};
use crate::linalg::ComplexMatrix;
use crate::precoder::{beta2, AnDims, Precoder, PrecoderMethod};
use crate::rng::complex_gaussian;

/// Transmitter, receivers and power/noise budget of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub array: ArrayConfig,
    pub desired: Vec<PolarPosition>,
    pub eavesdroppers: Vec<PolarPosition>,
    /// Power share of the useful signal; `β₂ = sqrt(1 − β₁²)`.
    pub beta1: f64,
    /// Total transmit power `Ps`.
    pub ps: f64,
    pub sigma_wd2: f64,
    pub sigma_we2: f64,
    pub sigma_z2: f64,
    pub seed: u64,
}

impl Scenario {
    /// Reference geometry: `f0 = 10 GHz`, `Δf = 2 kHz`, `N = 8`,
    /// `L = 7`, three desired receivers, `β₁ = 0.9`, `Ps = 1`, 10 dB SNR.
    pub fn reference() -> Self {
        let p = |r, a| PolarPosition::from_km_deg(r, a).expect("valid reference position");
        Self {
            array: ArrayConfig::new(8, 7, 10e9, 2e3).expect("valid reference array"),
            desired: vec![p(150.0, 50.0), p(180.0, -40.0), p(260.0, 0.0)],
            eavesdroppers: Vec::new(),
            beta1: 0.9,
            ps: 1.0,
            sigma_wd2: 0.1,
            sigma_we2: 0.1,
            sigma_z2: 1.0,
            seed: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.desired.len()
    }

    pub fn beta2(&self) -> f64 {
        beta2(self.beta1)
    }

    /// Sets both receiver noise variances to `Ps / 10^(snr_db/10)`.
    pub fn set_snr_db(&mut self, snr_db: f64) {
        let sigma2 = self.ps / 10f64.powf(snr_db / 10.0);
        self.sigma_wd2 = sigma2;
        self.sigma_we2 = sigma2;
    }

    pub fn validate(&self) -> Result<()> {
        self.array
            .validate()
            .map_err(|e| Error::scenario("array", e.to_string()))?;
        let k = self.k();
        let m = self.array.m_dim();
        if k == 0 {
            return Err(Error::scenario(
                "desired",
                "at least one desired receiver is required",
            ));
        }
        if k >= m {
            return Err(Error::scenario(
                "desired",
                format!("{k} receivers need K < (2N+1)L = {m}"),
            ));
        }
        for (i, a) in self.desired.iter().enumerate() {
            if let Some(j) = self.desired[i + 1..].iter().position(|b| b == a) {
                return Err(Error::scenario(
                    "desired",
                    format!("entries {i} and {} are the same position {a}", i + 1 + j),
                ));
            }
        }
        for (u, e) in self.eavesdroppers.iter().enumerate() {
            if self.desired.contains(e) {
                return Err(Error::scenario(
                    "eavesdroppers",
                    format!("entry {u} coincides with a desired receiver at {e}"),
                ));
            }
        }
        if !(self.beta1 > 0.0 && self.beta1 <= 1.0) {
            return Err(Error::scenario(
                "power.beta1",
                format!("must lie in (0, 1], got {}", self.beta1),
            ));
        }
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::scenario(key, format!("must be positive, got {v}")))
            }
        };
        positive("power.ps", self.ps)?;
        positive("noise.sigma_wd2", self.sigma_wd2)?;
        positive("noise.sigma_we2", self.sigma_we2)?;
        positive("an.sigma_z2", self.sigma_z2)?;
        Ok(())
    }

    pub fn steering_matrix(&self) -> Result<ComplexMatrix> {
        steering_matrix(&self.array, &self.desired)
    }

    pub fn build_precoder(&self, method: PrecoderMethod, an_dims: AnDims) -> Result<Precoder> {
        let h = self.steering_matrix()?;
        let j = an_dims.resolve(&self.array, self.k())?;
        Precoder::build(method, &h, j, self.sigma_z2)
    }
}

/// `(h or H)ᴴ·s + noise`.
pub fn receive(
    h_or_mat: &ComplexMatrix,
    s: &ComplexMatrix,
    noise: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let clean = h_or_mat.hermitian_matmul(s)?;
    Ok(clean.add(noise)?)
}

/// Effective gains `hᴴ·P1` and `hᴴ·P2` seen at one position.
#[derive(Debug, Clone)]
pub struct LinkGains {
    pub signal: Vec<Complex64>,
    pub noise: Vec<Complex64>,
}

impl LinkGains {
    pub fn at(cfg: &ArrayConfig, pre: &Precoder, pos: &PolarPosition) -> Self {
        let h = steering_entries(cfg, pos);
        Self {
            signal: row_times(&h, &pre.p1),
            noise: row_times(&h, &pre.p2),
        }
    }

    fn signal_power(&self) -> f64 {
        self.signal.iter().map(|g| g.norm_sqr()).sum()
    }

    fn noise_power(&self) -> f64 {
        self.noise.iter().map(|g| g.norm_sqr()).sum()
    }
}

/// `hᴴ·P` as a row.
fn row_times(h: &[Complex64], p: &ComplexMatrix) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.cols()];
    for (i, hi) in h.iter().enumerate() {
        let hc = hi.conj();
        for (o, v) in out.iter_mut().zip(p.row(i)) {
            *o += hc * v;
        }
    }
    out
}

/// SINR at `pos` with receiver noise variance `noise_var`.
pub fn sinr(pos: &PolarPosition, pre: &Precoder, scn: &Scenario, noise_var: f64) -> f64 {
    let gains = LinkGains::at(&scn.array, pre, pos);
    sinr_from_gains(&gains, pre, scn, noise_var)
}

pub(crate) fn sinr_from_gains(
    gains: &LinkGains,
    pre: &Precoder,
    scn: &Scenario,
    noise_var: f64,
) -> f64 {
    let signal = scn.beta1.powi(2) * scn.ps * gains.signal_power();
    let an = (pre.alpha * scn.beta2()).powi(2) * scn.ps * gains.noise_power();
    signal / (noise_var + an)
}

/// `log₂(1 + SINR)` in bits/s/Hz.
pub fn achievable_rate(sinr_value: f64) -> f64 {
    (1.0 + sinr_value).log2()
}

/// `max_k [min_u (R_k − R_u)]⁺` over the scenario's eavesdroppers.
pub fn secrecy_rate(scn: &Scenario, pre: &Precoder) -> Result<f64> {
    secrecy_rate_against(scn, pre, &scn.eavesdroppers)
}

/// Same as [`secrecy_rate`] with an explicit eavesdropper list.
pub fn secrecy_rate_against(
    scn: &Scenario,
    pre: &Precoder,
    eavesdroppers: &[PolarPosition],
) -> Result<f64> {
    if eavesdroppers.is_empty() {
        return Err(Error::MissingEavesdroppers);
    }
    let desired: Vec<f64> = scn
        .desired
        .iter()
        .map(|p| achievable_rate(sinr(p, pre, scn, scn.sigma_wd2)))
        .collect();
    let eves: Vec<f64> = eavesdroppers
        .iter()
        .map(|p| achievable_rate(sinr(p, pre, scn, scn.sigma_we2)))
        .collect();
    Ok(secrecy_from_rates(&desired, &eves))
}

/// `max_k [min_u (desired_k − eve_u)]⁺`.
pub fn secrecy_from_rates(desired: &[f64], eves: &[f64]) -> f64 {
    let worst_eve = eves.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = desired
        .iter()
        .map(|r| r - worst_eve)
        .fold(f64::NEG_INFINITY, f64::max);
    best.max(0.0)
}

/// Bits and their Gray-coded π/4-QPSK symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub bits: Vec<bool>,
    pub symbols: Vec<Complex64>,
}

/// Maps a bit pair to its unit-energy constellation point:
/// `00 → π/4`, `01 → 3π/4`, `11 → 5π/4`, `10 → 7π/4`.
#[inline]
pub fn qpsk_symbol(b0: bool, b1: bool) -> Complex64 {
    let re = if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if b0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

pub fn qpsk_modulate(bits: &[bool]) -> Result<SymbolFrame> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::Framing(bits.len()));
    }
    let symbols = bits
        .chunks_exact(2)
        .map(|p| qpsk_symbol(p[0], p[1]))
        .collect();
    Ok(SymbolFrame {
        bits: bits.to_vec(),
        symbols,
    })
}

/// Minimum-distance decision after dividing out `reference_gain`.
#[inline]
pub fn qpsk_demodulate(received: Complex64, reference_gain: Complex64) -> [bool; 2] {
    let z = received / reference_gain;
    [z.im < 0.0, z.re < 0.0]
}

/// Bit error rate of stream `target_index` observed at `eval_pos`.
///
/// Each symbol interval draws fresh QPSK symbols for all `K` streams and
/// fresh artificial noise. The receiver only sees the noise through
/// `hᴴ·P2·z`, which is drawn directly as `CN(0, σz²·‖hᴴP2‖²)`, the exact
/// law of that projection. The receiver noise variance is `σ_wd²`
/// when `eval_pos` is one of the desired positions and `σ_we²` otherwise;
/// detection is coherent against `β₁·√Ps`.
pub fn ber_monte_carlo<R: Rng + ?Sized>(
    scn: &Scenario,
    pre: &Precoder,
    eval_pos: &PolarPosition,
    target_index: usize,
    n_symbols: usize,
    rng: &mut R,
) -> Result<f64> {
    let k = pre.p1.cols();
    if target_index >= k {
        return Err(Error::Index {
            what: "target stream",
            index: target_index as i64,
            bound: format!("[0, {}]", k - 1),
        });
    }
    if n_symbols == 0 {
        return Err(Error::Domain("BER needs at least one symbol".into()));
    }
    let gains = LinkGains::at(&scn.array, pre, eval_pos);
    let noise_var = if scn.desired.contains(eval_pos) {
        scn.sigma_wd2
    } else {
        scn.sigma_we2
    };
    let root = scn.ps.sqrt();
    let signal_gain = scn.beta1 * root;
    let an_gain = pre.alpha * scn.beta2() * root;
    let reference = Complex64::new(signal_gain, 0.0);
    let an_var = scn.sigma_z2 * gains.noise_power();

    let mut errors = 0usize;
    let mut target_bits = [false; 2];
    for _ in 0..n_symbols {
        let mut y = Complex64::new(0.0, 0.0);
        for (stream, g) in gains.signal.iter().enumerate() {
            let pair: u8 = rng.random();
            let bits = [pair & 1 == 1, pair & 2 == 2];
            if stream == target_index {
                target_bits = bits;
            }
            y += g * qpsk_symbol(bits[0], bits[1]);
        }
        y *= signal_gain;

        if an_var > 0.0 {
            y += complex_gaussian(rng, an_var) * an_gain;
        }
        if noise_var > 0.0 {
            y += complex_gaussian(rng, noise_var);
        }

        let decided = qpsk_demodulate(y, reference);
        errors += (decided[0] != target_bits[0]) as usize + (decided[1] != target_bits[1]) as usize;
    }
    Ok(errors as f64 / (2 * n_symbols) as f64)
}
