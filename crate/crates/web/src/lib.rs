//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` of rows so the page can plot
//! it without parsing. The `*_rows` functions hold the logic and return
//! plain Rust errors, which keeps them testable off the browser.

use fda_dm::channel::ber_monte_carlo;
use fda_dm::complexity::memory_ratio_exact;
use fda_dm::experiments::{run_secrecy_sweep, Experiment, SecrecyOptions};
use fda_dm::fda::PolarPosition;
use fda_dm::precoder::{AnDims, PrecoderMethod};
use fda_dm::rng::derived_rng;
use wasm_bindgen::prelude::*;

/// Rows of `[angle_deg, ber_zf, ber_svd]` along the reference receiver
/// `receiver`'s range.
pub fn ber_angle_rows(
    receiver: usize,
    snr_db: f64,
    step_deg: f64,
    symbols: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let mut exp = Experiment::reference();
    exp.scenario.set_snr_db(snr_db);
    exp.scenario.validate().map_err(|e| e.to_string())?;
    let scn = &exp.scenario;
    let desired = scn
        .desired
        .get(receiver)
        .ok_or_else(|| format!("receiver must be below {}", scn.k()))?;
    if step_deg.is_nan() || step_deg <= 0.0 || symbols == 0 {
        return Err("step and symbol count must be positive".into());
    }
    let pres = PrecoderMethod::ALL
        .iter()
        .map(|&m| scn.build_precoder(m, AnDims::Truncated))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let count = (180.0 / step_deg).floor() as usize;
    for i in 1..=count {
        let angle = -90.0 + i as f64 * step_deg;
        if angle >= 90.0 {
            break;
        }
        let pos =
            PolarPosition::from_km_deg(desired.range_km(), angle).map_err(|e| e.to_string())?;
        out.push(angle);
        for pre in &pres {
            let mut rng = derived_rng(seed, receiver as u64, i as u64);
            let ber = ber_monte_carlo(scn, pre, &pos, receiver, symbols, &mut rng)
                .map_err(|e| e.to_string())?;
            out.push(ber);
        }
    }
    Ok(out)
}

/// Rows of `[n, zeta_percent]` for `n` in `from..=to`, skipping sizes where
/// the ratio is undefined.
pub fn memory_ratio_rows(
    from: usize,
    to: usize,
    n_carriers: usize,
    k: usize,
) -> Result<Vec<f64>, String> {
    if from == 0 || to < from {
        return Err("need 1 <= from <= to".into());
    }
    let mut out = Vec::new();
    for n in from..=to {
        if let Ok((num, den)) = memory_ratio_exact(n, n_carriers, k) {
            out.push(n as f64);
            out.push(100.0 * num as f64 / den as f64);
        }
    }
    if out.is_empty() {
        return Err(format!("no N in {from}..={to} admits K = {k}"));
    }
    Ok(out)
}

/// Rows of `[snr_db, secrecy_zf, secrecy_svd]` against `eves` random
/// eavesdroppers averaged over `trials` paired placements.
pub fn secrecy_rows(
    snr_max: f64,
    eves: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let mut exp = Experiment::reference();
    exp.scenario.seed = seed;
    let opts = SecrecyOptions {
        snr_max,
        eves: Some(eves),
        trials,
        ..SecrecyOptions::default()
    };
    let recs = run_secrecy_sweep(&exp, &opts).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for pair in recs
        .iter()
        .filter(|r| r.sweep_name == "secrecy")
        .collect::<Vec<_>>()
        .chunks(2)
    {
        out.extend([pair[0].coordinate, pair[0].value, pair[1].value]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn ber_vs_angle(
    receiver: usize,
    snr_db: f64,
    step_deg: f64,
    symbols: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    ber_angle_rows(receiver, snr_db, step_deg, symbols, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn memory_ratio_curve(
    from: usize,
    to: usize,
    n_carriers: usize,
    k: usize,
) -> Result<Vec<f64>, JsError> {
    memory_ratio_rows(from, to, n_carriers, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn secrecy_vs_snr(
    snr_max: f64,
    eves: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    secrecy_rows(snr_max, eves, trials, seed).map_err(|e| JsError::new(&e))
}
