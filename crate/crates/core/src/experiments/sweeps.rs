use crate::channel::{
    achievable_rate, ber_monte_carlo, secrecy_from_rates, sinr_from_gains, LinkGains,
};
use crate::complexity::{bench_precoder, fit_scaling, footprint, memory_ratio_exact, BenchSize};
use crate::error::{Error, Result};
use crate::fda::PolarPosition;
use crate::precoder::{
    invariant_battery, span_relation, verify_criteria, CriterionResult, Precoder, PrecoderMethod,
};
use crate::rng::{derive_seed, derived_rng, rng_from_seed};

use super::records::SweepRecord;
use super::scenario_file::Experiment;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const STREAM_SECRECY: u64 = 2;
const STREAM_BER: u64 = 3;
const STREAM_BENCH: u64 = 4;

/// Secrecy level whose SNR crossing is reported, in bits/s/Hz.
pub const SECRECY_LEVEL_BITS: f64 = 8.0;

fn build_all(exp: &Experiment) -> Result<Vec<Precoder>> {
    exp.methods
        .methods()
        .into_iter()
        .map(|m| exp.scenario.build_precoder(m, exp.an_dims))
        .collect()
}

/// `start, start + step, ...` up to `stop` inclusive, computed by
/// multiplication so the points do not drift.
fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor();
    (0..=n as usize).map(|i| start + i as f64 * step).collect()
}

fn check_step(name: &str, step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive, got {step}"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub tol: f64,
    pub results: Vec<CriterionResult>,
    pub records: Vec<SweepRecord>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

/// Builds every selected precoder and checks the orthogonality criteria and
/// structural invariants. With both methods selected the SVD basis is also
/// checked against the ZF projector.
pub fn run_validate(exp: &Experiment, tol: f64) -> Result<ValidationReport> {
    let scn = &exp.scenario;
    let h = scn.steering_matrix()?;
    let pres = build_all(exp)?;
    let mut results = Vec::new();
    for pre in &pres {
        results.extend(verify_criteria(&h, pre, tol)?.results);
        results.extend(invariant_battery(pre, scn.sigma_z2, tol)?);
    }
    if let [zf, svd] = pres.as_slice() {
        results.push(span_relation(zf, svd, tol)?);
    }
    let records = results
        .iter()
        .map(|r| {
            SweepRecord::new(
                "validate",
                0.0,
                r.method.as_str(),
                r.name,
                r.residual,
                1,
                scn.seed,
            )
        })
        .collect();
    Ok(ValidationReport {
        tol,
        results,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyOptions {
    pub snr_min: f64,
    pub snr_max: f64,
    pub snr_step: f64,
    /// Eavesdroppers per random placement. `None` uses the scenario's
    /// random block, or its fixed list if it has none.
    pub eves: Option<usize>,
    pub trials: usize,
}

impl Default for SecrecyOptions {
    fn default() -> Self {
        Self {
            snr_min: 0.0,
            snr_max: 20.0,
            snr_step: 1.0,
            eves: None,
            trials: 200,
        }
    }
}

/// First `x` at which the piecewise-linear curve through `points` reaches
/// `level`, or `None` if it never does.
pub fn level_crossing(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let first = points.first()?;
    if first.1 >= level {
        return Some(first.0);
    }
    points.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        (y0 < level && y1 >= level).then(|| x0 + (level - y0) / (y1 - y0) * (x1 - x0))
    })
}

/// Mean secrecy rate against random eavesdropper placements over an SNR
/// grid. Trial `t` uses the same placement for every SNR and method.
///
/// Emits `secrecy_rate_bits` per SNR and method, then the SNR at which each
/// method's mean curve reaches [`SECRECY_LEVEL_BITS`] when it does.
pub fn run_secrecy_sweep(exp: &Experiment, opts: &SecrecyOptions) -> Result<Vec<SweepRecord>> {
    check_step("snr step", opts.snr_step)?;
    if !(opts.snr_min.is_finite() && opts.snr_max >= opts.snr_min) {
        return Err(Error::Domain(format!(
            "SNR range [{}, {}] is empty",
            opts.snr_min, opts.snr_max
        )));
    }
    let mut scn = exp.scenario.clone();
    let seed = scn.seed;

    let count = opts.eves.or(exp.random_eves);
    let placements: Vec<Vec<PolarPosition>> = match count {
        Some(u) => {
            if u == 0 || opts.trials == 0 {
                return Err(Error::Domain(
                    "secrecy sweep needs at least one eavesdropper and one trial".into(),
                ));
            }
            (0..opts.trials)
                .map(|t| {
                    let mut rng = derived_rng(seed, STREAM_SECRECY, t as u64);
                    exp.eve_region.sample_many(&mut rng, &scn.desired, u)
                })
                .collect::<Result<_>>()?
        }
        None if scn.eavesdroppers.is_empty() => return Err(Error::MissingEavesdroppers),
        None => vec![scn.eavesdroppers.clone()],
    };
    let trials = placements.len();

    let pres = build_all(exp)?;
    let gains: Vec<(Vec<LinkGains>, Vec<Vec<LinkGains>>)> = pres
        .iter()
        .map(|pre| {
            let d = scn
                .desired
                .iter()
                .map(|p| LinkGains::at(&scn.array, pre, p))
                .collect();
            let e = placements
                .iter()
                .map(|set| {
                    set.iter()
                        .map(|p| LinkGains::at(&scn.array, pre, p))
                        .collect()
                })
                .collect();
            (d, e)
        })
        .collect();

    let snrs = grid(opts.snr_min, opts.snr_max, opts.snr_step);
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::with_capacity(snrs.len()); pres.len()];
    let mut out = Vec::new();
    for &snr in &snrs {
        scn.set_snr_db(snr);
        for (mi, pre) in pres.iter().enumerate() {
            let (desired, eves) = &gains[mi];
            let rd: Vec<f64> = desired
                .iter()
                .map(|g| achievable_rate(sinr_from_gains(g, pre, &scn, scn.sigma_wd2)))
                .collect();
            let total: f64 = eves
                .iter()
                .map(|set| {
                    let re: Vec<f64> = set
                        .iter()
                        .map(|g| achievable_rate(sinr_from_gains(g, pre, &scn, scn.sigma_we2)))
                        .collect();
                    secrecy_from_rates(&rd, &re)
                })
                .sum();
            let mean = total / trials as f64;
            curves[mi].push((snr, mean));
            out.push(SweepRecord::new(
                "secrecy",
                snr,
                pre.method.as_str(),
                "secrecy_rate_bits",
                mean,
                trials as u64,
                seed,
            ));
        }
    }
    for (pre, curve) in pres.iter().zip(&curves) {
        if let Some(x) = level_crossing(curve, SECRECY_LEVEL_BITS) {
            out.push(SweepRecord::new(
                "secrecy_level",
                SECRECY_LEVEL_BITS,
                pre.method.as_str(),
                "snr_db_at_level",
                x,
                trials as u64,
                seed,
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerMode {
    Angle,
    Range,
    Grid,
}

impl std::str::FromStr for BerMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "angle" => Ok(BerMode::Angle),
            "range" => Ok(BerMode::Range),
            "grid" => Ok(BerMode::Grid),
            other => Err(format!(
                "unknown BER mode '{other}', expected angle, range or grid"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerOptions {
    pub angle_step_deg: f64,
    pub range_step_km: f64,
    pub range_km: (f64, f64),
    pub symbols: usize,
}

impl Default for BerOptions {
    fn default() -> Self {
        Self {
            angle_step_deg: 0.5,
            range_step_km: 1.0,
            range_km: (50.0, 400.0),
            symbols: 10_000,
        }
    }
}

impl BerOptions {
    /// Coarser defaults for the 2-D map.
    pub fn grid_default() -> Self {
        Self {
            angle_step_deg: 2.0,
            range_step_km: 10.0,
            ..Self::default()
        }
    }
}

struct BerPoint {
    sweep: String,
    coordinate: f64,
    metric: String,
    pos: PolarPosition,
    target: usize,
}

/// Angles strictly inside (-90°, 90°).
fn open_angles(step: f64) -> Vec<f64> {
    grid(-90.0, 90.0, step)
        .into_iter()
        .filter(|a| a.abs() < 90.0)
        .collect()
}

fn ber_points(exp: &Experiment, mode: BerMode, opts: &BerOptions) -> Result<Vec<BerPoint>> {
    let scn = &exp.scenario;
    let mut pts = Vec::new();
    let ranges = grid(opts.range_km.0, opts.range_km.1, opts.range_step_km);
    let angles = open_angles(opts.angle_step_deg);
    match mode {
        BerMode::Angle => {
            for (k, d) in scn.desired.iter().enumerate() {
                for &a in &angles {
                    pts.push(BerPoint {
                        sweep: format!("ber_angle_rx{k}"),
                        coordinate: a,
                        metric: "ber".into(),
                        pos: PolarPosition::from_km_deg(d.range_km(), a)?,
                        target: k,
                    });
                }
            }
        }
        BerMode::Range => {
            for (k, d) in scn.desired.iter().enumerate() {
                for &r in &ranges {
                    pts.push(BerPoint {
                        sweep: format!("ber_range_rx{k}"),
                        coordinate: r,
                        metric: "ber".into(),
                        pos: PolarPosition::from_km_deg(r, d.angle_deg())?,
                        target: k,
                    });
                }
            }
        }
        BerMode::Grid => {
            for &r in &ranges {
                for &a in &angles {
                    for k in 0..scn.k() {
                        pts.push(BerPoint {
                            sweep: format!("ber_grid_r{r}km"),
                            coordinate: a,
                            metric: format!("ber_rx{k}"),
                            pos: PolarPosition::from_km_deg(r, a)?,
                            target: k,
                        });
                    }
                }
            }
        }
    }
    Ok(pts)
}

/// Monte Carlo BER along slices through the desired receivers, or over a
/// range-angle grid. Point `i` draws from a generator seeded by
/// `(scenario seed, i)`, shared by both methods, so the output does not
/// depend on evaluation order.
pub fn run_ber_sweep(
    exp: &Experiment,
    mode: BerMode,
    opts: &BerOptions,
) -> Result<Vec<SweepRecord>> {
    check_step("angle step", opts.angle_step_deg)?;
    check_step("range step", opts.range_step_km)?;
    if opts.symbols == 0 {
        return Err(Error::Domain("BER needs at least one symbol".into()));
    }
    let scn = &exp.scenario;
    let pres = build_all(exp)?;
    let pts = ber_points(exp, mode, opts)?;
    let eval = |(i, p): (usize, &BerPoint)| -> Result<Vec<f64>> {
        let point_seed = derive_seed(scn.seed, STREAM_BER, i as u64);
        pres.iter()
            .map(|pre| {
                let mut rng = rng_from_seed(point_seed);
                ber_monte_carlo(scn, pre, &p.pos, p.target, opts.symbols, &mut rng)
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let bers: Vec<Vec<f64>> = pts
        .par_iter()
        .enumerate()
        .map(eval)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let bers: Vec<Vec<f64>> = pts.iter().enumerate().map(eval).collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(pts.len() * pres.len());
    for (p, vals) in pts.iter().zip(bers) {
        for (pre, v) in pres.iter().zip(vals) {
            out.push(SweepRecord::new(
                p.sweep.clone(),
                p.coordinate,
                pre.method.as_str(),
                p.metric.clone(),
                v,
                opts.symbols as u64,
                scn.seed,
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemVary {
    N,
    L,
    K,
}

impl std::str::FromStr for MemVary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "n" => Ok(MemVary::N),
            "l" => Ok(MemVary::L),
            "k" => Ok(MemVary::K),
            other => Err(format!("unknown dimension '{other}', expected n, l or k")),
        }
    }
}

/// Storage of both methods and their ratio while one of `N`, `L`, `K`
/// varies over `from..=to`; the other two come from the scenario. Points
/// outside the ratio's domain are skipped.
pub fn run_memratio_sweep(
    exp: &Experiment,
    vary: MemVary,
    from: usize,
    to: usize,
) -> Result<Vec<SweepRecord>> {
    if from == 0 || to < from {
        return Err(Error::Domain(format!(
            "sweep range {from}..={to} is empty or starts at zero"
        )));
    }
    let base = (
        exp.scenario.array.n_half,
        exp.scenario.array.n_carriers,
        exp.scenario.k(),
    );
    let seed = exp.scenario.seed;
    let name = match vary {
        MemVary::N => "memratio_n",
        MemVary::L => "memratio_l",
        MemVary::K => "memratio_k",
    };
    let mut out = Vec::new();
    for v in from..=to {
        let (n, l, k) = match vary {
            MemVary::N => (v, base.1, base.2),
            MemVary::L => (base.0, v, base.2),
            MemVary::K => (base.0, base.1, v),
        };
        let Ok((num, den)) = memory_ratio_exact(n, l, k) else {
            continue;
        };
        let zf = footprint(PrecoderMethod::Zf, n, l, k)?;
        let svd = footprint(PrecoderMethod::Svd, n, l, k)?;
        let c = v as f64;
        out.push(SweepRecord::new(
            name,
            c,
            "zf",
            "p2z_elements_zf",
            zf.total_elements() as f64,
            1,
            seed,
        ));
        out.push(SweepRecord::new(
            name,
            c,
            "svd",
            "p2z_elements_svd",
            svd.total_elements() as f64,
            1,
            seed,
        ));
        out.push(SweepRecord::new(
            name,
            c,
            "svd_over_zf",
            "zeta_percent",
            100.0 * num as f64 / den as f64,
            1,
            seed,
        ));
    }
    if out.is_empty() {
        return Err(Error::Domain(format!(
            "no point of {from}..={to} satisfies K < 2N+1 and K < (2N+1)L"
        )));
    }
    Ok(out)
}

/// Median `P2` construction time per size and method, then the fitted
/// log-log exponent of each method.
pub fn run_bench(
    sizes: &[BenchSize],
    reps: usize,
    seed: u64,
    methods: &[PrecoderMethod],
) -> Result<Vec<SweepRecord>> {
    let timings = bench_precoder(sizes, reps, derive_seed(seed, STREAM_BENCH, 0))?;
    let mut out: Vec<SweepRecord> = timings
        .iter()
        .filter(|t| methods.contains(&t.method))
        .map(|t| {
            SweepRecord::new(
                "bench",
                t.m_dim as f64,
                t.method.as_str(),
                "median_seconds",
                t.median_seconds,
                t.reps as u64,
                seed,
            )
        })
        .collect();
    let k = sizes.first().map_or(0, |s| s.k);
    for &m in methods {
        let e = fit_scaling(&timings, m)?;
        out.push(SweepRecord::new(
            "bench_exponent",
            k as f64,
            m.as_str(),
            "exponent",
            e,
            reps as u64,
            seed,
        ));
    }
    Ok(out)
}
