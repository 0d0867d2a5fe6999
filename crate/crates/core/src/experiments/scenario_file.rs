//! JSON scenario files.
//!
//! ```json
//! {
//!   "array": {"n_half": 8, "n_carriers": 7, "f0_hz": 10e9, "delta_f_hz": 2e3, "t_obs_s": 0},
//!   "desired": [{"range_km": 150, "angle_deg": 50}],
//!   "eavesdroppers": {"random": {"count": 2}},
//!   "power": {"beta1": 0.9, "ps": 1},
//!   "noise": {"snr_db": 10},
//!   "an": {"sigma_z2": 1, "an_dims": "paper_default"},
//!   "method": "both",
//!   "seed": 2024
//! }
//! ```
//!
//! Unknown keys are rejected. `eavesdroppers` is either a list of positions
//! or a `random` block that is expanded with the scenario seed.

use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::fda::{ArrayConfig, PolarPosition, SPEED_OF_LIGHT};
use crate::precoder::{AnDims, PrecoderMethod};
use crate::rng::derived_rng;

/// Rejection-sampling budget per eavesdropper.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

pub(crate) const STREAM_EVE_EXPANSION: u64 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    array: ArraySection,
    desired: Vec<PositionSpec>,
    #[serde(default)]
    eavesdroppers: Option<EavesdropperSpec>,
    power: PowerSection,
    noise: NoiseSection,
    #[serde(default)]
    an: Option<AnSection>,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArraySection {
    n_half: usize,
    n_carriers: usize,
    f0_hz: f64,
    delta_f_hz: f64,
    #[serde(default)]
    t_obs_s: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct PositionSpec {
    range_km: f64,
    angle_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EavesdropperSpec {
    List(Vec<PositionSpec>),
    Random { random: RandomSpec },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomSpec {
    count: usize,
    #[serde(default)]
    range_km: Option<[f64; 2]>,
    #[serde(default)]
    angle_deg: Option<[f64; 2]>,
    #[serde(default)]
    guard_angle_deg: Option<f64>,
    #[serde(default)]
    guard_range_km: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerSection {
    beta1: f64,
    #[serde(default = "one")]
    ps: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    #[serde(default)]
    snr_db: Option<f64>,
    #[serde(default)]
    sigma2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnSection {
    #[serde(default = "one")]
    sigma_z2: f64,
    #[serde(default)]
    an_dims: Option<AnDimsSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AnDimsSpec {
    Count(usize),
    Named(String),
}

fn one() -> f64 {
    1.0
}

/// Region from which random eavesdroppers are drawn. A candidate is
/// rejected when it is closer than `guard_angle_deg` in angle or closer than
/// `guard_range_km` in range to any desired receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveRegion {
    pub range_km: (f64, f64),
    pub angle_deg: (f64, f64),
    pub guard_angle_deg: f64,
    pub guard_range_km: f64,
}

impl Default for EveRegion {
    fn default() -> Self {
        Self {
            range_km: (50.0, 400.0),
            angle_deg: (-90.0, 90.0),
            guard_angle_deg: 2.0,
            guard_range_km: 10.0,
        }
    }
}

impl EveRegion {
    fn validate(&self, key: &str) -> Result<()> {
        let (r0, r1) = self.range_km;
        let (a0, a1) = self.angle_deg;
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(Error::scenario(
                format!("{key}.range_km"),
                format!("need 0 < min < max, got [{r0}, {r1}]"),
            ));
        }
        if !(a0 >= -90.0 && a1 <= 90.0 && a1 > a0) {
            return Err(Error::scenario(
                format!("{key}.angle_deg"),
                format!("need -90 <= min < max <= 90, got [{a0}, {a1}]"),
            ));
        }
        if !(self.guard_angle_deg >= 0.0 && self.guard_range_km >= 0.0) {
            return Err(Error::scenario(
                format!("{key}.guard"),
                "guard sizes must be non-negative",
            ));
        }
        Ok(())
    }

    pub fn in_guard_zone(&self, pos: &PolarPosition, desired: &[PolarPosition]) -> bool {
        desired.iter().any(|d| {
            (pos.angle_deg() - d.angle_deg()).abs() < self.guard_angle_deg
                || (pos.range_km() - d.range_km()).abs() < self.guard_range_km
        })
    }

    /// One position outside every guard zone.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        desired: &[PolarPosition],
    ) -> Result<PolarPosition> {
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let r = rng.random_range(self.range_km.0..self.range_km.1);
            let a = rng.random_range(self.angle_deg.0..self.angle_deg.1);
            let Ok(pos) = PolarPosition::from_km_deg(r, a) else {
                continue;
            };
            if !self.in_guard_zone(&pos, desired) {
                return Ok(pos);
            }
        }
        Err(Error::InfeasibleRegion {
            attempts: MAX_PLACEMENT_ATTEMPTS,
        })
    }

    pub fn sample_many<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        desired: &[PolarPosition],
        count: usize,
    ) -> Result<Vec<PolarPosition>> {
        (0..count).map(|_| self.sample(rng, desired)).collect()
    }
}

/// Which precoders an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodSelection {
    Zf,
    Svd,
    #[default]
    Both,
}

impl MethodSelection {
    pub fn methods(&self) -> Vec<PrecoderMethod> {
        match self {
            MethodSelection::Zf => vec![PrecoderMethod::Zf],
            MethodSelection::Svd => vec![PrecoderMethod::Svd],
            MethodSelection::Both => PrecoderMethod::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for MethodSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(MethodSelection::Zf),
            "svd" => Ok(MethodSelection::Svd),
            "both" => Ok(MethodSelection::Both),
            other => Err(format!(
                "unknown method '{other}', expected zf, svd or both"
            )),
        }
    }
}

/// A validated scenario plus the experiment-level settings from its file.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scenario: Scenario,
    pub methods: MethodSelection,
    pub an_dims: AnDims,
    pub eve_region: EveRegion,
    /// Eavesdropper count of the `random` block, if one was given.
    pub random_eves: Option<usize>,
}

impl Experiment {
    /// Reference geometry with default experiment settings.
    pub fn reference() -> Self {
        Self {
            scenario: Scenario::reference(),
            methods: MethodSelection::Both,
            an_dims: AnDims::Truncated,
            eve_region: EveRegion::default(),
            random_eves: None,
        }
    }

    /// Replaces the seed and re-expands random eavesdroppers with it.
    pub fn reseed(&mut self, seed: u64) -> Result<()> {
        self.scenario.seed = seed;
        if let Some(count) = self.random_eves {
            let mut rng = derived_rng(seed, STREAM_EVE_EXPANSION, 0);
            self.scenario.eavesdroppers =
                self.eve_region
                    .sample_many(&mut rng, &self.scenario.desired, count)?;
        }
        Ok(())
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Experiment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Parse { source, .. } => Error::Parse {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse_scenario(text: &str) -> Result<Experiment> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|source| Error::Parse {
        path: "<scenario>".into(),
        source,
    })?;

    let a = &file.array;
    let array = ArrayConfig {
        n_half: a.n_half,
        n_carriers: a.n_carriers,
        f0: a.f0_hz,
        delta_f: a.delta_f_hz,
        c: SPEED_OF_LIGHT,
        t_obs: a.t_obs_s,
    };
    array
        .validate()
        .map_err(|e| Error::scenario("array", e.to_string()))?;

    let position = |key: String, p: &PositionSpec| {
        PolarPosition::from_km_deg(p.range_km, p.angle_deg)
            .map_err(|e| Error::scenario(key, e.to_string()))
    };
    let desired = file
        .desired
        .iter()
        .enumerate()
        .map(|(i, p)| position(format!("desired[{i}]"), p))
        .collect::<Result<Vec<_>>>()?;

    let sigma2 = match (file.noise.snr_db, file.noise.sigma2) {
        (Some(snr), None) => file.power.ps / 10f64.powf(snr / 10.0),
        (None, Some(s)) => s,
        _ => {
            return Err(Error::scenario(
                "noise",
                "give exactly one of snr_db or sigma2",
            ))
        }
    };

    let (sigma_z2, an_dims) = match &file.an {
        None => (1.0, AnDims::Truncated),
        Some(an) => {
            let dims =
                match &an.an_dims {
                    None => AnDims::Truncated,
                    Some(AnDimsSpec::Count(j)) => AnDims::Fixed(*j),
                    Some(AnDimsSpec::Named(name)) => match name.as_str() {
                        "paper_default" => AnDims::Truncated,
                        "full" => AnDims::Full,
                        other => return Err(Error::scenario(
                            "an.an_dims",
                            format!(
                                "expected a count, \"paper_default\" or \"full\", got \"{other}\""
                            ),
                        )),
                    },
                };
            (an.sigma_z2, dims)
        }
    };

    let methods = match &file.method {
        None => MethodSelection::Both,
        Some(m) => m
            .parse()
            .map_err(|e: String| Error::scenario("method", e))?,
    };

    let mut scenario = Scenario {
        array,
        desired,
        eavesdroppers: Vec::new(),
        beta1: file.power.beta1,
        ps: file.power.ps,
        sigma_wd2: sigma2,
        sigma_we2: sigma2,
        sigma_z2,
        seed: file.seed.unwrap_or(0),
    };

    let mut eve_region = EveRegion::default();
    let mut random_eves = None;
    match &file.eavesdroppers {
        None => {}
        Some(EavesdropperSpec::List(list)) => {
            scenario.eavesdroppers = list
                .iter()
                .enumerate()
                .map(|(i, p)| position(format!("eavesdroppers[{i}]"), p))
                .collect::<Result<Vec<_>>>()?;
        }
        Some(EavesdropperSpec::Random { random }) => {
            let d = EveRegion::default();
            eve_region = EveRegion {
                range_km: random.range_km.map_or(d.range_km, |[a, b]| (a, b)),
                angle_deg: random.angle_deg.map_or(d.angle_deg, |[a, b]| (a, b)),
                guard_angle_deg: random.guard_angle_deg.unwrap_or(d.guard_angle_deg),
                guard_range_km: random.guard_range_km.unwrap_or(d.guard_range_km),
            };
            eve_region.validate("eavesdroppers.random")?;
            random_eves = Some(random.count);
        }
    }

    scenario.validate()?;
    an_dims.resolve(&scenario.array, scenario.k())?;

    let mut exp = Experiment {
        scenario,
        methods,
        an_dims,
        eve_region,
        random_eves,
    };
    let seed = exp.scenario.seed;
    exp.reseed(seed)?;
    exp.scenario.validate()?;
    Ok(exp)
}
