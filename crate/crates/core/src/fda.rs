//! Symmetrical multi-carrier frequency diverse array.
//!
//! The array has `2N + 1` elements indexed `n = -N..=N` with half-wavelength
//! spacing, each radiating `L` carriers. Carrier `l` of element `n` sits at
//! `f0 + Δf·ln((|n| + 1)(l + 1))`, so the offset plan is symmetric about the
//! central element and the radiated pattern depends on range as well as
//! angle.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Largest accepted `|Δf| / f0`.
pub const MAX_RELATIVE_OFFSET: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    /// Elements per side `N`; the array has `2N + 1` elements.
    pub n_half: usize,
    /// Carriers per element `L`.
    pub n_carriers: usize,
    /// Central carrier frequency in Hz.
    pub f0: f64,
    /// Fixed frequency offset `Δf` in Hz.
    pub delta_f: f64,
    /// Propagation speed in m/s.
    pub c: f64,
    /// Evaluation instant `t` in seconds.
    pub t_obs: f64,
}

impl ArrayConfig {
    pub fn new(n_half: usize, n_carriers: usize, f0: f64, delta_f: f64) -> Result<Self> {
        let cfg = Self {
            n_half,
            n_carriers,
            f0,
            delta_f,
            c: SPEED_OF_LIGHT,
            t_obs: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_t_obs(mut self, t_obs: f64) -> Result<Self> {
        self.t_obs = t_obs;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ArrayConfig(msg));
        if self.n_half < 1 {
            return fail("n_half must be at least 1".into());
        }
        if self.n_carriers < 1 {
            return fail("n_carriers must be at least 1".into());
        }
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return fail(format!("f0 must be positive, got {}", self.f0));
        }
        if !self.delta_f.is_finite() || self.delta_f.abs() / self.f0 >= MAX_RELATIVE_OFFSET {
            return fail(format!(
                "|delta_f|/f0 must stay below {MAX_RELATIVE_OFFSET}, got {}",
                self.delta_f.abs() / self.f0
            ));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return fail(format!(
                "propagation speed must be positive, got {}",
                self.c
            ));
        }
        if !self.t_obs.is_finite() {
            return fail("t_obs must be finite".into());
        }
        Ok(())
    }

    pub fn n_elements(&self) -> usize {
        2 * self.n_half + 1
    }

    /// Steering vector length `M = (2N + 1)·L`.
    pub fn m_dim(&self) -> usize {
        self.n_elements() * self.n_carriers
    }

    pub fn wavelength(&self) -> f64 {
        self.c / self.f0
    }

    /// Element spacing, half the central wavelength.
    pub fn spacing(&self) -> f64 {
        self.wavelength() / 2.0
    }

    fn check_indices(&self, n: i64, l: usize) -> Result<()> {
        let bound = self.n_half as i64;
        if n < -bound || n > bound {
            return Err(Error::Index {
                what: "element",
                index: n,
                bound: format!("[-{bound}, {bound}]"),
            });
        }
        if l >= self.n_carriers {
            return Err(Error::Index {
                what: "carrier",
                index: l as i64,
                bound: format!("[0, {}]", self.n_carriers - 1),
            });
        }
        Ok(())
    }

    /// `Δf·ln((|n| + 1)(l + 1))`.
    fn offset(&self, n: i64, l: usize) -> f64 {
        self.delta_f * (((n.unsigned_abs() + 1) * (l as u64 + 1)) as f64).ln()
    }

    fn phase_unchecked(&self, n: i64, l: usize, pos: &PolarPosition) -> f64 {
        let range_term = self.offset(n, l) * (self.t_obs - pos.range_m / self.c);
        let angle_term = self.f0 * n as f64 * self.spacing() * pos.angle_rad.sin() / self.c;
        2.0 * PI * (range_term + angle_term)
    }
}

/// Range/angle coordinate relative to the central element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPosition {
    range_m: f64,
    angle_rad: f64,
}

impl PolarPosition {
    pub fn new(range_m: f64, angle_rad: f64) -> Result<Self> {
        if !(range_m.is_finite() && range_m > 0.0) {
            return Err(Error::Position(format!(
                "range must be positive and finite, got {range_m} m"
            )));
        }
        if !(angle_rad.is_finite() && angle_rad.abs() < FRAC_PI_2) {
            return Err(Error::Position(format!(
                "angle must lie strictly inside (-90, 90) degrees, got {} degrees",
                angle_rad.to_degrees()
            )));
        }
        Ok(Self { range_m, angle_rad })
    }

    pub fn from_km_deg(range_km: f64, angle_deg: f64) -> Result<Self> {
        Self::new(range_km * 1e3, angle_deg.to_radians())
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }

    pub fn angle_rad(&self) -> f64 {
        self.angle_rad
    }

    pub fn range_km(&self) -> f64 {
        self.range_m / 1e3
    }

    pub fn angle_deg(&self) -> f64 {
        self.angle_rad.to_degrees()
    }
}

impl std::fmt::Display for PolarPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} km, {} deg)", self.range_km(), self.angle_deg())
    }
}

/// `f0 + Δf·ln((|n| + 1)(l + 1))`.
pub fn carrier_frequency(cfg: &ArrayConfig, n: i64, l: usize) -> Result<f64> {
    cfg.check_indices(n, l)?;
    Ok(cfg.f0 + cfg.offset(n, l))
}

/// Phase of carrier `l` on element `n` observed at `pos`.
pub fn element_phase(cfg: &ArrayConfig, n: i64, l: usize, pos: &PolarPosition) -> Result<f64> {
    cfg.check_indices(n, l)?;
    Ok(cfg.phase_unchecked(n, l, pos))
}

/// Unit-norm `M x 1` steering vector, element-major (`n = -N..=N`) with
/// carriers ascending inside each element.
pub fn steering_vector(cfg: &ArrayConfig, pos: &PolarPosition) -> ComplexMatrix {
    ComplexMatrix::column_vector(steering_entries(cfg, pos))
}

pub(crate) fn steering_entries(cfg: &ArrayConfig, pos: &PolarPosition) -> Vec<Complex64> {
    let scale = 1.0 / (cfg.m_dim() as f64).sqrt();
    let half = cfg.n_half as i64;
    let mut out = Vec::with_capacity(cfg.m_dim());
    for n in -half..=half {
        for l in 0..cfg.n_carriers {
            out.push(Complex64::from_polar(scale, cfg.phase_unchecked(n, l, pos)));
        }
    }
    out
}

/// `M x K` matrix whose columns are the steering vectors of `positions`.
pub fn steering_matrix(cfg: &ArrayConfig, positions: &[PolarPosition]) -> Result<ComplexMatrix> {
    let k = positions.len();
    let m = cfg.m_dim();
    if k == 0 {
        return Err(Error::Position(
            "at least one desired position is required".into(),
        ));
    }
    if k >= m {
        return Err(Error::OverDetermined { k, m });
    }
    for (i, a) in positions.iter().enumerate() {
        if let Some(j) = positions[i + 1..].iter().position(|b| b == a) {
            return Err(Error::DuplicatePosition {
                first: i,
                second: i + 1 + j,
            });
        }
    }
    let columns: Vec<Vec<Complex64>> = positions.iter().map(|p| steering_entries(cfg, p)).collect();
    Ok(ComplexMatrix::from_columns(&columns)?)
}
