//! Normalization and artificial-noise precoders.
//!
//! Both methods share the normalization matrix `P1 = (Hᴴ)†`. They differ in
//! the orthogonal matrix `P2` that shapes the artificial noise:
//!
//! * ZF: the `M x M` projector `I − (Hᴴ)†·Hᴴ` onto the null space of `Hᴴ`,
//!   driven by an `M`-dimensional noise vector.
//! * SVD: `J` orthonormal right-singular vectors of `Hᴴ` taken from its null
//!   space, driven by a `J`-dimensional noise vector. By default
//!   `J = 2N + 1 − K`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fda::ArrayConfig;
use crate::linalg::{
    nullspace_basis, pseudoinverse, singular_values, ComplexMatrix, NullspaceCols, DEFAULT_RANK_TOL,
};
use crate::rng::complex_gaussian;

/// Smallest accepted `σ_min / σ_max` of the steering matrix.
pub const MIN_INVERSE_CONDITION: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderMethod {
    Zf,
    Svd,
}

impl PrecoderMethod {
    pub const ALL: [PrecoderMethod; 2] = [PrecoderMethod::Zf, PrecoderMethod::Svd];

    pub fn as_str(&self) -> &'static str {
        match self {
            PrecoderMethod::Zf => "zf",
            PrecoderMethod::Svd => "svd",
        }
    }
}

impl fmt::Display for PrecoderMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecoderMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(PrecoderMethod::Zf),
            "svd" => Ok(PrecoderMethod::Svd),
            other => Err(format!(
                "unknown precoder method '{other}', expected zf or svd"
            )),
        }
    }
}

/// Dimension of the SVD method's artificial-noise subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnDims {
    /// `2N + 1 − K` columns.
    #[default]
    Truncated,
    /// The whole `M − K` dimensional null space.
    Full,
    Fixed(usize),
}

impl AnDims {
    pub fn resolve(&self, cfg: &ArrayConfig, k: usize) -> Result<usize> {
        match *self {
            AnDims::Truncated => cfg
                .n_elements()
                .checked_sub(k)
                .filter(|&j| j > 0)
                .ok_or_else(|| {
                    Error::Domain(format!(
                        "default AN dimension 2N+1-K is not positive for N={}, K={k}",
                        cfg.n_half
                    ))
                }),
            AnDims::Full => Ok(cfg.m_dim().saturating_sub(k)),
            AnDims::Fixed(j) => Ok(j),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub method: PrecoderMethod,
    /// `M x K` normalization matrix.
    pub p1: ComplexMatrix,
    /// `M x J` orthogonal matrix.
    pub p2: ComplexMatrix,
    pub alpha: f64,
    /// Length `J` of the artificial-noise vector.
    pub an_dim: usize,
}

impl Precoder {
    /// Builds a precoder for steering matrix `h_mat`. `an_dims` is only
    /// consulted by the SVD method.
    pub fn build(
        method: PrecoderMethod,
        h_mat: &ComplexMatrix,
        an_dims: usize,
        sigma_z2: f64,
    ) -> Result<Self> {
        let p1 = normalization_matrix(h_mat)?;
        let p2 = match method {
            PrecoderMethod::Zf => orthogonal_matrix_zf(h_mat)?,
            PrecoderMethod::Svd => orthogonal_matrix_svd(h_mat, an_dims)?,
        };
        let alpha = an_normalization(&p2, sigma_z2)?;
        Ok(Self {
            method,
            an_dim: p2.cols(),
            p1,
            p2,
            alpha,
        })
    }
}

fn check_conditioning(h_mat: &ComplexMatrix) -> Result<()> {
    let sv = singular_values(h_mat)?;
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    if max == 0.0 || min / max <= MIN_INVERSE_CONDITION {
        return Err(Error::IllConditioned {
            condition_number: if min == 0.0 { f64::INFINITY } else { max / min },
        });
    }
    Ok(())
}

/// `P1 = H·(Hᴴ·H)⁻¹`, computed as the pseudoinverse of `Hᴴ`.
pub fn normalization_matrix(h_mat: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_conditioning(h_mat)?;
    Ok(pseudoinverse(
        &h_mat.hermitian_transpose(),
        DEFAULT_RANK_TOL,
    )?)
}

/// `I − (Hᴴ)†·Hᴴ`.
pub fn orthogonal_matrix_zf(h_mat: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_conditioning(h_mat)?;
    let hh = h_mat.hermitian_transpose();
    let pinv = pseudoinverse(&hh, DEFAULT_RANK_TOL)?;
    let mut p2 = pinv.matmul(&hh)?.scale(Complex64::new(-1.0, 0.0));
    for i in 0..p2.rows() {
        p2[(i, i)] += 1.0;
    }
    Ok(p2)
}

/// First `an_dims` null-space columns of the SVD of `Hᴴ`.
pub fn orthogonal_matrix_svd(h_mat: &ComplexMatrix, an_dims: usize) -> Result<ComplexMatrix> {
    check_conditioning(h_mat)?;
    let hh = h_mat.hermitian_transpose();
    Ok(nullspace_basis(
        &hh,
        DEFAULT_RANK_TOL,
        NullspaceCols::First(an_dims),
    )?)
}

/// `α = 1 / sqrt(σ_z²·tr(P2·P2ᴴ))`, so the radiated AN power is `β₂²·Ps`.
pub fn an_normalization(p2: &ComplexMatrix, sigma_z2: f64) -> Result<f64> {
    if !(sigma_z2.is_finite() && sigma_z2 > 0.0) {
        return Err(Error::Domain(format!(
            "AN variance must be positive, got {sigma_z2}"
        )));
    }
    let trace = p2.frobenius_norm().powi(2);
    if trace == 0.0 {
        return Err(Error::DegenerateProjector);
    }
    Ok(1.0 / (sigma_z2 * trace).sqrt())
}

/// `β₂ = sqrt(1 − β₁²)`.
pub fn beta2(beta1: f64) -> f64 {
    (1.0 - beta1 * beta1).max(0.0).sqrt()
}

/// `s = β₁·√Ps·P1·x_d + α·β₂·√Ps·P2·z`.
pub fn transmit_signal(
    pre: &Precoder,
    x_d: &ComplexMatrix,
    z: &ComplexMatrix,
    beta1: f64,
    ps: f64,
) -> Result<ComplexMatrix> {
    if x_d.shape() != (pre.p1.cols(), 1) || z.shape() != (pre.p2.cols(), 1) {
        return Err(Error::Shape(format!(
            "transmit_signal: expected x_d {}x1 and z {}x1, got {:?} and {:?}",
            pre.p1.cols(),
            pre.p2.cols(),
            x_d.shape(),
            z.shape()
        )));
    }
    let root = ps.sqrt();
    let useful = pre.p1.matmul(x_d)?.scale((beta1 * root).into());
    let noise = pre
        .p2
        .matmul(z)?
        .scale((pre.alpha * beta2(beta1) * root).into());
    Ok(useful.add(&noise)?)
}

/// `dim x 1` vector of i.i.d. CN(0, σ_z²) entries.
pub fn draw_an<R: Rng + ?Sized>(rng: &mut R, dim: usize, sigma_z2: f64) -> ComplexMatrix {
    ComplexMatrix::column_vector((0..dim).map(|_| complex_gaussian(rng, sigma_z2)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub method: PrecoderMethod,
    pub name: &'static str,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaReport {
    pub tol: f64,
    pub results: Vec<CriterionResult>,
}

impl CriteriaReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

fn criterion(
    method: PrecoderMethod,
    name: &'static str,
    residual: f64,
    tol: f64,
) -> CriterionResult {
    CriterionResult {
        method,
        name,
        residual,
        pass: residual.is_finite() && residual < tol,
    }
}

/// Residuals `‖Hᴴ·P1 − I‖_F` and `‖Hᴴ·P2‖_F` against `tol`.
pub fn verify_criteria(h_mat: &ComplexMatrix, pre: &Precoder, tol: f64) -> Result<CriteriaReport> {
    let m = pre.method;
    let r1 = h_mat.hermitian_matmul(&pre.p1)?.distance_from_identity();
    let r2 = h_mat.hermitian_matmul(&pre.p2)?.frobenius_norm();
    Ok(CriteriaReport {
        tol,
        results: vec![
            criterion(m, "normalization", r1, tol),
            criterion(m, "orthogonality", r2, tol),
        ],
    })
}

/// Structural checks on a precoder beyond the two orthogonality criteria:
/// AN power normalization, projector symmetry and idempotency for ZF,
/// column orthonormality for SVD.
pub fn invariant_battery(pre: &Precoder, sigma_z2: f64, tol: f64) -> Result<Vec<CriterionResult>> {
    let m = pre.method;
    let power = pre.alpha.powi(2) * sigma_z2 * pre.p2.frobenius_norm().powi(2);
    let mut out = vec![criterion(m, "an_power", (power - 1.0).abs(), tol)];
    match m {
        PrecoderMethod::Zf => {
            let p2 = &pre.p2;
            let herm = p2.sub(&p2.hermitian_transpose())?.frobenius_norm();
            let idem = p2.matmul(p2)?.sub(p2)?.frobenius_norm();
            out.push(criterion(m, "hermitian", herm, tol));
            out.push(criterion(m, "idempotent", idem, tol));
        }
        PrecoderMethod::Svd => {
            let gram = pre.p2.hermitian_matmul(&pre.p2)?.distance_from_identity();
            out.push(criterion(m, "orthonormal", gram, tol));
        }
    }
    Ok(out)
}

/// Checks that every SVD column is fixed by the ZF projector.
pub fn span_relation(zf: &Precoder, svd: &Precoder, tol: f64) -> Result<CriterionResult> {
    let moved = zf.p2.matmul(&svd.p2)?.sub(&svd.p2)?;
    let worst = (0..moved.cols())
        .map(|j| {
            moved
                .column(j)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    Ok(criterion(
        PrecoderMethod::Svd,
        "inside_zf_nullspace",
        worst,
        tol,
    ))
}
