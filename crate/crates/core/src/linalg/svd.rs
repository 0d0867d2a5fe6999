//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! The rotations run on the tall orientation of the input (`A` if it has at
//! least as many rows as columns, `Aᴴ` otherwise), which costs
//! `O(p·q²)` per sweep for a `p x q` tall matrix. The thin factors are then
//! completed to full unitary bases with Householder reflectors; a single
//! completion column costs `O(p·q)`, so callers that only need a few
//! null-space vectors never pay for the full `p x p` basis.
//!
//! Sign convention: every right-singular vector is rotated so that its
//! largest-magnitude entry (first one on ties) is real and positive, and the
//! paired left vector is rotated by the same unit phase.

use num_complex::Complex64;

use super::{inner, ComplexMatrix, LinalgError};

const MAX_SWEEPS: usize = 80;

/// `A = left · diag(singular_values) · rightᴴ`, with `left` `m x m`, `right`
/// `n x n` and `min(m, n)` singular values in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactorization {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdFactorization {
    /// Number of singular values strictly above `rank_tol · σ_max`.
    pub fn rank(&self, rank_tol: f64) -> usize {
        numerical_rank(&self.singular_values, rank_tol)
    }

    /// Right-singular vectors with singular values at or below
    /// `rank_tol · σ_max`, or `None` if the null space is trivial.
    pub fn null_space(&self, rank_tol: f64) -> Option<ComplexMatrix> {
        let rank = self.rank(rank_tol);
        (rank < self.right.cols()).then(|| self.right.columns(rank..self.right.cols()))
    }

    /// Rebuilds `left · Σ · rightᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        let mut scaled = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                let l = self.left[(i, k)] * s;
                for j in 0..n {
                    scaled[(i, j)] += l * self.right[(j, k)].conj();
                }
            }
        }
        scaled
    }
}

/// How many null-space columns [`nullspace_basis`] should return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullspaceCols {
    All,
    First(usize),
}

/// Result of the Jacobi iteration on the tall orientation `T` (`p x q`,
/// `p ≥ q`): `T · V = W` with mutually orthogonal columns of `W`.
struct ThinSvd {
    /// The input was wide and `T = Aᴴ`.
    wide: bool,
    p: usize,
    q: usize,
    /// Column-major `p x q`, columns sorted by descending norm.
    w: Vec<Complex64>,
    sigma: Vec<f64>,
    /// Column-major `q x q`.
    v: Vec<Complex64>,
    /// Columns of `W` trusted for normalisation into singular vectors.
    usable: usize,
}

impl ThinSvd {
    fn compute(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        let (m, n) = a.shape();
        let wide = m < n;
        let (p, q) = if wide { (n, m) } else { (m, n) };

        let mut t = vec![Complex64::new(0.0, 0.0); p * q];
        for j in 0..q {
            for i in 0..p {
                t[j * p + i] = if wide { a[(j, i)].conj() } else { a[(i, j)] };
            }
        }
        let mut v = vec![Complex64::new(0.0, 0.0); q * q];
        for j in 0..q {
            v[j * q + j] = Complex64::new(1.0, 0.0);
        }

        if !jacobi_sweeps(&mut t, p, q, &mut v) {
            return Err(LinalgError::DecompositionFailure {
                rows: m,
                cols: n,
                sweeps: MAX_SWEEPS,
            });
        }

        let norms: Vec<f64> = (0..q)
            .map(|j| {
                t[j * p..(j + 1) * p]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

        let mut w = Vec::with_capacity(p * q);
        let mut v_sorted = Vec::with_capacity(q * q);
        for &j in &order {
            w.extend_from_slice(&t[j * p..(j + 1) * p]);
            v_sorted.extend_from_slice(&v[j * q..(j + 1) * q]);
        }
        let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let floor = sigma[0] * f64::EPSILON * p as f64;
        let usable = sigma.iter().take_while(|&&s| s > floor).count();

        Ok(Self {
            wide,
            p,
            q,
            w,
            sigma,
            v: v_sorted,
            usable,
        })
    }

    fn w_col(&self, j: usize) -> &[Complex64] {
        &self.w[j * self.p..(j + 1) * self.p]
    }

    fn v_col(&self, j: usize) -> &[Complex64] {
        &self.v[j * self.q..(j + 1) * self.q]
    }

    /// Normalised `W` columns, i.e. the thin singular vectors on the tall side.
    fn tall_thin(&self) -> Vec<Vec<Complex64>> {
        (0..self.usable)
            .map(|j| {
                let s = self.sigma[j];
                self.w_col(j).iter().map(|z| z / s).collect()
            })
            .collect()
    }
}

/// Runs cyclic one-sided Jacobi sweeps on column-major `t` (`p x q`),
/// accumulating the rotations into `v`. Returns `false` on non-convergence.
fn jacobi_sweeps(t: &mut [Complex64], p: usize, q: usize, v: &mut [Complex64]) -> bool {
    let tol = f64::EPSILON * p.max(q) as f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q.saturating_sub(1) {
            for j in (i + 1)..q {
                let (head, tail) = t.split_at_mut(j * p);
                let ci = &mut head[i * p..(i + 1) * p];
                let cj = &mut tail[..p];
                let alpha: f64 = ci.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cj.iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(ci, cj);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                rotate(ci, cj, cos, sin, phase);

                let (vh, vt) = v.split_at_mut(j * q);
                rotate(&mut vh[i * q..(i + 1) * q], &mut vt[..q], cos, sin, phase);
            }
        }
        if !rotated {
            return true;
        }
    }
    false
}

#[inline]
fn rotate(x: &mut [Complex64], y: &mut [Complex64], cos: f64, sin: f64, phase: Complex64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let xa = *a;
        let yb = *b * phase;
        *a = xa * cos - yb * sin;
        *b = xa * sin + yb * cos;
    }
}

/// Householder reflectors from the QR factorisation of an orthonormal
/// `p x r` block; `Q·e_j` for `j ≥ r` spans its orthogonal complement.
struct Completion {
    p: usize,
    reflectors: Vec<Option<Vec<Complex64>>>,
}

impl Completion {
    fn new(p: usize, thin: &[Vec<Complex64>]) -> Self {
        let mut work: Vec<Vec<Complex64>> = thin.to_vec();
        let mut reflectors = Vec::with_capacity(thin.len());
        for k in 0..work.len() {
            let x = &work[k][k..];
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let x0 = x[0];
            let unit = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let mut v: Vec<Complex64> = x.to_vec();
            v[0] += unit * norm;
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                reflectors.push(None);
                continue;
            }
            for z in &mut v {
                *z /= vnorm;
            }
            for col in work.iter_mut().skip(k + 1) {
                reflect(&v, &mut col[k..]);
            }
            reflectors.push(Some(v));
        }
        Self { p, reflectors }
    }

    /// `Q · e_j`.
    fn column(&self, j: usize) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.p];
        x[j] = Complex64::new(1.0, 0.0);
        for (k, h) in self.reflectors.iter().enumerate().rev() {
            if let Some(v) = h {
                reflect(v, &mut x[k..]);
            }
        }
        x
    }
}

/// `x ← (I − 2·v·vᴴ)·x` for unit `v`.
fn reflect(v: &[Complex64], x: &mut [Complex64]) {
    let d = inner(v, x) * 2.0;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= vi * d;
    }
}

/// Full-length singular vectors on the tall side of a [`ThinSvd`].
struct TallBasis {
    thin: Vec<Vec<Complex64>>,
    completion: Completion,
}

impl TallBasis {
    fn new(svd: &ThinSvd) -> Self {
        let thin = svd.tall_thin();
        let completion = Completion::new(svd.p, &thin);
        Self { thin, completion }
    }

    fn column(&self, j: usize) -> Vec<Complex64> {
        match self.thin.get(j) {
            Some(c) => c.clone(),
            None => self.completion.column(j),
        }
    }
}

/// Unit phase that makes the largest-magnitude entry of `col` real positive.
fn canonical_phase(col: &[Complex64]) -> Complex64 {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    let pivot = col[best];
    if pivot.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (pivot / pivot.norm()).conj()
    }
}

fn numerical_rank(sigma: &[f64], rank_tol: f64) -> usize {
    let cutoff = sigma.first().copied().unwrap_or(0.0) * rank_tol;
    sigma.iter().filter(|&&s| s > cutoff).count()
}

fn check_input(a: &ComplexMatrix) -> Result<(), LinalgError> {
    if let Some(idx) = a.as_slice().iter().position(|z| !z.is_finite()) {
        return Err(LinalgError::NonFinite {
            row: idx / a.cols(),
            col: idx % a.cols(),
        });
    }
    Ok(())
}

fn check_tol(rank_tol: f64) -> Result<(), LinalgError> {
    if rank_tol > 0.0 && rank_tol < 1.0 {
        Ok(())
    } else {
        Err(LinalgError::RankTolerance(rank_tol))
    }
}

/// Full singular value decomposition.
pub fn svd(a: &ComplexMatrix) -> Result<SvdFactorization, LinalgError> {
    check_input(a)?;
    let thin = ThinSvd::compute(a)?;
    let (p, q) = (thin.p, thin.q);
    let tall = TallBasis::new(&thin);

    let tall_cols: Vec<Vec<Complex64>> = (0..p).map(|j| tall.column(j)).collect();
    let short_cols: Vec<Vec<Complex64>> = (0..q).map(|j| thin.v_col(j).to_vec()).collect();
    let (mut left_cols, mut right_cols) = if thin.wide {
        (short_cols, tall_cols)
    } else {
        (tall_cols, short_cols)
    };

    for (j, col) in right_cols.iter_mut().enumerate() {
        let phase = canonical_phase(col);
        col.iter_mut().for_each(|z| *z *= phase);
        if j < q {
            left_cols[j].iter_mut().for_each(|z| *z *= phase);
        }
    }

    Ok(SvdFactorization {
        left: ComplexMatrix::from_columns(&left_cols)?,
        singular_values: thin.sigma,
        right: ComplexMatrix::from_columns(&right_cols)?,
    })
}

/// Singular values only, in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    check_input(a)?;
    Ok(ThinSvd::compute(a)?.sigma)
}

/// Moore–Penrose pseudoinverse, inverting singular values above
/// `rank_tol · σ_max` and discarding the rest.
pub fn pseudoinverse(a: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix, LinalgError> {
    check_tol(rank_tol)?;
    check_input(a)?;
    let thin = ThinSvd::compute(a)?;
    let rank = numerical_rank(&thin.sigma, rank_tol).min(thin.usable);
    let (m, n) = a.shape();
    let mut out = ComplexMatrix::zeros(n, m);
    for k in 0..rank {
        let inv2 = 1.0 / (thin.sigma[k] * thin.sigma[k]);
        // W_k / σ_k² pairs with V_k; which one is the row side depends on orientation.
        let (x, y) = if thin.wide {
            (thin.w_col(k), thin.v_col(k))
        } else {
            (thin.v_col(k), thin.w_col(k))
        };
        let x_scale = if thin.wide { inv2 } else { 1.0 };
        let y_scale = if thin.wide { 1.0 } else { inv2 };
        let data = out.data_mut();
        for i in 0..n {
            let xi = x[i] * x_scale;
            for j in 0..m {
                data[i * m + j] += xi * y[j].conj() * y_scale;
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of the right null space of `a`: right-singular vectors
/// whose singular values fall at or below `rank_tol · σ_max`, in the order
/// and phase convention of [`svd`]. Columns are bit-identical to the
/// corresponding columns of `svd(a).right`.
pub fn nullspace_basis(
    a: &ComplexMatrix,
    rank_tol: f64,
    max_cols: NullspaceCols,
) -> Result<ComplexMatrix, LinalgError> {
    check_tol(rank_tol)?;
    check_input(a)?;
    let thin = ThinSvd::compute(a)?;
    let n = a.cols();
    let rank = numerical_rank(&thin.sigma, rank_tol);
    let available = n - rank;
    let count = match max_cols {
        NullspaceCols::All => available,
        NullspaceCols::First(c) => c,
    };
    if count == 0 || count > available {
        return Err(LinalgError::InsufficientNullspace {
            requested: count,
            rank,
            cols: n,
            available,
        });
    }

    let cols: Vec<Vec<Complex64>> = if thin.wide {
        let tall = TallBasis::new(&thin);
        (rank..rank + count)
            .map(|j| {
                let mut c = tall.column(j);
                let phase = canonical_phase(&c);
                c.iter_mut().for_each(|z| *z *= phase);
                c
            })
            .collect()
    } else {
        (rank..rank + count)
            .map(|j| {
                let mut c = thin.v_col(j).to_vec();
                let phase = canonical_phase(&c);
                c.iter_mut().for_each(|z| *z *= phase);
                c
            })
            .collect()
    };
    ComplexMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_RANK_TOL;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random fill (LCG) so these unit tests need no RNG crate.
    fn filled(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    fn assert_valid(a: &ComplexMatrix, f: &SvdFactorization) {
        let l = &f.left;
        let r = &f.right;
        assert!(l.hermitian_matmul(l).unwrap().distance_from_identity() < 1e-10);
        assert!(r.hermitian_matmul(r).unwrap().distance_from_identity() < 1e-10);
        assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(f.singular_values.iter().all(|&s| s >= 0.0));
        let err = f.reconstruct().sub(a).unwrap().frobenius_norm();
        assert!(
            err <= 1e-9 * a.frobenius_norm().max(1.0),
            "reconstruction error {err}"
        );
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let f = svd(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(f.singular_values, vec![1.0, 1.0, 1.0]);
        assert_valid(&ComplexMatrix::identity(3), &f);
    }

    #[test]
    fn scalar_singular_value_is_modulus() {
        let a = ComplexMatrix::from_row_major(1, 1, vec![c(3.0, 4.0)]).unwrap();
        let f = svd(&a).unwrap();
        assert!((f.singular_values[0] - 5.0).abs() < 1e-15);
        // right vector is normalised to +1, so the left one carries the phase
        assert!((f.right[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((f.left[(0, 0)] - c(0.6, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn wide_tall_and_square_shapes_reconstruct() {
        for (i, (m, n)) in [(3, 119), (10, 10), (5, 3), (1, 7), (7, 1)]
            .into_iter()
            .enumerate()
        {
            let a = filled(m, n, i as u64 + 11);
            let f = svd(&a).unwrap();
            assert_eq!(f.left.shape(), (m, m));
            assert_eq!(f.right.shape(), (n, n));
            assert_eq!(f.singular_values.len(), m.min(n));
            assert_valid(&a, &f);
        }
    }

    #[test]
    fn right_vectors_follow_sign_convention() {
        let a = filled(4, 9, 5);
        let f = svd(&a).unwrap();
        for j in 0..f.right.cols() {
            let col = f.right.column(j);
            let pivot = col
                .iter()
                .copied()
                .reduce(|best, z| {
                    if z.norm_sqr() > best.norm_sqr() {
                        z
                    } else {
                        best
                    }
                })
                .unwrap();
            assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
        }
    }

    #[test]
    fn rank_deficient_input() {
        // rank-1 outer product
        let u = filled(4, 1, 1);
        let v = filled(1, 6, 2);
        let a = u.matmul(&v).unwrap();
        let f = svd(&a).unwrap();
        assert_valid(&a, &f);
        assert_eq!(f.rank(DEFAULT_RANK_TOL), 1);
        let ns = f.null_space(DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ns.shape(), (6, 5));
        assert!(a.matmul(&ns).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn zero_matrix_is_all_null_space() {
        let a = ComplexMatrix::zeros(2, 4);
        let f = svd(&a).unwrap();
        assert_eq!(f.singular_values, vec![0.0, 0.0]);
        assert_eq!(f.rank(DEFAULT_RANK_TOL), 0);
        let pinv = pseudoinverse(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(pinv, ComplexMatrix::zeros(4, 2));
    }

    #[test]
    fn pseudoinverse_of_identity_and_unit_vector() {
        let i = ComplexMatrix::identity(3);
        assert!(
            pseudoinverse(&i, DEFAULT_RANK_TOL)
                .unwrap()
                .sub(&i)
                .unwrap()
                .frobenius_norm()
                < 1e-14
        );

        let h = filled(6, 1, 9);
        let h = h.scale(c(1.0 / h.frobenius_norm(), 0.0));
        let pinv = pseudoinverse(&h, DEFAULT_RANK_TOL).unwrap();
        assert!(pinv.sub(&h.hermitian_transpose()).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn penrose_conditions_wide_and_tall() {
        for (m, n) in [(3, 40), (12, 5)] {
            let a = filled(m, n, (m * n) as u64);
            let x = pseudoinverse(&a, DEFAULT_RANK_TOL).unwrap();
            let axa = a.matmul(&x).unwrap().matmul(&a).unwrap();
            let xax = x.matmul(&a).unwrap().matmul(&x).unwrap();
            let ax = a.matmul(&x).unwrap();
            let xa = x.matmul(&a).unwrap();
            assert!(axa.sub(&a).unwrap().frobenius_norm() < 1e-9);
            assert!(xax.sub(&x).unwrap().frobenius_norm() < 1e-9);
            assert!(ax.sub(&ax.hermitian_transpose()).unwrap().frobenius_norm() < 1e-9);
            assert!(xa.sub(&xa.hermitian_transpose()).unwrap().frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn nullspace_of_first_axis() {
        let a = ComplexMatrix::from_row_major(1, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let ns = nullspace_basis(&a, DEFAULT_RANK_TOL, NullspaceCols::All).unwrap();
        assert_eq!(ns.shape(), (3, 2));
        for j in 0..2 {
            assert!(ns[(0, j)].norm() < 1e-15);
        }
        assert!(ns.hermitian_matmul(&ns).unwrap().distance_from_identity() < 1e-14);
    }

    #[test]
    fn truncated_nullspace_matches_full_svd_columns() {
        let a = filled(3, 30, 77);
        let f = svd(&a).unwrap();
        let ns = nullspace_basis(&a, DEFAULT_RANK_TOL, NullspaceCols::First(5)).unwrap();
        assert_eq!(ns, f.right.columns(3..8));
    }

    #[test]
    fn nullspace_request_too_large() {
        let a = filled(3, 8, 4);
        let err = nullspace_basis(&a, DEFAULT_RANK_TOL, NullspaceCols::First(6)).unwrap_err();
        assert_eq!(
            err,
            LinalgError::InsufficientNullspace {
                requested: 6,
                rank: 3,
                cols: 8,
                available: 5
            }
        );
    }

    #[test]
    fn rank_tol_must_be_in_open_unit_interval() {
        let a = filled(2, 3, 1);
        assert!(matches!(
            pseudoinverse(&a, 0.0),
            Err(LinalgError::RankTolerance(_))
        ));
        assert!(matches!(
            nullspace_basis(&a, 1.0, NullspaceCols::All),
            Err(LinalgError::RankTolerance(_))
        ));
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut a = filled(2, 2, 3);
        a[(1, 0)] = c(f64::INFINITY, 0.0);
        assert_eq!(
            svd(&a).unwrap_err(),
            LinalgError::NonFinite { row: 1, col: 0 }
        );
    }

    #[test]
    fn repeated_calls_are_bit_identical() {
        let a = filled(3, 50, 8);
        assert_eq!(svd(&a).unwrap(), svd(&a).unwrap());
        assert_eq!(
            pseudoinverse(&a, DEFAULT_RANK_TOL).unwrap(),
            pseudoinverse(&a, DEFAULT_RANK_TOL).unwrap()
        );
    }
}
