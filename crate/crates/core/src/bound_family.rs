//! The ten-parameter family of 2x2 bound entangled covariance matrices.
//!
//! A family matrix couples only `q1-q3`, `p1-p4`, `q2-q4` and `p2-p3`
//! (1-based modes), so it commutes with the sign pattern
//! `diag(1, 1, -1, -1, 1, -1, -1, 1)`. That symmetry makes
//! `gamma + i sigma` and `gamma - i sigma~` unitarily similar: every valid
//! family matrix is automatically PPT across `{1,2} | {3,4}`.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{Bipartition, CovarianceMatrix, Ordering, SymplecticForm};
use crate::linalg;

/// Minimum separation enforced on the open constraints.
pub const SEPARATION_TOL: f64 = 1e-9;
/// Below this separation a parameter set is flagged as near-degenerate.
pub const WARN_TOL: f64 = 1e-4;

const PATTERN_TOL: f64 = 1e-12;

/// The scalars `beta1, beta2, alpha1 .. alpha8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundFamilyParams {
    pub beta: [f64; 2],
    pub alpha: [f64; 8],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParamViolation {
    NonFinite,
    Beta1EqualsBeta2,
    BetaProductMinusOne,
    /// `alpha_k` (k in 1..=4) is zero.
    AlphaZero(usize),
    /// `alpha_k` (k in 5..=8) is not strictly positive.
    AlphaNonPositive(usize),
}

impl BoundFamilyParams {
    pub fn new(beta: [f64; 2], alpha: [f64; 8]) -> Self {
        BoundFamilyParams { beta, alpha }
    }

    fn violations_at(&self, delta: f64) -> Vec<ParamViolation> {
        let [b1, b2] = self.beta;
        let a = &self.alpha;
        if !b1.is_finite() || !b2.is_finite() || a.iter().any(|v| !v.is_finite()) {
            return vec![ParamViolation::NonFinite];
        }
        let mut out = Vec::new();
        if (b1 - b2).abs() <= delta {
            out.push(ParamViolation::Beta1EqualsBeta2);
        }
        if (b1 * b2 + 1.0).abs() <= delta {
            out.push(ParamViolation::BetaProductMinusOne);
        }
        for (k, &v) in a[..4].iter().enumerate() {
            if v.abs() <= delta {
                out.push(ParamViolation::AlphaZero(k + 1));
            }
        }
        for (k, &v) in a[4..].iter().enumerate() {
            if v <= 0.0 || v <= delta {
                out.push(ParamViolation::AlphaNonPositive(k + 5));
            }
        }
        out
    }
}

/// Constraint violations; empty iff the parameters are admissible.
pub fn validate_params(params: &BoundFamilyParams) -> Vec<ParamViolation> {
    params.violations_at(SEPARATION_TOL)
}

/// Constraints that hold but sit closer than [`WARN_TOL`] to degeneracy, where
/// entries scaling like `1/(beta1 - beta2)` become ill-conditioned.
pub fn near_degenerate(params: &BoundFamilyParams) -> Vec<ParamViolation> {
    let hard = validate_params(params);
    params.violations_at(WARN_TOL).into_iter().filter(|v| !hard.contains(v)).collect()
}

/// Build the family covariance matrix (interleaved ordering).
pub fn construct(params: &BoundFamilyParams) -> Result<CovarianceMatrix> {
    let violations = validate_params(params);
    if !violations.is_empty() {
        return Err(Error::InvalidParams(violations));
    }
    let [b1, b2] = params.beta;
    let [a1, a2, a3, a4, a5, a6, a7, a8] = params.alpha;
    let db = b1 - b2;
    let mut g = DMatrix::zeros(8, 8);
    g[(0, 0)] = a5 + (1.0 + b1 * b1) * a1 * a1;
    g[(1, 1)] = (1.0 + a8) / (a5 * a8);
    g[(2, 2)] = a6 + (1.0 + b1 * b1) * a2 * a2;
    g[(3, 3)] = (1.0 + a7) / (a6 * a7);
    g[(4, 4)] = db * db * a2 * a2 * a3 * a3 * (1.0 + a7) / a6 + (1.0 + b2 * b2) * a3 * a3;
    g[(5, 5)] = a6 / (a7 * db * db * a2 * a2 * a3 * a3);
    g[(6, 6)] = db * db * a1 * a1 * a4 * a4 * (1.0 + a8) / a5 + (1.0 + b2 * b2) * a4 * a4;
    g[(7, 7)] = a5 / (a8 * db * db * a1 * a1 * a4 * a4);
    let couplings = [
        ((0, 4), (1.0 + b1 * b2) * a1 * a3),
        ((1, 7), 1.0 / (db * a1 * a4 * a8)),
        ((2, 6), (1.0 + b1 * b2) * a2 * a4),
        ((3, 5), 1.0 / (-db * a2 * a3 * a7)),
    ];
    for ((i, j), v) in couplings {
        g[(i, j)] = v;
        g[(j, i)] = v;
    }
    CovarianceMatrix::interleaved(g)
}

/// Inverse of the momentum block, written out from the parameters. Only used
/// to cross-check [`block_reduce`]: `gamma2'^{-1}` must equal this matrix and
/// `gamma1' - gamma2'^{-1}` must equal `V V^T` with `V` from [`rank_two_factor`].
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn momentum_block_inverse(params: &BoundFamilyParams) -> Matrix4<f64> {
    let [b1, b2] = params.beta;
    let [a1, a2, a3, a4, a5, a6, a7, a8] = params.alpha;
    let d14 = (b2 - b1) * a1 * a4;
    let d23 = (b1 - b2) * a2 * a3;
    let d33 = d23 * d23 * (1.0 + a7) / a6;
    let d44 = d14 * d14 * (1.0 + a8) / a5;
    Matrix4::new(
        a5, 0.0, 0.0, d14, //
        0.0, a6, d23, 0.0, //
        0.0, d23, d33, 0.0, //
        d14, 0.0, 0.0, d44,
    )
}

#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn rank_two_factor(params: &BoundFamilyParams) -> nalgebra::Matrix4x2<f64> {
    let [b1, b2] = params.beta;
    let [a1, a2, a3, a4, ..] = params.alpha;
    nalgebra::Matrix4x2::new(
        b1 * a1,
        a1, //
        a2,
        -b1 * a2, //
        b2 * a3,
        a3, //
        a4,
        -b2 * a4,
    )
}

/// The sign pattern commuting with every family matrix.
pub fn sign_symmetry() -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0]))
}

pub fn commutes_with_sign_symmetry(gamma: &CovarianceMatrix) -> bool {
    if gamma.n_modes() != 4 {
        return false;
    }
    let s = sign_symmetry();
    let g = gamma.reorder(Ordering::Interleaved);
    linalg::max_abs(&(&s * g.matrix() - g.matrix() * &s)) <= PATTERN_TOL
}

fn in_pattern(i: usize, j: usize) -> bool {
    let (a, b) = (i.min(j), i.max(j));
    a == b || matches!((a, b), (0, 4) | (1, 7) | (2, 6) | (3, 5))
}

/// The two 4x4 blocks of `P gamma P^T` (position block, momentum block).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockReduction {
    pub position: Matrix4<f64>,
    pub momentum: Matrix4<f64>,
}

/// Certificate that the reduction proves the PPT covariance property:
/// `gamma2' > 0` and `gamma1' - gamma2'^{-1} >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCheck {
    pub momentum_min_eigenvalue: f64,
    pub schur_min_eigenvalue: f64,
    pub schur_rank: usize,
}

impl BlockReduction {
    pub fn check(&self, tol: f64) -> Result<BlockCheck> {
        let mom = DMatrix::from_iterator(4, 4, self.momentum.iter().copied());
        let momentum_min_eigenvalue = linalg::min_eigenvalue(&mom);
        let inv = self.momentum.try_inverse().ok_or(Error::SingularGamma)?;
        let schur = DMatrix::from_iterator(4, 4, (self.position - inv).iter().copied());
        let schur_min_eigenvalue = linalg::min_eigenvalue(&schur);
        let (schur_rank, _) = linalg::numerical_rank(&schur, tol);
        Ok(BlockCheck { momentum_min_eigenvalue, schur_min_eigenvalue, schur_rank })
    }
}

impl BlockCheck {
    pub fn proves_ppt_covariance(&self, tol: f64) -> bool {
        self.momentum_min_eigenvalue > 0.0 && self.schur_min_eigenvalue >= -tol
    }
}

/// Split a family-pattern matrix into its position and momentum blocks.
pub fn block_reduce(gamma: &CovarianceMatrix) -> Result<BlockReduction> {
    if gamma.n_modes() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: gamma.n_modes() });
    }
    let g = gamma.reorder(Ordering::Interleaved);
    let m = g.matrix();
    for i in 0..8 {
        for j in 0..8 {
            if !in_pattern(i, j) && m[(i, j)].abs() > PATTERN_TOL {
                return Err(Error::PatternMismatch { row: i, col: j, value: m[(i, j)] });
            }
        }
    }
    let grouped = g.reorder(Ordering::Grouped);
    let gm = grouped.matrix();
    Ok(BlockReduction {
        position: Matrix4::from_fn(|i, j| gm[(i, j)]),
        momentum: Matrix4::from_fn(|i, j| gm[(4 + i, 4 + j)]),
    })
}

/// Ranks and singular values behind the minimality test.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// rank of `gamma + sigma gamma^{-1} sigma`
    pub rank_sigma: usize,
    /// rank of `gamma + sigma~ gamma^{-1} sigma~`
    pub rank_tilde: usize,
    /// rank of the two matrices stacked side by side
    pub rank_stacked: usize,
    pub singular_values_sigma: Vec<f64>,
    pub singular_values_tilde: Vec<f64>,
    pub singular_values_stacked: Vec<f64>,
}

impl MinimalityReport {
    /// Ratio of the smallest retained to the largest discarded singular value
    /// of the stacked matrix (infinite when nothing was discarded).
    pub fn stacked_gap(&self) -> f64 {
        gap(&self.singular_values_stacked, self.rank_stacked)
    }
}

fn gap(s: &[f64], rank: usize) -> f64 {
    match (rank.checked_sub(1).and_then(|r| s.get(r)), s.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        _ => f64::INFINITY,
    }
}

/// Default relative rank threshold.
pub const RANK_TOL: f64 = 1e-8;

/// Sufficient minimality condition for a PPT covariance matrix: the column
/// spaces of `gamma + sigma gamma^{-1} sigma` and of its partial-transpose
/// counterpart intersect trivially, detected by rank additivity.
///
/// Only the sufficient direction is decided; a `false` here does not prove
/// the matrix is non-minimal.
pub fn is_minimal_ppt(gamma: &CovarianceMatrix, part: &Bipartition, tol_rank: f64) -> Result<MinimalityReport> {
    let n = gamma.n_modes();
    let g = gamma.matrix();
    let ev = linalg::sym_eigenvalues(g);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo <= hi * 1e-14 {
        return Err(Error::SingularGamma);
    }
    let inv = g.clone().try_inverse().ok_or(Error::SingularGamma)?;
    let sigma = SymplecticForm::new(n, gamma.ordering());
    let tilde = SymplecticForm::partial_transpose_form(n, gamma.ordering(), part);
    let m1 = linalg::symmetrize(&(g + sigma.matrix() * &inv * sigma.matrix()));
    let m2 = linalg::symmetrize(&(g + tilde.matrix() * &inv * tilde.matrix()));
    let mut stacked = DMatrix::zeros(2 * n, 4 * n);
    stacked.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&m1);
    stacked.view_mut((0, 2 * n), (2 * n, 2 * n)).copy_from(&m2);

    // Ranks are judged against one common scale so that an all-zero block
    // (pure states) is rank 0 rather than rank of its rounding noise.
    let scale = linalg::singular_values(&stacked).first().copied().unwrap_or(0.0);
    let rank_at = |s: &[f64]| s.iter().filter(|&&v| v > tol_rank * scale && scale > 0.0).count();
    let s1 = linalg::singular_values(&m1);
    let s2 = linalg::singular_values(&m2);
    let s3 = linalg::singular_values(&stacked);
    let (r1, r2, r3) = (rank_at(&s1), rank_at(&s2), rank_at(&s3));
    Ok(MinimalityReport {
        minimal: r3 == r1 + r2,
        rank_sigma: r1,
        rank_tilde: r2,
        rank_stacked: r3,
        singular_values_sigma: s1,
        singular_values_tilde: s2,
        singular_values_stacked: s3,
    })
}
