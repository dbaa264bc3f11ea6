//! Covariance matrices, the symplectic form, and the basic tests built on them.
//!
//! Convention: hbar = 1 and the vacuum covariance is the identity, so a
//! thermal mode with mean occupation n has covariance (2n + 1) I. The
//! canonical quadrature ordering is [`Ordering::Interleaved`]
//! (q1, p1, ..., qn, pn); [`Ordering::Grouped`] (q1..qn, p1..pn) exists for
//! block-reduction analysis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Symmetry tolerance enforced on every covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplecticity tolerance on `|S sigma S^T - sigma|`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Relative PSD tolerance; the absolute default scales with `|gamma|_2`.
pub const PSD_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    #[default]
    Interleaved,
    Grouped,
}

impl Ordering {
    pub fn q_index(self, mode: usize, _n_modes: usize) -> usize {
        match self {
            Ordering::Interleaved => 2 * mode,
            Ordering::Grouped => mode,
        }
    }

    pub fn p_index(self, mode: usize, n_modes: usize) -> usize {
        match self {
            Ordering::Interleaved => 2 * mode + 1,
            Ordering::Grouped => n_modes + mode,
        }
    }
}

/// Permutation matrix `P` with `P x_interleaved = x_grouped`.
///
/// For four modes this is exactly the permutation used to split the
/// family matrices into two 4x4 blocks.
pub fn interleaved_to_grouped(n_modes: usize) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let mut p = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        p[(k, 2 * k)] = 1.0;
        p[(n_modes + k, 2 * k + 1)] = 1.0;
    }
    p
}

fn permutation(n_modes: usize, from: Ordering, to: Ordering) -> Option<DMatrix<f64>> {
    match (from, to) {
        (Ordering::Interleaved, Ordering::Grouped) => Some(interleaved_to_grouped(n_modes)),
        (Ordering::Grouped, Ordering::Interleaved) => Some(interleaved_to_grouped(n_modes).transpose()),
        _ => None,
    }
}

/// Conjugate by the exact permutation; entries are moved, never recombined.
fn permute(data: &DMatrix<f64>, n_modes: usize, from: Ordering, to: Ordering) -> DMatrix<f64> {
    let Some(p) = permutation(n_modes, from, to) else {
        return data.clone();
    };
    let dim = data.nrows();
    // index map: new index i takes old index src[i]
    let src: Vec<usize> = (0..dim).map(|i| (0..dim).find(|&j| p[(i, j)] == 1.0).expect("permutation row")).collect();
    DMatrix::from_fn(dim, dim, |i, j| data[(src[i], src[j])])
}

fn check_square_even(data: &DMatrix<f64>) -> Result<usize> {
    if data.nrows() != data.ncols() {
        return Err(Error::DimensionMismatch { expected: data.nrows(), found: data.ncols() });
    }
    if data.nrows() == 0 || !data.nrows().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "phase-space dimension must be a positive even number, got {}",
            data.nrows()
        )));
    }
    Ok(data.nrows() / 2)
}

/// The symplectic form sigma.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    ordering: Ordering,
    data: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize, ordering: Ordering) -> Self {
        assert!(n_modes >= 1, "symplectic form needs at least one mode");
        let dim = 2 * n_modes;
        let mut data = DMatrix::zeros(dim, dim);
        for k in 0..n_modes {
            let (q, p) = (ordering.q_index(k, n_modes), ordering.p_index(k, n_modes));
            data[(q, p)] = 1.0;
            data[(p, q)] = -1.0;
        }
        SymplecticForm { n_modes, ordering, data }
    }

    /// The partial-transpose form: `(-sigma_A) + sigma_B` with the sign flipped
    /// on every mode of side A.
    pub fn partial_transpose_form(n_modes: usize, ordering: Ordering, part: &Bipartition) -> Self {
        let mut form = Self::new(n_modes, ordering);
        for &k in part.modes_a() {
            let (q, p) = (ordering.q_index(k, n_modes), ordering.p_index(k, n_modes));
            form.data[(q, p)] = -1.0;
            form.data[(p, q)] = 1.0;
        }
        form
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }
}

/// sigma in the requested ordering.
pub fn symplectic_form(n_modes: usize, ordering: Ordering) -> SymplecticForm {
    SymplecticForm::new(n_modes, ordering)
}

/// Split of the modes into two nonempty disjoint parties (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    modes_a: Vec<usize>,
    modes_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut modes_a: Vec<usize>, mut modes_b: Vec<usize>, n_modes: usize) -> Result<Self> {
        modes_a.sort_unstable();
        modes_b.sort_unstable();
        if modes_a.is_empty() || modes_b.is_empty() {
            return Err(Error::InvalidBipartition("both parties must be nonempty".into()));
        }
        let mut all: Vec<usize> = modes_a.iter().chain(&modes_b).copied().collect();
        all.sort_unstable();
        if all != (0..n_modes).collect::<Vec<_>>() {
            return Err(Error::InvalidBipartition(format!(
                "parties {modes_a:?} | {modes_b:?} must be disjoint and cover all {n_modes} modes"
            )));
        }
        Ok(Bipartition { modes_a, modes_b })
    }

    /// First `n_a` modes to A, the rest to B.
    pub fn split(n_modes: usize, n_a: usize) -> Result<Self> {
        Self::new((0..n_a).collect(), (n_a..n_modes).collect(), n_modes)
    }

    /// Build from 1-based mode labels as used in files and on the command line.
    pub fn from_one_based(a: &[usize], b: &[usize], n_modes: usize) -> Result<Self> {
        let shift = |v: &[usize]| -> Result<Vec<usize>> {
            v.iter()
                .map(|&m| m.checked_sub(1).ok_or_else(|| Error::InvalidBipartition("mode labels start at 1".into())))
                .collect()
        };
        Self::new(shift(a)?, shift(b)?, n_modes)
    }

    pub fn modes_a(&self) -> &[usize] {
        &self.modes_a
    }

    pub fn modes_b(&self) -> &[usize] {
        &self.modes_b
    }

    pub fn n_modes(&self) -> usize {
        self.modes_a.len() + self.modes_b.len()
    }

    /// Mode order placing A first, then B.
    pub fn a_then_b(&self) -> Vec<usize> {
        self.modes_a.iter().chain(&self.modes_b).copied().collect()
    }
}

/// Result of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub holds: bool,
    /// Smallest eigenvalue of the Hermitian matrix under test.
    pub margin: f64,
}

/// Covariance matrix of a zero-mean Gaussian state.
///
/// Construction only enforces symmetry; physical validity is a separate
/// test so that invalid intermediates can be represented and diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    ordering: Ordering,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(data: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let n_modes = check_square_even(&data)?;
        let asym = linalg::asymmetry(&data);
        if asym > SYMMETRY_TOL * (1.0 + linalg::max_abs(&data)) {
            return Err(Error::NonSymmetric { asymmetry: asym });
        }
        Ok(CovarianceMatrix { n_modes, ordering, data: linalg::symmetrize(&data) })
    }

    pub fn interleaved(data: DMatrix<f64>) -> Result<Self> {
        Self::new(data, Ordering::Interleaved)
    }

    pub fn from_rows(rows: &[Vec<f64>], ordering: Ordering) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("covariance rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), ordering)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        CovarianceMatrix { n_modes, ordering: Ordering::Interleaved, data: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn sigma(&self) -> SymplecticForm {
        SymplecticForm::new(self.n_modes, self.ordering)
    }

    /// Default absolute PSD tolerance: `1e-9 * |gamma|_2`.
    pub fn default_tol(&self) -> f64 {
        PSD_REL_TOL * linalg::sym_norm2(&self.data).max(1.0)
    }

    pub fn reorder(&self, to: Ordering) -> Self {
        CovarianceMatrix {
            n_modes: self.n_modes,
            ordering: to,
            data: permute(&self.data, self.n_modes, self.ordering, to),
        }
    }

    /// Restrict to a subset of modes (in the given order).
    pub fn submatrix(&self, modes: &[usize]) -> Self {
        let idx = mode_indices(modes, self.n_modes, self.ordering);
        let data = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.data[(idx[i], idx[j])]);
        let sub = CovarianceMatrix { n_modes: modes.len(), ordering: Ordering::Interleaved, data };
        // mode_indices lists (q, p) pairs per mode, i.e. interleaved
        match self.ordering {
            Ordering::Interleaved => sub,
            Ordering::Grouped => sub.reorder(Ordering::Grouped),
        }
    }

    /// Reorder modes so that `order[k]` becomes mode `k`.
    pub fn permute_modes(&self, order: &[usize]) -> Self {
        let idx = mode_indices(order, self.n_modes, self.ordering);
        let data = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.data[(idx[i], idx[j])]);
        let out = CovarianceMatrix { n_modes: order.len(), ordering: Ordering::Interleaved, data };
        match self.ordering {
            Ordering::Interleaved => out,
            Ordering::Grouped => out.reorder(Ordering::Grouped),
        }
    }
}

fn mode_indices(modes: &[usize], n_modes: usize, ordering: Ordering) -> Vec<usize> {
    modes.iter().flat_map(|&k| [ordering.q_index(k, n_modes), ordering.p_index(k, n_modes)]).collect()
}

/// Real symplectic transformation with `S sigma S^T = sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    n_modes: usize,
    ordering: Ordering,
    data: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Checked constructor; rejects matrices violating `S sigma S^T = sigma`
    /// beyond [`SYMPLECTIC_TOL`] (scaled by `|S|^2` for strongly squeezing S).
    pub fn new(data: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let n_modes = check_square_even(&data)?;
        let err = symplectic_error(&data, ordering);
        let scale = linalg::max_abs(&data).powi(2).max(1.0);
        if err > SYMPLECTIC_TOL * scale {
            return Err(Error::NotSymplectic(err));
        }
        Ok(SymplecticTransform { n_modes, ordering, data })
    }

    pub fn interleaved(data: DMatrix<f64>) -> Result<Self> {
        Self::new(data, Ordering::Interleaved)
    }

    pub(crate) fn new_unchecked(data: DMatrix<f64>, ordering: Ordering) -> Self {
        let n_modes = data.nrows() / 2;
        SymplecticTransform { n_modes, ordering, data }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::new_unchecked(DMatrix::identity(2 * n_modes, 2 * n_modes), Ordering::Interleaved)
    }

    /// Single-mode squeezers `diag(e^-r, e^r)` on every mode.
    pub fn squeezers(r: &[f64]) -> Self {
        let mut d = DMatrix::zeros(2 * r.len(), 2 * r.len());
        for (k, &rk) in r.iter().enumerate() {
            d[(2 * k, 2 * k)] = (-rk).exp();
            d[(2 * k + 1, 2 * k + 1)] = rk.exp();
        }
        Self::new_unchecked(d, Ordering::Interleaved)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn symplectic_error(&self) -> f64 {
        symplectic_error(&self.data, self.ordering)
    }

    /// `|S S^T - I|` as the largest absolute entry.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.data.nrows();
        linalg::max_abs(&(&self.data * self.data.transpose() - DMatrix::identity(n, n)))
    }

    pub fn compose(&self, after: &SymplecticTransform) -> Result<Self> {
        if self.ordering != after.ordering {
            return Err(Error::OrderingMismatch);
        }
        if self.n_modes != after.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: after.n_modes });
        }
        Ok(Self::new_unchecked(&after.data * &self.data, self.ordering))
    }

    pub fn transpose(&self) -> Self {
        Self::new_unchecked(self.data.transpose(), self.ordering)
    }

    pub fn reorder(&self, to: Ordering) -> Self {
        SymplecticTransform {
            n_modes: self.n_modes,
            ordering: to,
            data: permute(&self.data, self.n_modes, self.ordering, to),
        }
    }
}

pub fn symplectic_error(s: &DMatrix<f64>, ordering: Ordering) -> f64 {
    let sigma = SymplecticForm::new(s.nrows() / 2, ordering);
    linalg::max_abs(&(s * sigma.matrix() * s.transpose() - sigma.matrix()))
}

/// Smallest eigenvalue of `gamma + i form`, via the real embedding.
fn hermitian_margin(gamma: &DMatrix<f64>, form: &DMatrix<f64>) -> f64 {
    linalg::min_eigenvalue(&linalg::embed_hermitian(gamma, form))
}

/// Uncertainty-principle test `gamma + i sigma >= 0`.
///
/// Evaluated on the real embedding `[[gamma, sigma], [sigma^T, gamma]]`;
/// `margin` is its smallest eigenvalue.
pub fn is_valid_covariance(gamma: &CovarianceMatrix, tol: f64) -> PsdCheck {
    let margin = hermitian_margin(gamma.matrix(), gamma.sigma().matrix());
    PsdCheck { holds: margin >= -tol, margin }
}

/// Momentum sign flip on every mode of party B.
pub fn partial_transpose(gamma: &CovarianceMatrix, part: &Bipartition) -> CovarianceMatrix {
    let n = gamma.n_modes();
    let mut out = gamma.clone();
    for &k in part.modes_b() {
        let p = gamma.ordering().p_index(k, n);
        for j in 0..2 * n {
            out.data[(p, j)] = -out.data[(p, j)];
        }
        for j in 0..2 * n {
            out.data[(j, p)] = -out.data[(j, p)];
        }
    }
    out
}

/// Positive-partial-transpose test.
pub fn is_ppt(gamma: &CovarianceMatrix, part: &Bipartition, tol: f64) -> Result<PsdCheck> {
    if part.n_modes() != gamma.n_modes() {
        return Err(Error::DimensionMismatch { expected: gamma.n_modes(), found: part.n_modes() });
    }
    Ok(is_valid_covariance(&partial_transpose(gamma, part), tol))
}

/// `S gamma S^T`.
pub fn apply_symplectic(s: &SymplecticTransform, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if s.n_modes() != gamma.n_modes() {
        return Err(Error::DimensionMismatch { expected: gamma.n_modes(), found: s.n_modes() });
    }
    if s.ordering() != gamma.ordering() {
        return Err(Error::OrderingMismatch);
    }
    let data = s.matrix() * gamma.matrix() * s.matrix().transpose();
    Ok(CovarianceMatrix { n_modes: gamma.n_modes, ordering: gamma.ordering, data: linalg::symmetrize(&data) })
}

/// Product of thermal modes, `(2 n_k + 1) I` on mode k.
pub fn thermal_state(occupations: &[f64]) -> Result<CovarianceMatrix> {
    if occupations.is_empty() {
        return Err(Error::InvalidInput("thermal state needs at least one mode".into()));
    }
    let mut data = DMatrix::zeros(2 * occupations.len(), 2 * occupations.len());
    for (k, &nbar) in occupations.iter().enumerate() {
        if !(nbar >= 0.0) {
            return Err(Error::NegativeOccupation(nbar, k));
        }
        data[(2 * k, 2 * k)] = 2.0 * nbar + 1.0;
        data[(2 * k + 1, 2 * k + 1)] = 2.0 * nbar + 1.0;
    }
    CovarianceMatrix::interleaved(data)
}

/// Block-diagonal assembly; modes of `b` are appended after those of `a`.
pub fn direct_sum(a: &CovarianceMatrix, b: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if a.ordering() != b.ordering() {
        return Err(Error::OrderingMismatch);
    }
    let interleaved =
        linalg::block_diag(a.reorder(Ordering::Interleaved).matrix(), b.reorder(Ordering::Interleaved).matrix());
    Ok(CovarianceMatrix::interleaved(interleaved)?.reorder(a.ordering()))
}
