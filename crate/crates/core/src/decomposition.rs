//! Williamson normal form and Euler (Bloch-Messiah) factorisation.
//!
//! Both factorisations are unique only up to a symplectic-orthogonal gauge.
//! We fix symplectic eigenvalues ascending and squeezing parameters
//! descending with `r >= 0`, and otherwise compare reconstructions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::gaussian::{CovarianceMatrix, Ordering, SymplecticForm, SymplecticTransform};
use crate::linalg;

/// Symplectic eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct WilliamsonForm {
    pub s: SymplecticTransform,
    /// Symplectic eigenvalues, ascending.
    pub nu: Vec<f64>,
    /// Some pair of eigenvalues lies within [`DEGENERACY_TOL`]; `s` is then
    /// one valid choice among many.
    pub degenerate: bool,
}

impl WilliamsonForm {
    /// `diag(nu_1, nu_1, ..., nu_n, nu_n)`
    pub fn diagonal(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(2 * self.nu.len(), self.nu.iter().flat_map(|&v| [v, v])))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = self.s.matrix();
        s * self.diagonal() * s.transpose()
    }
}

fn interleaved_positive_definite(gamma: &CovarianceMatrix) -> Result<DMatrix<f64>> {
    let g = gamma.reorder(Ordering::Interleaved).into_matrix();
    let lmin = linalg::min_eigenvalue(&g);
    let scale = linalg::sym_norm2(&g);
    if !(lmin > 1e-14 * scale) {
        return Err(Error::NotPositiveDefinite(lmin));
    }
    Ok(g)
}

/// Positive eigenpairs of the Hermitian matrix `i g^{1/2} sigma g^{1/2}`,
/// ascending, together with `g^{1/2}`.
fn positive_spectrum(g: &DMatrix<f64>) -> (DMatrix<f64>, Vec<(f64, DVector<Complex64>)>) {
    let n = g.nrows() / 2;
    let root = linalg::sqrt_psd(g);
    let sigma = SymplecticForm::new(n, Ordering::Interleaved);
    let b = &root * sigma.matrix() * &root;
    let ib = b.map(|v| Complex64::new(0.0, v));
    let eig = SymmetricEigen::new(ib);
    let mut pairs: Vec<(f64, DVector<Complex64>)> =
        (0..2 * n).map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.truncate(n);
    pairs.reverse();
    (root, pairs)
}

/// Symplectic eigenvalues, ascending.
pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    let g = interleaved_positive_definite(gamma)?;
    Ok(positive_spectrum(&g).1.into_iter().map(|(v, _)| v).collect())
}

/// `gamma = S diag(nu) S^T` with `S` symplectic (interleaved ordering).
pub fn williamson(gamma: &CovarianceMatrix) -> Result<WilliamsonForm> {
    let g = interleaved_positive_definite(gamma)?;
    let n = g.nrows() / 2;
    let (root, pairs) = positive_spectrum(&g);

    // For i B v = nu v with v = x + i y: B (sqrt2 x) = nu (sqrt2 y) and
    // B (sqrt2 y) = -nu (sqrt2 x), so (sqrt2 y, sqrt2 x) block-diagonalises B.
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    let mut nu = Vec::with_capacity(n);
    let sqrt2 = std::f64::consts::SQRT_2;
    for (k, (value, v)) in pairs.iter().enumerate() {
        for i in 0..2 * n {
            o[(i, 2 * k)] = sqrt2 * v[i].im;
            o[(i, 2 * k + 1)] = sqrt2 * v[i].re;
        }
        nu.push(*value);
    }
    let inv_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(
        2 * n,
        nu.iter().flat_map(|&v| [1.0 / v.sqrt(), 1.0 / v.sqrt()]),
    ));
    let s = root * o * inv_sqrt;
    let degenerate = nu.windows(2).any(|w| (w[1] - w[0]).abs() < DEGENERACY_TOL);
    Ok(WilliamsonForm { s: SymplecticTransform::new_unchecked(s, Ordering::Interleaved), nu, degenerate })
}

#[derive(Debug, Clone)]
pub struct EulerForm {
    pub k: SymplecticTransform,
    pub l: SymplecticTransform,
    /// Squeezing parameters; mode `j` is squeezed by `diag(e^{-r_j}, e^{r_j})`.
    pub r: Vec<f64>,
}

impl EulerForm {
    pub fn squeezers(&self) -> SymplecticTransform {
        SymplecticTransform::squeezers(&self.r)
    }

    /// `(e^{-r_j}, e^{r_j})` per mode.
    pub fn squeezer_diagonals(&self) -> Vec<(f64, f64)> {
        self.r.iter().map(|&r| ((-r).exp(), r.exp())).collect()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.k.matrix() * self.squeezers().matrix() * self.l.matrix()
    }

    /// The same factorisation with every squeezer rotated by a quarter turn,
    /// so that `q` is anti-squeezed: `r_j -> -r_j`, with the rotations
    /// absorbed into `K` and `L`.
    pub fn with_antisqueezed_q(&self) -> EulerForm {
        let n = self.r.len();
        let mut rot = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            rot[(2 * j, 2 * j + 1)] = 1.0;
            rot[(2 * j + 1, 2 * j)] = -1.0;
        }
        EulerForm {
            k: SymplecticTransform::new_unchecked(self.k.matrix() * &rot, Ordering::Interleaved),
            l: SymplecticTransform::new_unchecked(rot.transpose() * self.l.matrix(), Ordering::Interleaved),
            r: self.r.iter().map(|r| -r).collect(),
        }
    }
}

/// Eigenvalues of `S S^T` closer to 1 than this (relative) are treated as
/// one unsqueezed cluster.
const UNSQUEEZED_TOL: f64 = 1e-9;

/// `S = K [+ S(r_k)] L` with `K`, `L` orthogonal symplectic and `r` descending.
pub fn euler_decompose(s: &SymplecticTransform) -> Result<EulerForm> {
    let m = s.reorder(Ordering::Interleaved).into_matrix();
    let err = crate::gaussian::symplectic_error(&m, Ordering::Interleaved);
    if err > crate::gaussian::SYMPLECTIC_TOL * linalg::max_abs(&m).powi(2).max(1.0) {
        return Err(Error::NotSymplectic(err));
    }
    let n = m.nrows() / 2;
    let sigma = SymplecticForm::new(n, Ordering::Interleaved).matrix().clone();
    let sst = linalg::symmetrize(&(&m * m.transpose()));
    let (vals, vecs) = linalg::sym_eigen(&sst);
    let top = vals[2 * n - 1].max(1.0);

    // p columns u with S S^T u = e^{2r} u; q columns sigma u (eigenvalue e^{-2r})
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    let mut r = Vec::with_capacity(n);
    let mut next = 0;
    for idx in (0..2 * n).rev() {
        if next == n || vals[idx] <= 1.0 + UNSQUEEZED_TOL * top {
            break;
        }
        let u = vecs.column(idx).into_owned();
        w.set_column(2 * next, &(&sigma * &u));
        w.set_column(2 * next + 1, &u);
        r.push(0.5 * vals[idx].ln());
        next += 1;
    }
    // unsqueezed cluster: sigma-invariant, so complete it symplectically
    let cluster: Vec<usize> = (0..2 * n).filter(|&i| (vals[i] - 1.0).abs() <= UNSQUEEZED_TOL * top).collect();
    for &i in &cluster {
        if next == n {
            break;
        }
        let mut u = vecs.column(i).into_owned();
        for _ in 0..2 {
            for c in 0..2 * next {
                let col = w.column(c).into_owned();
                u -= &col * col.dot(&u);
            }
        }
        let norm = u.norm();
        if norm < 1e-6 {
            continue;
        }
        u /= norm;
        w.set_column(2 * next, &(&sigma * &u));
        w.set_column(2 * next + 1, &u);
        r.push(0.5 * u.dot(&(&sst * &u)).max(1.0).ln());
        next += 1;
    }
    if next < n {
        return Err(Error::NumericalFailure(format!(
            "could not build a symplectic eigenbasis of S S^T ({next} of {n} modes)"
        )));
    }
    let squeeze_inv = SymplecticTransform::squeezers(&r.iter().map(|v| -v).collect::<Vec<_>>());
    let l = squeeze_inv.matrix() * w.transpose() * &m;
    let k = SymplecticTransform::new_unchecked(w, Ordering::Interleaved);
    let l = SymplecticTransform::new_unchecked(l, Ordering::Interleaved);
    Ok(EulerForm { k, l, r })
}

/// Numeric residuals of the printed Williamson/Euler fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureReport {
    pub s_symplectic: f64,
    pub k_symplectic: f64,
    pub l_symplectic: f64,
    pub k_orthogonal: f64,
    pub l_orthogonal: f64,
    /// `|K [+ S(r)] L - S|_F / |S|_F`
    pub euler_reconstruction: f64,
    /// `|S D S^T - gamma|_F / |gamma|_F` for the first example.
    pub williamson_reconstruction: f64,
}

impl FixtureReport {
    /// Fails with the first identity that does not hold.
    pub fn check(&self) -> Result<()> {
        let checks = [
            ("S sigma S^T = sigma", self.s_symplectic, 1e-10),
            ("K sigma K^T = sigma", self.k_symplectic, 1e-10),
            ("L sigma L^T = sigma", self.l_symplectic, 1e-10),
            ("K K^T = I", self.k_orthogonal, 1e-10),
            ("L L^T = I", self.l_orthogonal, 1e-10),
            ("K [+ S(r)] L = S", self.euler_reconstruction, 1e-9),
            ("S D S^T = gamma", self.williamson_reconstruction, 1e-9),
        ];
        for (name, value, tol) in checks {
            if !(value <= tol) {
                return Err(Error::FixtureMismatch(format!("{name}: residual {value:.3e} > {tol:.0e}")));
            }
        }
        Ok(())
    }
}

/// Check the printed `S`, `K`, `L` against each other, the squeezers with
/// `e^{-r} = tau`, and the target covariance `S D S^T`.
pub fn verify_fixture_matrices(
    s: &DMatrix<f64>,
    k: &DMatrix<f64>,
    l: &DMatrix<f64>,
    tau: f64,
    d: &DMatrix<f64>,
    gamma: &DMatrix<f64>,
) -> FixtureReport {
    let n = s.nrows() / 2;
    let sym = |m: &DMatrix<f64>| crate::gaussian::symplectic_error(m, Ordering::Interleaved);
    let orth = |m: &DMatrix<f64>| linalg::max_abs(&(m * m.transpose() - DMatrix::identity(2 * n, 2 * n)));
    let squeezers = SymplecticTransform::squeezers(&vec![-tau.ln(); n]);
    FixtureReport {
        s_symplectic: sym(s),
        k_symplectic: sym(k),
        l_symplectic: sym(l),
        k_orthogonal: orth(k),
        l_orthogonal: orth(l),
        euler_reconstruction: (k * squeezers.matrix() * l - s).norm() / s.norm(),
        williamson_reconstruction: (s * d * s.transpose() - gamma).norm() / gamma.norm(),
    }
}

/// [`verify_fixture_matrices`] on the printed matrices.
pub fn verify_paper_fixtures() -> FixtureReport {
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0]));
    verify_fixture_matrices(
        &fixtures::paper_s(),
        &fixtures::paper_k(),
        &fixtures::paper_l(),
        fixtures::star_tau(),
        &d,
        fixtures::example_matrix(1).matrix(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn example_one_williamson() {
        let g = fixtures::example_matrix(1);
        let nu = symplectic_eigenvalues(&g).unwrap();
        for (got, want) in nu.iter().zip(fixtures::EXAMPLE1_SYMPLECTIC_EIGENVALUES) {
            assert!((got - want).abs() < 1e-9, "{nu:?}");
        }
        let w = williamson(&g).unwrap();
        assert!(w.degenerate);
        assert!(rel(&w.reconstruct(), g.matrix()) < 1e-9);
        assert!(w.s.symplectic_error() < 1e-10);
    }

    #[test]
    fn scaled_identity_and_squeezed_vacuum() {
        let g = CovarianceMatrix::interleaved(DMatrix::identity(2, 2) * 5.0).unwrap();
        let w = williamson(&g).unwrap();
        assert!((w.nu[0] - 5.0).abs() < 1e-12);
        assert!(w.s.orthogonality_error() < 1e-12);

        let tau: f64 = 1.7;
        let g = CovarianceMatrix::interleaved(DMatrix::from_diagonal(&DVector::from_vec(vec![
            tau * tau,
            1.0 / (tau * tau),
        ])))
        .unwrap();
        assert!((symplectic_eigenvalues(&g).unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn not_positive_definite_is_rejected() {
        let g = CovarianceMatrix::interleaved(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]))).unwrap();
        assert!(matches!(williamson(&g), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn paper_symplectic_has_four_equal_squeezers() {
        let e = euler_decompose(&fixtures::paper_s_transform()).unwrap();
        let tau = fixtures::star_tau();
        for r in &e.r {
            assert!((r - tau.ln()).abs() < 1e-9, "{:?}", e.r);
        }
        assert!(rel(&e.reconstruct(), &fixtures::paper_s()) < 1e-9);
        let flipped = e.with_antisqueezed_q();
        for (a, b) in flipped.squeezer_diagonals() {
            assert!((a - tau).abs() < 1e-9 && (b - (17f64.sqrt() - 1.0) / 4.0).abs() < 1e-9);
        }
        assert!(rel(&flipped.reconstruct(), &fixtures::paper_s()) < 1e-9);
        for t in [&e.k, &e.l, &flipped.k, &flipped.l] {
            assert!(t.orthogonality_error() < 1e-10);
            assert!(t.symplectic_error() < 1e-10);
        }
    }

    #[test]
    fn passive_and_single_mode_cases() {
        let o = fixtures::paper_k();
        let e = euler_decompose(&SymplecticTransform::interleaved(o.clone()).unwrap()).unwrap();
        assert!(e.r.iter().all(|&r| r.abs() < 1e-8));
        assert!(rel(&(e.k.matrix() * e.l.matrix()), &o) < 1e-10);

        let s = SymplecticTransform::interleaved(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]))).unwrap();
        let e = euler_decompose(&s).unwrap();
        assert!((e.r[0] - 2f64.ln()).abs() < 1e-12);
        assert!(rel(&e.reconstruct(), s.matrix()) < 1e-12);
    }

    #[test]
    fn printed_fixtures_hold() {
        verify_paper_fixtures().check().unwrap();
    }

    #[test]
    fn perturbed_entry_breaks_symplecticity() {
        let mut e = fixtures::WilliamsonEntries::paper();
        e.s12 += 1e-3;
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0]));
        let report = verify_fixture_matrices(
            &e.matrix(),
            &fixtures::paper_k(),
            &fixtures::paper_l(),
            fixtures::star_tau(),
            &d,
            fixtures::example_matrix(1).matrix(),
        );
        let err = report.check().unwrap_err().to_string();
        assert!(err.contains("S sigma S^T"), "{err}");
    }
}
