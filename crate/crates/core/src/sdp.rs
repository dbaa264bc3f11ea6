//! Dense primal-dual interior-point solver for small block-diagonal SDPs.
//!
//! Solves the pair
//!
//! ```text
//!   primal:  min <C, X>   s.t. <A_i, X> = b_i,  X >= 0
//!   dual:    max b^T y    s.t. Z = C - sum_i y_i A_i >= 0
//! ```
//!
//! with Nesterov-Todd scaling, a dense Cholesky-factored Schur complement and
//! a Mehrotra-style centering heuristic. Every matrix is stored per block;
//! there is no sparsity exploitation, which is fine for blocks up to ~32x32.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Target absolute duality gap.
    pub gap_tol: f64,
    /// Gap accepted as optimal when the iteration stalls before `gap_tol`.
    pub accept_gap: f64,
    /// Relative primal/dual infeasibility tolerance.
    pub feas_tol: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { max_iter: 200, gap_tol: 1e-9, accept_gap: 1e-7, feas_tol: 1e-9, step_fraction: 0.98 }
    }
}

/// Block-diagonal SDP in the form above.
#[derive(Debug, Clone)]
pub struct BlockSdp {
    pub c: Vec<DMatrix<f64>>,
    /// `a[i][k]` is block `k` of constraint matrix `A_i`.
    pub a: Vec<Vec<DMatrix<f64>>>,
    pub b: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct SdpResult {
    pub y: DVector<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SdpResult {
    pub fn gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }
}

type Blocks = Vec<DMatrix<f64>>;

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

impl BlockSdp {
    pub fn n_constraints(&self) -> usize {
        self.a.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.c.iter().map(|m| m.nrows()).collect()
    }

    /// `C - sum_i y_i A_i`
    pub fn slack(&self, y: &DVector<f64>) -> Blocks {
        let mut z = self.c.clone();
        for (yi, ai) in y.iter().zip(&self.a) {
            for (zk, ak) in z.iter_mut().zip(ai) {
                *zk -= ak * *yi;
            }
        }
        z
    }

    fn apply_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| inner(ai, x)))
    }

    fn apply_at(&self, y: &DVector<f64>) -> Blocks {
        let mut out: Blocks = self.c.iter().map(|m| DMatrix::zeros(m.nrows(), m.ncols())).collect();
        for (yi, ai) in y.iter().zip(&self.a) {
            for (ok, ak) in out.iter_mut().zip(ai) {
                *ok += ak * *yi;
            }
        }
        out
    }

    /// Solve from a dual point `y0`; a strictly feasible `y0` keeps the dual
    /// residual at zero throughout. The primal start is `X = I / n`.
    pub fn solve(&self, y0: DVector<f64>, opts: &SdpOptions) -> SdpResult {
        let dims = self.block_sizes();
        let n_total: usize = dims.iter().sum();
        let mut y = y0;
        let mut z = self.slack(&y);
        if z.iter().any(|zk| Cholesky::new(zk.clone()).is_none()) {
            // infeasible start: shift into the interior, carry a dual residual
            let shift = 1.0 + z.iter().map(|zk| (-linalg::min_eigenvalue(zk)).max(0.0)).fold(0.0, f64::max);
            for zk in &mut z {
                for i in 0..zk.nrows() {
                    zk[(i, i)] += shift;
                }
            }
        }
        let mut x: Blocks = dims.iter().map(|&d| DMatrix::identity(d, d) / n_total as f64).collect();
        let b_norm = 1.0 + self.b.norm();
        let c_norm = 1.0 + frob(&self.c);

        let mut status = SolveStatus::MaxIter;
        let mut iterations = 0;
        for iter in 0..opts.max_iter {
            iterations = iter;
            let rp = &self.b - self.apply_a(&x);
            let at_y = self.apply_at(&y);
            let rd: Blocks = self.c.iter().zip(&z).zip(&at_y).map(|((ck, zk), ak)| ck - zk - ak).collect();
            let pobj = inner(&self.c, &x);
            let dobj = self.b.dot(&y);
            let gap = (pobj - dobj).abs();
            let pinf = rp.norm() / b_norm;
            let dinf = frob(&rd) / c_norm;
            if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
                status = SolveStatus::Optimal;
                break;
            }
            let mu = inner(&x, &z) / n_total as f64;

            let Some(step) = self.newton(&x, &z, &rp, &rd, mu, opts) else {
                status = self.stalled(gap, pinf, dinf, opts);
                break;
            };
            let (dx, dy, dz, ap, ad) = step;
            if ap.max(ad) < 1e-10 {
                status = self.stalled(gap, pinf, dinf, opts);
                break;
            }
            for (xk, dk) in x.iter_mut().zip(&dx) {
                *xk += dk * ap;
                *xk = linalg::symmetrize(xk);
            }
            y.axpy(ad, &dy, 1.0);
            for (zk, dk) in z.iter_mut().zip(&dz) {
                *zk += dk * ad;
                *zk = linalg::symmetrize(zk);
            }
            iterations = iter + 1;
        }
        SdpResult { primal_objective: inner(&self.c, &x), dual_objective: self.b.dot(&y), y, x, z, iterations, status }
    }

    fn stalled(&self, gap: f64, pinf: f64, dinf: f64, opts: &SdpOptions) -> SolveStatus {
        let feas = opts.feas_tol.max(1e-7);
        if gap <= opts.accept_gap && pinf <= feas && dinf <= feas {
            SolveStatus::Optimal
        } else {
            SolveStatus::NumericalFailure
        }
    }

    /// Predictor-corrector Newton step. Returns `None` on factorization
    /// breakdown.
    #[allow(clippy::type_complexity)]
    fn newton(
        &self,
        x: &[DMatrix<f64>],
        z: &[DMatrix<f64>],
        rp: &DVector<f64>,
        rd: &[DMatrix<f64>],
        mu: f64,
        opts: &SdpOptions,
    ) -> Option<(Blocks, DVector<f64>, Blocks, f64, f64)> {
        let n_total: usize = x.iter().map(|m| m.nrows()).sum();
        let chol_x: Vec<Cholesky<f64, Dyn>> = x.iter().map(|m| Cholesky::new(m.clone())).collect::<Option<_>>()?;
        let chol_z: Vec<Cholesky<f64, Dyn>> = z.iter().map(|m| Cholesky::new(m.clone())).collect::<Option<_>>()?;
        let w: Blocks = chol_x.iter().zip(&chol_z).map(|(cx, cz)| nt_scaling(cx, cz)).collect::<Option<_>>()?;

        let m = self.a.len();
        let wa: Vec<Blocks> =
            self.a.iter().map(|ai| ai.iter().zip(&w).map(|(ak, wk)| wk * ak * wk).collect()).collect();
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = inner(&self.a[j], &wa[i]);
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let schur_chol = Cholesky::new(schur)?;
        let w_rd_w: Blocks = rd.iter().zip(&w).map(|(r, wk)| wk * r * wk).collect();
        let a_wrdw = self.apply_a(&w_rd_w);

        let direction = |rc: &Blocks| -> (Blocks, DVector<f64>, Blocks) {
            let rhs = rp - self.apply_a(rc) + &a_wrdw;
            let dy = schur_chol.solve(&rhs);
            let at_dy = self.apply_at(&dy);
            let dz: Blocks = rd.iter().zip(&at_dy).map(|(r, a)| r - a).collect();
            let dx: Blocks =
                rc.iter().zip(&dz).zip(&w).map(|((rck, dzk), wk)| linalg::symmetrize(&(rck - wk * dzk * wk))).collect();
            (dx, dy, dz)
        };

        // predictor (affine scaling)
        let rc_aff: Blocks = x.iter().map(|xk| -xk).collect();
        let (dx_a, _, dz_a) = direction(&rc_aff);
        let ap_a = max_step(&chol_x, &dx_a).min(1.0);
        let ad_a = max_step(&chol_z, &dz_a).min(1.0);
        let mut mu_aff = 0.0;
        for k in 0..x.len() {
            let xa = &x[k] + &dx_a[k] * ap_a;
            let za = &z[k] + &dz_a[k] * ad_a;
            mu_aff += xa.dot(&za);
        }
        mu_aff /= n_total as f64;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

        // corrector: target sigma * mu on the central path
        let rc: Blocks = x.iter().zip(&chol_z).map(|(xk, cz)| cz.inverse() * (sigma * mu) - xk).collect();
        let (dx, dy, dz) = direction(&rc);
        let ap = (opts.step_fraction * max_step(&chol_x, &dx)).min(1.0);
        let ad = (opts.step_fraction * max_step(&chol_z, &dz)).min(1.0);
        Some((dx, dy, dz, ap, ad))
    }
}

/// `W = L_X V S^{-1} V^T L_X^T` from the SVD `L_Z^T L_X = U S V^T`; satisfies
/// `W Z W = X`.
fn nt_scaling(cx: &Cholesky<f64, Dyn>, cz: &Cholesky<f64, Dyn>) -> Option<DMatrix<f64>> {
    let lx = cx.l();
    let lz = cz.l();
    let svd = (lz.transpose() * &lx).svd(false, true);
    let v_t = svd.v_t?;
    let s = svd.singular_values;
    if s.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let g = &lx * v_t.transpose() * DMatrix::from_diagonal(&s.map(|v| 1.0 / v.sqrt()));
    Some(linalg::symmetrize(&(&g * g.transpose())))
}

/// Largest `alpha` with `M + alpha dM >= 0` for `M = L L^T`.
fn max_step(chol: &[Cholesky<f64, Dyn>], dm: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (c, d) in chol.iter().zip(dm) {
        let l = c.l();
        let Some(linv) = l.clone().try_inverse() else {
            return 0.0;
        };
        let t = &linv * d * linv.transpose();
        let lmin = linalg::min_eigenvalue(&t);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}
