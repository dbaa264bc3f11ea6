//! Gaussian separability as a min-slack semidefinite program, and the
//! three-way PPT/SDP classifier built on it.
//!
//! A state is separable across `A|B` iff some real symmetric `gamma_A`
//! satisfies `gamma_A + i sigma_A >= 0` and `gamma - (gamma_A + i sigma_B) >= 0`.
//! We minimise the uniform shift `t` that makes both hold; `t* <= 0` means
//! separable and `t* > 0` measures how far the state is from it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, Bipartition, CovarianceMatrix, Ordering, SymplecticForm};
use crate::linalg;
use crate::sdp::{BlockSdp, SdpOptions, SolveStatus};

/// Default separability slack tolerance.
pub const SEPARABILITY_TOL: f64 = 1e-6;

/// Both constraint blocks, affine in the entries of `gamma_A`.
#[derive(Debug, Clone)]
pub struct SeparabilityProblem {
    /// Modes reordered A first, interleaved.
    gamma: CovarianceMatrix,
    partition: Bipartition,
    n_a: usize,
    /// Constant parts of the two embedded blocks.
    f0: [DMatrix<f64>; 2],
    /// Coefficient blocks of each symmetric basis element of `gamma_A`.
    basis: Vec<[DMatrix<f64>; 2]>,
    /// `(row, col)` of each basis element inside `gamma_A`.
    index: Vec<(usize, usize)>,
}

impl SeparabilityProblem {
    pub fn n_variables(&self) -> usize {
        self.basis.len()
    }

    pub fn block_sizes(&self) -> [usize; 2] {
        [self.f0[0].nrows(), self.f0[1].nrows()]
    }

    pub fn partition(&self) -> &Bipartition {
        &self.partition
    }

    /// Constraint blocks evaluated at `gamma_a`, before any shift.
    pub fn blocks_at(&self, gamma_a: &DMatrix<f64>) -> [DMatrix<f64>; 2] {
        let mut out = self.f0.clone();
        for (coef, &(i, j)) in self.basis.iter().zip(&self.index) {
            let x = gamma_a[(i, j)];
            for (o, c) in out.iter_mut().zip(coef) {
                *o += c * x;
            }
        }
        out
    }

    /// Smallest `t` with both blocks `+ t I >= 0` at `gamma_a`.
    pub fn slack_at(&self, gamma_a: &DMatrix<f64>) -> f64 {
        self.blocks_at(gamma_a).iter().map(|b| -linalg::min_eigenvalue(b)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn gamma_a_from(&self, x: &[f64]) -> DMatrix<f64> {
        let d = 2 * self.n_a;
        let mut g = DMatrix::zeros(d, d);
        for (&v, &(i, j)) in x.iter().zip(&self.index) {
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
        g
    }

    fn as_sdp(&self) -> BlockSdp {
        let mut a: Vec<Vec<DMatrix<f64>>> = self.basis.iter().map(|f| vec![-&f[0], -&f[1]]).collect();
        let [s1, s2] = self.block_sizes();
        a.push(vec![-DMatrix::identity(s1, s1), -DMatrix::identity(s2, s2)]);
        let mut b = DVector::zeros(a.len());
        b[a.len() - 1] = -1.0;
        BlockSdp { c: self.f0.to_vec(), a, b }
    }
}

/// Assemble the min-slack problem for `gamma` across `part`.
pub fn build_problem(gamma: &CovarianceMatrix, part: &Bipartition) -> Result<SeparabilityProblem> {
    if part.n_modes() != gamma.n_modes() {
        return Err(Error::DimensionMismatch { expected: gamma.n_modes(), found: part.n_modes() });
    }
    let g = gamma.reorder(Ordering::Interleaved).permute_modes(&part.a_then_b());
    let n = g.n_modes();
    let n_a = part.modes_a().len();
    let (da, d) = (2 * n_a, 2 * n);

    let sigma_a = SymplecticForm::new(n_a, Ordering::Interleaved).matrix().clone();
    let mut sigma_b = DMatrix::zeros(d, d);
    sigma_b
        .view_mut((da, da), (d - da, d - da))
        .copy_from(SymplecticForm::new(n - n_a, Ordering::Interleaved).matrix());

    // gamma_A + i sigma_A, and gamma - gamma_A - i sigma_B
    let f0 =
        [linalg::embed_hermitian(&DMatrix::zeros(da, da), &sigma_a), linalg::embed_hermitian(g.matrix(), &(-&sigma_b))];
    let mut basis = Vec::new();
    let mut index = Vec::new();
    for i in 0..da {
        for j in i..da {
            let mut e = DMatrix::zeros(da, da);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            let mut e_full = DMatrix::zeros(d, d);
            e_full.view_mut((0, 0), (da, da)).copy_from(&e);
            basis.push([
                linalg::embed_hermitian(&e, &DMatrix::zeros(da, da)),
                linalg::embed_hermitian(&(-e_full), &DMatrix::zeros(d, d)),
            ]);
            index.push((i, j));
        }
    }
    Ok(SeparabilityProblem { gamma: g, partition: part.clone(), n_a, f0, basis, index })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// Certified upper bound on the optimal slack: the exact shift needed at
    /// the returned `gamma_a`.
    pub t_star: f64,
    /// Lower bound from the primal (dual-side) objective.
    pub t_lower: f64,
    pub gamma_a: DMatrix<f64>,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.t_star - self.t_lower
    }
}

/// Minimise the slack `t` over `gamma_A`.
pub fn solve_min_slack(problem: &SeparabilityProblem, opts: &SdpOptions) -> SdpSolution {
    let sdp = problem.as_sdp();
    // start from the reduced state of A, shifted to be strictly feasible
    let idx: Vec<usize> = (0..problem.n_a).collect();
    let reduced = problem.gamma.submatrix(&idx).into_matrix();
    let t0 = problem.slack_at(&reduced).max(0.0) + 1.0;
    let mut y0: Vec<f64> = problem.index.iter().map(|&(i, j)| reduced[(i, j)]).collect();
    y0.push(t0);

    let res = sdp.solve(DVector::from_vec(y0), opts);
    let p = problem.n_variables();
    let gamma_a = problem.gamma_a_from(&res.y.as_slice()[..p]);
    let t_star = problem.slack_at(&gamma_a);
    let mut status = res.status;
    let t_lower = -res.primal_objective;
    if status == SolveStatus::Optimal && t_star - t_lower > opts.accept_gap {
        status = SolveStatus::NumericalFailure;
    }
    SdpSolution { t_star, t_lower, gamma_a, iterations: res.iterations, status }
}

/// Separability decision with the certified slack.
///
/// Returns `Inconclusive` when the solver did not certify optimality or when
/// `tol` falls inside the `[t_lower, t_star]` interval.
pub fn is_separable(gamma: &CovarianceMatrix, part: &Bipartition, tol: f64) -> Result<(bool, SdpSolution)> {
    let sol = solve_min_slack(&build_problem(gamma, part)?, &SdpOptions::default());
    decide(sol, tol)
}

fn decide(sol: SdpSolution, tol: f64) -> Result<(bool, SdpSolution)> {
    let inconclusive = |sol: &SdpSolution| Error::Inconclusive {
        slack_lower: sol.t_lower,
        slack_upper: sol.t_star,
        tol,
        status: sol.status,
    };
    if sol.status != SolveStatus::Optimal {
        return Err(inconclusive(&sol));
    }
    if sol.t_star <= tol {
        Ok((true, sol))
    } else if sol.t_lower > tol {
        Ok((false, sol))
    } else {
        Err(inconclusive(&sol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementClass {
    Separable,
    BoundEntangled,
    FreeEntangled,
}

impl EntanglementClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EntanglementClass::Separable => "separable",
            EntanglementClass::BoundEntangled => "bound_entangled",
            EntanglementClass::FreeEntangled => "free_entangled",
        }
    }
}

impl std::fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementVerdict {
    pub class: EntanglementClass,
    pub ppt_margin: f64,
    /// `None` when the PPT test already failed and the SDP was skipped.
    pub separability_slack: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub tol_sep: f64,
    /// Absolute PPT tolerance; `None` uses `1e-9 * |gamma|_2`.
    pub tol_ppt: Option<f64>,
    pub sdp: SdpOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { tol_sep: SEPARABILITY_TOL, tol_ppt: None, sdp: SdpOptions::default() }
    }
}

/// PPT test first; the SDP only runs on PPT states.
pub fn classify(gamma: &CovarianceMatrix, part: &Bipartition, opts: &ClassifyOptions) -> Result<EntanglementVerdict> {
    let tol_ppt = opts.tol_ppt.unwrap_or_else(|| gamma.default_tol());
    let valid = gaussian::is_valid_covariance(gamma, tol_ppt);
    if !valid.holds {
        return Err(Error::InvalidInput(format!(
            "not a valid covariance matrix (uncertainty margin {:.3e})",
            valid.margin
        )));
    }
    let ppt = gaussian::is_ppt(gamma, part, tol_ppt)?;
    if !ppt.holds {
        return Ok(EntanglementVerdict {
            class: EntanglementClass::FreeEntangled,
            ppt_margin: ppt.margin,
            separability_slack: None,
            iterations: 0,
        });
    }
    let sol = solve_min_slack(&build_problem(gamma, part)?, &opts.sdp);
    let (separable, sol) = decide(sol, opts.tol_sep)?;
    Ok(EntanglementVerdict {
        class: if separable { EntanglementClass::Separable } else { EntanglementClass::BoundEntangled },
        ppt_margin: ppt.margin,
        separability_slack: Some(sol.t_star),
        iterations: sol.iterations,
    })
}
