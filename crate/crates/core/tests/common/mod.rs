//! Random generators and single-case property checks shared by the property
//! suites, the family test and the acceptance runner. Every check takes a
//! seed so failures reproduce exactly.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use gaussbound::bound_family::{self, BoundFamilyParams};
use gaussbound::circuit::{self, ComplexUnitary};
use gaussbound::decomposition;
use gaussbound::gaussian::{self, Bipartition, CovarianceMatrix, Ordering, SymplecticTransform};
use gaussbound::linalg;
use gaussbound::separability::{self, ClassifyOptions, SEPARABILITY_TOL};
use gaussbound::sweep;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Admissible parameters for the bound entangled family.
pub fn family_draw(rng: &mut impl Rng) -> BoundFamilyParams {
    let (b1, b2) = loop {
        let b1: f64 = rng.gen_range(-3.0..3.0);
        let b2: f64 = rng.gen_range(-3.0..3.0);
        if (b1 - b2).abs() > 0.05 && (b1 * b2 + 1.0).abs() > 0.05 {
            break (b1, b2);
        }
    };
    let mut alpha = [0.0; 8];
    for a in alpha.iter_mut().take(4) {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        *a = sign * rng.gen_range(0.2..2.0);
    }
    for a in alpha.iter_mut().skip(4) {
        *a = rng.gen_range(0.2..3.0);
    }
    BoundFamilyParams::new([b1, b2], alpha)
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexUnitary {
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    ComplexUnitary::new(m.qr().q()).expect("QR factor is unitary")
}

pub fn random_passive(n: usize, rng: &mut impl Rng) -> SymplecticTransform {
    circuit::unitary_to_passive(&random_unitary(n, rng))
}

/// `K S(r) L` with `|r_j| <= max_r`.
pub fn random_symplectic(n: usize, max_r: f64, rng: &mut impl Rng) -> SymplecticTransform {
    let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-max_r..=max_r)).collect();
    let m =
        random_passive(n, rng).matrix() * SymplecticTransform::squeezers(&r).matrix() * random_passive(n, rng).matrix();
    SymplecticTransform::interleaved(m).expect("product of symplectics")
}

pub fn williamson_diagonal(nu: &[f64]) -> CovarianceMatrix {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(2 * nu.len(), nu.iter().flat_map(|&v| [v, v])));
    CovarianceMatrix::interleaved(d).expect("diagonal")
}

/// `S diag(nu) S^T` with `nu_j` in `[1, max_nu]`.
pub fn random_state(n: usize, max_nu: f64, max_r: f64, rng: &mut impl Rng) -> (CovarianceMatrix, Vec<f64>) {
    let mut nu: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..=max_nu)).collect();
    let s = random_symplectic(n, max_r, rng);
    let g = gaussian::apply_symplectic(&s, &williamson_diagonal(&nu)).expect("dimensions agree");
    nu.sort_by(f64::total_cmp);
    (g, nu)
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn symplectic_preserves_sigma(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let s = random_symplectic(n, 1.0, &mut r);
    let scale = linalg::max_abs(s.matrix()).powi(2).max(1.0);
    ensure!(s.symplectic_error() <= 1e-10 * scale, "|S sigma S^T - sigma| = {:.3e}", s.symplectic_error());
    let (g, _) = random_state(n, 3.0, 0.8, &mut r);
    let out = gaussian::apply_symplectic(&s, &g).map_err(|e| e.to_string())?;
    let check = gaussian::is_valid_covariance(&out, out.default_tol());
    ensure!(check.holds, "S gamma S^T invalid, margin {:.3e}", check.margin);
    Ok(())
}

pub fn ppt_involution(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(2..=4);
    let (g, _) = random_state(n, 3.0, 1.0, &mut r);
    let part = Bipartition::split(n, r.gen_range(1..n)).unwrap();
    let once = gaussian::partial_transpose(&g, &part);
    ensure!(linalg::asymmetry(once.matrix()) <= linalg::asymmetry(g.matrix()), "partial transpose broke symmetry");
    let twice = gaussian::partial_transpose(&once, &part);
    ensure!(twice.matrix() == g.matrix(), "partial transpose is not an involution");
    Ok(())
}

pub fn product_state_is_ppt(seed: u64) -> Check {
    let mut r = rng(seed);
    let (na, nb) = (r.gen_range(1..=2), r.gen_range(1..=2));
    let (a, _) = random_state(na, 3.0, 1.0, &mut r);
    let (b, _) = random_state(nb, 3.0, 1.0, &mut r);
    let g = gaussian::direct_sum(&a, &b).map_err(|e| e.to_string())?;
    let part = Bipartition::split(na + nb, na).unwrap();
    let ppt = gaussian::is_ppt(&g, &part, g.default_tol()).map_err(|e| e.to_string())?;
    ensure!(ppt.holds, "product state fails PPT, margin {:.3e}", ppt.margin);
    Ok(())
}

/// For one mode against one mode, PPT and the separability program agree.
/// Draws whose PPT margin is within `1e-6` of zero are skipped.
pub fn two_mode_ppt_matches_sdp(seed: u64) -> Check {
    let mut r = rng(seed);
    let (g, _) = random_state(2, 2.5, 0.8, &mut r);
    let part = Bipartition::split(2, 1).unwrap();
    let ppt = gaussian::is_ppt(&g, &part, g.default_tol()).map_err(|e| e.to_string())?;
    if ppt.margin.abs() < 1e-6 {
        return Ok(());
    }
    let (sep, sol) = separability::is_separable(&g, &part, SEPARABILITY_TOL).map_err(|e| e.to_string())?;
    ensure!(sep == ppt.holds, "PPT {} (margin {:.3e}) but SDP slack {:.3e}", ppt.holds, ppt.margin, sol.t_star);
    Ok(())
}

fn local_symplectic(rng: &mut impl Rng) -> SymplecticTransform {
    let a = random_symplectic(2, 0.5, rng);
    let b = random_symplectic(2, 0.5, rng);
    SymplecticTransform::interleaved(linalg::block_diag(a.matrix(), b.matrix())).expect("direct sum of symplectics")
}

/// Classification is unchanged by `S_A + S_B`. Half the cases are family
/// members, half preparation-circuit outputs away from the phase boundaries.
pub fn local_symplectic_invariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let g = if seed.is_multiple_of(2) {
        bound_family::construct(&family_draw(&mut r)).map_err(|e| e.to_string())?
    } else {
        let kappa = r.gen_range(1.0..9.0);
        let tau = [1.0, 1.05, 1.8][r.gen_range(0..3)];
        circuit::fig1_output(kappa, tau).map_err(|e| e.to_string())?
    };
    let part = Bipartition::split(4, 2).unwrap();
    let opts = ClassifyOptions::default();
    let before = separability::classify(&g, &part, &opts).map_err(|e| e.to_string())?;
    let moved = gaussian::apply_symplectic(&local_symplectic(&mut r), &g).map_err(|e| e.to_string())?;
    let after = separability::classify(&moved, &part, &opts).map_err(|e| e.to_string())?;
    ensure!(before.class == after.class, "{} became {}", before.class, after.class);
    Ok(())
}

pub fn williamson_round_trip(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let (g, nu0) = random_state(n, 4.0, 1.0, &mut r);
    let w = decomposition::williamson(&g).map_err(|e| e.to_string())?;
    ensure!(
        rel(&w.reconstruct(), g.matrix()) <= 1e-9,
        "reconstruction error {:.3e}",
        rel(&w.reconstruct(), g.matrix())
    );
    let worst = w.nu.iter().zip(&nu0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure!(worst <= 1e-9 * nu0[n - 1], "nu {:?} vs {:?}", w.nu, nu0);
    ensure!(w.nu.iter().all(|&v| v >= 1.0 - 1e-9), "nu below 1: {:?}", w.nu);
    Ok(())
}

pub fn pure_state_spectrum(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let g = gaussian::apply_symplectic(&random_symplectic(n, 1.0, &mut r), &CovarianceMatrix::vacuum(n))
        .map_err(|e| e.to_string())?;
    let nu = decomposition::symplectic_eigenvalues(&g).map_err(|e| e.to_string())?;
    ensure!(nu.iter().all(|v| (v - 1.0).abs() <= 1e-9), "pure state nu {nu:?}");
    Ok(())
}

pub fn symplectic_eigenvalue_invariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let (g, _) = random_state(n, 4.0, 0.7, &mut r);
    let moved = gaussian::apply_symplectic(&random_symplectic(n, 0.7, &mut r), &g).map_err(|e| e.to_string())?;
    let a = decomposition::symplectic_eigenvalues(&g).map_err(|e| e.to_string())?;
    let b = decomposition::symplectic_eigenvalues(&moved).map_err(|e| e.to_string())?;
    let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure!(worst <= 1e-9 * a[n - 1], "{a:?} vs {b:?}");
    Ok(())
}

pub fn euler_round_trip(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let s = random_symplectic(n, 1.0, &mut r);
    let e = decomposition::euler_decompose(&s).map_err(|e| e.to_string())?;
    for (name, t) in [("K", &e.k), ("L", &e.l)] {
        ensure!(t.orthogonality_error() <= 1e-10, "{name} not orthogonal: {:.3e}", t.orthogonality_error());
        ensure!(t.symplectic_error() <= 1e-10, "{name} not symplectic: {:.3e}", t.symplectic_error());
    }
    ensure!(rel(&e.reconstruct(), s.matrix()) <= 1e-9, "reconstruction {:.3e}", rel(&e.reconstruct(), s.matrix()));
    ensure!(
        e.r.windows(2).all(|w| w[0] >= w[1]) && e.r.iter().all(|&x| x >= 0.0),
        "r not descending/non-negative: {:?}",
        e.r
    );
    let mut expected: Vec<f64> = e.r.iter().flat_map(|&x| [(2.0 * x).exp(), (-2.0 * x).exp()]).collect();
    expected.sort_by(f64::total_cmp);
    let actual = linalg::sym_eigenvalues(&(s.matrix() * s.matrix().transpose()));
    let worst = actual.iter().zip(&expected).map(|(a, b)| (a - b).abs() / b.max(1.0)).fold(0.0, f64::max);
    ensure!(worst <= 1e-9, "spectrum of S S^T vs e^(+-2r): {actual:?} vs {expected:?}");
    Ok(())
}

pub fn compile_loop(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let o = random_passive(n, &mut r);
    let u = circuit::passive_to_unitary(&o).map_err(|e| e.to_string())?;
    let c = circuit::decompose_unitary(&u);
    ensure!(c.beam_splitter_count() <= n * (n - 1) / 2, "{} beam splitters for {n} modes", c.beam_splitter_count());
    let back = circuit::elements_to_unitary(&c).map_err(|e| e.to_string())?;
    let err = linalg::max_abs_c(&(back.matrix() - u.matrix()));
    ensure!(err <= 1e-8, "recomposition error {err:.3e}");
    Ok(())
}

pub fn passive_preserves_photon_number(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let c = circuit::decompose_unitary(&random_unitary(n, &mut r));
    let (g, _) = random_state(n, 3.0, 1.0, &mut r);
    let out = circuit::simulate(&c, &g).map_err(|e| e.to_string())?;
    let (a, b) = (g.matrix().trace(), out.matrix().trace());
    ensure!((a - b).abs() <= 1e-9 * a, "trace {a} -> {b}");
    let valid = gaussian::is_valid_covariance(&out, out.default_tol());
    ensure!(valid.holds, "output invalid, margin {:.3e}", valid.margin);
    Ok(())
}

/// Adding classical noise to a separable state does not raise the slack.
pub fn noise_does_not_create_entanglement(seed: u64) -> Check {
    let mut r = rng(seed);
    let kappa = r.gen_range(1.0..9.0);
    let g = circuit::fig1_output(kappa, 1.0).map_err(|e| e.to_string())?;
    let x = DMatrix::from_fn(8, 8, |_, _| r.gen_range(-0.3..0.3));
    let noisy =
        CovarianceMatrix::new(g.matrix() + &x * x.transpose(), Ordering::Interleaved).map_err(|e| e.to_string())?;
    let part = Bipartition::split(4, 2).unwrap();
    let t = |g: &CovarianceMatrix| -> Result<f64, String> {
        let p = separability::build_problem(g, &part).map_err(|e| e.to_string())?;
        Ok(separability::solve_min_slack(&p, &Default::default()).t_star)
    };
    let (t0, t1) = (t(&g)?, t(&noisy)?);
    ensure!(t0 <= SEPARABILITY_TOL, "base state not separable: {t0:.3e}");
    ensure!(t1 <= t0 + 1e-6, "noise raised the slack {t0:.3e} -> {t1:.3e}");
    Ok(())
}

/// `tau` and `1 / tau` classify identically on a 10 x 10 subgrid.
pub fn tau_inversion_symmetry() -> Check {
    let opts = ClassifyOptions::default();
    for &kappa in &sweep::linspace(1.0, 17.0, 10) {
        for &tau in &sweep::linspace(1.0, 2.0, 10) {
            let a = sweep::classify_point(kappa, tau, &opts).map_err(|e| e.to_string())?;
            let b = sweep::classify_point(kappa, 1.0 / tau, &opts).map_err(|e| e.to_string())?;
            ensure!(a.class == b.class, "kappa {kappa}, tau {tau}: {} vs {}", a.class_label(), b.class_label());
        }
    }
    Ok(())
}

/// Valid, PPT, not separable and minimal.
pub fn family_member_is_bound_entangled(params: &BoundFamilyParams) -> Result<f64, String> {
    let g = bound_family::construct(params).map_err(|e| e.to_string())?;
    let part = Bipartition::split(4, 2).unwrap();
    let tol = g.default_tol();
    ensure!(gaussian::is_valid_covariance(&g, tol).holds, "invalid");
    ensure!(gaussian::is_ppt(&g, &part, tol).map_err(|e| e.to_string())?.holds, "not PPT");
    let (sep, sol) = separability::is_separable(&g, &part, SEPARABILITY_TOL).map_err(|e| e.to_string())?;
    ensure!(!sep, "separable, slack {:.3e}", sol.t_star);
    let report = bound_family::is_minimal_ppt(&g, &part, bound_family::RANK_TOL).map_err(|e| e.to_string())?;
    ensure!(report.minimal, "not minimal, ranks {:?}", (report.rank_sigma, report.rank_tilde, report.rank_stacked));
    Ok(sol.t_star)
}

/// Run `check` over `count` consecutive seeds from `base`.
pub fn over_seeds(base: u64, count: u64, check: impl Fn(u64) -> Check) -> Check {
    (base..base + count).try_for_each(|s| check(s).map_err(|e| format!("seed {s}: {e}")))
}
