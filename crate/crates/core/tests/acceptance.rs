//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always appear; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use gaussbound::bound_family;
use gaussbound::circuit::{self, Fig1Options};
use gaussbound::decomposition;
use gaussbound::fixtures::{self, SupplementFactors};
use gaussbound::linalg;
use gaussbound::separability::{ClassifyOptions, EntanglementClass};
use gaussbound::sweep::{self, BoundaryKind, BoundaryOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn le(what: &str, value: f64, tol: f64) -> Result<(), String> {
    if value <= tol {
        Ok(())
    } else {
        Err(format!("{what} = {value:.3e} > {tol:.0e}"))
    }
}

fn examples() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        let g = bound_family::construct(&fixtures::example_params(k)).map_err(|e| e.to_string())?;
        let err = linalg::max_abs(&(g.matrix() - fixtures::example_matrix(k).matrix()));
        le(&format!("example {k} max entry error"), err, 1e-12)?;
        worst = worst.max(err);
    }
    Ok(format!("max entry error {worst:.1e}"))
}

fn family_draws() -> Outcome {
    let mut rng = common::rng(0x7e01);
    let mut min_slack = f64::INFINITY;
    for k in 0..1000 {
        let p = common::family_draw(&mut rng);
        let t = common::family_member_is_bound_entangled(&p).map_err(|e| format!("draw {k}: {e}"))?;
        min_slack = min_slack.min(t);
    }
    Ok(format!("1000 draws, 0 counterexamples, smallest slack {min_slack:.3e}"))
}

fn williamson() -> Outcome {
    let g = fixtures::example_matrix(1);
    let w = decomposition::williamson(&g).map_err(|e| e.to_string())?;
    let spectrum =
        w.nu.iter().zip(fixtures::EXAMPLE1_SYMPLECTIC_EIGENVALUES).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    le("symplectic eigenvalue error", spectrum, 1e-9)?;
    let recon = (w.reconstruct() - g.matrix()).norm();
    le("|S D S^T - gamma|_F", recon, 1e-9)?;
    Ok(format!("nu error {spectrum:.1e}, reconstruction {recon:.1e}"))
}

fn euler() -> Outcome {
    let e = decomposition::euler_decompose(&fixtures::paper_s_transform())
        .map_err(|e| e.to_string())?
        .with_antisqueezed_q();
    let tau = fixtures::star_tau();
    let diag =
        e.squeezer_diagonals().iter().map(|&(a, b)| (a - tau).abs().max((b - 1.0 / tau).abs())).fold(0.0, f64::max);
    le("squeezer diagonal error", diag, 1e-9)?;
    for (name, t) in [("K", &e.k), ("L", &e.l)] {
        le(&format!("{name} orthogonality"), t.orthogonality_error(), 1e-10)?;
        le(&format!("{name} symplecticity"), t.symplectic_error(), 1e-10)?;
    }
    let printed = decomposition::verify_paper_fixtures();
    le("printed S - K S(r) L", printed.euler_reconstruction, 1e-9)?;
    Ok(format!("diagonal error {diag:.1e}, printed factorisation residual {:.1e}", printed.euler_reconstruction))
}

fn supplement() -> Outcome {
    let f = SupplementFactors::paper();
    let unitarity = f.named().iter().map(|(_, m)| linalg::unitarity_error(m)).fold(0.0, f64::max);
    le("factor unitarity", unitarity, 1e-10)?;
    let l = linalg::max_abs_c(&(f.l_product() - fixtures::supplement_l_unitary()));
    let k = linalg::max_abs_c(&(f.k_product() - fixtures::supplement_k_unitary()));
    le("A-product vs L-matrix", l, 1e-10)?;
    le("B-product vs K-matrix", k, 1e-10)?;
    Ok(format!("L {l:.1e}, K {k:.1e}, unitarity {unitarity:.1e}"))
}

fn fig1() -> Outcome {
    let tau = fixtures::star_tau();
    let out = circuit::fig1_output(3.0, tau).map_err(|e| e.to_string())?;
    let err = linalg::max_abs(&(out.matrix() - fixtures::example_matrix(1).matrix()));
    le("output vs example 1", err, 1e-8)?;
    let trimmed = Fig1Options { include_a0: false, include_input_phase: false, ..Fig1Options::default() };
    let (c, input) = circuit::build_fig1_circuit_with(3.0, tau, &trimmed).map_err(|e| e.to_string())?;
    let without = circuit::simulate(&c, &input).map_err(|e| e.to_string())?;
    let diff = linalg::max_abs(&(without.matrix() - out.matrix()));
    le("change without A0 and input phase", diff, 1e-10)?;
    Ok(format!("output error {err:.1e}, irrelevant-component change {diff:.1e}"))
}

fn unsqueezed_row() -> Outcome {
    let opts = ClassifyOptions::default();
    for i in 0..11 {
        let kappa = 1.0 + 2.0 * i as f64;
        let cell = sweep::classify_point(kappa, 1.0, &opts).map_err(|e| e.to_string())?;
        if cell.class != Some(EntanglementClass::Separable) {
            return Err(format!("kappa {kappa}: {}", cell.class_label()));
        }
    }
    Ok("kappa = 1, 3, ..., 21 all separable".into())
}

fn star_point() -> Outcome {
    let b =
        sweep::find_boundary(3.0, BoundaryKind::BoundToFree, &BoundaryOptions::default()).map_err(|e| e.to_string())?;
    let star = fixtures::star_tau();
    let miss = (star - b.tau_hi).max(b.tau_lo - star).max(0.0);
    le("distance from bracket", miss, 1e-3)?;
    Ok(format!("bracket [{:.6}, {:.6}]", b.tau_lo, b.tau_hi))
}

fn asymptote() -> Outcome {
    let b = sweep::find_boundary(101.0, BoundaryKind::BoundToFree, &BoundaryOptions::default())
        .map_err(|e| e.to_string())?;
    le("|tau*(kappa = 101) - 1.5770|", (b.midpoint() - 1.5770).abs(), 0.02)?;
    let est = sweep::estimate_asymptote(404.0, 1e-5).map_err(|e| e.to_string())?;
    le("|estimate - 1.577|", (est.value - 1.577).abs(), 0.005)?;
    le("estimate error bar", est.error, 0.005)?;
    Ok(format!("tau*(101) = {:.5}, estimate {:.5} +- {:.1e}", b.midpoint(), est.value, est.error))
}

fn property_suites() -> Outcome {
    common::over_seeds(1_000, 200, common::symplectic_preserves_sigma)
        .map_err(|e| format!("sigma preservation, {e}"))?;
    common::over_seeds(2_000, 200, common::ppt_involution).map_err(|e| format!("PPT involution, {e}"))?;
    common::over_seeds(3_000, 200, common::two_mode_ppt_matches_sdp).map_err(|e| format!("PPT/SDP agreement, {e}"))?;
    common::over_seeds(4_000, 50, common::local_symplectic_invariance).map_err(|e| format!("local invariance, {e}"))?;
    common::tau_inversion_symmetry().map_err(|e| format!("tau symmetry, {e}"))?;
    Ok("sigma preservation 200, PPT involution 200, PPT/SDP agreement 200, local invariance 50, tau symmetry 10x10"
        .into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("example reconstruction", Duration::from_secs(1), examples),
        ("family property suite", Duration::from_secs(120), family_draws),
        ("williamson spectrum", Duration::MAX, williamson),
        ("euler squeezers", Duration::MAX, euler),
        ("supplement identities", Duration::MAX, supplement),
        ("circuit reproduction", Duration::MAX, fig1),
        ("no-squeezing row", Duration::from_secs(30), unsqueezed_row),
        ("star point on boundary", Duration::MAX, star_point),
        ("asymptote", Duration::from_secs(300), asymptote),
        ("property suites", Duration::MAX, property_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        let (tag, msg) = match outcome {
            Ok(msg) => ("PASS", msg),
            Err(msg) => {
                failed += 1;
                ("FAIL", msg)
            }
        };
        println!("{tag} {:>2} {name} ({elapsed:.2?}): {msg}", i + 1);
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
