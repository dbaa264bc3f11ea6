//! End-to-end check of every published identity: the four family examples,
//! their classification and minimality, the symplectic decompositions, the
//! interferometer factorisations, the preparation circuit and the
//! entanglement map landmarks.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bound_family::{self, RANK_TOL};
use crate::circuit::{self, Fig1Options};
use crate::decomposition;
use crate::error::{Error, Result};
use crate::fixtures::{self, SupplementFactors};
use crate::gaussian::{Bipartition, CovarianceMatrix, SymplecticTransform};
use crate::io;
use crate::linalg;
use crate::separability::{self, ClassifyOptions, EntanglementClass, SEPARABILITY_TOL};
use crate::sweep::{self, BoundaryKind, BoundaryOptions};

const EMBEDDED: [&str; 4] = [
    include_str!("../fixtures/example1.json"),
    include_str!("../fixtures/example2.json"),
    include_str!("../fixtures/example3.json"),
    include_str!("../fixtures/example4.json"),
];

/// Printed example `k` as shipped with the crate (Matrix JSON).
pub fn embedded_fixture(k: usize) -> &'static str {
    EMBEDDED[k - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub format_version: u32,
    pub passed: usize,
    pub total: usize,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    /// 0 when everything passed, 1 on any failure, 2 when the worst outcome
    /// is inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.suites.iter().map(|s| s.status).max() {
            Some(CheckStatus::Fail) => 1,
            Some(CheckStatus::Inconclusive) => 2,
            _ => 0,
        }
    }

    /// First check that did not pass, failures before inconclusive ones.
    pub fn first_problem(&self) -> Option<&CheckResult> {
        let checks = || self.suites.iter().flat_map(|s| s.checks.iter());
        checks()
            .find(|c| c.status == CheckStatus::Fail)
            .or_else(|| checks().find(|c| c.status == CheckStatus::Inconclusive))
    }

    pub fn to_json(&self) -> String {
        io::to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!("[{}] {}\n", label(s.status), s.name));
            for c in &s.checks {
                out.push_str(&format!("    [{}] {}: {}\n", label(c.status), c.name, c.detail));
            }
        }
        out.push_str(&format!("{}/{} suites pass\n", self.passed, self.total));
        if let Some(c) = self.first_problem() {
            out.push_str(&format!("first problem: {}\n", c.name));
        }
        out
    }
}

fn label(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "PASS",
        CheckStatus::Inconclusive => "INCONCLUSIVE",
        CheckStatus::Fail => "FAIL",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Read `example{1..4}.json` from here instead of the embedded copies.
    pub fixtures_dir: Option<PathBuf>,
    pub tol_sep: f64,
    pub tol_ppt: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { fixtures_dir: None, tol_sep: SEPARABILITY_TOL, tol_ppt: None }
    }
}

fn check(name: impl Into<String>, outcome: Result<String>) -> CheckResult {
    let name = name.into();
    match outcome {
        Ok(detail) => CheckResult { name, status: CheckStatus::Pass, detail },
        Err(e @ Error::Inconclusive { .. }) => {
            CheckResult { name, status: CheckStatus::Inconclusive, detail: e.to_string() }
        }
        Err(e) => CheckResult { name, status: CheckStatus::Fail, detail: e.to_string() },
    }
}

fn mismatch(msg: String) -> Error {
    Error::FixtureMismatch(msg)
}

fn within(what: &str, value: f64, tol: f64) -> Result<String> {
    if value <= tol {
        Ok(format!("{what} = {value:.2e} <= {tol:.0e}"))
    } else {
        Err(mismatch(format!("{what} = {value:.3e} exceeds {tol:.0e}")))
    }
}

fn load_example(k: usize, dir: Option<&Path>) -> Result<CovarianceMatrix> {
    match dir {
        Some(d) => io::read_covariance(&d.join(format!("example{k}.json"))),
        None => io::covariance_from_json(embedded_fixture(k)),
    }
}

fn two_by_two() -> Bipartition {
    Bipartition::split(4, 2).expect("2|2 split")
}

fn classify_opts(opts: &VerifyOptions) -> ClassifyOptions {
    ClassifyOptions { tol_sep: opts.tol_sep, tol_ppt: opts.tol_ppt, ..ClassifyOptions::default() }
}

fn suite_examples(opts: &VerifyOptions) -> Vec<CheckResult> {
    (1..=4)
        .map(|k| {
            let outcome = (|| {
                let printed = load_example(k, opts.fixtures_dir.as_deref())?;
                let built = bound_family::construct(&fixtures::example_params(k))?;
                within("max entry error", linalg::max_abs(&(built.matrix() - printed.matrix())), 1e-12)
            })();
            check(format!("example-{k} reconstruction"), outcome)
        })
        .collect()
}

fn suite_classification(opts: &VerifyOptions) -> Vec<CheckResult> {
    let copts = classify_opts(opts);
    (1..=4)
        .map(|k| {
            let outcome = (|| {
                let g = bound_family::construct(&fixtures::example_params(k))?;
                let v = separability::classify(&g, &two_by_two(), &copts)?;
                if v.class != EntanglementClass::BoundEntangled {
                    return Err(mismatch(format!("classified {}", v.class)));
                }
                Ok(format!(
                    "bound entangled, PPT margin {:.2e}, slack {:.6}",
                    v.ppt_margin,
                    v.separability_slack.unwrap_or(f64::NAN)
                ))
            })();
            check(format!("example-{k} classification"), outcome)
        })
        .collect()
}

fn suite_minimality() -> Vec<CheckResult> {
    (1..=4)
        .map(|k| {
            let outcome = (|| {
                let g = bound_family::construct(&fixtures::example_params(k))?;
                let r = bound_family::is_minimal_ppt(&g, &two_by_two(), RANK_TOL)?;
                let ranks = (r.rank_sigma, r.rank_tilde, r.rank_stacked);
                if !r.minimal || (k == 1 && ranks != (4, 4, 8)) {
                    return Err(mismatch(format!("ranks {ranks:?}")));
                }
                Ok(format!("ranks {ranks:?}"))
            })();
            check(format!("example-{k} minimality"), outcome)
        })
        .collect()
}

fn suite_williamson() -> Vec<CheckResult> {
    let g = fixtures::example_matrix(1);
    let spectrum = (|| {
        let nu = decomposition::symplectic_eigenvalues(&g)?;
        let err =
            nu.iter().zip(fixtures::EXAMPLE1_SYMPLECTIC_EIGENVALUES).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        within("symplectic eigenvalue error vs [1, 1, 3, 3]", err, 1e-9)
    })();
    let recon = (|| {
        let w = decomposition::williamson(&g)?;
        let rel = (w.reconstruct() - g.matrix()).norm() / g.matrix().norm();
        within("relative |S D S^T - gamma|_F", rel, 1e-9)?;
        within("|S sigma S^T - sigma|", w.s.symplectic_error(), 1e-10)
    })();
    vec![check("example-1 symplectic eigenvalues", spectrum), check("williamson reconstruction", recon)]
}

fn suite_euler() -> Vec<CheckResult> {
    let squeezers = (|| {
        let e = decomposition::euler_decompose(&fixtures::paper_s_transform())?.with_antisqueezed_q();
        let tau = fixtures::star_tau();
        let err =
            e.squeezer_diagonals().iter().map(|&(a, b)| (a - tau).abs().max((b - 1.0 / tau).abs())).fold(0.0, f64::max);
        within("squeezer diagonal error vs ((sqrt17+1)/4, (sqrt17-1)/4)", err, 1e-9)?;
        let worst = [&e.k, &e.l].iter().map(|t| t.orthogonality_error().max(t.symplectic_error())).fold(0.0, f64::max);
        within("K, L orthogonal-symplectic residual", worst, 1e-10)?;
        let rel = (e.reconstruct() - fixtures::paper_s()).norm() / fixtures::paper_s().norm();
        within("relative |K S(r) L - S|_F", rel, 1e-9)
    })();
    let printed = (|| {
        let r = decomposition::verify_paper_fixtures();
        r.check()?;
        Ok(format!(
            "Euler residual {:.2e}, Williamson residual {:.2e}",
            r.euler_reconstruction, r.williamson_reconstruction
        ))
    })();
    vec![check("euler squeezers", squeezers), check("printed S, K, L identities", printed)]
}

fn suite_supplement() -> Vec<CheckResult> {
    let f = SupplementFactors::paper();
    let worst = f.named().iter().map(|(_, m)| linalg::unitarity_error(m)).fold(0.0, f64::max);
    let unitary = within("worst factor |U^H U - I|", worst, 1e-10);
    let l = within(
        "|A4 A3 A2 A1 A0 diag(1,-1,1,1) - U_L|",
        linalg::max_abs_c(&(f.l_product() - fixtures::supplement_l_unitary())),
        1e-10,
    );
    let k = within(
        "|B4 B3 B2 B1 diag(1,1,i,-i) - U_K|",
        linalg::max_abs_c(&(f.k_product() - fixtures::supplement_k_unitary())),
        1e-10,
    );
    let quadrature = (|| {
        let ul = circuit::passive_to_unitary(&SymplecticTransform::interleaved(fixtures::paper_l())?)?;
        within("|U(L) - U_L|", linalg::max_abs_c(&(ul.matrix() - fixtures::supplement_l_unitary())), 1e-10)
    })();
    vec![
        check("factor unitarity", unitary),
        check("L factorisation", l),
        check("K factorisation", k),
        check("L quadrature to mode form", quadrature),
    ]
}

fn suite_circuit() -> Vec<CheckResult> {
    let tau = fixtures::star_tau();
    let reproduce = (|| {
        let out = circuit::fig1_output(3.0, tau)?;
        within(
            "max |gamma_out - example 1|",
            linalg::max_abs(&(out.matrix() - fixtures::example_matrix(1).matrix())),
            1e-8,
        )
    })();
    let irrelevant = (|| {
        let full = circuit::fig1_output(3.0, tau)?;
        let trimmed = Fig1Options { include_a0: false, include_input_phase: false, ..Fig1Options::default() };
        let (c, input) = circuit::build_fig1_circuit_with(3.0, tau, &trimmed)?;
        let out = circuit::simulate(&c, &input)?;
        within("output change without A0 and input phase", linalg::max_abs(&(out.matrix() - full.matrix())), 1e-10)
    })();
    vec![check("preparation circuit output", reproduce), check("irrelevant components", irrelevant)]
}

fn suite_unsqueezed_row(opts: &VerifyOptions) -> Vec<CheckResult> {
    let copts = classify_opts(opts);
    (0..11)
        .map(|i| {
            let kappa = 1.0 + 2.0 * i as f64;
            let outcome = (|| {
                let cell = sweep::classify_point(kappa, 1.0, &copts)?;
                match cell.class {
                    Some(EntanglementClass::Separable) => {
                        Ok(format!("separable, slack {:.2e}", cell.slack.unwrap_or(0.0)))
                    }
                    Some(c) => Err(mismatch(format!("classified {c}"))),
                    None => {
                        // re-run to surface the solver bracket in the report
                        let g = circuit::fig1_output(kappa, 1.0)?;
                        separability::is_separable(&g, &two_by_two(), opts.tol_sep)?;
                        Err(Error::NumericalFailure("inconsistent separability outcome".into()))
                    }
                }
            })();
            check(format!("kappa = {kappa}, tau = 1"), outcome)
        })
        .collect()
}

fn suite_star_point(opts: &VerifyOptions) -> Vec<CheckResult> {
    let outcome = (|| {
        let bopts = BoundaryOptions { classify: classify_opts(opts), ..BoundaryOptions::default() };
        let b = sweep::find_boundary(3.0, BoundaryKind::BoundToFree, &bopts)?;
        let star = fixtures::star_tau();
        if (b.tau_lo - 1e-3..=b.tau_hi + 1e-3).contains(&star) {
            Ok(format!("bracket [{:.6}, {:.6}] around {star:.6}", b.tau_lo, b.tau_hi))
        } else {
            Err(mismatch(format!("bracket [{:.6}, {:.6}] misses {star:.6}", b.tau_lo, b.tau_hi)))
        }
    })();
    vec![check("bound/free boundary at kappa = 3", outcome)]
}

/// Run all nine suites.
pub fn verify_paper(opts: &VerifyOptions) -> VerifyReport {
    let suites: Vec<(&'static str, Vec<CheckResult>)> = vec![
        ("example reconstruction", suite_examples(opts)),
        ("ppt and sdp classification", suite_classification(opts)),
        ("minimality ranks", suite_minimality()),
        ("williamson spectrum", suite_williamson()),
        ("euler squeezers", suite_euler()),
        ("supplement identities", suite_supplement()),
        ("preparation circuit", suite_circuit()),
        ("unsqueezed row separable", suite_unsqueezed_row(opts)),
        ("star point on boundary", suite_star_point(opts)),
    ];
    let suites: Vec<SuiteResult> = suites
        .into_iter()
        .map(|(name, checks)| {
            let status = checks.iter().map(|c| c.status).max().unwrap_or(CheckStatus::Pass);
            SuiteResult { name, status, checks }
        })
        .collect();
    VerifyReport {
        format_version: io::FORMAT_VERSION,
        passed: suites.iter().filter(|s| s.status == CheckStatus::Pass).count(),
        total: suites.len(),
        suites,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes_everything() {
        let r = verify_paper(&VerifyOptions::default());
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert_eq!((r.passed, r.total), (9, 9));
    }

    #[test]
    fn embedded_fixtures_match_printed_matrices() {
        for k in 1..=4 {
            let g = io::covariance_from_json(embedded_fixture(k)).unwrap();
            assert_eq!(g.matrix(), fixtures::example_matrix(k).matrix());
        }
    }

    #[test]
    fn corrupted_fixture_is_named() {
        let dir = tempfile::tempdir().unwrap();
        for k in 1..=4 {
            let mut text = embedded_fixture(k).to_string();
            if k == 2 {
                text = text.replacen("7", "8", 1);
            }
            std::fs::write(dir.path().join(format!("example{k}.json")), text).unwrap();
        }
        let opts = VerifyOptions { fixtures_dir: Some(dir.path().to_path_buf()), ..VerifyOptions::default() };
        let r = verify_paper(&opts);
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.first_problem().unwrap().name, "example-2 reconstruction");
    }

    #[test]
    fn over_tight_separability_tolerance_is_inconclusive() {
        let r = verify_paper(&VerifyOptions { tol_sep: 1e-12, ..VerifyOptions::default() });
        assert_eq!(r.exit_code(), 2, "{}", r.to_text());
    }
}
