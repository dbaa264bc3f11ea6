//! Entanglement map of the preparation circuit over thermal input strength
//! `kappa = 2 nbar + 1` and squeezing `tau = e^{-r}`.

use rayon::prelude::*;

use crate::circuit;
use crate::error::{Error, Result};
use crate::gaussian::{self, Bipartition};
use crate::io::fmt_num;
use crate::separability::{self, ClassifyOptions, EntanglementClass};

/// Share of inconclusive cells above which a scan is rejected.
pub const MAX_INCONCLUSIVE_FRACTION: f64 = 1e-3;

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Parse `start:stop:count`.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidInput(format!("axis '{spec}' must look like start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() || (count > 1 && stop <= start) {
        return Err(bad());
    }
    Ok(linspace(start, stop, count))
}

fn two_by_two() -> Bipartition {
    Bipartition::split(4, 2).expect("4 modes split 2|2")
}

/// One grid cell; `class` is `None` when the separability test was
/// inconclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub class: Option<EntanglementClass>,
    pub ppt_margin: f64,
    pub slack: Option<f64>,
}

impl SweepCell {
    pub fn class_label(&self) -> &'static str {
        self.class.map_or("inconclusive", EntanglementClass::as_str)
    }
}

/// Classify the circuit output at one `(kappa, tau)`.
pub fn classify_point(kappa: f64, tau: f64, opts: &ClassifyOptions) -> Result<SweepCell> {
    let gamma = circuit::fig1_output(kappa, tau)?;
    match separability::classify(&gamma, &two_by_two(), opts) {
        Ok(v) => Ok(SweepCell { class: Some(v.class), ppt_margin: v.ppt_margin, slack: v.separability_slack }),
        Err(Error::Inconclusive { slack_upper, .. }) => {
            let tol = opts.tol_ppt.unwrap_or_else(|| gamma.default_tol());
            let ppt = gaussian::is_ppt(&gamma, &two_by_two(), tol)?;
            Ok(SweepCell { class: None, ppt_margin: ppt.margin, slack: Some(slack_upper) })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    /// Row-major: `cells[i * tau.len() + j]` is `(kappa[i], tau[j])`.
    pub cells: Vec<SweepCell>,
}

fn check_axis(name: &str, axis: &[f64], lower: f64, inclusive: bool) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidInput(format!("{name} axis is empty")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!("{name} axis must be strictly increasing")));
    }
    let ok = if inclusive { axis[0] >= lower } else { axis[0] > lower };
    if !ok {
        return Err(match name {
            "kappa" => Error::InvalidKappa(axis[0]),
            _ => Error::InvalidTau(axis[0]),
        });
    }
    Ok(())
}

/// Evaluate every cell in parallel. Results land in pre-indexed slots, so
/// the grid does not depend on scheduling.
pub fn scan(kappa: &[f64], tau: &[f64], opts: &ClassifyOptions) -> Result<SweepGrid> {
    check_axis("kappa", kappa, 1.0, true)?;
    check_axis("tau", tau, 0.0, false)?;
    let nt = tau.len();
    let cells = (0..kappa.len() * nt)
        .into_par_iter()
        .map(|idx| classify_point(kappa[idx / nt], tau[idx % nt], opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid { kappa: kappa.to_vec(), tau: tau.to_vec(), cells })
}

fn rank(c: EntanglementClass) -> u8 {
    match c {
        EntanglementClass::Separable => 0,
        EntanglementClass::BoundEntangled => 1,
        EntanglementClass::FreeEntangled => 2,
    }
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.tau.len() + j]
    }

    pub fn row(&self, i: usize) -> &[SweepCell] {
        let nt = self.tau.len();
        &self.cells[i * nt..(i + 1) * nt]
    }

    pub fn inconclusive_count(&self) -> usize {
        self.cells.iter().filter(|c| c.class.is_none()).count()
    }

    pub fn inconclusive_fraction(&self) -> f64 {
        self.inconclusive_count() as f64 / self.cells.len().max(1) as f64
    }

    /// Rows (by kappa index) whose classes along increasing `tau >= 1` are
    /// not ordered separable, bound, free. Inconclusive cells are skipped.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        (0..self.kappa.len())
            .filter(|&i| {
                let ranks: Vec<u8> = self
                    .tau
                    .iter()
                    .zip(self.row(i))
                    .filter(|(t, _)| **t >= 1.0)
                    .filter_map(|(_, c)| c.class.map(rank))
                    .collect();
                ranks.windows(2).any(|w| w[1] < w[0])
            })
            .collect()
    }

    /// Fails when the grid has interleaved classes or too many inconclusive
    /// cells.
    pub fn check(&self) -> Result<()> {
        let bad = self.monotonicity_violations();
        if !bad.is_empty() {
            let kappas: Vec<f64> = bad.iter().map(|&i| self.kappa[i]).collect();
            return Err(Error::NumericalFailure(format!("non-monotone rows at kappa = {kappas:?}")));
        }
        if self.inconclusive_fraction() > MAX_INCONCLUSIVE_FRACTION {
            return Err(Error::NumericalFailure(format!(
                "{} of {} cells inconclusive",
                self.inconclusive_count(),
                self.cells.len()
            )));
        }
        Ok(())
    }

    /// `kappa,tau,class,ppt_margin,slack`; empty slack when the SDP was skipped.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,tau,class,ppt_margin,slack\n");
        for (i, &k) in self.kappa.iter().enumerate() {
            for (j, &t) in self.tau.iter().enumerate() {
                let c = self.cell(i, j);
                let slack = c.slack.map(fmt_num).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_num(k),
                    fmt_num(t),
                    c.class_label(),
                    fmt_num(c.ppt_margin),
                    slack
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    SepToBound,
    BoundToFree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOptions {
    pub tau_min: f64,
    pub tau_max: f64,
    /// Points of the coarse search for a bracket.
    pub coarse: usize,
    /// Final bracket width.
    pub tol: f64,
    pub classify: ClassifyOptions,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions { tau_min: 1.0, tau_max: 3.0, coarse: 81, tol: 1e-4, classify: ClassifyOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryBracket {
    pub tau_lo: f64,
    pub tau_hi: f64,
}

impl BoundaryBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.tau_lo + self.tau_hi)
    }
}

fn ppt_holds(kappa: f64, tau: f64, opts: &ClassifyOptions) -> Result<bool> {
    let gamma = circuit::fig1_output(kappa, tau)?;
    let tol = opts.tol_ppt.unwrap_or_else(|| gamma.default_tol());
    Ok(gaussian::is_ppt(&gamma, &two_by_two(), tol)?.holds)
}

fn separable_by_slack(kappa: f64, tau: f64, opts: &ClassifyOptions) -> Result<bool> {
    let gamma = circuit::fig1_output(kappa, tau)?;
    let problem = separability::build_problem(&gamma, &two_by_two())?;
    Ok(separability::solve_min_slack(&problem, &opts.sdp).t_star <= opts.tol_sep)
}

/// Bisect `pred` (true at `lo`, false at `hi`) to width `tol`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> Result<bool>) -> Result<BoundaryBracket> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BoundaryBracket { tau_lo: lo, tau_hi: hi })
}

/// Locate the first transition of the given kind along increasing `tau`.
///
/// A coarse grid finds a bracket whose endpoints classify as the two sides
/// of the transition; the bracket is then narrowed by bisection on the PPT
/// margin (bound/free) or on the separability slack (separable/bound).
pub fn find_boundary(kappa: f64, kind: BoundaryKind, opts: &BoundaryOptions) -> Result<BoundaryBracket> {
    if !(kappa >= 1.0) {
        return Err(Error::InvalidKappa(kappa));
    }
    if !(opts.tau_min > 0.0 && opts.tau_max > opts.tau_min && opts.coarse >= 2) {
        return Err(Error::InvalidInput("boundary search range must satisfy 0 < tau_min < tau_max".into()));
    }
    let grid = linspace(opts.tau_min, opts.tau_max, opts.coarse);
    let c = &opts.classify;
    let no_bracket = |what: &str| {
        Error::NoBracket(format!(
            "no {what} transition for kappa = {kappa} with tau in [{}, {}]",
            opts.tau_min, opts.tau_max
        ))
    };
    match kind {
        BoundaryKind::BoundToFree => {
            let ppt: Vec<bool> = grid.iter().map(|&t| ppt_holds(kappa, t, c)).collect::<Result<_>>()?;
            let i = (0..grid.len() - 1).find(|&i| ppt[i] && !ppt[i + 1]).ok_or_else(|| no_bracket("bound-to-free"))?;
            let left = classify_point(kappa, grid[i], c)?;
            if left.class != Some(EntanglementClass::BoundEntangled) {
                return Err(no_bracket("bound-to-free"));
            }
            bisect(grid[i], grid[i + 1], opts.tol, |t| ppt_holds(kappa, t, c))
        }
        BoundaryKind::SepToBound => {
            let mut prev = classify_point(kappa, grid[0], c)?;
            for w in grid.windows(2) {
                let next = classify_point(kappa, w[1], c)?;
                if prev.class == Some(EntanglementClass::Separable)
                    && next.class == Some(EntanglementClass::BoundEntangled)
                {
                    return bisect(w[0], w[1], opts.tol, |t| separable_by_slack(kappa, t, c));
                }
                prev = next;
            }
            Err(no_bracket("separable-to-bound"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub kappa: Vec<f64>,
    pub tau_lower: Vec<f64>,
    pub tau_upper: Vec<f64>,
    pub converged: Vec<bool>,
}

/// [`find_boundary`] for each kappa in parallel; a missing bracket is
/// recorded as unconverged (NaN bounds) rather than failing the curve.
pub fn boundary_curve(kappa: &[f64], kind: BoundaryKind, opts: &BoundaryOptions) -> Result<BoundaryCurve> {
    let results: Vec<Option<BoundaryBracket>> = kappa
        .par_iter()
        .map(|&k| match find_boundary(k, kind, opts) {
            Ok(b) => Ok(Some(b)),
            Err(Error::NoBracket(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(BoundaryCurve {
        kappa: kappa.to_vec(),
        tau_lower: results.iter().map(|b| b.map_or(f64::NAN, |b| b.tau_lo)).collect(),
        tau_upper: results.iter().map(|b| b.map_or(f64::NAN, |b| b.tau_hi)).collect(),
        converged: results.iter().map(Option::is_some).collect(),
    })
}

impl BoundaryCurve {
    /// `kappa,tau_lower,tau_upper,converged`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,tau_lower,tau_upper,converged\n");
        for i in 0..self.kappa.len() {
            let f = |v: f64| if v.is_nan() { String::new() } else { fmt_num(v) };
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_num(self.kappa[i]),
                f(self.tau_lower[i]),
                f(self.tau_upper[i]),
                self.converged[i]
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoteEstimate {
    pub value: f64,
    /// Difference between the last two extrapolations.
    pub error: f64,
    /// `(kappa, tau*)` at each rung of the ladder.
    pub rungs: Vec<(f64, f64)>,
}

/// Largest error bar accepted by [`estimate_asymptote`].
pub const ASYMPTOTE_MAX_ERROR: f64 = 5e-3;

/// Large-`kappa` limit of the bound/free boundary.
///
/// The boundary approaches its limit like `1 / kappa`; rungs at
/// `kappa_max / 4`, `kappa_max / 2` and `kappa_max` give two Richardson
/// extrapolations, the last of which is returned with their difference as
/// the error bar.
pub fn estimate_asymptote(kappa_max: f64, tol: f64) -> Result<AsymptoteEstimate> {
    if !(kappa_max >= 41.0) || !kappa_max.is_finite() {
        return Err(Error::InvalidInput(format!("kappa_max must be at least 41, got {kappa_max}")));
    }
    let opts = BoundaryOptions { tol, ..BoundaryOptions::default() };
    let ladder = [kappa_max / 4.0, kappa_max / 2.0, kappa_max];
    let rungs: Vec<(f64, f64)> = ladder
        .par_iter()
        .map(|&k| find_boundary(k, BoundaryKind::BoundToFree, &opts).map(|b| (k, b.midpoint())))
        .collect::<Result<_>>()?;
    let extrapolate = |(k1, t1): (f64, f64), (k2, t2): (f64, f64)| (k2 * t2 - k1 * t1) / (k2 - k1);
    let coarse = extrapolate(rungs[0], rungs[1]);
    let fine = extrapolate(rungs[1], rungs[2]);
    let error = (fine - coarse).abs();
    if !(error <= ASYMPTOTE_MAX_ERROR) {
        return Err(Error::NotConverged(format!(
            "asymptote extrapolations {coarse:.6} and {fine:.6} differ by {error:.2e}"
        )));
    }
    Ok(AsymptoteEstimate { value: fine, error, rungs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn axis_parsing() {
        assert_eq!(parse_axis("1:2:3").unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(parse_axis("1:2").is_err());
        assert!(parse_axis("2:1:5").is_err());
        assert_eq!(parse_axis("3:3:1").unwrap(), vec![3.0]);
    }

    #[test]
    fn known_cells() {
        let opts = ClassifyOptions::default();
        let c = classify_point(3.0, 1.0, &opts).unwrap();
        assert_eq!(c.class, Some(EntanglementClass::Separable));
        let c = classify_point(3.0, 1.05, &opts).unwrap();
        assert_eq!(c.class, Some(EntanglementClass::BoundEntangled));
        // independent conic solver: 0.0023979841, PPT margin 0.145269
        assert!((c.slack.unwrap() - 0.0023979841).abs() < 1e-6);
        assert!((c.ppt_margin - 0.145269).abs() < 1e-5);
        let c = classify_point(3.0, 2.0, &opts).unwrap();
        assert_eq!(c.class, Some(EntanglementClass::FreeEntangled));
    }

    #[test]
    fn star_point_is_bracketed() {
        let b = find_boundary(3.0, BoundaryKind::BoundToFree, &BoundaryOptions::default()).unwrap();
        assert!(b.tau_hi - b.tau_lo <= 1e-4);
        assert!((b.midpoint() - fixtures::star_tau()).abs() < 1e-3, "{b:?}");
    }

    #[test]
    fn pure_inputs_have_no_bound_region() {
        let r = find_boundary(1.0, BoundaryKind::BoundToFree, &BoundaryOptions::default());
        assert!(matches!(r, Err(Error::NoBracket(_))), "{r:?}");
    }

    #[test]
    fn small_scan_is_monotone_and_deterministic() {
        let kappa = linspace(1.0, 9.0, 5);
        let tau = linspace(1.0, 2.0, 6);
        let a = scan(&kappa, &tau, &ClassifyOptions::default()).unwrap();
        a.check().unwrap();
        let b = scan(&kappa, &tau, &ClassifyOptions::default()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.row(0).iter().skip(1).all(|c| c.class == Some(EntanglementClass::FreeEntangled)));
    }

    #[test]
    fn invalid_axes() {
        assert!(matches!(scan(&[0.5], &[1.0], &ClassifyOptions::default()), Err(Error::InvalidKappa(_))));
        assert!(scan(&[1.0, 1.0], &[1.0], &ClassifyOptions::default()).is_err());
        assert!(matches!(estimate_asymptote(20.0, 1e-6), Err(Error::InvalidInput(_))));
    }
}
