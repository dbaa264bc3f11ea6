//! File formats. Every document carries `"format_version": 1`; numbers are
//! written with 15 significant digits and fields in a fixed order, so equal
//! inputs give byte-identical output. Mode labels in files are 1-based.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bound_family::BoundFamilyParams;
use crate::circuit::{CircuitElement, OpticalCircuit};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, Ordering};
use crate::separability::{EntanglementClass, EntanglementVerdict};

pub const FORMAT_VERSION: u32 = 1;

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::InvalidInput(format!("unsupported format_version {v}")));
    }
    Ok(())
}

/// Round to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Text form of [`round_sig`] used in CSV and reports.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| round_sig(m[(i, j)])).collect()).collect()
}

/// Matrix JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub n_modes: usize,
    #[serde(default)]
    pub ordering: Ordering,
    pub data: Vec<Vec<f64>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &DMatrix<f64>, ordering: Ordering) -> Self {
        MatrixDoc { format_version: FORMAT_VERSION, n_modes: m.nrows() / 2, ordering, data: rows_of(m) }
    }

    pub fn from_covariance(g: &CovarianceMatrix) -> Self {
        Self::from_matrix(g.matrix(), g.ordering())
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        check_version(self.format_version)?;
        let dim = 2 * self.n_modes;
        if self.data.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.data.len() });
        }
        if let Some(row) = self.data.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
        }
        if self.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix contains non-finite entries".into()));
        }
        Ok(DMatrix::from_fn(dim, dim, |i, j| self.data[i][j]))
    }

    pub fn to_covariance(&self) -> Result<CovarianceMatrix> {
        CovarianceMatrix::new(self.to_matrix()?, self.ordering)
    }
}

pub fn covariance_from_json(text: &str) -> Result<CovarianceMatrix> {
    serde_json::from_str::<MatrixDoc>(text)?.to_covariance()
}

pub fn covariance_to_json(g: &CovarianceMatrix) -> String {
    to_json(&MatrixDoc::from_covariance(g))
}

pub fn read_covariance(path: &Path) -> Result<CovarianceMatrix> {
    covariance_from_json(&std::fs::read_to_string(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable value");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ParamsDoc {
    #[serde(default = "default_version")]
    format_version: u32,
    beta: [f64; 2],
    alpha: [f64; 8],
}

pub fn params_from_json(text: &str) -> Result<BoundFamilyParams> {
    let doc: ParamsDoc = serde_json::from_str(text)?;
    check_version(doc.format_version)?;
    Ok(BoundFamilyParams::new(doc.beta, doc.alpha))
}

pub fn params_to_json(p: &BoundFamilyParams) -> String {
    to_json(&ParamsDoc { format_version: FORMAT_VERSION, beta: p.beta.map(round_sig), alpha: p.alpha.map(round_sig) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ElementDoc {
    kind: String,
    modes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CircuitDoc {
    #[serde(default = "default_version")]
    format_version: u32,
    n_modes: usize,
    elements: Vec<ElementDoc>,
}

pub fn circuit_to_json(c: &OpticalCircuit) -> String {
    let elements = c
        .elements()
        .iter()
        .map(|e| match *e {
            CircuitElement::BeamSplitter { modes: (j, k), theta, phi } => ElementDoc {
                kind: "bs".into(),
                modes: vec![j + 1, k + 1],
                theta: Some(round_sig(theta)),
                phi: Some(round_sig(phi)),
                r: None,
            },
            CircuitElement::PhaseShift { mode, phi } => ElementDoc {
                kind: "phase".into(),
                modes: vec![mode + 1],
                theta: None,
                phi: Some(round_sig(phi)),
                r: None,
            },
            CircuitElement::Squeezer { mode, r } => ElementDoc {
                kind: "squeezer".into(),
                modes: vec![mode + 1],
                theta: None,
                phi: None,
                r: Some(round_sig(r)),
            },
        })
        .collect();
    to_json(&CircuitDoc { format_version: FORMAT_VERSION, n_modes: c.n_modes(), elements })
}

pub fn circuit_from_json(text: &str) -> Result<OpticalCircuit> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    check_version(doc.format_version)?;
    let mut elements = Vec::with_capacity(doc.elements.len());
    for (i, e) in doc.elements.iter().enumerate() {
        let field = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidInput(format!("element {}: '{}' needs '{name}'", i + 1, e.kind)))
        };
        let mode = |k: usize| {
            e.modes
                .get(k)
                .and_then(|m| m.checked_sub(1))
                .ok_or_else(|| Error::InvalidInput(format!("element {}: bad or missing 1-based mode", i + 1)))
        };
        let arity = |n: usize| {
            if e.modes.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("element {}: '{}' takes {n} mode(s)", i + 1, e.kind)))
            }
        };
        let el = match e.kind.as_str() {
            "bs" => {
                arity(2)?;
                CircuitElement::BeamSplitter {
                    modes: (mode(0)?, mode(1)?),
                    theta: field(e.theta, "theta")?,
                    phi: e.phi.unwrap_or(0.0),
                }
            }
            "phase" => {
                arity(1)?;
                CircuitElement::PhaseShift { mode: mode(0)?, phi: field(e.phi, "phi")? }
            }
            "squeezer" => {
                arity(1)?;
                CircuitElement::Squeezer { mode: mode(0)?, r: field(e.r, "r")? }
            }
            other => return Err(Error::InvalidInput(format!("element {}: unknown kind '{other}'", i + 1))),
        };
        elements.push(el);
    }
    OpticalCircuit::new(doc.n_modes, elements)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub format_version: u32,
    pub class: EntanglementClass,
    pub ppt_margin: f64,
    /// `null` when the PPT test already decided.
    pub slack: Option<f64>,
    pub iterations: usize,
}

pub fn verdict_to_json(v: &EntanglementVerdict) -> String {
    to_json(&VerdictDoc {
        format_version: FORMAT_VERSION,
        class: v.class,
        ppt_margin: round_sig(v.ppt_margin),
        slack: v.separability_slack.map(round_sig),
        iterations: v.iterations,
    })
}
