//! Linear-optical circuits: beam splitters, phase shifters and single-mode
//! squeezers acting on mode operators, their symplectic action, triangular
//! mesh compilation of passive unitaries, and the four-mode preparation
//! circuit for the flagship bound entangled state.
//!
//! Mode operators are `a_j = (q_j + i p_j) / sqrt2`; a passive element maps
//! `a -> U a`. With `U = X + i Y` the quadrature action on mode pair
//! `(j, k)` is the block `[[X_jk, -Y_jk], [Y_jk, X_jk]]`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fixtures::{self, SupplementFactors};
use crate::gaussian::{self, CovarianceMatrix, Ordering, SymplecticTransform};
use crate::linalg::{self, CMatrix};

/// Unitarity tolerance on `|U^H U - I|`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Off-diagonal entries below this are not eliminated by the mesh compiler.
const ELIMINATION_TOL: f64 = 1e-14;

/// A single optical element. Angles are in radians; modes are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitElement {
    /// `[[cos theta, -e^{i phi} sin theta], [e^{-i phi} sin theta, cos theta]]`
    /// on `(a_j, a_k)`.
    BeamSplitter { modes: (usize, usize), theta: f64, phi: f64 },
    /// `a_j -> e^{i phi} a_j`
    PhaseShift { mode: usize, phi: f64 },
    /// `diag(e^{-r}, e^{r})` on `(q_j, p_j)`.
    Squeezer { mode: usize, r: f64 },
}

impl CircuitElement {
    fn modes(&self) -> Vec<usize> {
        match *self {
            CircuitElement::BeamSplitter { modes: (j, k), .. } => vec![j, k],
            CircuitElement::PhaseShift { mode, .. } | CircuitElement::Squeezer { mode, .. } => vec![mode],
        }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        for m in self.modes() {
            if m >= n_modes {
                return Err(Error::InvalidMode { mode: m, n_modes });
            }
        }
        match *self {
            CircuitElement::BeamSplitter { modes: (j, k), theta, phi } => {
                if j == k {
                    return Err(Error::InvalidInput(format!("beam splitter couples mode {j} to itself")));
                }
                if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&theta) || !phi.is_finite() {
                    return Err(Error::InvalidInput(format!("beam splitter angle theta = {theta} outside [0, pi/2]")));
                }
            }
            CircuitElement::PhaseShift { phi, .. } if !phi.is_finite() => {
                return Err(Error::InvalidInput("non-finite phase".into()));
            }
            CircuitElement::Squeezer { r, .. } if !r.is_finite() => {
                return Err(Error::InvalidInput("non-finite squeezing".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Mode-operator matrix of a passive element.
    fn unitary(&self, n_modes: usize) -> Option<CMatrix> {
        let mut u = CMatrix::identity(n_modes, n_modes);
        match *self {
            CircuitElement::BeamSplitter { modes: (j, k), theta, phi } => {
                let (s, c) = theta.sin_cos();
                u[(j, j)] = Complex64::new(c, 0.0);
                u[(k, k)] = Complex64::new(c, 0.0);
                u[(j, k)] = -Complex64::from_polar(s, phi);
                u[(k, j)] = Complex64::from_polar(s, -phi);
            }
            CircuitElement::PhaseShift { mode, phi } => u[(mode, mode)] = Complex64::from_polar(1.0, phi),
            CircuitElement::Squeezer { .. } => return None,
        }
        Some(u)
    }

    fn symplectic(&self, n_modes: usize) -> DMatrix<f64> {
        match *self {
            CircuitElement::Squeezer { mode, r } => {
                let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
                s[(2 * mode, 2 * mode)] = (-r).exp();
                s[(2 * mode + 1, 2 * mode + 1)] = r.exp();
                s
            }
            _ => unitary_to_quadratures(&self.unitary(n_modes).expect("passive element")),
        }
    }
}

/// Ordered element list, applied left to right.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpticalCircuit {
    n_modes: usize,
    elements: Vec<CircuitElement>,
}

impl OpticalCircuit {
    pub fn new(n_modes: usize, elements: Vec<CircuitElement>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidInput("circuit needs at least one mode".into()));
        }
        for e in &elements {
            e.validate(n_modes)?;
        }
        Ok(OpticalCircuit { n_modes, elements })
    }

    pub fn empty(n_modes: usize) -> Self {
        OpticalCircuit { n_modes, elements: Vec::new() }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn elements(&self) -> &[CircuitElement] {
        &self.elements
    }

    pub fn push(&mut self, e: CircuitElement) -> Result<()> {
        e.validate(self.n_modes)?;
        self.elements.push(e);
        Ok(())
    }

    /// Append every element of `other`.
    pub fn extend(&mut self, other: &OpticalCircuit) -> Result<()> {
        if other.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: other.n_modes });
        }
        self.elements.extend_from_slice(&other.elements);
        Ok(())
    }

    pub fn beam_splitter_count(&self) -> usize {
        self.elements.iter().filter(|e| matches!(e, CircuitElement::BeamSplitter { .. })).count()
    }

    pub fn is_passive(&self) -> bool {
        !self.elements.iter().any(|e| matches!(e, CircuitElement::Squeezer { .. }))
    }
}

/// Unitary acting on mode operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexUnitary(CMatrix);

impl ComplexUnitary {
    pub fn new(u: CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
        }
        let err = linalg::unitarity_error(&u);
        if !(err <= UNITARY_TOL) {
            return Err(Error::NotUnitary(err));
        }
        Ok(ComplexUnitary(u))
    }

    pub fn identity(n: usize) -> Self {
        ComplexUnitary(CMatrix::identity(n, n))
    }

    pub fn n_modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

fn unitary_to_quadratures(u: &CMatrix) -> DMatrix<f64> {
    let n = u.nrows();
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let z = u[(j, k)];
            o[(2 * j, 2 * k)] = z.re;
            o[(2 * j, 2 * k + 1)] = -z.im;
            o[(2 * j + 1, 2 * k)] = z.im;
            o[(2 * j + 1, 2 * k + 1)] = z.re;
        }
    }
    o
}

/// Mode-operator unitary of an orthogonal symplectic transform.
pub fn passive_to_unitary(o: &SymplecticTransform) -> Result<ComplexUnitary> {
    let m = o.reorder(Ordering::Interleaved).into_matrix();
    let orth = linalg::max_abs(&(&m * m.transpose() - DMatrix::identity(m.nrows(), m.nrows())));
    if !(orth <= UNITARY_TOL) {
        return Err(Error::NotPassive(orth));
    }
    let sym = gaussian::symplectic_error(&m, Ordering::Interleaved);
    if !(sym <= gaussian::SYMPLECTIC_TOL) {
        return Err(Error::NotSymplectic(sym));
    }
    let n = m.nrows() / 2;
    let u = CMatrix::from_fn(n, n, |j, k| Complex64::new(m[(2 * j, 2 * k)], m[(2 * j + 1, 2 * k)]));
    ComplexUnitary::new(u)
}

/// Quadrature (interleaved) form of a mode-operator unitary.
pub fn unitary_to_passive(u: &ComplexUnitary) -> SymplecticTransform {
    SymplecticTransform::new_unchecked(unitary_to_quadratures(u.matrix()), Ordering::Interleaved)
}

/// Triangular mesh for `U`: at most `n(n-1)/2` beam splitters followed by the
/// residual diagonal as phase shifts. Elements are listed in application
/// order, so the diagonal phases come first.
pub fn decompose_unitary(u: &ComplexUnitary) -> OpticalCircuit {
    let n = u.n_modes();
    let mut w = u.matrix().clone();
    let mut splitters = Vec::new();
    for c in 0..n {
        for i in (c + 1..n).rev() {
            let (a, b) = (w[(c, c)], w[(i, c)]);
            if b.norm() < ELIMINATION_TOL {
                continue;
            }
            let theta = b.norm().atan2(a.norm());
            let phi = if a.norm() < ELIMINATION_TOL { -b.arg() } else { a.arg() - b.arg() };
            let bs = CircuitElement::BeamSplitter { modes: (c, i), theta, phi };
            let m = bs.unitary(n).expect("passive element");
            w = m.adjoint() * w;
            w[(i, c)] = Complex64::new(0.0, 0.0);
            splitters.push(bs);
        }
    }
    // U = B_1 ... B_N D, applied right to left
    let mut elements = Vec::with_capacity(splitters.len() + n);
    for j in 0..n {
        let phi = w[(j, j)].arg();
        if phi.abs() > ELIMINATION_TOL {
            elements.push(CircuitElement::PhaseShift { mode: j, phi });
        }
    }
    elements.extend(splitters.into_iter().rev());
    OpticalCircuit { n_modes: n, elements }
}

/// Composed mode-operator unitary of a passive circuit.
pub fn elements_to_unitary(circuit: &OpticalCircuit) -> Result<ComplexUnitary> {
    let n = circuit.n_modes;
    let mut u = CMatrix::identity(n, n);
    for e in &circuit.elements {
        match e.unitary(n) {
            Some(m) => u = m * u,
            None => {
                let CircuitElement::Squeezer { mode, .. } = *e else { unreachable!() };
                return Err(Error::SqueezerInUnitaryComposition(mode));
            }
        }
    }
    Ok(ComplexUnitary(u))
}

/// Composed symplectic of any circuit.
pub fn elements_to_symplectic(circuit: &OpticalCircuit) -> SymplecticTransform {
    let n = circuit.n_modes;
    let mut s = DMatrix::identity(2 * n, 2 * n);
    for e in &circuit.elements {
        s = e.symplectic(n) * s;
    }
    SymplecticTransform::new_unchecked(s, Ordering::Interleaved)
}

/// `S gamma S^T` for the circuit's symplectic `S`.
pub fn simulate(circuit: &OpticalCircuit, input: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if input.n_modes() != circuit.n_modes {
        return Err(Error::DimensionMismatch { expected: circuit.n_modes, found: input.n_modes() });
    }
    let s = elements_to_symplectic(circuit).reorder(input.ordering());
    gaussian::apply_symplectic(&s, input)
}

/// The printed beam-splitter factors of both interferometers.
pub fn supplement_factorizations() -> SupplementFactors {
    SupplementFactors::paper()
}

/// Where the interferometer meshes of the preparation circuit come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeshSource {
    /// Compile each printed factor separately.
    #[default]
    Supplement,
    /// Compile the full interferometer unitaries with [`decompose_unitary`].
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fig1Options {
    pub mesh: MeshSource,
    /// Keep the factor acting only on the two thermal inputs.
    pub include_a0: bool,
    /// Keep the `pi` phase on the second vacuum input.
    pub include_input_phase: bool,
}

impl Default for Fig1Options {
    fn default() -> Self {
        Fig1Options { mesh: MeshSource::Supplement, include_a0: true, include_input_phase: true }
    }
}

fn compile(u: &CMatrix) -> OpticalCircuit {
    decompose_unitary(&ComplexUnitary(u.clone()))
}

fn validate_kappa_tau(kappa: f64, tau: f64) -> Result<()> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidKappa(kappa));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidTau(tau));
    }
    Ok(())
}

/// Vacuum on modes 1-2, thermal `kappa I` on modes 3-4.
pub fn fig1_input(kappa: f64) -> Result<CovarianceMatrix> {
    validate_kappa_tau(kappa, 1.0)?;
    let nbar = (kappa - 1.0) / 2.0;
    gaussian::thermal_state(&[0.0, 0.0, nbar, nbar])
}

/// Input interferometer, four equal squeezers with `e^{-r} = tau`, output
/// interferometer; plus the matching input state.
pub fn build_fig1_circuit(kappa: f64, tau: f64) -> Result<(OpticalCircuit, CovarianceMatrix)> {
    build_fig1_circuit_with(kappa, tau, &Fig1Options::default())
}

pub fn build_fig1_circuit_with(kappa: f64, tau: f64, opts: &Fig1Options) -> Result<(OpticalCircuit, CovarianceMatrix)> {
    validate_kappa_tau(kappa, tau)?;
    let n = 4;
    let mut circuit = OpticalCircuit::empty(n);
    match opts.mesh {
        MeshSource::Supplement => {
            let f = supplement_factorizations();
            if opts.include_input_phase {
                circuit.push(CircuitElement::PhaseShift { mode: 1, phi: PI })?;
            }
            for (k, a) in f.a.iter().enumerate() {
                if k == 0 && !opts.include_a0 {
                    continue;
                }
                circuit.extend(&compile(a))?;
            }
        }
        MeshSource::Generic => circuit.extend(&compile(&fixtures::supplement_l_unitary()))?,
    }
    let r = -tau.ln();
    for mode in 0..n {
        circuit.push(CircuitElement::Squeezer { mode, r })?;
    }
    match opts.mesh {
        MeshSource::Supplement => {
            let f = supplement_factorizations();
            circuit.push(CircuitElement::PhaseShift { mode: 2, phi: FRAC_PI_2 })?;
            circuit.push(CircuitElement::PhaseShift { mode: 3, phi: -FRAC_PI_2 })?;
            for b in &f.b {
                circuit.extend(&compile(b))?;
            }
        }
        MeshSource::Generic => circuit.extend(&compile(&fixtures::supplement_k_unitary()))?,
    }
    Ok((circuit, fig1_input(kappa)?))
}

/// Output covariance of the preparation circuit.
pub fn fig1_output(kappa: f64, tau: f64) -> Result<CovarianceMatrix> {
    let (circuit, input) = build_fig1_circuit(kappa, tau)?;
    simulate(&circuit, &input)
}
