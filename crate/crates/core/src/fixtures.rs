//! Closed-form reference data: the four family examples, the printed
//! Williamson symplectic `S`, the passive transforms `K`, `L`, and the
//! beam-splitter factors realising them.
//!
//! Every value here is an exact rational or radical expression evaluated in
//! double precision; nothing is fitted.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bound_family::BoundFamilyParams;
use crate::gaussian::{CovarianceMatrix, SymplecticTransform};
use crate::linalg::CMatrix;

fn rows(n: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, v)
}

/// Family parameters of example `k` (1..=4).
pub fn example_params(k: usize) -> BoundFamilyParams {
    let r3 = 3f64.sqrt() / 3.0;
    let r2 = 2f64.sqrt() / 2.0;
    match k {
        1 => BoundFamilyParams::new([1.0, 2.0], [r3, -r3, r3, r3, 4.0 / 3.0, 4.0 / 3.0, 3.0, 3.0]),
        2 => BoundFamilyParams::new([1.0, 3.0], [r2, r2, r2, r2, 1.0, 1.0, 1.0, 1.0]),
        3 => BoundFamilyParams::new([1.0 / 3.0, 0.5], [1.5, 1.5, 4.0, 4.0, 0.5, 0.5, 0.5, 0.5]),
        4 => BoundFamilyParams::new(
            [-(2f64.sqrt()), 2.0 * 2f64.sqrt()],
            [0.5, -r2, 1.0 / 3.0, -r2, 1.0, 3.0, 2.0, 2.0 / 9.0],
        ),
        _ => panic!("examples are numbered 1 to 4, got {k}"),
    }
}

/// Printed covariance matrix of example `k` (1..=4), interleaved ordering.
pub fn example_matrix(k: usize) -> CovarianceMatrix {
    #[rustfmt::skip]
    let data = match k {
        1 => rows(8, &[
            2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0,
            0.0, 0.0, 2.0, 0.0, 0.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, -1.0, 0.0, 4.0, 0.0, 0.0,
            0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0, 0.0,
            0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0,
        ]),
        2 => rows(8, &[
            2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0,
            0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0,
            0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 2.0, 0.0,
            0.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0,
            2.0, 0.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 7.0, 0.0,
            0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ]),
        3 => rows(8, &[
            3.0, 0.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0,
            0.0, 6.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0,
            0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 7.0, 0.0,
            0.0, 0.0, 0.0, 6.0, 0.0, 2.0, 0.0, 0.0,
            7.0, 0.0, 0.0, 0.0, 23.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 7.0, 0.0, 0.0, 0.0, 23.0, 0.0,
            0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ]),
        4 => rows(8, &[
            7.0 / 4.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0,
            0.0, 11.0 / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0,
            0.0, 0.0, 9.0 / 2.0, 0.0, 0.0, 0.0, -1.5, 0.0,
            0.0, 0.0, 0.0, 0.5, 0.0, -0.5, 0.0, 0.0,
            -0.5, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, -0.5, 0.0, 1.5, 0.0, 0.0,
            0.0, 0.0, -1.5, 0.0, 0.0, 0.0, 29.0 / 4.0, 0.0,
            0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0,
        ]),
        _ => panic!("examples are numbered 1 to 4, got {k}"),
    };
    CovarianceMatrix::interleaved(data).expect("fixture is symmetric")
}

/// Symplectic eigenvalue spectrum of example 1: `D = diag(1,1,1,1,3,3,3,3)`.
pub const EXAMPLE1_SYMPLECTIC_EIGENVALUES: [f64; 4] = [1.0, 1.0, 3.0, 3.0];

/// `e^{-r}` of the four equal squeezers, `(sqrt(17) + 1) / 4`.
pub fn star_tau() -> f64 {
    (17f64.sqrt() + 1.0) / 4.0
}

/// Asymptotic bound/free boundary reported for large thermal occupation.
pub const ASYMPTOTE_TAU: f64 = 1.5770;

struct Radicals {
    s3: f64,
    s7: f64,
    s13: f64,
    s17: f64,
    s39: f64,
    plus: f64,
    minus: f64,
}

impl Radicals {
    fn new() -> Self {
        let s13 = 13f64.sqrt();
        Radicals {
            s3: 3f64.sqrt(),
            s7: 7f64.sqrt(),
            s13,
            s17: 17f64.sqrt(),
            s39: 39f64.sqrt(),
            plus: (5.0 + s13).sqrt(),
            minus: (5.0 - s13).sqrt(),
        }
    }

    /// `(a sqrt(5 + sqrt13) + b sqrt(5 - sqrt13)) / den`
    fn pm(&self, a: f64, b: f64, den: f64) -> f64 {
        (a * self.plus + b * self.minus) / den
    }
}

/// Entries `s_jk` of the printed Williamson symplectic matrix.
#[derive(Debug, Clone, Copy)]
pub struct WilliamsonEntries {
    pub s12: f64,
    pub s14: f64,
    pub s16: f64,
    pub s18: f64,
    pub s21: f64,
    pub s23: f64,
    pub s25: f64,
    pub s27: f64,
    pub s52: f64,
    pub s54: f64,
    pub s56: f64,
    pub s58: f64,
    pub s81: f64,
    pub s83: f64,
    pub s85: f64,
    pub s87: f64,
}

impl WilliamsonEntries {
    pub fn paper() -> Self {
        let r = Radicals::new();
        let (s3, s7, s13, s39) = (r.s3, r.s7, r.s13, r.s39);
        WilliamsonEntries {
            s12: r.pm(-s13 - 3.0, 3.0 - s13, 8.0 * s13),
            s14: r.pm(s39 + 4.0 * s3, s39 - 4.0 * s3, 12.0 * s13),
            s16: r.pm(s39 + 3.0 * s3, s39 - 3.0 * s3, 8.0 * s7 * s13),
            s18: r.pm(4.0 - s13, -(4.0 + s13), 4.0 * s7 * s13),
            s21: r.pm(s39 - 3.0 * s3, s39 + 3.0 * s3, 8.0 * s13),
            s23: r.pm(4.0 - s13, -(4.0 + s13), 4.0 * s13),
            s25: r.pm(3.0 - s13, -(3.0 + s13), 8.0 * s7 * s13),
            s27: r.pm(s13 + 4.0, s13 - 4.0, 4.0 * s3 * s7 * s13),
            s52: r.pm(s39 + s3, s39 - s3, 24.0 * s13),
            s54: r.pm(1.0, -1.0, 4.0 * s13),
            s56: r.pm(7.0 * s13 - 25.0, 7.0 * s13 + 25.0, 8.0 * s7 * s13),
            s58: r.pm(-s3, s3, 4.0 * s7 * s13),
            s81: r.pm(-s3, s3, 4.0 * s13),
            s83: r.pm(-1.0 + s13, 1.0 + s13, -8.0 * s13),
            s85: r.pm(1.0, -1.0, 4.0 * s7 * s13),
            s87: r.pm(-25.0 - 7.0 * s13, 25.0 - 7.0 * s13, 8.0 * s3 * s7 * s13),
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let e = self;
        #[rustfmt::skip]
        let m = rows(8, &[
            0.0, e.s12, 0.0, e.s14, 0.0, e.s16, 0.0, e.s18,
            e.s21, 0.0, e.s23, 0.0, e.s25, 0.0, e.s27, 0.0,
            0.0, e.s14, 0.0, -e.s12, 0.0, e.s18, 0.0, -e.s16,
            e.s23, 0.0, -e.s21, 0.0, e.s27, 0.0, -e.s25, 0.0,
            0.0, e.s52, 0.0, e.s54, 0.0, e.s56, 0.0, e.s58,
            e.s83, 0.0, -e.s81, 0.0, e.s87, 0.0, -e.s85, 0.0,
            0.0, -e.s54, 0.0, e.s52, 0.0, -e.s58, 0.0, e.s56,
            e.s81, 0.0, e.s83, 0.0, e.s85, 0.0, e.s87, 0.0,
        ]);
        m
    }
}

/// Entries `l_ij` of the printed interferometer `L` (before the global
/// `1/sqrt(17 - 3 sqrt17)` factor).
#[derive(Debug, Clone, Copy)]
pub struct InterferometerEntries {
    pub l12: f64,
    pub l14: f64,
    pub l16: f64,
    pub l18: f64,
    pub l51: f64,
    pub l53: f64,
    pub l55: f64,
    pub l57: f64,
}

impl InterferometerEntries {
    pub fn paper() -> Self {
        let r = Radicals::new();
        let (s3, s7, s13, s17, s39) = (r.s3, r.s7, r.s13, r.s17, r.s39);
        InterferometerEntries {
            l12: r.pm(
                -(21.0 + 3.0 * s17) + 3.0 * (1.0 - s17) * s13 + (5.0 - s17) * s39 + (5.0 - s17) * s3,
                (21.0 + 3.0 * s17) + 3.0 * (1.0 - s17) * s13 + (5.0 - s17) * s39 - (5.0 - s17) * s3,
                48.0 * s13,
            ),
            l14: r.pm(
                (30.0 - 6.0 * s17) + (3.0 + s17) * s39 + (7.0 * s17 - 3.0) * s3,
                -(30.0 - 6.0 * s17) + (3.0 + s17) * s39 - (7.0 * s17 - 3.0) * s3,
                48.0 * s13,
            ),
            l16: r.pm(
                (35.0 - 7.0 * s17) * s13 - (125.0 - 25.0 * s17) + (s17 - 1.0) * s39 + (7.0 + s17) * s3,
                (35.0 - 7.0 * s17) * s13 + (125.0 - 25.0 * s17) + (s17 - 1.0) * s39 - (7.0 + s17) * s3,
                16.0 * s7 * s13,
            ),
            l18: r.pm(
                (37.0 - 9.0 * s17) * s13 + (33.0 * s17 - 133.0) + (2.0 * s17 - 10.0) * s3,
                (37.0 - 9.0 * s17) * s13 + (133.0 - 33.0 * s17) + (10.0 - 2.0 * s17) * s3,
                16.0 * s7 * s13,
            ),
            l51: r.pm(
                (4.0 * s17 - 12.0) * s39 + (10.0 * s17 - 54.0) * s3 + (63.0 - 9.0 * s17) + (21.0 - 3.0 * s17) * s13,
                (4.0 * s17 - 12.0) * s39 - (10.0 * s17 - 54.0) * s3 - (63.0 - 9.0 * s17) + (21.0 - 3.0 * s17) * s13,
                96.0 * s13,
            ),
            l53: r.pm(
                (21.0 * s17 - 51.0) + (3.0 * s17 - 21.0) * s13 + (2.0 * s17 - 14.0) * s39 + (8.0 * s17 - 56.0) * s3,
                (-21.0 * s17 + 51.0) + (3.0 * s17 - 21.0) * s13 + (2.0 * s17 - 14.0) * s39 - (8.0 * s17 - 56.0) * s3,
                96.0 * s13,
            ),
            l55: r.pm(
                -(106.0 + 42.0 * s17) + (12.0 * s17 + 28.0) * s13 + (s17 - 7.0) * s39 + (3.0 * s17 - 21.0) * s3,
                (106.0 + 42.0 * s17) + (28.0 + 12.0 * s17) * s13 + (21.0 - 3.0 * s17) * s3 + (s17 - 7.0) * s39,
                32.0 * s7 * s13,
            ),
            l57: r.pm(
                (-56.0 + 8.0 * s17) + (14.0 - 2.0 * s17) * s13 + (7.0 - s17) * s39 + (17.0 - 7.0 * s17) * s3,
                (56.0 - 8.0 * s17) + (14.0 - 2.0 * s17) * s13 + (7.0 - s17) * s39 - (17.0 - 7.0 * s17) * s3,
                32.0 * s7 * s13,
            ),
        }
    }
}

/// `sqrt(17 - 3 sqrt17)`, the common normalisation of `K` and `L`.
pub fn kl_norm() -> f64 {
    (17.0 - 3.0 * 17f64.sqrt()).sqrt()
}

fn kl_c() -> f64 {
    (17f64.sqrt() - 3.0) / 2.0
}

/// Printed Williamson symplectic of example 1, `gamma = S D S^T`.
pub fn paper_s() -> DMatrix<f64> {
    WilliamsonEntries::paper().matrix()
}

pub fn paper_s_transform() -> SymplecticTransform {
    SymplecticTransform::interleaved(paper_s()).expect("printed S is symplectic")
}

/// Printed output interferometer `K` (quadrature form).
pub fn paper_k() -> DMatrix<f64> {
    let c = kl_c();
    #[rustfmt::skip]
    let m = rows(8, &[
        2.0, 0.0, 0.0, 0.0, 0.0, -c, 0.0, -c,
        0.0, 2.0, 0.0, 0.0, c, 0.0, c, 0.0,
        0.0, 0.0, 2.0, 0.0, 0.0, -c, 0.0, c,
        0.0, 0.0, 0.0, 2.0, c, 0.0, -c, 0.0,
        c, 0.0, c, 0.0, 0.0, 2.0, 0.0, 0.0,
        0.0, c, 0.0, c, -2.0, 0.0, 0.0, 0.0,
        c, 0.0, -c, 0.0, 0.0, 0.0, 0.0, 2.0,
        0.0, c, 0.0, -c, 0.0, 0.0, -2.0, 0.0,
    ]);
    m / kl_norm()
}

/// Printed input interferometer `L` (quadrature form).
pub fn paper_l() -> DMatrix<f64> {
    let l = InterferometerEntries::paper();
    #[rustfmt::skip]
    let m = rows(8, &[
        0.0, l.l12, 0.0, l.l14, 0.0, l.l16, 0.0, l.l18,
        -l.l12, 0.0, -l.l14, 0.0, -l.l16, 0.0, -l.l18, 0.0,
        0.0, l.l14, 0.0, -l.l12, 0.0, l.l18, 0.0, -l.l16,
        -l.l14, 0.0, l.l12, 0.0, -l.l18, 0.0, l.l16, 0.0,
        l.l51, 0.0, l.l53, 0.0, l.l55, 0.0, l.l57, 0.0,
        0.0, l.l51, 0.0, l.l53, 0.0, l.l55, 0.0, l.l57,
        -l.l53, 0.0, l.l51, 0.0, -l.l57, 0.0, l.l55, 0.0,
        0.0, -l.l53, 0.0, l.l51, 0.0, -l.l57, 0.0, l.l55,
    ]);
    m / kl_norm()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cmat(n: usize, v: &[Complex64]) -> CMatrix {
    CMatrix::from_row_slice(n, n, v)
}

fn c_identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Mode-operator form of `L`: `b = U_L a`.
pub fn supplement_l_unitary() -> CMatrix {
    let l = InterferometerEntries::paper();
    let n = kl_norm();
    #[rustfmt::skip]
    let m = cmat(4, &[
        c(0.0, -l.l12), c(0.0, -l.l14), c(0.0, -l.l16), c(0.0, -l.l18),
        c(0.0, -l.l14), c(0.0, l.l12), c(0.0, -l.l18), c(0.0, l.l16),
        c(l.l51, 0.0), c(l.l53, 0.0), c(l.l55, 0.0), c(l.l57, 0.0),
        c(-l.l53, 0.0), c(l.l51, 0.0), c(-l.l57, 0.0), c(l.l55, 0.0),
    ]);
    m.map(|z| z / n)
}

/// Mode-operator form of `K`: `d = U_K c`.
pub fn supplement_k_unitary() -> CMatrix {
    let n = kl_norm();
    let k = kl_c();
    #[rustfmt::skip]
    let m = cmat(4, &[
        c(2.0, 0.0), c(0.0, 0.0), c(0.0, k), c(0.0, k),
        c(0.0, 0.0), c(2.0, 0.0), c(0.0, k), c(0.0, -k),
        c(k, 0.0), c(k, 0.0), c(0.0, -2.0), c(0.0, 0.0),
        c(k, 0.0), c(-k, 0.0), c(0.0, 0.0), c(0.0, -2.0),
    ]);
    m.map(|z| z / n)
}

/// Beam-splitter factors of both interferometers, as printed.
#[derive(Debug, Clone)]
pub struct SupplementFactors {
    /// `A_0 .. A_4`, with `U_L = A_4 A_3 A_2 A_1 A_0 diag(1, -1, 1, 1)`.
    pub a: [CMatrix; 5],
    /// `B_1 .. B_4`, with `U_K = B_4 B_3 B_2 B_1 diag(1, 1, i, -i)`.
    pub b: [CMatrix; 4],
    pub l_input_phases: CMatrix,
    pub k_input_phases: CMatrix,
}

impl SupplementFactors {
    pub fn paper() -> Self {
        let l = InterferometerEntries::paper();
        let n = kl_norm();
        let s17 = 17f64.sqrt();

        let q = ((l.l51 * l.l51 + l.l53 * l.l53) * (l.l55 * l.l55 + l.l57 * l.l57)).sqrt();
        let mut a0 = c_identity(4);
        a0[(2, 2)] = c((l.l51 * l.l55 + l.l57 * l.l53) / q, 0.0);
        a0[(2, 3)] = c((l.l57 * l.l51 - l.l53 * l.l55) / q, 0.0);
        a0[(3, 2)] = c((l.l53 * l.l55 - l.l57 * l.l51) / q, 0.0);
        a0[(3, 3)] = c((l.l51 * l.l55 + l.l53 * l.l57) / q, 0.0);

        // The printed 1/sqrt(17 - 3 sqrt17) prefactor of A_1, A_2 applies to
        // the 2x2 coupling block only; the untouched modes keep a unit entry.
        let top = (l.l12 * l.l12 + l.l14 * l.l14).sqrt();
        let bottom = (l.l51 * l.l51 + l.l53 * l.l53).sqrt();
        let mut a1 = c_identity(4);
        a1[(1, 1)] = c(0.0, -top / n);
        a1[(1, 3)] = c(0.0, -bottom / n);
        a1[(3, 1)] = c(-bottom / n, 0.0);
        a1[(3, 3)] = c(top / n, 0.0);

        let mut a2 = c_identity(4);
        a2[(0, 0)] = c(0.0, -top / n);
        a2[(0, 2)] = c(0.0, bottom / n);
        a2[(2, 0)] = c(bottom / n, 0.0);
        a2[(2, 2)] = c(top / n, 0.0);

        let mut a3 = c_identity(4);
        a3[(0, 0)] = c(l.l12 / top, 0.0);
        a3[(0, 1)] = c(-l.l14 / top, 0.0);
        a3[(1, 0)] = c(l.l14 / top, 0.0);
        a3[(1, 1)] = c(l.l12 / top, 0.0);

        let mut a4 = c_identity(4);
        a4[(2, 2)] = c(l.l51 / bottom, 0.0);
        a4[(2, 3)] = c(l.l53 / bottom, 0.0);
        a4[(3, 2)] = c(-l.l53 / bottom, 0.0);
        a4[(3, 3)] = c(l.l51 / bottom, 0.0);

        let h = 2f64.sqrt() / 2.0;
        let mut b1 = c_identity(4);
        b1[(2, 2)] = c(-h, 0.0);
        b1[(2, 3)] = c(h, 0.0);
        b1[(3, 2)] = c(-h, 0.0);
        b1[(3, 3)] = c(-h, 0.0);

        let diag = 2.0 / n;
        let off = (s17 - 3.0) / (2f64.sqrt() * n);
        let mut b2 = c_identity(4);
        b2[(1, 1)] = c(diag, 0.0);
        b2[(1, 3)] = c(-off, 0.0);
        b2[(3, 1)] = c(off, 0.0);
        b2[(3, 3)] = c(diag, 0.0);

        let mut b3 = c_identity(4);
        b3[(0, 0)] = c(diag, 0.0);
        b3[(0, 2)] = c(-off, 0.0);
        b3[(2, 0)] = c(off, 0.0);
        b3[(2, 2)] = c(diag, 0.0);

        let mut b4 = c_identity(4);
        b4[(2, 2)] = c(h, 0.0);
        b4[(2, 3)] = c(h, 0.0);
        b4[(3, 2)] = c(h, 0.0);
        b4[(3, 3)] = c(-h, 0.0);

        let mut l_phases = c_identity(4);
        l_phases[(1, 1)] = c(-1.0, 0.0);
        let mut k_phases = c_identity(4);
        k_phases[(2, 2)] = c(0.0, 1.0);
        k_phases[(3, 3)] = c(0.0, -1.0);

        SupplementFactors {
            a: [a0, a1, a2, a3, a4],
            b: [b1, b2, b3, b4],
            l_input_phases: l_phases,
            k_input_phases: k_phases,
        }
    }

    /// `A_4 A_3 A_2 A_1 A_0 diag(1, -1, 1, 1)`.
    pub fn l_product(&self) -> CMatrix {
        self.a.iter().fold(self.l_input_phases.clone(), |acc, f| f * acc)
    }

    /// `B_4 B_3 B_2 B_1 diag(1, 1, i, -i)`.
    pub fn k_product(&self) -> CMatrix {
        self.b.iter().fold(self.k_input_phases.clone(), |acc, f| f * acc)
    }

    /// All nine named factors with their labels.
    pub fn named(&self) -> Vec<(&'static str, &CMatrix)> {
        let names_a = ["A0", "A1", "A2", "A3", "A4"];
        let names_b = ["B1", "B2", "B3", "B4"];
        names_a.iter().copied().zip(self.a.iter()).chain(names_b.iter().copied().zip(self.b.iter())).collect()
    }
}

/// Two-mode squeezed vacuum `[[c I, s Z], [s Z, c I]]`, `c = cosh 2r`, `s = sinh 2r`.
pub fn two_mode_squeezed_vacuum(r: f64) -> CovarianceMatrix {
    two_mode_squeezed_thermal(r, 0.0)
}

/// Two-mode squeezed vacuum plus classical noise `2 nbar I` on both modes.
pub fn two_mode_squeezed_thermal(r: f64, nbar: f64) -> CovarianceMatrix {
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let a = ch + 2.0 * nbar;
    #[rustfmt::skip]
    let data = rows(4, &[
        a, 0.0, sh, 0.0,
        0.0, a, 0.0, -sh,
        sh, 0.0, a, 0.0,
        0.0, -sh, 0.0, a,
    ]);
    CovarianceMatrix::interleaved(data).expect("symmetric")
}
