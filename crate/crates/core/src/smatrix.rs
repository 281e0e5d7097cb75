//! Four-terminal scattering matrices and the one-parameter sqrt(NOT) family.
//!
//! Rows index the outgoing lead and columns the incoming lead, so entry
//! `(alpha, beta)` is the amplitude for an electron entering through lead
//! `beta` to leave through lead `alpha`. Leads A and B sit on the input side,
//! C and D on the output side. Same-side entries are reflection amplitudes
//! (`r`), cross-side entries transmission amplitudes (`t`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One of the four single-mode leads attached to the scattering region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lead {
    A,
    B,
    C,
    D,
}

/// Which side of the gate a lead is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Input,
    Output,
}

impl Lead {
    pub const ALL: [Lead; 4] = [Lead::A, Lead::B, Lead::C, Lead::D];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Lead> {
        Lead::ALL.get(index).copied()
    }

    pub const fn side(self) -> Side {
        match self {
            Lead::A | Lead::B => Side::Input,
            Lead::C | Lead::D => Side::Output,
        }
    }

    /// Dual-rail encoding: A and C carry |1>, B and D carry |0>.
    pub const fn qubit_value(self) -> u8 {
        match self {
            Lead::A | Lead::C => 1,
            Lead::B | Lead::D => 0,
        }
    }

    pub const fn label(self) -> char {
        match self {
            Lead::A => 'A',
            Lead::B => 'B',
            Lead::C => 'C',
            Lead::D => 'D',
        }
    }
}

impl fmt::Display for Lead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Lead {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Lead::A),
            "B" | "b" => Ok(Lead::B),
            "C" | "c" => Ok(Lead::C),
            "D" | "d" => Ok(Lead::D),
            other => Err(Error::UnknownLead(other.to_string())),
        }
    }
}

/// The dimensionless parameter of the sqrt(NOT) family. `kappa = 0` is resonance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GateParameter(f64);

impl GateParameter {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() {
            Ok(GateParameter(kappa))
        } else {
            Err(Error::InvalidParameter(kappa))
        }
    }

    pub fn kappa(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for GateParameter {
    type Error = Error;

    fn try_from(kappa: f64) -> Result<Self> {
        GateParameter::new(kappa)
    }
}

/// A 4x4 matrix of finite complex amplitudes, indexed `[outgoing][incoming]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    entries: [[Complex64; 4]; 4],
}

impl ScatteringMatrix {
    pub fn new(entries: [[Complex64; 4]; 4]) -> Result<Self> {
        for (row, values) in entries.iter().enumerate() {
            for (col, z) in values.iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFiniteEntry { row, col });
                }
            }
        }
        Ok(ScatteringMatrix { entries })
    }

    /// Builds a matrix from real entries.
    pub fn from_real(entries: [[f64; 4]; 4]) -> Result<Self> {
        ScatteringMatrix::new(entries.map(|row| row.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn identity() -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        ScatteringMatrix { entries }
    }

    pub fn zeros() -> Self {
        ScatteringMatrix {
            entries: [[Complex64::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    /// Amplitude from lead `incoming` to lead `outgoing`.
    pub fn get(&self, outgoing: Lead, incoming: Lead) -> Complex64 {
        self.entries[outgoing.index()][incoming.index()]
    }

    pub fn column(&self, incoming: Lead) -> [Complex64; 4] {
        Lead::ALL.map(|out| self.get(out, incoming))
    }

    pub fn row(&self, outgoing: Lead) -> [Complex64; 4] {
        self.entries[outgoing.index()]
    }

    /// Conventional name of an entry, e.g. `t_DA` or `r_CD`.
    pub fn amplitude_label(outgoing: Lead, incoming: Lead) -> String {
        let kind = if outgoing.side() == incoming.side() {
            'r'
        } else {
            't'
        };
        format!("{kind}_{outgoing}{incoming}")
    }
}

/// The four magnitudes from which every entry of the family is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtNotAmplitudes {
    /// `sqrt((1 - sech k) / 4)`
    pub r1: f64,
    /// `sqrt((1 - sech k) / 2)`
    pub r2: f64,
    /// `sqrt(5/64 + (sech k + 1/8)(tanh k + 3/4) / 2)`
    pub t1: f64,
    /// `sqrt(5/64 + (sech k + 1/8)(3/4 - tanh k) / 2)`
    pub t2: f64,
}

/// Beyond this |x|, cosh overflows and sech is returned as exactly zero.
const SECH_CUTOFF: f64 = 700.0;
const RADICAND_DUST: f64 = 1e-15;

pub(crate) fn sech(x: f64) -> f64 {
    if x.abs() > SECH_CUTOFF {
        0.0
    } else {
        1.0 / x.cosh()
    }
}

fn guarded_sqrt(radicand: f64) -> f64 {
    if (-RADICAND_DUST..0.0).contains(&radicand) {
        0.0
    } else {
        radicand.sqrt()
    }
}

/// Squared magnitudes `(r1^2, r2^2, t1^2, t2^2)` before the square root.
pub fn sqrt_not_radicands(kappa: GateParameter) -> [f64; 4] {
    let s = sech(kappa.kappa());
    let th = kappa.kappa().tanh();
    let cavity = s + 0.125;
    [
        0.25 * (1.0 - s),
        0.5 * (1.0 - s),
        5.0 / 64.0 + 0.5 * cavity * (th + 0.75),
        5.0 / 64.0 + 0.5 * cavity * (-th + 0.75),
    ]
}

pub fn sqrt_not_amplitudes(kappa: GateParameter) -> SqrtNotAmplitudes {
    let [r1, r2, t1, t2] = sqrt_not_radicands(kappa).map(guarded_sqrt);
    SqrtNotAmplitudes { r1, r2, t1, t2 }
}

/// Builds the sqrt(NOT) scattering matrix for the given parameter.
///
/// The sign pattern is
///
/// ```text
///        A    B    C    D
///   A [ +r1  -r2  +t2  -t1 ]
///   B [ -r2  -r1  +t1  +t2 ]
///   C [ +t2  -t1  -r1  +r2 ]
///   D [ +t1  -t2  +r2  +r1 ]
/// ```
///
/// Every row and column is normalized for all `kappa`, but the matrix is not
/// unitary: rows C and D always overlap by `2 t1 t2`.
pub fn build_sqrt_not(kappa: GateParameter) -> ScatteringMatrix {
    let SqrtNotAmplitudes { r1, r2, t1, t2 } = sqrt_not_amplitudes(kappa);
    let real = [
        [r1, -r2, t2, -t1],
        [-r2, -r1, t1, t2],
        [t2, -t1, -r1, r2],
        [t1, -t2, r2, r1],
    ];
    ScatteringMatrix {
        entries: real.map(|row| row.map(|x| Complex64::new(x, 0.0))),
    }
}

/// Convenience wrapper that validates a raw `kappa` first.
pub fn sqrt_not(kappa: f64) -> Result<ScatteringMatrix> {
    GateParameter::new(kappa).map(build_sqrt_not)
}

/// Largest entry magnitude of `S^dagger S - I`.
pub fn unitarity_deviation(s: &ScatteringMatrix) -> f64 {
    let m = s.entries();
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut dot: Complex64 = m.iter().map(|row| row[i].conj() * row[j]).sum();
            if i == j {
                dot -= 1.0;
            }
            worst = worst.max(dot.norm());
        }
    }
    worst
}

/// Probability-conservation residuals of a scattering matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormDiagnostics {
    pub row_norm_error: f64,
    pub col_norm_error: f64,
}

impl NormDiagnostics {
    pub fn max_error(&self) -> f64 {
        self.row_norm_error.max(self.col_norm_error)
    }
}

pub fn norm_diagnostics(s: &ScatteringMatrix) -> NormDiagnostics {
    let m = s.entries();
    let mut row_norm_error = 0.0_f64;
    let mut col_norm_error = 0.0_f64;
    for (i, entries) in m.iter().enumerate() {
        let row: f64 = entries.iter().map(|z| z.norm_sqr()).sum();
        let col: f64 = m.iter().map(|r| r[i].norm_sqr()).sum();
        row_norm_error = row_norm_error.max((row - 1.0).abs());
        col_norm_error = col_norm_error.max((col - 1.0).abs());
    }
    NormDiagnostics {
        row_norm_error,
        col_norm_error,
    }
}
