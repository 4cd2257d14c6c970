//! Dense arithmetic on the four-qubit Hilbert space.
//!
//! Qubit slots are numbered 1 to 4 and always appear in the order
//!
//! | slot | degree of freedom         | `|0⟩` | `|1⟩` |
//! |------|---------------------------|-------|-------|
//! | q1   | polarization of photon B  | H     | V     |
//! | q2   | polarization of photon A  | H     | V     |
//! | q3   | path of photon A          | ℓ     | r     |
//! | q4   | path of photon B          | ℓ     | r     |
//!
//! A basis index `b ∈ 0..16` decodes as the bits `(q1 q2 q3 q4)` with q1 the
//! most significant bit. Smaller registers produced by partial traces keep
//! the relative order of the surviving slots.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const NUM_QUBITS: usize = 4;
pub const DIM: usize = 16;

/// Numeric tolerances shared by every module.
pub mod tol {
    /// Exact-math comparisons (eigenvalue equations, witness values).
    pub const EXACT: f64 = 1e-10;
    /// Normalization of state vectors.
    pub const NORM: f64 = 1e-12;
    /// Entrywise Hermiticity and unit trace of density matrices.
    pub const HERMITIAN: f64 = 1e-12;
    /// Smallest eigenvalue accepted for a density matrix.
    pub const PSD: f64 = 1e-10;
    /// Equality of rays, `| |⟨a|b⟩| - 1 |`.
    pub const RAY: f64 = 1e-10;
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit mask of `slot` (1-based) inside a register of `num_qubits` qubits.
pub(crate) fn slot_mask(slot: usize, num_qubits: usize) -> usize {
    1 << (num_qubits - slot)
}

/// Basis index for a photon-level description of the pair.
///
/// `*_pol` is `0` for H and `1` for V, `*_path` is `0` for ℓ and `1` for r.
pub fn photon_index(a_pol: usize, a_path: usize, b_pol: usize, b_path: usize) -> usize {
    (b_pol << 3) | (a_pol << 2) | (a_path << 1) | b_path
}

fn checked_qubits(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        16 => Ok(4),
        _ => Err(Error::Dimension { expected: "2, 4, 8 or 16".into(), found: dim }),
    }
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Matrix2<C64> {
        let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        match self {
            Pauli::I => Matrix2::new(l, o, o, l),
            Pauli::X => Matrix2::new(o, l, l, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(l, o, o, -l),
        }
    }

    fn from_char(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Action on a basis bit: returns (phase, flips).
    fn act(self, bit: bool) -> (C64, bool) {
        match (self, bit) {
            (Pauli::I, _) => (c(1.0, 0.0), false),
            (Pauli::X, _) => (c(1.0, 0.0), true),
            (Pauli::Y, false) => (c(0.0, 1.0), true),
            (Pauli::Y, true) => (c(0.0, -1.0), true),
            (Pauli::Z, false) => (c(1.0, 0.0), false),
            (Pauli::Z, true) => (c(-1.0, 0.0), false),
        }
    }
}

/// Tensor-product observable over the four slots, with a real coefficient.
///
/// Parses either the compact slot form (`"IIZZ"`, slot q1 first) or the
/// photon notation used for the polarization/momentum operators, where upper
/// case letters act on polarization and lower case on path:
/// `"X_A z_A X_B"`, `"Z_AZ_B"`, `"-Y_AY_Bz_B"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    labels: [Pauli; 4],
    coefficient: f64,
}

impl PauliString {
    pub fn new(labels: [Pauli; 4], coefficient: f64) -> Self {
        Self { labels, coefficient }
    }

    pub fn unit(labels: [Pauli; 4]) -> Self {
        Self::new(labels, 1.0)
    }

    /// Shorthand for parsing a string known to be valid.
    ///
    /// Panics on malformed input; use [`str::parse`] for user data.
    pub fn of(text: &str) -> Self {
        text.parse().unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn labels(&self) -> [Pauli; 4] {
        self.labels
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// Label on slot `slot` (1-based).
    pub fn label(&self, slot: usize) -> Pauli {
        self.labels[slot - 1]
    }

    pub fn with_coefficient(&self, coefficient: f64) -> Self {
        Self::new(self.labels, coefficient)
    }

    /// Same labels, ignoring the coefficient.
    pub fn same_operator(&self, other: &PauliString) -> bool {
        self.labels == other.labels
    }

    pub fn compact(&self) -> String {
        self.labels.iter().map(|p| p.as_char()).collect()
    }

    /// Photon notation, ordered A polarization, A path, B polarization, B path.
    pub fn physical_name(&self) -> String {
        const ORDER: [(usize, bool, char); 4] =
            [(2, true, 'A'), (3, false, 'A'), (1, true, 'B'), (4, false, 'B')];
        let mut parts = Vec::new();
        for (slot, upper, photon) in ORDER {
            let p = self.label(slot);
            if p == Pauli::I {
                continue;
            }
            let ch = if upper { p.as_char() } else { p.as_char().to_ascii_lowercase() };
            parts.push(format!("{ch}_{photon}"));
        }
        let body = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
        if self.coefficient == 1.0 {
            body
        } else if self.coefficient == -1.0 {
            format!("-{body}")
        } else {
            format!("{} {body}", self.coefficient)
        }
    }

    /// Dense 16×16 matrix `coefficient · σ_q1 ⊗ σ_q2 ⊗ σ_q3 ⊗ σ_q4`.
    pub fn matrix(&self) -> CMatrix {
        let m = self.labels.map(Pauli::matrix);
        tensor4([&m[0], &m[1], &m[2], &m[3]]) * c(self.coefficient, 0.0)
    }

    /// Bit mask of the slots carrying X or Y.
    pub(crate) fn flip_mask(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (i, _)| m | slot_mask(i + 1, NUM_QUBITS))
    }

    /// `⟨b ⊕ mask| P |b⟩` for the unit-coefficient operator.
    pub(crate) fn phase(&self, basis: usize) -> C64 {
        self.labels.iter().enumerate().fold(c(1.0, 0.0), |acc, (i, p)| {
            let bit = basis & slot_mask(i + 1, NUM_QUBITS) != 0;
            acc * p.act(bit).0
        })
    }

    /// Slots (1-based) on which the operator is not the identity.
    pub fn support(&self) -> Vec<usize> {
        (1..=4).filter(|&s| self.label(s) != Pauli::I).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.physical_name())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidObservable(text.to_string());
        let trimmed = text.trim();
        let (coefficient, body) = if let Some(rest) = trimmed.strip_prefix('-') {
            (-1.0, rest)
        } else if let Some(rest) = trimmed.strip_prefix('−') {
            (-1.0, rest)
        } else if let Some(rest) = trimmed.strip_prefix('+') {
            (1.0, rest)
        } else {
            (1.0, trimmed)
        };
        let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        if body.is_empty() {
            return Err(bad());
        }

        if body.len() == 4 && !body.contains('_') {
            let mut labels = [Pauli::I; 4];
            for (slot, ch) in body.chars().enumerate() {
                if !ch.is_ascii_uppercase() {
                    return Err(bad());
                }
                labels[slot] = Pauli::from_char(ch).ok_or_else(bad)?;
            }
            return Ok(Self::new(labels, coefficient));
        }

        let mut labels = [Pauli::I; 4];
        let mut seen = [false; 4];
        let chars: Vec<char> = body.chars().collect();
        if !chars.len().is_multiple_of(3) {
            return Err(bad());
        }
        for token in chars.chunks(3) {
            let (op, sep, photon) = (token[0], token[1], token[2]);
            if sep != '_' {
                return Err(bad());
            }
            let pauli = Pauli::from_char(op).filter(|p| *p != Pauli::I).ok_or_else(bad)?;
            let slot = match (op.is_ascii_uppercase(), photon) {
                (true, 'A') => 2,
                (true, 'B') => 1,
                (false, 'A') => 3,
                (false, 'B') => 4,
                _ => return Err(bad()),
            };
            if seen[slot - 1] {
                return Err(bad());
            }
            seen[slot - 1] = true;
            labels[slot - 1] = pauli;
        }
        Ok(Self::new(labels, coefficient))
    }
}

/// Kronecker product `a ⊗ b ⊗ c ⊗ d` in slot order q1..q4.
pub fn tensor4(ops: [&Matrix2<C64>; 4]) -> CMatrix {
    let dyn2 = |m: &Matrix2<C64>| CMatrix::from_iterator(2, 2, m.iter().copied());
    ops[1..]
        .iter()
        .fold(dyn2(ops[0]), |acc, m| acc.kronecker(&dyn2(m)))
}

/// Unit-norm amplitude vector on 1 to 4 qubits (16 amplitudes for the full
/// register).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        checked_qubits(amplitudes.len())?;
        let state = Self { amps: CVector::from_vec(amplitudes) };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > tol::NORM {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    /// Builds a state from real amplitudes after normalizing them.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        checked_qubits(amplitudes.len())?;
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(Self { amps: v / c(norm, 0.0) })
    }

    pub(crate) fn from_vector_unchecked(amps: CVector) -> Self {
        Self { amps }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        checked_qubits(dim)?;
        if index >= dim {
            return Err(Error::Dimension { expected: format!("index < {dim}"), found: index });
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// True when the two states are the same ray.
    pub fn same_ray(&self, other: &StateVector) -> bool {
        self.dim() == other.dim() && (self.inner(other).norm() - 1.0).abs() < tol::RAY
    }

    /// `self ⊗ other`, with `self` on the leading slots.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        Self { amps: self.amps.kronecker(&other.amps) }
    }

    /// Applies a matrix, failing if the result is not normalized.
    pub fn apply(&self, op: &CMatrix) -> Result<StateVector> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::Dimension { expected: format!("{0}×{0}", self.dim()), found: op.nrows() });
        }
        let out = Self { amps: op * &self.amps };
        let norm_sqr = out.norm_sqr();
        if (norm_sqr - 1.0).abs() > tol::NORM {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(out)
    }

    /// `P|ψ⟩` for a four-qubit Pauli string (coefficient included).
    pub fn apply_pauli(&self, obs: &PauliString) -> CVector {
        assert_eq!(self.dim(), DIM, "Pauli strings act on the four-qubit register");
        let mask = obs.flip_mask();
        let mut out = CVector::zeros(DIM);
        for b in 0..DIM {
            out[b ^ mask] += obs.phase(b) * self.amps[b] * obs.coefficient();
        }
        out
    }

    pub fn expectation(&self, obs: &PauliString) -> f64 {
        self.amps.dotc(&self.apply_pauli(obs)).re
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { m: &self.amps * self.amps.adjoint() }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on 1 to 4 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension { expected: "square matrix".into(), found: m.nrows() });
        }
        checked_qubits(m.nrows())?;
        let deviation = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > tol::HERMITIAN || trace.im.abs() > tol::HERMITIAN {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let rho = Self { m };
        let min_eigenvalue = rho.min_eigenvalue();
        if min_eigenvalue < -tol::PSD {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        checked_qubits(dim)?;
        Ok(Self { m: CMatrix::identity(dim, dim) / c(dim as f64, 0.0) })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.m + self.m.adjoint()) * c(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `Tr[O ρ]` for a four-qubit Pauli string.
    pub fn expectation(&self, obs: &PauliString) -> f64 {
        assert_eq!(self.dim(), DIM, "Pauli strings act on the four-qubit register");
        let mask = obs.flip_mask();
        let mut acc = c(0.0, 0.0);
        for col in 0..DIM {
            acc += obs.phase(col) * self.m[(col, col ^ mask)];
        }
        acc.re * obs.coefficient()
    }

    /// `Tr[O ρ]` for an arbitrary operator of matching size.
    pub fn expectation_of(&self, op: &CMatrix) -> f64 {
        (op * &self.m).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_pure(&self, target: &StateVector) -> f64 {
        assert_eq!(self.dim(), target.dim(), "dimension mismatch");
        target.amps.dotc(&(&self.m * &target.amps)).re
    }

    /// `p·self + (1−p)·other`.
    pub fn mix(&self, p: f64, other: &DensityMatrix) -> DensityMatrix {
        Self { m: &self.m * c(p, 0.0) + &other.m * c(1.0 - p, 0.0) }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> DensityMatrix {
        Self { m: u * &self.m * u.adjoint() }
    }

    /// Diagonal of the matrix (computational-basis probabilities).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Reduced state on the slots in `keep` (1-based); see [`partial_trace`].
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Borrowed pure or mixed state, accepted by [`expectation`].
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

/// `⟨ψ|O|ψ⟩` or `Tr[Oρ]`; rejects states that are not normalized.
pub fn expectation<'a>(state: impl Into<StateRef<'a>>, obs: &PauliString) -> Result<f64> {
    match state.into() {
        StateRef::Pure(psi) => {
            let norm_sqr = psi.norm_sqr();
            if (norm_sqr - 1.0).abs() > tol::NORM {
                return Err(Error::NotNormalized { norm_sqr });
            }
            if psi.dim() != DIM {
                return Err(Error::Dimension { expected: DIM.to_string(), found: psi.dim() });
            }
            Ok(psi.expectation(obs))
        }
        StateRef::Mixed(rho) => {
            let trace = rho.trace();
            if (trace - 1.0).abs() > tol::HERMITIAN {
                return Err(Error::TraceNotOne { trace });
            }
            if rho.dim() != DIM {
                return Err(Error::Dimension { expected: DIM.to_string(), found: rho.dim() });
            }
            Ok(rho.expectation(obs))
        }
    }
}

/// `⟨target|ρ|target⟩`.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> f64 {
    rho.fidelity_pure(target)
}

/// Traces out every slot not in `keep`. Slots are 1-based; the result keeps
/// the surviving slots in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&s| s == 0 || s > n) {
        return Err(Error::InvalidSlot(bad));
    }
    let traced: Vec<usize> = (1..=n).filter(|s| !kept.contains(s)).collect();

    let k = kept.len();
    let out_dim = 1usize << k;
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0;
        for (j, &slot) in kept.iter().enumerate() {
            if kept_bits & slot_mask(j + 1, k) != 0 {
                idx |= slot_mask(slot, n);
            }
        }
        for (j, &slot) in traced.iter().enumerate() {
            if traced_bits & slot_mask(j + 1, traced.len()) != 0 {
                idx |= slot_mask(slot, n);
            }
        }
        idx
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        for col in 0..out_dim {
            let mut acc = c(0.0, 0.0);
            for t in 0..(1usize << traced.len()) {
                acc += rho.m[(compose(r, t), compose(col, t))];
            }
            out[(r, col)] = acc;
        }
    }
    Ok(DensityMatrix { m: out })
}
