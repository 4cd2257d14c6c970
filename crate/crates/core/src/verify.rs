//! Entanglement witness, fidelity bound, stabilizer eigenvalue checks and the
//! all-versus-nothing (AVN) functional.
//!
//! Every evaluation takes a [`TermSource`], which may be an exact density
//! matrix, a table of measured correlations, or a set of coincidence counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::apparatus::{outcome_probabilities, setting_for};
use crate::error::{Error, Result};
use crate::qcore::{c, CMatrix, DensityMatrix, PauliString, StateVector, DIM};
use crate::states::{cluster_state, TableEntry, TABLE_OBSERVABLES};
use crate::tomo::CountsRecord;

/// Terms of `W = ½(4 − t1 − t2 + t3 + t4 − t5 − t6)` with their signs.
pub const WITNESS_TERMS: [(&str, f64); 6] = [
    ("Z_A Z_B", -1.0),
    ("Z_A x_A x_B", -1.0),
    ("X_A z_A X_B", 1.0),
    ("z_A z_B", 1.0),
    ("x_A Z_B x_B", -1.0),
    ("X_A X_B z_B", -1.0),
];

/// Terms of `S = t1 − t2 + t3 + t4`.
pub const AVN_TERMS: [(&str, f64); 4] = [
    ("X_A X_B z_B", 1.0),
    ("Y_A Y_B z_B", -1.0),
    ("X_A x_A Y_B y_B", 1.0),
    ("Y_A x_A X_B y_B", 1.0),
];

/// Stabilizers of `|C4⟩` with their eigenvalues. The first seven establish
/// the elements of reality, the last four enter `S`.
pub const STABILIZERS: [(&str, f64); 9] = [
    ("X_A z_A X_B", -1.0),
    ("z_A z_B", -1.0),
    ("x_A Z_B x_B", 1.0),
    ("Z_A y_A y_B", 1.0),
    ("Y_A z_A Y_B", 1.0),
    ("X_A X_B z_B", 1.0),
    ("Y_A Y_B z_B", -1.0),
    ("X_A x_A Y_B y_B", 1.0),
    ("Y_A x_A X_B y_B", 1.0),
];

pub const CLASSICAL_BOUND: f64 = 2.0;
pub const QUANTUM_VALUE: f64 = 4.0;
pub const DEFAULT_CONTROL_THRESHOLD: f64 = 0.5;

/// An expectation value with its standard uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

/// Anything able to supply the expectation of a Pauli string.
pub trait TermSource {
    fn measure(&self, obs: &PauliString) -> Result<Measured>;
    fn provenance(&self) -> String;
}

impl TermSource for DensityMatrix {
    fn measure(&self, obs: &PauliString) -> Result<Measured> {
        Ok(Measured { value: crate::qcore::expectation(self, obs)?, sigma: 0.0 })
    }

    fn provenance(&self) -> String {
        "exact evaluation on a density matrix".into()
    }
}

impl TermSource for StateVector {
    fn measure(&self, obs: &PauliString) -> Result<Measured> {
        Ok(Measured { value: crate::qcore::expectation(self, obs)?, sigma: 0.0 })
    }

    fn provenance(&self) -> String {
        "exact evaluation on a pure state".into()
    }
}

impl TermSource for [TableEntry] {
    fn measure(&self, obs: &PauliString) -> Result<Measured> {
        for entry in self {
            let op = entry.operator()?;
            if op.same_operator(obs) {
                let ratio = obs.coefficient() / op.coefficient();
                return Ok(Measured { value: entry.value * ratio, sigma: entry.sigma * ratio.abs() });
            }
        }
        Err(Error::MissingTerm(obs.physical_name()))
    }

    fn provenance(&self) -> String {
        "arithmetic on supplied correlation values (no simulation)".into()
    }
}

impl TermSource for Vec<TableEntry> {
    fn measure(&self, obs: &PauliString) -> Result<Measured> {
        self.as_slice().measure(obs)
    }

    fn provenance(&self) -> String {
        self.as_slice().provenance()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub observable: String,
    /// Sign (or weight) with which the term enters the functional.
    pub weight: f64,
    pub value: f64,
    pub sigma: f64,
}

fn collect_terms(source: &(impl TermSource + ?Sized), terms: &[(&str, f64)]) -> Result<Vec<TermValue>> {
    terms
        .iter()
        .map(|&(name, weight)| {
            let m = source.measure(&PauliString::of(name))?;
            Ok(TermValue { observable: name.to_string(), weight, value: m.value, sigma: m.sigma })
        })
        .collect()
}

/// `sqrt(Σ (w_i σ_i)²)`
pub fn combined_sigma(terms: &[TermValue], scale: f64) -> f64 {
    scale * terms.iter().map(|t| (t.weight * t.sigma).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub terms: Vec<TermValue>,
    pub value: f64,
    pub fidelity_bound: f64,
    pub sigma: f64,
    pub provenance: String,
    pub warnings: Vec<String>,
}

impl WitnessReport {
    pub fn from_terms(terms: Vec<TermValue>, provenance: String) -> Self {
        let value = 0.5 * (4.0 + terms.iter().map(|t| t.weight * t.value).sum::<f64>());
        let sigma = combined_sigma(&terms, 0.5);
        let mut warnings = Vec::new();
        if !(-1.0..=1.0).contains(&value) {
            warnings.push(format!("witness value {value:.4} outside [-1, 1]; fidelity bound is not informative"));
        }
        Self { fidelity_bound: fidelity_bound(value), terms, value, sigma, provenance, warnings }
    }

    pub fn detects_entanglement(&self) -> bool {
        self.value < 0.0
    }
}

/// Evaluates `W` from the six correlation terms of `source`.
pub fn witness(source: &(impl TermSource + ?Sized)) -> Result<WitnessReport> {
    Ok(WitnessReport::from_terms(collect_terms(source, &WITNESS_TERMS)?, source.provenance()))
}

/// `F ≥ ½ − ½ W`
pub fn fidelity_bound(witness_value: f64) -> f64 {
    0.5 - 0.5 * witness_value
}

/// `W` as a single 16×16 operator.
pub fn witness_operator() -> CMatrix {
    let mut w = CMatrix::identity(DIM, DIM) * c(4.0, 0.0);
    for (name, weight) in WITNESS_TERMS {
        w += PauliString::of(name).matrix() * c(weight, 0.0);
    }
    w * c(0.5, 0.0)
}

/// `W̃ = ½ − |C4⟩⟨C4|`
pub fn projector_witness_operator() -> CMatrix {
    CMatrix::identity(DIM, DIM) * c(0.5, 0.0) - cluster_state().to_density().matrix()
}

/// Minimum eigenvalue of `W − 2W̃`, computed once per process.
pub fn witness_gap_min_eigenvalue() -> f64 {
    static GAP: OnceLock<f64> = OnceLock::new();
    *GAP.get_or_init(|| {
        let diff = witness_operator() - projector_witness_operator() * c(2.0, 0.0);
        let herm = (&diff + diff.adjoint()) * c(0.5, 0.0);
        herm.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorWitness {
    pub value: f64,
    pub fidelity: f64,
    /// Minimum eigenvalue of `W − 2W̃`; non-negative means `W ⪰ 2W̃`.
    pub gap_min_eigenvalue: f64,
}

pub fn projector_witness(rho: &DensityMatrix) -> ProjectorWitness {
    let fidelity = rho.fidelity_pure(&cluster_state());
    ProjectorWitness { value: 0.5 - fidelity, fidelity, gap_min_eigenvalue: witness_gap_min_eigenvalue() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerResult {
    pub observable: String,
    pub eigenvalue: f64,
    pub expectation: f64,
    /// `‖O|ψ⟩ − λ|ψ⟩‖`
    pub residual: f64,
}

/// Checks the nine eigenvalue equations on a pure state.
pub fn stabilizer_check(state: &StateVector) -> Vec<StabilizerResult> {
    STABILIZERS
        .iter()
        .map(|&(name, eigenvalue)| {
            let op = PauliString::of(name);
            let image = state.apply_pauli(&op);
            let residual = (image - state.amplitudes() * c(eigenvalue, 0.0)).norm();
            StabilizerResult {
                observable: name.to_string(),
                eigenvalue,
                expectation: state.expectation(&op),
                residual,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvnReport {
    pub terms: Vec<TermValue>,
    pub value: f64,
    pub classical_bound: f64,
    pub quantum_value: f64,
    pub sigma: f64,
    /// `(S − 2)/σ`, absent when σ = 0.
    pub sigmas_above_classical: Option<f64>,
    pub provenance: String,
}

impl AvnReport {
    pub fn from_terms(terms: Vec<TermValue>, provenance: String) -> Self {
        let value = terms.iter().map(|t| t.weight * t.value).sum();
        let sigma = combined_sigma(&terms, 1.0);
        let mut report = Self {
            terms,
            value,
            classical_bound: CLASSICAL_BOUND,
            quantum_value: QUANTUM_VALUE,
            sigma,
            sigmas_above_classical: None,
            provenance,
        };
        report.sigmas_above_classical = report.significance();
        report
    }

    /// Replaces the propagated uncertainty with a given one.
    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self.sigmas_above_classical = self.significance();
        self
    }

    fn significance(&self) -> Option<f64> {
        (self.sigma > 0.0).then(|| (self.value - self.classical_bound) / self.sigma)
    }

    pub fn violates_classical_bound(&self) -> bool {
        self.value > self.classical_bound
    }
}

pub fn avn(source: &(impl TermSource + ?Sized)) -> Result<AvnReport> {
    Ok(AvnReport::from_terms(collect_terms(source, &AVN_TERMS)?, source.provenance()))
}

/// Values `(X_A, Y_A, x_A, X_B, Y_B, y_B, z_B)` pre-assigned by a local
/// realistic model.
pub type RealityAssignment = [i8; 7];

/// `S` evaluated on a deterministic local assignment.
pub fn classical_s(a: &RealityAssignment) -> f64 {
    let [xa, ya, xma, xb, yb, ymb, zmb] = a.map(f64::from);
    xa * xb * zmb - ya * yb * zmb + xa * xma * yb * ymb + ya * xma * xb * ymb
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEnumeration {
    pub assignments: usize,
    pub max: f64,
    pub maximizers: Vec<RealityAssignment>,
}

/// Exhaustive search over all 2⁷ local assignments.
pub fn enumerate_classical_bound() -> ClassicalEnumeration {
    let all: Vec<RealityAssignment> = (0u32..128)
        .map(|k| std::array::from_fn(|i| if k >> i & 1 == 1 { -1 } else { 1 }))
        .collect();
    let max = all.iter().map(classical_s).fold(f64::NEG_INFINITY, f64::max);
    let maximizers = all.iter().copied().filter(|a| classical_s(a) == max).collect();
    ClassicalEnumeration { assignments: all.len(), max, maximizers }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlCheck {
    pub observable: String,
    pub expected: f64,
    pub value: f64,
    /// `|value| ≥ threshold` with the expected sign.
    pub supported: bool,
}

/// The seven perfect-correlation controls behind the elements of reality.
pub fn reality_controls(rho: &DensityMatrix, threshold: f64) -> Vec<ControlCheck> {
    STABILIZERS[..7]
        .iter()
        .map(|&(name, expected)| {
            let value = rho.expectation(&PauliString::of(name));
            ControlCheck {
                observable: name.to_string(),
                expected,
                value,
                supported: value * expected >= threshold,
            }
        })
        .collect()
}

/// Expectation and Poisson uncertainty from counts tagged with the
/// eigenvalue of each outcome: `E = Σ s n / N`, `σ² = Σ (s − E)² n / N²`.
pub fn term_from_counts(name: &str, counts: &[(f64, u64)]) -> Result<Measured> {
    let total: u64 = counts.iter().map(|&(_, n)| n).sum();
    if total == 0 {
        return Err(Error::NonPositiveCounts(name.to_string()));
    }
    let n = total as f64;
    let value = counts.iter().map(|&(s, k)| s * k as f64).sum::<f64>() / n;
    let var = counts.iter().map(|&(s, k)| (s - value).powi(2) * k as f64).sum::<f64>() / (n * n);
    Ok(Measured { value, sigma: var.sqrt() })
}

/// Correlation measurements stored as [`CountsRecord`]s.
///
/// Each record's `setting_id` names the observable and its `projector` holds
/// one `+`/`-` per measured slot (slot order q1..q4), the eigenvalue of that
/// slot's local operator for the recorded outcome.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountsSet {
    pub records: Vec<CountsRecord>,
}

impl CountsSet {
    pub fn new(records: Vec<CountsRecord>) -> Self {
        Self { records }
    }

    fn grouped(&self) -> Result<Vec<(PauliString, Vec<(f64, u64)>)>> {
        let mut groups: BTreeMap<&str, Vec<&CountsRecord>> = BTreeMap::new();
        for r in &self.records {
            groups.entry(r.setting_id.as_str()).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|(id, recs)| {
                let op: PauliString = id.parse()?;
                let tagged = recs
                    .iter()
                    .map(|r| Ok((outcome_eigenvalue(&r.projector)?, r.counts)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((op, tagged))
            })
            .collect()
    }
}

fn outcome_eigenvalue(label: &str) -> Result<f64> {
    label.chars().try_fold(1.0, |acc, ch| match ch {
        '+' => Ok(acc),
        '-' => Ok(-acc),
        _ => Err(Error::InvalidArgument(format!("outcome label `{label}` must use + and -"))),
    })
}

impl TermSource for CountsSet {
    fn measure(&self, obs: &PauliString) -> Result<Measured> {
        for (op, counts) in self.grouped()? {
            if op.same_operator(obs) {
                let m = term_from_counts(&op.physical_name(), &counts)?;
                let ratio = obs.coefficient() / op.coefficient();
                return Ok(Measured { value: m.value * ratio, sigma: m.sigma * ratio.abs() });
            }
        }
        Err(Error::MissingTerm(obs.physical_name()))
    }

    fn provenance(&self) -> String {
        "coincidence counts with Poisson error propagation".into()
    }
}

/// Simulates one correlation measurement through the analysis apparatus.
///
/// Every eigenvalue pattern of the measured slots receives a Poisson count
/// with mean `mean_total × probability`.
pub fn simulate_term_counts(
    rho: &DensityMatrix,
    obs: &PauliString,
    mean_total: f64,
    acquisition_time_s: f64,
    rng: &mut impl rand::Rng,
) -> Result<Vec<CountsRecord>> {
    if !(mean_total > 0.0) {
        return Err(Error::InvalidArgument(format!("mean_total must be positive, got {mean_total}")));
    }
    let plan = setting_for(obs)?;
    let probs = outcome_probabilities(rho, &plan.setting);
    let measured: Vec<usize> = (0..4).filter(|&i| plan.port_signs[i] != 0).collect();

    let mut by_pattern: BTreeMap<String, f64> = BTreeMap::new();
    for (outcome, p) in probs.probs.iter().enumerate() {
        let label: String = measured
            .iter()
            .map(|&i| {
                let bit = (outcome >> (3 - i)) & 1;
                let sign = if bit == 0 { plan.port_signs[i] } else { -plan.port_signs[i] };
                if sign > 0 {
                    '+'
                } else {
                    '-'
                }
            })
            .collect();
        *by_pattern.entry(label).or_default() += p;
    }

    by_pattern
        .into_iter()
        .map(|(label, p)| {
            Ok(CountsRecord {
                setting_id: obs.physical_name(),
                projector: label,
                counts: poisson(mean_total * p, rng),
                time_s: acquisition_time_s,
            })
        })
        .collect()
}

pub(crate) fn poisson(mean: f64, rng: &mut impl rand::Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Simulated counts for every Table I observable.
pub fn simulate_table_counts(rho: &DensityMatrix, mean_total: f64, seed: u64) -> Result<CountsSet> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for name in TABLE_OBSERVABLES {
        records.extend(simulate_term_counts(rho, &PauliString::of(name), mean_total, 10.0, &mut rng)?);
    }
    Ok(CountsSet::new(records))
}

/// One row of the correlation table with its W/S/C membership.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub observable: String,
    pub value: f64,
    pub sigma: f64,
    pub in_witness: bool,
    pub in_avn: bool,
    pub in_controls: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<TableRow>,
    pub witness: WitnessReport,
    pub avn: AvnReport,
    pub provenance: String,
}

/// Table rows, witness and AVN report for a source.
pub fn verify_all(source: &(impl TermSource + ?Sized)) -> Result<VerificationReport> {
    let rows = TABLE_OBSERVABLES
        .iter()
        .map(|&name| {
            let m = source.measure(&PauliString::of(name))?;
            Ok(TableRow {
                observable: name.to_string(),
                value: m.value,
                sigma: m.sigma,
                in_witness: WITNESS_TERMS.iter().any(|(n, _)| *n == name),
                in_avn: AVN_TERMS.iter().any(|(n, _)| *n == name),
                in_controls: STABILIZERS[..7].iter().any(|(n, _)| *n == name),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport { rows, witness: witness(source)?, avn: avn(source)?, provenance: source.provenance() })
}

impl VerificationReport {
    /// Plain-text layout with the W, S and C membership columns.
    pub fn to_text(&self) -> String {
        let mark = |b: bool| if b { "x" } else { " " };
        let mut out = String::new();
        let _ = writeln!(out, "{:<18} {:>18}   W  S  C", "Observable", "Value");
        let _ = writeln!(out, "{}", "-".repeat(48));
        for r in &self.rows {
            let value = if r.sigma > 0.0 {
                format!("{:+.4} ± {:.4}", r.value, r.sigma)
            } else {
                format!("{:+.4}", r.value)
            };
            let _ = writeln!(
                out,
                "{:<18} {:>18}   {}  {}  {}",
                r.observable,
                value,
                mark(r.in_witness),
                mark(r.in_avn),
                mark(r.in_controls)
            );
        }
        let _ = writeln!(out, "{}", "-".repeat(48));
        let w = &self.witness;
        let _ = writeln!(out, "Tr[W rho]        = {:+.4} ± {:.4}", w.value, w.sigma);
        let _ = writeln!(out, "fidelity bound   = {:.5}", w.fidelity_bound);
        let a = &self.avn;
        let _ = writeln!(out, "Tr[S rho]        = {:.4} ± {:.4}  (classical bound {}, quantum {})",
            a.value, a.sigma, a.classical_bound, a.quantum_value);
        match a.sigmas_above_classical {
            Some(s) => {
                let _ = writeln!(out, "violation        = {s:.1} sigma");
            }
            None => {
                let _ = writeln!(out, "violation        = exact (no uncertainty)");
            }
        }
        for warning in &w.warnings {
            let _ = writeln!(out, "warning: {warning}");
        }
        let _ = writeln!(out, "source: {}", self.provenance);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{hyperentangled_state, table1};

    #[test]
    fn ideal_cluster_values() {
        let rho = cluster_state().to_density();
        let w = witness(&rho).unwrap();
        assert!((w.value + 1.0).abs() < 1e-12);
        assert!((w.fidelity_bound - 1.0).abs() < 1e-12);
        let s = avn(&rho).unwrap();
        assert!((s.value - 4.0).abs() < 1e-12);
        assert!(s.sigmas_above_classical.is_none());
        let xi = hyperentangled_state();
        assert!((witness(&xi).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_arithmetic() {
        let table = table1();
        let w = witness(&table).unwrap();
        let by_hand = 0.5 * (4.0 - 0.9283 - 0.8194 - 0.9074 - 0.9951 - 0.8110 - 0.9074);
        assert!((w.value - by_hand).abs() < 1e-12);
        assert!((w.value + 0.6843).abs() < 5e-5);
        assert!((w.fidelity_bound - 0.84215).abs() < 1e-9);
        let s = avn(&table).unwrap().with_sigma(0.0095);
        assert!((s.value - 3.4146).abs() < 1e-9);
        assert!((s.sigmas_above_classical.unwrap() - 148.905).abs() < 1e-2);
    }

    #[test]
    fn propagated_sigmas_for_table() {
        let table = table1();
        let s = avn(&table).unwrap();
        let by_hand = (0.0037f64.powi(2) + 0.0041f64.powi(2) + 0.0055f64.powi(2) * 2.0).sqrt();
        assert!((s.sigma - by_hand).abs() < 1e-12);
        let w = witness(&table).unwrap();
        let quad = [0.0032f64, 0.0049, 0.0037, 0.0009, 0.0050, 0.0037].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!((w.sigma - 0.5 * quad).abs() < 1e-12);
    }

    #[test]
    fn fidelity_bound_examples() {
        assert!((fidelity_bound(-0.6843) - 0.84215).abs() < 1e-12);
        assert_eq!(fidelity_bound(-1.0), 1.0);
        assert_eq!(fidelity_bound(1.0), 0.0);
    }

    #[test]
    fn projector_witness_examples() {
        let pw = projector_witness(&cluster_state().to_density());
        assert!((pw.value + 0.5).abs() < 1e-12);
        let pw = projector_witness(&DensityMatrix::maximally_mixed(4).unwrap());
        assert!((pw.value - 0.4375).abs() < 1e-12);
        assert!(pw.gap_min_eigenvalue >= -1e-10);
    }

    #[test]
    fn stabilizers_of_cluster() {
        for r in stabilizer_check(&cluster_state()) {
            assert!(r.residual < 1e-10, "{}", r.observable);
            assert!((r.expectation - r.eigenvalue).abs() < 1e-10);
        }
        let other = StateVector::basis(4, 5).unwrap();
        let results = stabilizer_check(&other);
        assert_eq!(results.len(), 9);
        assert!(results.iter().any(|r| r.residual > 0.1));
    }

    #[test]
    fn classical_enumeration() {
        let e = enumerate_classical_bound();
        assert_eq!(e.assignments, 128);
        assert_eq!(e.max, 2.0);
        assert!(!e.maximizers.is_empty());
    }

    #[test]
    fn controls() {
        let ideal = reality_controls(&cluster_state().to_density(), DEFAULT_CONTROL_THRESHOLD);
        assert!(ideal.iter().all(|c| c.supported && (c.value - c.expected).abs() < 1e-12));
        let mixed = reality_controls(&DensityMatrix::maximally_mixed(4).unwrap(), DEFAULT_CONTROL_THRESHOLD);
        assert!(mixed.iter().all(|c| !c.supported && c.value.abs() < 1e-12));
    }

    #[test]
    fn counts_statistics() {
        let m = term_from_counts("t", &[(1.0, 500), (-1.0, 500)]).unwrap();
        assert_eq!(m.value, 0.0);
        assert!((m.sigma - 1.0 / 1000f64.sqrt()).abs() < 1e-15);

        let base = term_from_counts("t", &[(1.0, 900), (-1.0, 100)]).unwrap();
        let scaled = term_from_counts("t", &[(1.0, 3600), (-1.0, 400)]).unwrap();
        assert!((scaled.sigma - base.sigma / 2.0).abs() < 1e-15);
        assert!(matches!(term_from_counts("t", &[(1.0, 0)]), Err(Error::NonPositiveCounts(_))));
    }

    #[test]
    fn missing_term() {
        let mut table = table1();
        table.retain(|e| e.observable != "z_A z_B");
        assert!(matches!(witness(&table), Err(Error::MissingTerm(_))));
        assert!(avn(&table).is_ok());
    }

    #[test]
    fn table_text_layout() {
        let report = verify_all(&table1()).unwrap();
        let text = report.to_text();
        assert!(text.contains("X_A X_B z_B"));
        assert!(text.contains("-0.6843"));
        assert!(text.contains("3.4146"));
        let row = report.rows.iter().find(|r| r.observable == "X_A X_B z_B").unwrap();
        assert!(row.in_witness && row.in_avn && row.in_controls);
        let row = report.rows.iter().find(|r| r.observable == "Z_A y_A y_B").unwrap();
        assert!(!row.in_witness && !row.in_avn && row.in_controls);
    }
}
