//! The source states of the experiment, the half-wave-plate gate that turns
//! the hyperentangled pair into the linear cluster, and the noise model
//! fitted to measured correlations.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{c, photon_index, CMatrix, CVector, DensityMatrix, PauliString, StateVector, DIM};

/// Table I observables in the order they are printed.
pub const TABLE_OBSERVABLES: [&str; 11] = [
    "Z_A Z_B",
    "Z_A x_A x_B",
    "X_A z_A X_B",
    "z_A z_B",
    "x_A Z_B x_B",
    "Z_A y_A y_B",
    "Y_A z_A Y_B",
    "X_A X_B z_B",
    "Y_A Y_B z_B",
    "X_A x_A Y_B y_B",
    "Y_A x_A X_B y_B",
];

const TABLE_I_JSON: &str = include_str!("../data/table1.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Degree of freedom a two-qubit fragment lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dof {
    Polarization,
    Momentum,
}

/// Two-qubit Bell state with photon A on the leading qubit.
///
/// Basis order is `(AB) = 00, 01, 10, 11`, i.e. `HH, HV, VH, VV` for
/// polarization and `ℓℓ, ℓr, rℓ, rr` for momentum. The encodings H↔0, V↔1,
/// ℓ↔0, r↔1 make the amplitudes independent of `dof`; the argument only
/// documents which register the fragment is meant for.
pub fn bell_state(kind: BellKind, _dof: Dof) -> StateVector {
    let s = FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => [s, 0.0, 0.0, s],
        BellKind::PhiMinus => [s, 0.0, 0.0, -s],
        BellKind::PsiPlus => [0.0, s, s, 0.0],
        BellKind::PsiMinus => [0.0, s, -s, 0.0],
    };
    StateVector::from_vector_unchecked(CVector::from_iterator(4, amps.map(|a| c(a, 0.0))))
}

/// Combines a polarization fragment and a momentum fragment (both with
/// photon A leading) into the canonical four-qubit register.
pub fn from_photon_fragments(pol: &StateVector, mom: &StateVector) -> Result<StateVector> {
    if pol.dim() != 4 || mom.dim() != 4 {
        return Err(Error::Dimension { expected: "two-qubit fragments".into(), found: pol.dim().max(mom.dim()) });
    }
    let mut amps = CVector::zeros(DIM);
    for (a_pol, b_pol, a_path, b_path) in photon_bits() {
        amps[photon_index(a_pol, a_path, b_pol, b_path)] =
            pol.amplitude(a_pol * 2 + b_pol) * mom.amplitude(a_path * 2 + b_path);
    }
    Ok(StateVector::from_vector_unchecked(amps))
}

fn photon_bits() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|k| ((k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1))
}

/// `|Ξ⟩ = |Φ⁻⟩_pol ⊗ |ψ⁺⟩_mom`.
pub fn hyperentangled_state() -> StateVector {
    from_photon_fragments(
        &bell_state(BellKind::PhiMinus, Dof::Polarization),
        &bell_state(BellKind::PsiPlus, Dof::Momentum),
    )
    .expect("fragments are two-qubit")
}

/// Half-wave plate with its axis vertical, inserted on the `r_A` mode.
///
/// On that path the plate leaves H alone and flips the sign of V; the ℓ_A
/// path is untouched. The operator is diagonal and unitary.
pub fn hw_cp_operator() -> CMatrix {
    let mut m = CMatrix::identity(DIM, DIM);
    for b_pol in 0..2 {
        for b_path in 0..2 {
            let i = photon_index(1, 1, b_pol, b_path);
            m[(i, i)] = c(-1.0, 0.0);
        }
    }
    m
}

pub fn apply_hw_cp(state: &StateVector) -> StateVector {
    state.apply(&hw_cp_operator()).expect("diagonal ±1 operator is unitary")
}

/// `|C4⟩` written out term by term from its photon description.
pub fn cluster_state() -> StateVector {
    // (A pol, A path, B pol, B path, amplitude)
    let terms = [
        (0, 1, 0, 0, 0.5),  // |H r⟩_A |H ℓ⟩_B
        (1, 1, 1, 0, 0.5),  // |V r⟩_A |V ℓ⟩_B
        (0, 0, 0, 1, 0.5),  // |H ℓ⟩_A |H r⟩_B
        (1, 0, 1, 1, -0.5), // |V ℓ⟩_A |V r⟩_B
    ];
    let mut amps = CVector::zeros(DIM);
    for (ap, ax, bp, bx, a) in terms {
        amps[photon_index(ap, ax, bp, bx)] = c(a, 0.0);
    }
    StateVector::from_vector_unchecked(amps)
}

/// Bit flip on slot q3 (the path qubit of photon A).
pub fn logical_map(state: &StateVector) -> StateVector {
    let mut amps = CVector::zeros(DIM);
    for b in 0..DIM {
        amps[b ^ 0b0010] = state.amplitude(b);
    }
    StateVector::from_vector_unchecked(amps)
}

/// `½(|0000⟩ + |1100⟩ + |0011⟩ − |1111⟩)`, the linear cluster in its usual
/// graph-state labelling.
pub fn reference_linear_cluster() -> StateVector {
    let mut amps = CVector::zeros(DIM);
    amps[0b0000] = c(0.5, 0.0);
    amps[0b1100] = c(0.5, 0.0);
    amps[0b0011] = c(0.5, 0.0);
    amps[0b1111] = c(-0.5, 0.0);
    StateVector::from_vector_unchecked(amps)
}

/// Noise model parameters.
///
/// * `v_pol`: weight of the ideal polarization state against white noise,
///   applied to both polarization qubits.
/// * `mu_mom`: factor on every coherence between different path
///   configurations (in particular between the `r_A ℓ_B` and `ℓ_A r_B` pairs).
/// * `z_err`: fraction of pairs found in the wrong-correlated path modes
///   (`ℓ_A ℓ_B`, `r_A r_B`), with unpolarized light.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub v_pol: f64,
    pub mu_mom: f64,
    pub z_err: f64,
}

impl NoiseParams {
    pub const IDEAL: NoiseParams = NoiseParams { v_pol: 1.0, mu_mom: 1.0, z_err: 0.0 };

    pub fn new(v_pol: f64, mu_mom: f64, z_err: f64) -> Result<Self> {
        let p = Self { v_pol, mu_mom, z_err };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("v_pol", self.v_pol), ("mu_mom", self.mu_mom), ("z_err", self.z_err)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ParamOutOfRange { name, value });
            }
        }
        Ok(())
    }

    fn from_array(p: [f64; 3]) -> Self {
        Self { v_pol: p[0], mu_mom: p[1], z_err: p[2] }
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::IDEAL
    }
}

/// Applies the noise channel to a pure state.
///
/// The three stages are each completely positive, so the output is a valid
/// density matrix for any parameters in range:
/// 1. two-qubit polarization depolarizing with weight `v_pol`,
/// 2. path dephasing: entries between different path configurations × `mu_mom`,
/// 3. admixture of `z_err` unpolarized pairs in the `ℓℓ`/`rr` modes.
pub fn apply_noise(state: &StateVector, params: &NoiseParams) -> Result<DensityMatrix> {
    params.validate()?;
    if state.dim() != DIM {
        return Err(Error::Dimension { expected: DIM.to_string(), found: state.dim() });
    }
    let rho = state.to_density();
    Ok(DensityMatrix::from_matrix_unchecked(noise_channel(rho.matrix(), params)))
}

/// Same channel acting on an arbitrary four-qubit density matrix.
pub fn apply_noise_to_density(rho: &DensityMatrix, params: &NoiseParams) -> Result<DensityMatrix> {
    params.validate()?;
    if rho.dim() != DIM {
        return Err(Error::Dimension { expected: DIM.to_string(), found: rho.dim() });
    }
    Ok(DensityMatrix::from_matrix_unchecked(noise_channel(rho.matrix(), params)))
}

// index = pol * 4 + path, pol = (q1 q2), path = (q3 q4)
fn noise_channel(rho: &CMatrix, p: &NoiseParams) -> CMatrix {
    let mut path = CMatrix::zeros(4, 4);
    for pol in 0..4 {
        for m1 in 0..4 {
            for m2 in 0..4 {
                path[(m1, m2)] += rho[(pol * 4 + m1, pol * 4 + m2)];
            }
        }
    }
    let mut out = CMatrix::zeros(DIM, DIM);
    for i in 0..DIM {
        for j in 0..DIM {
            let (p1, m1, p2, m2) = (i / 4, i % 4, j / 4, j % 4);
            let mut value = rho[(i, j)] * p.v_pol;
            if p1 == p2 {
                value += path[(m1, m2)] * ((1.0 - p.v_pol) / 4.0);
            }
            if m1 != m2 {
                value *= p.mu_mom;
            }
            value *= 1.0 - p.z_err;
            // ℓℓ = 0b00, rr = 0b11
            if i == j && (m1 == 0b00 || m1 == 0b11) {
                value += c(p.z_err / 8.0, 0.0);
            }
            out[(i, j)] = value;
        }
    }
    out
}

/// Noisy cluster state for the given parameters.
pub fn noisy_cluster(params: &NoiseParams) -> Result<DensityMatrix> {
    apply_noise(&cluster_state(), params)
}

/// One measured correlation: the Table I JSON record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub observable: String,
    pub value: f64,
    pub sigma: f64,
}

impl TableEntry {
    pub fn operator(&self) -> Result<PauliString> {
        self.observable.parse()
    }
}

/// The eleven published correlation values.
pub fn table1() -> Vec<TableEntry> {
    serde_json::from_str(TABLE_I_JSON).expect("bundled table is valid JSON")
}

pub fn parse_table(json: &str) -> Result<Vec<TableEntry>> {
    let entries: Vec<TableEntry> = serde_json::from_str(json)?;
    for e in &entries {
        e.operator()?;
    }
    Ok(entries)
}

pub fn load_table(path: impl AsRef<Path>) -> Result<Vec<TableEntry>> {
    parse_table(&std::fs::read_to_string(path)?)
}

/// Ideal `⟨C4|O|C4⟩` for every Table I observable, in table order.
pub fn ideal_table() -> Vec<TableEntry> {
    let cluster = cluster_state();
    TABLE_OBSERVABLES
        .iter()
        .map(|o| TableEntry {
            observable: o.to_string(),
            value: cluster.expectation(&PauliString::of(o)).round(),
            sigma: 0.0,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResidual {
    pub observable: String,
    pub target: f64,
    pub model: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub params: NoiseParams,
    pub residuals: Vec<FitResidual>,
    /// `½ Σ residual²`
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Calibration {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

const FIT_MAX_ITERATIONS: usize = 500;

/// Equal-weight least-squares fit of [`NoiseParams`] to measured
/// correlations of the cluster state.
///
/// All eleven Table I observables must be present; extra entries take part
/// in the fit as well. A fit that stops before converging is returned with
/// `converged = false`.
pub fn calibrate_noise(targets: &[TableEntry]) -> Result<Calibration> {
    let parsed: Vec<(PauliString, f64, &str)> = targets
        .iter()
        .map(|t| Ok((t.operator()?, t.value, t.observable.as_str())))
        .collect::<Result<_>>()?;
    for name in TABLE_OBSERVABLES {
        let op = PauliString::of(name);
        if !parsed.iter().any(|(p, _, _)| p.same_operator(&op)) {
            return Err(Error::MissingTerm(name.to_string()));
        }
    }

    let cluster = cluster_state();
    let residuals = |p: [f64; 3]| -> Vec<f64> {
        let rho = DensityMatrix::from_matrix_unchecked(noise_channel(
            cluster.to_density().matrix(),
            &NoiseParams::from_array(p),
        ));
        parsed.iter().map(|(op, target, _)| rho.expectation(op) - target).collect()
    };
    let cost = |r: &[f64]| 0.5 * r.iter().map(|x| x * x).sum::<f64>();

    let mut p = [0.9, 0.9, 0.01];
    let mut r = residuals(p);
    let mut current = cost(&r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        let jac = jacobian(&residuals, p, &r);
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (row, ri) in jac.iter().zip(&r) {
            for a in 0..3 {
                jtr[a] += row[a] * ri;
                for b in 0..3 {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        if jtr.amax() < 1e-14 {
            converged = true;
            break;
        }

        let mut accepted = None;
        while lambda < 1e12 {
            let mut damped = jtj;
            for a in 0..3 {
                damped[(a, a)] += lambda * (jtj[(a, a)] + 1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 4.0;
                continue;
            };
            let trial = [0, 1, 2].map(|a| (p[a] + step[a]).clamp(0.0, 1.0));
            let r_trial = residuals(trial);
            let c_trial = cost(&r_trial);
            if c_trial < current {
                accepted = Some((trial, r_trial, c_trial));
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda *= 4.0;
        }

        match accepted {
            Some((trial, r_trial, c_trial)) => {
                let moved = (0..3).map(|a| (trial[a] - p[a]).abs()).fold(0.0, f64::max);
                let improvement = current - c_trial;
                p = trial;
                r = r_trial;
                current = c_trial;
                if improvement < 1e-18 || moved < 1e-13 {
                    converged = true;
                    break;
                }
            }
            None => {
                // no downhill step at any damping: stationary within the box
                converged = true;
                break;
            }
        }
    }

    Ok(Calibration {
        params: NoiseParams::from_array(p),
        residuals: parsed
            .iter()
            .zip(&r)
            .map(|((_, target, name), res)| FitResidual {
                observable: name.to_string(),
                target: *target,
                model: target + res,
                residual: *res,
            })
            .collect(),
        cost: current,
        iterations,
        converged,
    })
}

fn jacobian(f: &impl Fn([f64; 3]) -> Vec<f64>, p: [f64; 3], r: &[f64]) -> Vec<[f64; 3]> {
    const H: f64 = 1e-7;
    let mut jac = vec![[0.0; 3]; r.len()];
    for a in 0..3 {
        let (lo, hi) = ((p[a] - H).max(0.0), (p[a] + H).min(1.0));
        let (mut plo, mut phi) = (p, p);
        plo[a] = lo;
        phi[a] = hi;
        let (rlo, rhi) = (f(plo), f(phi));
        for (row, (a_lo, a_hi)) in jac.iter_mut().zip(rlo.iter().zip(&rhi)) {
            row[a] = (a_hi - a_lo) / (hi - lo);
        }
    }
    jac
}

/// Normalized two-qubit polarization state (slots q1, q2) found in one path
/// configuration.
pub fn sector_polarization_state(rho: &DensityMatrix, sector: Sector) -> Result<DensityMatrix> {
    if rho.dim() != DIM {
        return Err(Error::Dimension { expected: DIM.to_string(), found: rho.dim() });
    }
    let path = sector.path_bits();
    let idx = |pol: usize| pol * 4 + path;
    let mut block = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            block[(i, j)] = rho.matrix()[(idx(i), idx(j))];
        }
    }
    let probability = block.trace().re;
    if probability < 1e-9 {
        return Err(Error::EmptySector { sector: sector.name(), probability });
    }
    Ok(DensityMatrix::from_matrix_unchecked(block / c(probability, 0.0)))
}

/// The two path configurations populated by the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// `r_A ℓ_B`, which carries `|Φ⁺⟩` in the cluster state.
    RightLeft,
    /// `ℓ_A r_B`, which carries `|Φ⁻⟩` in the cluster state.
    LeftRight,
}

impl Sector {
    /// `(q3 q4)` bits of the sector.
    pub fn path_bits(self) -> usize {
        match self {
            Sector::RightLeft => 0b10,
            Sector::LeftRight => 0b01,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sector::RightLeft => "rA-lB",
            Sector::LeftRight => "lA-rB",
        }
    }

    /// Polarization state expected in this sector for the ideal cluster.
    pub fn target(self) -> StateVector {
        match self {
            Sector::RightLeft => bell_state(BellKind::PhiPlus, Dof::Polarization),
            Sector::LeftRight => bell_state(BellKind::PhiMinus, Dof::Polarization),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{partial_trace, Pauli};

    fn ket(amps: &[f64]) -> StateVector {
        StateVector::new(amps.iter().map(|&a| c(a, 0.0)).collect()).unwrap()
    }

    #[test]
    fn bell_fragments() {
        let s = FRAC_1_SQRT_2;
        let phi_m = bell_state(BellKind::PhiMinus, Dof::Polarization);
        assert_eq!(phi_m, ket(&[s, 0.0, 0.0, -s]));
        let psi_p = bell_state(BellKind::PsiPlus, Dof::Momentum);
        assert_eq!(psi_p, ket(&[0.0, s, s, 0.0]));
        let phi_p = bell_state(BellKind::PhiPlus, Dof::Polarization);
        assert!(phi_p.inner(&phi_m).norm() < 1e-15);
    }

    #[test]
    fn hyperentangled_correlations() {
        let xi = hyperentangled_state();
        assert!((xi.expectation(&PauliString::of("Z_A Z_B")) - 1.0).abs() < 1e-12);
        assert!((xi.expectation(&PauliString::of("z_A z_B")) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn hw_gate_builds_cluster() {
        let xi = hyperentangled_state();
        let c4 = apply_hw_cp(&xi);
        assert!(c4.same_ray(&cluster_state()));
        assert!(apply_hw_cp(&c4).same_ray(&xi));

        // |Φ⁻⟩|ℓ⟩_A|r⟩_B is left alone
        let untouched = from_photon_fragments(
            &bell_state(BellKind::PhiMinus, Dof::Polarization),
            &StateVector::basis(2, 0b01).unwrap(),
        )
        .unwrap();
        assert_eq!(apply_hw_cp(&untouched), untouched);
    }

    #[test]
    fn hw_gate_is_controlled_z_on_q2_q3() {
        let hw = hw_cp_operator();
        for b in 0..16 {
            let q2 = (b >> 2) & 1;
            let q3 = (b >> 1) & 1;
            let want = if q2 == 1 && q3 == 1 { -1.0 } else { 1.0 };
            assert_eq!(hw[(b, b)], c(want, 0.0));
        }
    }

    #[test]
    fn cluster_decompositions() {
        let c4 = cluster_state();
        let nonzero: Vec<(usize, f64)> = (0..16)
            .filter(|&b| c4.amplitude(b).norm() > 0.0)
            .map(|b| (b, c4.amplitude(b).re))
            .collect();
        assert_eq!(nonzero, vec![(0b0001, 0.5), (0b0010, 0.5), (0b1101, -0.5), (0b1110, 0.5)]);

        let phi_p = bell_state(BellKind::PhiPlus, Dof::Polarization);
        let phi_m = bell_state(BellKind::PhiMinus, Dof::Polarization);
        let rl = StateVector::basis(2, 0b10).unwrap();
        let lr = StateVector::basis(2, 0b01).unwrap();
        let a = from_photon_fragments(&phi_p, &rl).unwrap();
        let b = from_photon_fragments(&phi_m, &lr).unwrap();
        let sum = (a.amplitudes() + b.amplitudes()) * c(FRAC_1_SQRT_2, 0.0);
        assert!(StateVector::new(sum.iter().copied().collect()).unwrap().same_ray(&c4));

        // HH ψ⁺ + VV ψ⁻ with ψ⁻ = (r_A ℓ_B − ℓ_A r_B)/√2, the negative of PsiMinus
        let hh = StateVector::basis(2, 0b00).unwrap();
        let vv = StateVector::basis(2, 0b11).unwrap();
        let a = from_photon_fragments(&hh, &bell_state(BellKind::PsiPlus, Dof::Momentum)).unwrap();
        let b = from_photon_fragments(&vv, &bell_state(BellKind::PsiMinus, Dof::Momentum)).unwrap();
        let sum = (a.amplitudes() - b.amplitudes()) * c(FRAC_1_SQRT_2, 0.0);
        assert!(StateVector::new(sum.iter().copied().collect()).unwrap().same_ray(&c4));
    }

    #[test]
    fn logical_map_examples() {
        assert!(logical_map(&cluster_state()).same_ray(&reference_linear_cluster()));
        let c4 = cluster_state();
        assert_eq!(logical_map(&logical_map(&c4)), c4);
        let zero = StateVector::basis(4, 0).unwrap();
        assert_eq!(logical_map(&zero), StateVector::basis(4, 0b0010).unwrap());
    }

    #[test]
    fn reduced_states() {
        let xi = hyperentangled_state().to_density();
        let pol = partial_trace(&xi, &[1, 2]).unwrap();
        // slots (q1, q2) = (B, A); Φ⁻ is symmetric under the swap
        let phi_m = bell_state(BellKind::PhiMinus, Dof::Polarization).to_density();
        assert!((pol.matrix() - phi_m.matrix()).norm() < 1e-14);
        let mom = partial_trace(&xi, &[3, 4]).unwrap();
        let psi_p = bell_state(BellKind::PsiPlus, Dof::Momentum).to_density();
        assert!((mom.matrix() - psi_p.matrix()).norm() < 1e-14);

        // the cluster's polarization marginal is an equal mixture of Φ⁺ and Φ⁻
        let pol = partial_trace(&cluster_state().to_density(), &[1, 2]).unwrap();
        let phi_p = bell_state(BellKind::PhiPlus, Dof::Polarization).to_density();
        let want = phi_p.mix(0.5, &phi_m);
        assert!((pol.matrix() - want.matrix()).norm() < 1e-14);
    }

    #[test]
    fn sector_states_of_cluster() {
        let rho = cluster_state().to_density();
        for sector in [Sector::RightLeft, Sector::LeftRight] {
            let pol = sector_polarization_state(&rho, sector).unwrap();
            assert!((pol.fidelity_pure(&sector.target()) - 1.0).abs() < 1e-14);
        }
        let empty = StateVector::basis(4, 0).unwrap().to_density();
        assert!(matches!(
            sector_polarization_state(&empty, Sector::RightLeft),
            Err(Error::EmptySector { .. })
        ));
    }

    #[test]
    fn noise_limits() {
        let rho = noisy_cluster(&NoiseParams::IDEAL).unwrap();
        assert!((rho.matrix() - cluster_state().to_density().matrix()).norm() < 1e-14);

        let rho = noisy_cluster(&NoiseParams::new(0.0, 0.37, 0.0).unwrap()).unwrap();
        assert!(rho.expectation(&PauliString::of("X_A z_A X_B")).abs() < 1e-14);

        assert!(NoiseParams::new(1.2, 1.0, 0.0).is_err());
        assert!(NoiseParams::new(1.0, -0.1, 0.0).is_err());
        assert!(apply_noise(&cluster_state(), &NoiseParams { v_pol: 0.5, mu_mom: 1.0, z_err: 2.0 }).is_err());
    }

    #[test]
    fn noise_closed_forms() {
        // ⟨Z_A Z_B⟩ = ⟨X_A X_B z_B⟩ = v(1−z), path-coherent terms v·μ(1−z), ⟨z_A z_B⟩ = −1+2z
        for (v, mu, z) in [(0.9, 0.8, 0.0), (0.6, 0.3, 0.1), (0.95, 0.99, 0.02)] {
            let rho = noisy_cluster(&NoiseParams::new(v, mu, z).unwrap()).unwrap();
            let e = |o: &str| rho.expectation(&PauliString::of(o));
            assert!((e("Z_A Z_B") - v * (1.0 - z)).abs() < 1e-12);
            assert!((e("X_A X_B z_B") - v * (1.0 - z)).abs() < 1e-12);
            assert!((e("Z_A x_A x_B") - v * mu * (1.0 - z)).abs() < 1e-12);
            assert!((e("X_A x_A Y_B y_B") - v * mu * (1.0 - z)).abs() < 1e-12);
            assert!((e("z_A z_B") - (-1.0 + 2.0 * z)).abs() < 1e-12);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn calibrate_on_ideal_values() {
        let fit = calibrate_noise(&ideal_table()).unwrap();
        assert!(fit.converged);
        let p = fit.params;
        assert!((p.v_pol - 1.0).abs() < 1e-6, "{p:?}");
        assert!((p.mu_mom - 1.0).abs() < 1e-6, "{p:?}");
        assert!(p.z_err.abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn calibrate_on_table_matches_group_means() {
        // The model is linear in a = v(1−z), b = vμ(1−z) and c = −1+2z, and each
        // Table I entry depends on exactly one of them, so the least-squares
        // optimum is the per-group mean of |target|.
        let table = table1();
        let coherent = ["Z_A x_A x_B", "x_A Z_B x_B", "Z_A y_A y_B", "X_A x_A Y_B y_B", "Y_A x_A X_B y_B"];
        let (mut sum_a, mut sum_b, mut zz) = (0.0, 0.0, 0.0);
        for e in &table {
            if e.observable == "z_A z_B" {
                zz = e.value;
            } else if coherent.contains(&e.observable.as_str()) {
                sum_b += e.value.abs();
            } else {
                sum_a += e.value.abs();
            }
        }
        let z = (1.0 + zz) / 2.0;
        let v = sum_a / 5.0 / (1.0 - z);
        let mu = (sum_b / 5.0) / (sum_a / 5.0);

        let fit = calibrate_noise(&table).unwrap();
        assert!(fit.converged);
        assert!((fit.params.v_pol - v).abs() < 1e-6, "{:?} vs {v}", fit.params);
        assert!((fit.params.mu_mom - mu).abs() < 1e-6, "{:?} vs {mu}", fit.params);
        assert!((fit.params.z_err - z).abs() < 1e-6, "{:?} vs {z}", fit.params);

        // frozen values of the oracle
        assert!((v - 0.908526).abs() < 1e-6, "{v}");
        assert!((mu - 0.893986).abs() < 1e-6, "{mu}");
        assert!((z - 0.00245).abs() < 1e-12);

        let zz_residual = fit.residuals.iter().find(|r| r.observable == "z_A z_B").unwrap();
        assert!(zz_residual.residual.abs() <= 0.05);
        assert!(fit.max_abs_residual() <= 0.05);
    }

    #[test]
    fn calibration_requires_every_table_observable() {
        let mut table = table1();
        table.remove(3);
        assert!(matches!(calibrate_noise(&table), Err(Error::MissingTerm(_))));
    }

    #[test]
    fn table_parsing() {
        let t = table1();
        assert_eq!(t.len(), 11);
        for (entry, name) in t.iter().zip(TABLE_OBSERVABLES) {
            assert_eq!(entry.operator().unwrap(), PauliString::of(name));
        }
        assert!(parse_table(r#"[{"observable":"Q_A","value":1,"sigma":0}]"#).is_err());
        assert_eq!(PauliString::of("z_A z_B").label(3), Pauli::Z);
    }
}
