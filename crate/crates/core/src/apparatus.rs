//! Analysis optics: glass phase plates and beam splitter on the path modes,
//! quarter/half wave plates and a polarizing beam splitter on every output
//! mode, plus the trombone delay used for the path-interference scan.
//!
//! Wave-plate angles are measured from the vertical direction. Outcome bits
//! follow the slot order of [`crate::qcore`]: for polarization slots bit 0 is
//! the transmitted PBS port, for path slots bit 0 is `ℓ` (or `ℓ'` behind the
//! beam splitter).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, LN_2, PI, TAU};
use std::io::Write;

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{c, tensor4, CMatrix, DensityMatrix, Pauli, PauliString, C64, DIM};

/// Speed of light in µm/fs.
pub const C_UM_PER_FS: f64 = 0.299_792_458;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Retarder {
    Quarter,
    Half,
}

/// Jones matrix of an ideal retarder whose fast axis sits at `theta` from
/// the vertical.
pub fn waveplate_jones(kind: Retarder, theta: f64) -> Matrix2<C64> {
    let retardance = match kind {
        Retarder::Quarter => FRAC_PI_2,
        Retarder::Half => PI,
    };
    let axis = FRAC_PI_2 + theta; // from horizontal
    let (s, co) = axis.sin_cos();
    let rot = Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0));
    let phase = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, retardance));
    rot * phase * rot.transpose()
}

/// Glass plate (phase `phi` on the `r` mode) followed by the 50:50 splitter:
/// `(ℓ + e^{-iφ} r)/√2 → ℓ'` and `(ℓ − e^{-iφ} r)/√2 → r'`.
pub fn beam_splitter(phi: f64) -> Matrix2<C64> {
    let s = c(FRAC_1_SQRT_2, 0.0);
    let e = C64::from_polar(FRAC_1_SQRT_2, phi);
    Matrix2::new(s, e, s, -e)
}

fn glass(phi: f64) -> Matrix2<C64> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, phi))
}

/// Path-mode transformation of both photons (slots q3, q4); the polarization
/// slots are left alone.
pub fn bs_transform(phi_a: f64, phi_b: f64) -> CMatrix {
    let id = Matrix2::identity();
    tensor4([&id, &id, &beam_splitter(phi_a), &beam_splitter(phi_b)])
}

fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Analyzer configuration for one photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonAnalyzer {
    pub theta_q: f64,
    pub theta_h: f64,
    /// Glass phase on the `r` mode.
    pub phi: f64,
    pub bs_present: bool,
}

impl PhotonAnalyzer {
    pub fn new(theta_q: f64, theta_h: f64, phi: f64, bs_present: bool) -> Self {
        Self { theta_q: wrap_angle(theta_q), theta_h: wrap_angle(theta_h), phi: wrap_angle(phi), bs_present }
    }

    /// QWP then HWP.
    pub fn polarization_unitary(&self) -> Matrix2<C64> {
        waveplate_jones(Retarder::Half, self.theta_h) * waveplate_jones(Retarder::Quarter, self.theta_q)
    }

    pub fn path_unitary(&self) -> Matrix2<C64> {
        if self.bs_present {
            beam_splitter(self.phi)
        } else {
            glass(self.phi)
        }
    }
}

impl Default for PhotonAnalyzer {
    fn default() -> Self {
        Self::new(0.0, 0.0, 0.0, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub alice: PhotonAnalyzer,
    pub bob: PhotonAnalyzer,
    /// Trombone delay on both `ℓ` modes, µm.
    pub delay_um: f64,
}

impl MeasurementSetting {
    pub fn new(alice: PhotonAnalyzer, bob: PhotonAnalyzer) -> Self {
        Self { alice, bob, delay_um: 0.0 }
    }

    pub fn with_delay(mut self, delay_um: f64) -> Self {
        self.delay_um = delay_um;
        self
    }

    /// Full 16×16 unitary applied before the detectors.
    pub fn unitary(&self) -> CMatrix {
        tensor4([
            &self.bob.polarization_unitary(),
            &self.alice.polarization_unitary(),
            &self.alice.path_unitary(),
            &self.bob.path_unitary(),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Photon {
    A,
    B,
}

/// Detector coincidence probabilities, indexed by the outcome bits in slot
/// order `(B pol port, A pol port, A path port, B path port)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub probs: [f64; DIM],
}

impl OutcomeProbabilities {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    /// Marginal probability of the outcome bits selected by `mask`.
    pub fn marginal(&self, mask: usize, bits: usize) -> f64 {
        (0..DIM).filter(|k| k & mask == bits & mask).map(|k| self.probs[k]).sum()
    }
}

/// A setting together with the eigenvalue carried by port 0 of every slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub observable: PauliString,
    pub setting: MeasurementSetting,
    /// Per slot: eigenvalue of the local operator on outcome bit 0 (bit 1
    /// carries the opposite sign); 0 for slots that are not read out.
    pub port_signs: [i8; 4],
}

impl MeasurementPlan {
    /// Eigenvalue of the full observable (without coefficient) for an outcome.
    pub fn outcome_sign(&self, outcome: usize) -> f64 {
        self.port_signs.iter().enumerate().fold(1.0, |acc, (i, &s)| {
            let bit = (outcome >> (3 - i)) & 1;
            match (s, bit) {
                (0, _) => acc,
                (s, 0) => acc * f64::from(s),
                (s, _) => acc * -f64::from(s),
            }
        })
    }

    /// Parity-weighted sum of outcome probabilities.
    pub fn expectation_from(&self, probs: &OutcomeProbabilities) -> f64 {
        let e: f64 = (0..DIM).map(|k| self.outcome_sign(k) * probs.probs[k]).sum();
        e * self.observable.coefficient()
    }

    /// Switches photon `photon` to the other HWP angle listed for its
    /// polarization observable, which exchanges the two PBS ports.
    pub fn alternate(&self, photon: Photon) -> Result<MeasurementPlan> {
        let mut setting = self.setting;
        let (analyzer, slot) = match photon {
            Photon::A => (&mut setting.alice, 2),
            Photon::B => (&mut setting.bob, 1),
        };
        analyzer.theta_h = wrap_angle(match self.observable.label(slot) {
            Pauli::Z | Pauli::I => {
                if analyzer.theta_h == 0.0 {
                    FRAC_PI_4
                } else {
                    0.0
                }
            }
            Pauli::X | Pauli::Y => {
                if (analyzer.theta_h - FRAC_PI_8).abs() < 1e-12 {
                    3.0 * FRAC_PI_8
                } else {
                    FRAC_PI_8
                }
            }
        });
        plan_for(&self.observable, setting)
    }
}

fn sigma(p: Pauli) -> Matrix2<C64> {
    p.matrix()
}

fn port_sign(op: Pauli, analyzed: Vector2<C64>, what: &PauliString) -> Result<i8> {
    let value = analyzed.dotc(&(sigma(op) * analyzed)).re;
    if (value.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::UnsupportedObservable(what.physical_name()));
    }
    Ok(if value > 0.0 { 1 } else { -1 })
}

fn plan_for(obs: &PauliString, setting: MeasurementSetting) -> Result<MeasurementPlan> {
    let h = Vector2::new(c(1.0, 0.0), c(0.0, 0.0));
    let mut port_signs = [0i8; 4];
    // (slot, analyzer, is polarization)
    let slots = [
        (1, setting.bob, true),
        (2, setting.alice, true),
        (3, setting.alice, false),
        (4, setting.bob, false),
    ];
    for (slot, analyzer, is_pol) in slots {
        let op = obs.label(slot);
        if op == Pauli::I {
            continue;
        }
        let unitary = if is_pol { analyzer.polarization_unitary() } else { analyzer.path_unitary() };
        // state sent to port 0
        let analyzed = unitary.adjoint() * h;
        port_signs[slot - 1] = port_sign(op, analyzed, obs)?;
    }
    Ok(MeasurementPlan { observable: obs.clone(), setting, port_signs })
}

/// Analyzer configuration realizing a projective measurement of `obs`.
///
/// Polarization: `X` uses QWP π/4, HWP π/8; `Y` uses QWP 0, HWP π/8; `Z`
/// uses QWP 0, HWP 0 (see [`MeasurementPlan::alternate`] for the second HWP
/// angle). Path: `x` and `y` send the photon through glass and beam splitter
/// with phase 0 and π/2, `z` removes both. Since one physical beam splitter
/// serves both photons, mixing `z` on one photon with `x`/`y` on the other is
/// rejected.
pub fn setting_for(obs: &PauliString) -> Result<MeasurementPlan> {
    let path_needs_bs = |p: Pauli| matches!(p, Pauli::X | Pauli::Y);
    let (path_a, path_b) = (obs.label(3), obs.label(4));
    let bs = path_needs_bs(path_a) || path_needs_bs(path_b);
    if bs && (path_a == Pauli::Z || path_b == Pauli::Z) {
        return Err(Error::UnsupportedObservable(obs.physical_name()));
    }

    let analyzer = |pol: Pauli, path: Pauli| {
        let (theta_q, theta_h) = match pol {
            Pauli::X => (FRAC_PI_4, FRAC_PI_8),
            Pauli::Y => (0.0, FRAC_PI_8),
            Pauli::Z | Pauli::I => (0.0, 0.0),
        };
        let phi = if path == Pauli::Y { FRAC_PI_2 } else { 0.0 };
        PhotonAnalyzer::new(theta_q, theta_h, phi, bs)
    };
    let setting = MeasurementSetting::new(analyzer(obs.label(2), path_a), analyzer(obs.label(1), path_b));
    plan_for(obs, setting)
}

/// Polarization analyzer angles `(theta_q, theta_h)` that send `target` to
/// the transmitted PBS port, searched over the angles used by the setup.
pub fn analyzer_for_state(target: &Vector2<C64>) -> Option<(f64, f64)> {
    let h = Vector2::new(c(1.0, 0.0), c(0.0, 0.0));
    for theta_q in [0.0, FRAC_PI_4] {
        for theta_h in [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
            let a = PhotonAnalyzer::new(theta_q, theta_h, 0.0, false);
            let analyzed = a.polarization_unitary().adjoint() * h;
            if (analyzed.dotc(target).norm() - 1.0).abs() < 1e-9 {
                return Some((theta_q, theta_h));
            }
        }
    }
    None
}

/// Multiplies every coherence between different path configurations by `g`.
pub fn dephase_paths(rho: &DensityMatrix, g: f64) -> DensityMatrix {
    let mut m = rho.matrix().clone();
    for i in 0..DIM {
        for j in 0..DIM {
            if i % 4 != j % 4 {
                m[(i, j)] *= g;
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(m)
}

fn born(rho: &DensityMatrix, setting: &MeasurementSetting) -> OutcomeProbabilities {
    let out = rho.conjugate(&setting.unitary());
    let mut probs = [0.0; DIM];
    for (k, p) in probs.iter_mut().enumerate() {
        *p = out.matrix()[(k, k)].re.max(0.0);
    }
    OutcomeProbabilities { probs }
}

/// Born-rule probabilities of the 16 detector coincidences for `setting`,
/// with the default coherence envelope for its delay.
pub fn outcome_probabilities(rho: &DensityMatrix, setting: &MeasurementSetting) -> OutcomeProbabilities {
    outcome_probabilities_with(rho, setting, &CoherenceEnvelope::default())
}

pub fn outcome_probabilities_with(
    rho: &DensityMatrix,
    setting: &MeasurementSetting,
    envelope: &CoherenceEnvelope,
) -> OutcomeProbabilities {
    if setting.delay_um == 0.0 {
        born(rho, setting)
    } else {
        born(&dephase_paths(rho, envelope.factor(setting.delay_um)), setting)
    }
}

/// Gaussian two-photon coherence envelope set by the interference filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceEnvelope {
    /// FWHM coherence time, fs.
    pub coherence_time_fs: f64,
    /// FWHM of the interference feature in path delay, µm.
    pub fwhm_um: f64,
}

/// Filter used in the experiment: bandwidth and center wavelength in nm, and
/// the coherence time quoted for it in fs.
pub const REFERENCE_FILTER: (f64, f64, f64) = (6.0, 728.0, 150.0);

/// `coherence time = K · λ² / (c · Δλ)`, with `K` fixed by
/// [`REFERENCE_FILTER`].
fn time_bandwidth_constant() -> f64 {
    let (bw, lambda, tau) = REFERENCE_FILTER;
    tau / (lambda * lambda / (C_UM_PER_FS * 1e3 * bw))
}

pub fn coherence_envelope(filter_bandwidth_nm: f64, center_wavelength_nm: f64) -> Result<CoherenceEnvelope> {
    if !(filter_bandwidth_nm > 0.0) || !filter_bandwidth_nm.is_finite() {
        return Err(Error::InvalidBandwidth(filter_bandwidth_nm));
    }
    if !(center_wavelength_nm > 0.0) {
        return Err(Error::InvalidArgument(format!("center wavelength must be positive, got {center_wavelength_nm}")));
    }
    // c in nm/fs = 299.79
    let tau = time_bandwidth_constant() * center_wavelength_nm * center_wavelength_nm
        / (C_UM_PER_FS * 1e3 * filter_bandwidth_nm);
    Ok(CoherenceEnvelope { coherence_time_fs: tau, fwhm_um: tau * C_UM_PER_FS })
}

impl CoherenceEnvelope {
    /// `exp(−4 ln2 (Δx / FWHM)²)`
    pub fn factor(&self, delta_x_um: f64) -> f64 {
        let u = delta_x_um / self.fwhm_um;
        (-4.0 * LN_2 * u * u).exp()
    }
}

impl Default for CoherenceEnvelope {
    fn default() -> Self {
        let (bw, lambda, _) = REFERENCE_FILTER;
        coherence_envelope(bw, lambda).expect("reference filter is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolarizationChannel {
    H,
    V,
}

/// Pair of beam-splitter outputs `(photon A, photon B)` whose coincidences
/// are recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputPair {
    /// `ℓ'_A r'_B`
    LeftRight,
    /// `ℓ'_A ℓ'_B`
    LeftLeft,
    /// `r'_A ℓ'_B`
    RightLeft,
    /// `r'_A r'_B`
    RightRight,
}

impl OutputPair {
    fn path_bits(self) -> usize {
        match self {
            OutputPair::LeftLeft => 0b00,
            OutputPair::LeftRight => 0b01,
            OutputPair::RightLeft => 0b10,
            OutputPair::RightRight => 0b11,
        }
    }
}

/// Coincidence rate versus trombone delay.
///
/// The default monitors `ℓ'_A r'_B`, which shows a dip for H-polarized pairs
/// of the cluster state and a peak for V-polarized pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayScan {
    pub envelope: CoherenceEnvelope,
    /// Coincidences per second for unit detection probability.
    pub rate_scale: f64,
    pub pair: OutputPair,
}

impl Default for DelayScan {
    fn default() -> Self {
        Self { envelope: CoherenceEnvelope::default(), rate_scale: 8000.0, pair: OutputPair::LeftRight }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub delta_x_um: f64,
    #[serde(rename = "rate_H")]
    pub rate_h: f64,
    #[serde(rename = "rate_V")]
    pub rate_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub visibility_h: f64,
    pub visibility_v: f64,
    pub average_visibility: f64,
    /// FWHM read off the H trace, µm; `None` if the scan does not cross
    /// half depth on both sides.
    pub fwhm_um: Option<f64>,
    pub coherence_time_fs: f64,
}

impl DelayScan {
    fn setting(polarization: PolarizationChannel) -> MeasurementSetting {
        let theta_h = match polarization {
            PolarizationChannel::H => 0.0,
            PolarizationChannel::V => FRAC_PI_4,
        };
        let a = PhotonAnalyzer::new(0.0, theta_h, 0.0, true);
        MeasurementSetting::new(a, a)
    }

    fn rate_with_coherence(&self, rho: &DensityMatrix, polarization: PolarizationChannel, g: f64) -> f64 {
        let probs = born(&dephase_paths(rho, g), &Self::setting(polarization));
        // both polarization ports 0, path ports from the monitored pair
        self.rate_scale * probs.get(self.pair.path_bits())
    }

    pub fn rate(&self, rho: &DensityMatrix, polarization: PolarizationChannel, delta_x_um: f64) -> f64 {
        self.rate_with_coherence(rho, polarization, self.envelope.factor(delta_x_um))
    }

    /// Rate with fully distinguishable packets (|Δx| → ∞).
    pub fn baseline(&self, rho: &DensityMatrix, polarization: PolarizationChannel) -> f64 {
        self.rate_with_coherence(rho, polarization, 0.0)
    }

    pub fn run(&self, rho: &DensityMatrix, polarization: PolarizationChannel, delays_um: &[f64]) -> Vec<f64> {
        delays_um.par_iter().map(|&dx| self.rate(rho, polarization, dx)).collect()
    }

    pub fn rows(&self, rho: &DensityMatrix, delays_um: &[f64]) -> Vec<ScanRow> {
        let h = self.run(rho, PolarizationChannel::H, delays_um);
        let v = self.run(rho, PolarizationChannel::V, delays_um);
        delays_um
            .iter()
            .zip(h.into_iter().zip(v))
            .map(|(&delta_x_um, (rate_h, rate_v))| ScanRow { delta_x_um, rate_h, rate_v })
            .collect()
    }

    /// `|R(0) − R(∞)| / R(∞)`
    pub fn visibility(&self, rho: &DensityMatrix, polarization: PolarizationChannel) -> f64 {
        let far = self.baseline(rho, polarization);
        if far <= 0.0 {
            return 0.0;
        }
        (self.rate_with_coherence(rho, polarization, 1.0) - far).abs() / far
    }

    pub fn summary(&self, rho: &DensityMatrix, rows: &[ScanRow]) -> ScanSummary {
        let visibility_h = self.visibility(rho, PolarizationChannel::H);
        let visibility_v = self.visibility(rho, PolarizationChannel::V);
        let far = self.baseline(rho, PolarizationChannel::H);
        let trace: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta_x_um, r.rate_h)).collect();
        ScanSummary {
            visibility_h,
            visibility_v,
            average_visibility: 0.5 * (visibility_h + visibility_v),
            fwhm_um: trace_fwhm(&trace, far),
            coherence_time_fs: self.envelope.coherence_time_fs,
        }
    }
}

/// Width at half depth of a dip or peak around `baseline`.
pub fn trace_fwhm(trace: &[(f64, f64)], baseline: f64) -> Option<f64> {
    if trace.len() < 3 {
        return None;
    }
    let depth: Vec<f64> = trace.iter().map(|&(_, r)| (r - baseline).abs()).collect();
    let (imax, &dmax) = depth.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if dmax <= 0.0 {
        return None;
    }
    let half = dmax / 2.0;
    let cross = |i: usize, j: usize| {
        let (x0, d0, x1, d1) = (trace[i].0, depth[i], trace[j].0, depth[j]);
        x0 + (half - d0) * (x1 - x0) / (d1 - d0)
    };
    let left = (0..imax).rev().find(|&i| depth[i] < half).map(|i| cross(i, i + 1))?;
    let right = (imax + 1..trace.len()).find(|&i| depth[i] < half).map(|i| cross(i - 1, i))?;
    Some(right - left)
}

/// Rates of one polarization channel with the default scan settings.
pub fn delay_scan(rho: &DensityMatrix, polarization: PolarizationChannel, delays_um: &[f64]) -> Vec<f64> {
    DelayScan::default().run(rho, polarization, delays_um)
}

/// Writes `delta_x_um,rate_H,rate_V` rows.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{cluster_state, hyperentangled_state};

    fn close(a: &Matrix2<C64>, b: &Matrix2<C64>) -> bool {
        (a - b).norm() < 1e-12
    }

    fn equal_up_to_phase(a: &Matrix2<C64>, b: &Matrix2<C64>) -> bool {
        let overlap = (a.adjoint() * b).trace();
        (overlap.norm() - 2.0).abs() < 1e-12
    }

    #[test]
    fn half_wave_plate_vertical_is_phase_flip() {
        let hw = waveplate_jones(Retarder::Half, 0.0);
        let flip = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
        assert!(equal_up_to_phase(&hw, &flip));
    }

    #[test]
    fn half_wave_plate_at_pi_over_8_rotates_to_diagonal() {
        let hw = waveplate_jones(Retarder::Half, FRAC_PI_8);
        let out = hw * Vector2::new(c(1.0, 0.0), c(0.0, 0.0));
        let d = Vector2::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        assert!((out.dotc(&d).norm() - 1.0).abs() < 1e-12);
        let back = hw * d;
        assert!((back[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_quarters_make_a_half() {
        for theta in [0.0, 0.3, FRAC_PI_8, 1.9] {
            let q = waveplate_jones(Retarder::Quarter, theta);
            assert!(equal_up_to_phase(&(q * q), &waveplate_jones(Retarder::Half, theta)));
        }
    }

    #[test]
    fn beam_splitter_maps_superpositions_to_ports() {
        let bs = beam_splitter(0.0);
        let plus = Vector2::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        let minus = Vector2::new(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0));
        assert!(((bs * plus)[0].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(((bs * minus)[1].norm_sqr() - 1.0).abs() < 1e-12);

        let phi = 0.7;
        let tilted = Vector2::new(c(FRAC_1_SQRT_2, 0.0), C64::from_polar(FRAC_1_SQRT_2, -phi));
        assert!(((beam_splitter(phi) * tilted)[0].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(close(&(bs * bs.adjoint()), &Matrix2::identity()));
    }

    #[test]
    fn bs_transform_is_unitary() {
        let u = bs_transform(0.4, 2.1);
        assert!((&u * u.adjoint() - CMatrix::identity(16, 16)).norm() < 1e-12);
    }

    #[test]
    fn published_settings() {
        let plan = setting_for(&PauliString::of("X_A z_A X_B")).unwrap();
        assert!((plan.setting.alice.theta_q - FRAC_PI_4).abs() < 1e-15);
        assert!((plan.setting.alice.theta_h - FRAC_PI_8).abs() < 1e-15);
        assert!(!plan.setting.alice.bs_present);

        let plan = setting_for(&PauliString::of("Z_A y_A y_B")).unwrap();
        assert!((plan.setting.bob.phi - FRAC_PI_2).abs() < 1e-15);
        assert!(plan.setting.bob.bs_present);

        let alt = setting_for(&PauliString::of("X_A X_B z_B")).unwrap().alternate(Photon::A).unwrap();
        assert!((alt.setting.alice.theta_h - 3.0 * FRAC_PI_8).abs() < 1e-15);

        let plan = setting_for(&PauliString::of("z_A z_B")).unwrap();
        assert!(!plan.setting.alice.bs_present && !plan.setting.bob.bs_present);
    }

    #[test]
    fn mixed_path_bases_are_rejected() {
        assert!(matches!(
            setting_for(&PauliString::of("x_A z_B")),
            Err(Error::UnsupportedObservable(_))
        ));
    }

    #[test]
    fn cluster_path_anticorrelation() {
        let rho = cluster_state().to_density();
        let plan = setting_for(&PauliString::of("z_A z_B")).unwrap();
        let probs = outcome_probabilities(&rho, &plan.setting);
        let anti = probs.marginal(0b0011, 0b01) + probs.marginal(0b0011, 0b10);
        assert!((anti - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_is_uniform() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let plan = setting_for(&PauliString::of("Y_A x_A X_B y_B")).unwrap();
        let probs = outcome_probabilities(&rho, &plan.setting);
        assert!(probs.probs.iter().all(|p| (p - 1.0 / 16.0).abs() < 1e-12));
    }

    #[test]
    fn both_hwp_angles_give_same_expectation() {
        let rho = crate::states::noisy_cluster(&crate::states::NoiseParams::new(0.8, 0.7, 0.05).unwrap()).unwrap();
        for name in crate::states::TABLE_OBSERVABLES {
            let plan = setting_for(&PauliString::of(name)).unwrap();
            let e0 = plan.expectation_from(&outcome_probabilities(&rho, &plan.setting));
            for photon in [Photon::A, Photon::B] {
                let alt = plan.alternate(photon).unwrap();
                let e1 = alt.expectation_from(&outcome_probabilities(&rho, &alt.setting));
                assert!((e0 - e1).abs() < 1e-12, "{name}");
            }
        }
    }

    #[test]
    fn analyzer_angles_for_tomography_states() {
        let s = FRAC_1_SQRT_2;
        let states = [
            Vector2::new(c(1.0, 0.0), c(0.0, 0.0)),
            Vector2::new(c(0.0, 0.0), c(1.0, 0.0)),
            Vector2::new(c(s, 0.0), c(s, 0.0)),
            Vector2::new(c(s, 0.0), c(-s, 0.0)),
            Vector2::new(c(s, 0.0), c(0.0, -s)),
            Vector2::new(c(s, 0.0), c(0.0, s)),
        ];
        for st in states {
            assert!(analyzer_for_state(&st).is_some(), "{st:?}");
        }
        assert_eq!(analyzer_for_state(&states[0]), Some((0.0, 0.0)));
    }

    #[test]
    fn envelope() {
        let e = coherence_envelope(6.0, 728.0).unwrap();
        assert!((e.coherence_time_fs - 150.0).abs() < 1e-9);
        assert!((e.fwhm_um - 150.0 * C_UM_PER_FS).abs() < 1e-9);
        let wide = coherence_envelope(12.0, 728.0).unwrap();
        assert!((wide.coherence_time_fs - 75.0).abs() < 1e-9);
        assert_eq!(e.factor(0.0), 1.0);
        assert!((e.factor(e.fwhm_um / 2.0) - 0.5).abs() < 1e-12);
        assert!(matches!(coherence_envelope(0.0, 728.0), Err(Error::InvalidBandwidth(_))));
        assert!(coherence_envelope(-1.0, 728.0).is_err());
    }

    #[test]
    fn ideal_scan_dip_and_peak() {
        let rho = cluster_state().to_density();
        let scan = DelayScan::default();
        let far_h = scan.baseline(&rho, PolarizationChannel::H);
        assert!((scan.rate(&rho, PolarizationChannel::H, 1e4) - far_h).abs() < 1e-9);
        assert!(scan.rate(&rho, PolarizationChannel::H, 0.0).abs() < 1e-9);
        let far_v = scan.baseline(&rho, PolarizationChannel::V);
        assert!((scan.rate(&rho, PolarizationChannel::V, 0.0) - 2.0 * far_v).abs() < 1e-9);

        let conj = DelayScan { pair: OutputPair::LeftLeft, ..scan };
        assert!((conj.rate(&rho, PolarizationChannel::H, 0.0) - 2.0 * far_h).abs() < 1e-9);

        assert!((scan.visibility(&rho, PolarizationChannel::H) - 1.0).abs() < 1e-9);
        assert!((scan.visibility(&rho, PolarizationChannel::V) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scan_fwhm_matches_envelope() {
        let rho = cluster_state().to_density();
        let scan = DelayScan::default();
        let delays: Vec<f64> = (-200..=200).map(|k| k as f64 * 0.5).collect();
        let rows = scan.rows(&rho, &delays);
        let summary = scan.summary(&rho, &rows);
        let fwhm = summary.fwhm_um.unwrap();
        assert!((fwhm - scan.envelope.fwhm_um).abs() < 0.05, "{fwhm}");
    }

    #[test]
    fn hyperentangled_state_has_no_dip_flip() {
        // For |Ξ⟩ both polarizations carry ψ⁺, so H and V traces coincide.
        let rho = hyperentangled_state().to_density();
        let scan = DelayScan::default();
        for dx in [0.0, 10.0, 40.0] {
            let h = scan.rate(&rho, PolarizationChannel::H, dx);
            let v = scan.rate(&rho, PolarizationChannel::V, dx);
            assert!((h - v).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = [ScanRow { delta_x_um: -1.5, rate_h: 2.0, rate_v: 3.0 }];
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "delta_x_um,rate_H,rate_V\n-1.5,2.0,3.0\n");
    }
}
