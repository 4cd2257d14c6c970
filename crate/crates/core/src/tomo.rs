//! Two-qubit polarization tomography on the path-conditioned sectors.
//!
//! Counts are simulated for the standard set of sixteen product projectors
//! and inverted by maximum likelihood over `ρ = T†T / Tr(T†T)` with `T`
//! lower triangular, so every reconstruction is a valid density matrix.
//! Error bars come from a parametric Poisson bootstrap; wave-plate setting
//! errors are not included.

use std::collections::VecDeque;
use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{Read, Write};

use nalgebra::{DMatrix, Matrix4, Vector2, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{c, CMatrix, DensityMatrix, StateVector, C64, DIM};
use crate::states::{sector_polarization_state, Sector};
use crate::verify::poisson;

/// Labels of the standard projector set, first letter on slot q1 (photon B),
/// second on slot q2 (photon A).
pub const STANDARD_PROJECTORS: [&str; 16] = [
    "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL",
];

/// Expected counts for a projector matching the state perfectly, chosen so
/// bootstrap error bars come out near 0.006 on the large elements and 0.003
/// on the rest.
pub const DEFAULT_MEAN_TOTAL: f64 = 50_000.0;
pub const DEFAULT_ACQUISITION_S: f64 = 10.0;
pub const DEFAULT_REPLICAS: usize = 200;
pub const MLE_TOLERANCE: f64 = 1e-10;
pub const MLE_MAX_ITERATIONS: usize = 100_000;

/// Coincidence counts for one analyzer setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub setting_id: String,
    pub projector: String,
    pub counts: u64,
    pub time_s: f64,
}

/// A two-qubit product projector `|a b⟩⟨a b|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    label: String,
    ket: Vector4<C64>,
}

fn single_photon(ch: char) -> Option<Vector2<C64>> {
    let s = FRAC_1_SQRT_2;
    Some(match ch {
        'H' => Vector2::new(c(1.0, 0.0), c(0.0, 0.0)),
        'V' => Vector2::new(c(0.0, 0.0), c(1.0, 0.0)),
        'D' => Vector2::new(c(s, 0.0), c(s, 0.0)),
        'A' => Vector2::new(c(s, 0.0), c(-s, 0.0)),
        'R' => Vector2::new(c(s, 0.0), c(0.0, -s)),
        'L' => Vector2::new(c(s, 0.0), c(0.0, s)),
        _ => return None,
    })
}

impl Projector {
    pub fn parse(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.trim().chars().collect();
        let [a, b] = chars[..] else {
            return Err(Error::InvalidProjector(label.to_string()));
        };
        let (Some(u), Some(v)) = (single_photon(a), single_photon(b)) else {
            return Err(Error::InvalidProjector(label.to_string()));
        };
        let ket = Vector4::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]);
        Ok(Self { label: label.trim().to_string(), ket })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ket(&self) -> &Vector4<C64> {
        &self.ket
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn probability(&self, rho: &DensityMatrix) -> f64 {
        let m = rho.matrix();
        let mut acc = c(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += self.ket[i].conj() * m[(i, j)] * self.ket[j];
            }
        }
        acc.re.max(0.0)
    }

    fn matrix(&self) -> Matrix4<C64> {
        self.ket * self.ket.adjoint()
    }
}

pub fn standard_projectors() -> Vec<Projector> {
    STANDARD_PROJECTORS.iter().map(|l| Projector::parse(l).expect("standard label")).collect()
}

/// True when the projectors span the 16-dimensional operator space.
pub fn informationally_complete(projectors: &[Projector]) -> bool {
    if projectors.len() < 16 {
        return false;
    }
    let mut rows = DMatrix::<f64>::zeros(projectors.len(), 16);
    for (r, p) in projectors.iter().enumerate() {
        let m = p.matrix();
        for i in 0..4 {
            for j in 0..4 {
                rows[(r, i * 4 + j)] = if i <= j { m[(i, j)].re } else { m[(i, j)].im };
            }
        }
    }
    rows.rank(1e-9) == 16
}

/// Counts plus any warning about the setting set.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedCounts {
    pub records: Vec<CountsRecord>,
    pub warnings: Vec<String>,
}

fn stream_rng(seed: u64, tag: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(tag << 32 | index);
    rng
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Dimension { expected: "4 (two qubits)".into(), found: rho.dim() });
    }
    Ok(())
}

/// Poisson counts with mean `mean_total × ⟨ψ|ρ|ψ⟩` per projector.
pub fn simulate_counts(
    rho: &DensityMatrix,
    projectors: &[Projector],
    mean_total: f64,
    seed: u64,
) -> Result<SimulatedCounts> {
    simulate_with(rho, projectors, mean_total, &mut stream_rng(seed, 0, 0))
}

/// Noiseless counts: every projector receives its expected count, rounded.
pub fn expected_counts(rho: &DensityMatrix, projectors: &[Projector], mean_total: f64) -> Result<SimulatedCounts> {
    build_counts(rho, projectors, mean_total, |mean| mean.round() as u64)
}

fn simulate_with(
    rho: &DensityMatrix,
    projectors: &[Projector],
    mean_total: f64,
    rng: &mut ChaCha20Rng,
) -> Result<SimulatedCounts> {
    build_counts(rho, projectors, mean_total, |mean| poisson(mean, rng))
}

fn build_counts(
    rho: &DensityMatrix,
    projectors: &[Projector],
    mean_total: f64,
    mut draw: impl FnMut(f64) -> u64,
) -> Result<SimulatedCounts> {
    check_two_qubit(rho)?;
    if !(mean_total > 0.0) || !mean_total.is_finite() {
        return Err(Error::InvalidArgument(format!("mean_total must be positive, got {mean_total}")));
    }
    let records = projectors
        .iter()
        .enumerate()
        .map(|(k, p)| CountsRecord {
            setting_id: format!("s{:02}", k + 1),
            projector: p.label().to_string(),
            counts: draw(mean_total * p.probability(rho)),
            time_s: DEFAULT_ACQUISITION_S,
        })
        .collect();
    let mut warnings = Vec::new();
    if !informationally_complete(projectors) {
        warnings.push("projector set is not informationally complete".to_string());
    }
    Ok(SimulatedCounts { records, warnings })
}

mod density_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    }

    pub fn serialize<S: Serializer>(rho: &DensityMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = rho.matrix();
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Parts { re, im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DensityMatrix, D::Error> {
        let parts = Parts::deserialize(d)?;
        let n = parts.re.len();
        let m = CMatrix::from_fn(n, n, |i, j| c(parts.re[i][j], parts.im[i][j]));
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    #[serde(with = "density_serde")]
    pub rho: DensityMatrix,
    pub target: Option<String>,
    pub fidelity: Option<f64>,
    pub fidelity_sigma: Option<f64>,
    /// Bootstrap standard deviations of the real parts of `ρ`.
    pub sigma_re: Option<Vec<Vec<f64>>>,
    /// Bootstrap standard deviations of the imaginary parts of `ρ`.
    pub sigma_im: Option<Vec<Vec<f64>>>,
    /// `Σ n log Tr[Pρ] − N log Tr[Mρ]` at the optimum, `M = Σ t P`.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub likelihood_trace: Vec<f64>,
}

impl TomographyResult {
    /// Records the fidelity with a pure two-qubit target.
    pub fn with_target(mut self, name: &str, target: &StateVector) -> Self {
        self.target = Some(name.to_string());
        self.fidelity = Some(self.rho.fidelity_pure(target));
        self
    }

    pub fn apply_error_bars(&mut self, bars: &ErrorBars) {
        self.fidelity_sigma = bars.fidelity_sigma;
        self.sigma_re = Some(bars.sigma_re.clone());
        self.sigma_im = Some(bars.sigma_im.clone());
    }
}

struct Likelihood {
    kets: Vec<Vector4<C64>>,
    counts: Vec<f64>,
    m: Matrix4<C64>,
    total: f64,
}

/// Parameter layout: four real diagonal entries, then real and imaginary
/// parts of the six entries below the diagonal.
const N_PARAMS: usize = 16;
const LOWER: [(usize, usize); 6] = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

fn lower_triangular(x: &[f64; N_PARAMS]) -> Matrix4<C64> {
    let mut t = Matrix4::zeros();
    for k in 0..4 {
        t[(k, k)] = c(x[k], 0.0);
    }
    for (n, &(i, j)) in LOWER.iter().enumerate() {
        t[(i, j)] = c(x[4 + 2 * n], x[5 + 2 * n]);
    }
    t
}

fn density_of(x: &[f64; N_PARAMS]) -> DensityMatrix {
    let t = lower_triangular(x);
    let a = t.adjoint() * t;
    let tr = a.trace().re;
    let a = (a + a.adjoint()) * c(0.5 / tr, 0.0);
    DensityMatrix::from_matrix_unchecked(CMatrix::from_fn(4, 4, |i, j| a[(i, j)]))
}

impl Likelihood {
    fn new(records: &[CountsRecord]) -> Result<Self> {
        let mut kets = Vec::with_capacity(records.len());
        let mut counts = Vec::with_capacity(records.len());
        let mut m = Matrix4::zeros();
        for r in records {
            if !(r.time_s > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "acquisition time for `{}` must be positive",
                    r.setting_id
                )));
            }
            let p = Projector::parse(&r.projector)?;
            m += p.matrix() * c(r.time_s, 0.0);
            kets.push(p.ket);
            counts.push(r.counts as f64);
        }
        let total: f64 = counts.iter().sum();
        if total == 0.0 {
            return Err(Error::AllZeroCounts);
        }
        Ok(Self { kets, counts, m, total })
    }

    fn raw(&self, x: &[f64; N_PARAMS]) -> f64 {
        let t = lower_triangular(x);
        let a = t.adjoint() * t;
        let mut l = 0.0;
        for (ket, &n) in self.kets.iter().zip(&self.counts) {
            if n > 0.0 {
                l += n * ket.dotc(&(a * ket)).re.ln();
            }
        }
        l - self.total * (self.m * a).trace().re.ln()
    }

    /// Negative log-likelihood per count and its gradient.
    fn cost(&self, x: &[f64; N_PARAMS]) -> (f64, [f64; N_PARAMS]) {
        let t = lower_triangular(x);
        let a = t.adjoint() * t;
        let mut l = 0.0;
        let mut w = Matrix4::<C64>::zeros();
        for (ket, &n) in self.kets.iter().zip(&self.counts) {
            if n == 0.0 {
                continue;
            }
            let p = ket.dotc(&(a * ket)).re;
            if !(p > 0.0) {
                return (f64::INFINITY, [0.0; N_PARAMS]);
            }
            l += n * p.ln();
            w += ket * ket.adjoint() * c(n / p, 0.0);
        }
        let norm = (self.m * a).trace().re;
        l -= self.total * norm.ln();
        w -= self.m * c(self.total / norm, 0.0);

        let g = t * w * c(2.0, 0.0);
        let mut grad = [0.0; N_PARAMS];
        for k in 0..4 {
            grad[k] = -g[(k, k)].re / self.total;
        }
        for (n, &(i, j)) in LOWER.iter().enumerate() {
            grad[4 + 2 * n] = -g[(i, j)].re / self.total;
            grad[5 + 2 * n] = -g[(i, j)].im / self.total;
        }
        (-l / self.total, grad)
    }
}

fn dot(a: &[f64; N_PARAMS], b: &[f64; N_PARAMS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Optimum {
    x: [f64; N_PARAMS],
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

/// L-BFGS with Armijo backtracking; every accepted step lowers the cost.
/// Stops once two successive steps gain less than `tol` in log-likelihood.
fn minimize(lik: &Likelihood, max_iterations: usize, tol: f64) -> Optimum {
    const MEMORY: usize = 8;
    let mut x = [0.0; N_PARAMS];
    x[..4].fill(1.0);
    let (mut f, mut g) = lik.cost(&x);
    let mut history: VecDeque<([f64; N_PARAMS], [f64; N_PARAMS], f64)> = VecDeque::new();
    let mut trace = vec![-f];
    let mut small_steps = 0;

    for iter in 1..=max_iterations {
        let mut d = g.map(|v| -v);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            for k in 0..N_PARAMS {
                d[k] -= a * y[k];
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            d = d.map(|v| v * gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for k in 0..N_PARAMS {
                d[k] += (a - b) * s[k];
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.map(|v| -v);
            slope = dot(&g, &d);
        }
        if slope == 0.0 {
            return Optimum { x, iterations: iter - 1, converged: true, trace };
        }

        let mut step = if history.is_empty() { 1.0 / dot(&d, &d).sqrt().max(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: [f64; N_PARAMS] = std::array::from_fn(|k| x[k] + step * d[k]);
            let (ft, gt) = lik.cost(&trial);
            if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            return Optimum { x, iterations: iter, converged: true, trace };
        };

        let improvement = (f - fn_) * lik.total;
        let s: [f64; N_PARAMS] = std::array::from_fn(|k| xn[k] - x[k]);
        let y: [f64; N_PARAMS] = std::array::from_fn(|k| gn[k] - g[k]);
        let sy = dot(&s, &y);
        if sy > 1e-18 {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        f = fn_;
        g = gn;
        trace.push(-f);

        if improvement < tol {
            small_steps += 1;
            if small_steps >= 2 {
                return Optimum { x, iterations: iter, converged: true, trace };
            }
        } else {
            small_steps = 0;
        }
    }
    Optimum { x, iterations: max_iterations, converged: false, trace }
}

/// Maximum-likelihood density matrix for a set of projector counts.
pub fn mle_reconstruct(records: &[CountsRecord]) -> Result<TomographyResult> {
    mle_reconstruct_with(records, MLE_MAX_ITERATIONS)
}

/// As [`mle_reconstruct`] with an explicit iteration cap.
pub fn mle_reconstruct_with(records: &[CountsRecord], max_iterations: usize) -> Result<TomographyResult> {
    let lik = Likelihood::new(records)?;
    let mut warnings = Vec::new();
    let projectors = records.iter().map(|r| Projector::parse(&r.projector)).collect::<Result<Vec<_>>>()?;
    if !informationally_complete(&projectors) {
        warnings.push("records do not span an informationally complete projector set".to_string());
    }
    let opt = minimize(&lik, max_iterations, MLE_TOLERANCE);
    if !opt.converged {
        warnings.push(format!("no convergence after {} iterations; best iterate returned", opt.iterations));
    }
    Ok(TomographyResult {
        rho: density_of(&opt.x),
        target: None,
        fidelity: None,
        fidelity_sigma: None,
        sigma_re: None,
        sigma_im: None,
        log_likelihood: lik.raw(&opt.x),
        iterations: opt.iterations,
        converged: opt.converged,
        warnings,
        likelihood_trace: opt.trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBars {
    pub replicas: usize,
    pub fidelity_sigma: Option<f64>,
    pub sigma_re: Vec<Vec<f64>>,
    pub sigma_im: Vec<Vec<f64>>,
}

impl ErrorBars {
    /// Largest real-part sigma over the entries with `|ρ_ij| ≥ threshold`
    /// and the mean real-part sigma over the rest.
    pub fn split_by_magnitude(&self, rho: &DensityMatrix, threshold: f64) -> (f64, f64) {
        let (mut large, mut small, mut n_small) = (0.0f64, 0.0, 0);
        for i in 0..4 {
            for j in 0..4 {
                let s = self.sigma_re[i][j];
                if rho.matrix()[(i, j)].norm() >= threshold {
                    large = large.max(s);
                } else {
                    small += s;
                    n_small += 1;
                }
            }
        }
        (large, if n_small > 0 { small / n_small as f64 } else { 0.0 })
    }
}

fn std_dev(samples: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = samples.clone().count() as f64;
    let mean = samples.clone().sum::<f64>() / n;
    (samples.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Parametric bootstrap: every count is redrawn from a Poisson law centred
/// on the observed value and the MLE is repeated.
pub fn error_bars(
    records: &[CountsRecord],
    replicas: usize,
    seed: u64,
    target: Option<&StateVector>,
) -> Result<ErrorBars> {
    if replicas < 2 {
        return Err(Error::InvalidArgument(format!("bootstrap needs at least 2 replicas, got {replicas}")));
    }
    Likelihood::new(records)?;
    let fits: Vec<DensityMatrix> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, 1, k as u64);
            let resampled: Vec<CountsRecord> = records
                .iter()
                .map(|r| CountsRecord { counts: poisson(r.counts as f64, &mut rng), ..r.clone() })
                .collect();
            mle_reconstruct(&resampled).map(|t| t.rho)
        })
        .filter_map(|r| r.ok())
        .collect();
    if fits.len() < 2 {
        return Err(Error::AllZeroCounts);
    }
    let entry = |f: fn(C64) -> f64| -> Vec<Vec<f64>> {
        (0..4)
            .map(|i| (0..4).map(|j| std_dev(fits.iter().map(move |r| f(r.matrix()[(i, j)])))).collect())
            .collect()
    };
    Ok(ErrorBars {
        replicas: fits.len(),
        fidelity_sigma: target.map(|t| std_dev(fits.iter().map(|r| r.fidelity_pure(t)))),
        sigma_re: entry(|z| z.re),
        sigma_im: entry(|z| z.im),
    })
}

/// Tomography of one path sector of a four-qubit state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReconstruction {
    pub sector: Sector,
    pub sector_name: String,
    pub probability: f64,
    pub records: Vec<CountsRecord>,
    pub result: TomographyResult,
}

impl SectorReconstruction {
    /// Adds bootstrap sigmas to the reconstruction.
    pub fn bootstrap(&mut self, replicas: usize, seed: u64) -> Result<()> {
        let target = self.sector.target();
        let bars = error_bars(&self.records, replicas, seed ^ sector_tag(self.sector), Some(&target))?;
        self.result.apply_error_bars(&bars);
        Ok(())
    }
}

fn sector_tag(sector: Sector) -> u64 {
    match sector {
        Sector::RightLeft => 0,
        Sector::LeftRight => 1,
    }
}

fn sector_probability(rho4: &DensityMatrix, sector: Sector) -> f64 {
    (0..4).map(|pol| rho4.matrix()[(pol * 4 + sector.path_bits(), pol * 4 + sector.path_bits())].re).sum()
}

/// How simulated counts relate to their expected values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CountStatistics {
    #[default]
    Poisson,
    /// Counts equal their rounded means.
    Noiseless,
}

/// Conditions on the `r_A ℓ_B` and `ℓ_A r_B` sectors, simulates counts in
/// each and reconstructs them; fidelities are against `|Φ⁺⟩` and `|Φ⁻⟩`.
pub fn reconstruct_sectors(rho4: &DensityMatrix, mean_total: f64, seed: u64) -> Result<[SectorReconstruction; 2]> {
    reconstruct_sectors_with(rho4, mean_total, seed, CountStatistics::Poisson)
}

pub fn reconstruct_sectors_with(
    rho4: &DensityMatrix,
    mean_total: f64,
    seed: u64,
    statistics: CountStatistics,
) -> Result<[SectorReconstruction; 2]> {
    if rho4.dim() != DIM {
        return Err(Error::Dimension { expected: DIM.to_string(), found: rho4.dim() });
    }
    let projectors = standard_projectors();
    let one = |sector: Sector| -> Result<SectorReconstruction> {
        let rho = sector_polarization_state(rho4, sector)?;
        let sim = match statistics {
            CountStatistics::Poisson => simulate_with(&rho, &projectors, mean_total, &mut stream_rng(seed, 0, sector_tag(sector)))?,
            CountStatistics::Noiseless => expected_counts(&rho, &projectors, mean_total)?,
        };
        let target_name = match sector {
            Sector::RightLeft => "Phi+",
            Sector::LeftRight => "Phi-",
        };
        let result = mle_reconstruct(&sim.records)?.with_target(target_name, &sector.target());
        Ok(SectorReconstruction {
            sector,
            sector_name: sector.name().to_string(),
            probability: sector_probability(rho4, sector),
            records: sim.records,
            result,
        })
    };
    Ok([one(Sector::RightLeft)?, one(Sector::LeftRight)?])
}

pub fn write_counts_csv<W: Write>(records: &[CountsRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `setting_id,projector,counts,time_s` rows; `#` lines are comments.
pub fn read_counts_csv<R: Read>(reader: R) -> Result<Vec<CountsRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let r: CountsRecord = row?;
        if !(r.time_s > 0.0) {
            return Err(Error::InvalidArgument(format!("acquisition time for `{}` must be positive", r.setting_id)));
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, cluster_state, hyperentangled_state, BellKind, Dof};

    fn pure(label: &str) -> DensityMatrix {
        let p = Projector::parse(label).unwrap();
        StateVector::new(p.ket().iter().copied().collect()).unwrap().to_density()
    }

    #[test]
    fn projector_parsing() {
        assert!(informationally_complete(&standard_projectors()));
        assert!(!informationally_complete(&standard_projectors()[..15]));
        assert!(matches!(Projector::parse("HX"), Err(Error::InvalidProjector(_))));
        assert!(matches!(Projector::parse("HHH"), Err(Error::InvalidProjector(_))));
        let hh = pure("HH");
        assert_eq!(Projector::parse("HH").unwrap().probability(&hh), 1.0);
        assert_eq!(Projector::parse("VV").unwrap().probability(&hh), 0.0);
        assert!((Projector::parse("DR").unwrap().probability(&hh) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn counts_for_pure_input() {
        let hh = pure("HH");
        let projectors = vec![Projector::parse("HH").unwrap(), Projector::parse("VV").unwrap()];
        let mut sum = 0u64;
        for seed in 0..200 {
            let sim = simulate_counts(&hh, &projectors, 1000.0, seed).unwrap();
            assert_eq!(sim.records[1].counts, 0);
            assert!(!sim.warnings.is_empty());
            sum += sim.records[0].counts;
        }
        let mean = sum as f64 / 200.0;
        assert!((mean - 1000.0).abs() < 3.0 * (1000.0f64 / 200.0).sqrt());
    }

    #[test]
    fn counts_for_mixed_input() {
        // Oracle: Poisson mean N/4, standard error sqrt(N/4 / replicas).
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let projectors = standard_projectors();
        let n = 400.0;
        let mut sums = [0u64; 16];
        for seed in 0..1000 {
            let sim = simulate_counts(&mixed, &projectors, n, seed).unwrap();
            for (s, r) in sums.iter_mut().zip(&sim.records) {
                *s += r.counts;
            }
        }
        let se = (n / 4.0 / 1000.0).sqrt();
        for s in sums {
            assert!((s as f64 / 1000.0 - n / 4.0).abs() < 3.5 * se);
        }
    }

    #[test]
    fn deterministic_simulation() {
        let rho = bell_state(BellKind::PhiPlus, Dof::Polarization).to_density();
        let a = simulate_counts(&rho, &standard_projectors(), 5e4, 9).unwrap();
        let b = simulate_counts(&rho, &standard_projectors(), 5e4, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mle_recovers_bell_state() {
        let target = bell_state(BellKind::PhiPlus, Dof::Polarization);
        let sim = expected_counts(&target.to_density(), &standard_projectors(), 1e6).unwrap();
        let res = mle_reconstruct(&sim.records).unwrap();
        assert!(res.converged);
        assert!(res.rho.fidelity_pure(&target) >= 0.999);
        assert!(res.rho.min_eigenvalue() > -1e-10);
        assert!((res.rho.trace() - 1.0).abs() < 1e-10);

        let sim = simulate_counts(&target.to_density(), &standard_projectors(), 1e6, 3).unwrap();
        let res = mle_reconstruct(&sim.records).unwrap();
        assert!(res.rho.fidelity_pure(&target) >= 0.995);
    }

    #[test]
    fn expected_counts_are_rounded_means() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let sim = expected_counts(&rho, &standard_projectors(), 1001.0).unwrap();
        assert!(sim.records.iter().all(|r| r.counts == 250));
    }

    #[test]
    fn likelihood_non_decreasing() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap().mix(0.3, &pure("DR"));
        let sim = simulate_counts(&rho, &standard_projectors(), 3e3, 1).unwrap();
        let res = mle_reconstruct(&sim.records).unwrap();
        assert!(res.likelihood_trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zero_counts_rejected() {
        let records: Vec<CountsRecord> = STANDARD_PROJECTORS
            .iter()
            .map(|p| CountsRecord { setting_id: "x".into(), projector: p.to_string(), counts: 0, time_s: 1.0 })
            .collect();
        assert!(matches!(mle_reconstruct(&records), Err(Error::AllZeroCounts)));
    }

    #[test]
    fn incomplete_set_flagged() {
        let rho = pure("HH");
        let sim = simulate_counts(&rho, &standard_projectors()[..4], 1e4, 0).unwrap();
        let res = mle_reconstruct(&sim.records).unwrap();
        assert!(res.warnings.iter().any(|w| w.contains("informationally")));
    }

    #[test]
    fn bootstrap_replica_floor() {
        let sim = simulate_counts(&pure("HH"), &standard_projectors(), 1e3, 0).unwrap();
        assert!(error_bars(&sim.records, 1, 0, None).is_err());
    }

    #[test]
    fn sectors_of_ideal_states() {
        let [rl, lr] = reconstruct_sectors(&cluster_state().to_density(), 1e6, 5).unwrap();
        assert!(rl.result.fidelity.unwrap() >= 0.999);
        assert!(lr.result.fidelity.unwrap() >= 0.999);
        assert!((rl.probability - 0.5).abs() < 1e-12);

        let phi_minus = bell_state(BellKind::PhiMinus, Dof::Polarization);
        let [a, b] = reconstruct_sectors(&hyperentangled_state().to_density(), 1e6, 5).unwrap();
        assert!(a.result.rho.fidelity_pure(&phi_minus) >= 0.999);
        assert!(b.result.rho.fidelity_pure(&phi_minus) >= 0.999);
    }

    #[test]
    fn empty_sector() {
        let rho = StateVector::basis(4, 0).unwrap().to_density();
        assert!(matches!(reconstruct_sectors(&rho, 1e4, 0), Err(Error::EmptySector { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let sim = simulate_counts(&pure("HV"), &standard_projectors(), 1e3, 2).unwrap();
        let mut buf = Vec::new();
        write_counts_csv(&sim.records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("setting_id,projector,counts,time_s"));
        assert_eq!(read_counts_csv(&buf[..]).unwrap(), sim.records);
        let bad = "setting_id,projector,counts,time_s\ns01,HH,-3,10\n";
        assert!(read_counts_csv(bad.as_bytes()).is_err());
        let bad = "setting_id,projector,counts,time_s\ns01,HH,3,0\n";
        assert!(read_counts_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let sim = simulate_counts(&pure("RL"), &standard_projectors(), 1e4, 4).unwrap();
        let res = mle_reconstruct(&sim.records).unwrap();
        let json = serde_json::to_string(&res).unwrap();
        let back: TomographyResult = serde_json::from_str(&json).unwrap();
        assert!((back.rho.matrix() - res.rho.matrix()).norm() < 1e-12);
    }
}
