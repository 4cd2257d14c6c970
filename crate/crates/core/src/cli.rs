//! Command-line driver: `state`, `verify`, `scan`, `tomo` and `calibrate`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::apparatus::{coherence_envelope, write_scan_csv, DelayScan, OutputPair};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, StateVector};
use crate::states::{
    calibrate_noise, cluster_state, hyperentangled_state, load_table, logical_map, noisy_cluster, table1,
    Calibration, NoiseParams, TableEntry,
};
use crate::tomo::{reconstruct_sectors_with, CountStatistics, DEFAULT_MEAN_TOTAL, DEFAULT_REPLICAS};
use crate::verify::{projector_witness, simulate_table_counts, stabilizer_check, verify_all, witness};

#[derive(Debug, Parser)]
#[command(name = "cluster4", version, about = "Two-photon four-qubit cluster state toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitudes of the hyperentangled and cluster states, or a noisy state summary.
    State {
        #[command(flatten)]
        noise: NoiseArgs,
        /// Also print the state in the logical (linear cluster) basis.
        #[arg(long)]
        logical: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Correlation table, entanglement witness and AVN functional.
    Verify {
        #[command(flatten)]
        noise: NoiseArgs,
        /// Evaluate printed correlation values instead of a model state.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["ideal", "noise", "calibrated"])]
        from_table: Option<PathBuf>,
        /// Simulate coincidence counts with this mean per setting.
        #[arg(long, value_name = "N", conflicts_with = "from_table")]
        counts: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coincidence rates versus path delay.
    Scan {
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = -150.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 150.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 2.0)]
        step: f64,
        /// Interference filter bandwidth, nm.
        #[arg(long, default_value_t = 6.0)]
        bandwidth: f64,
        /// Center wavelength, nm.
        #[arg(long, default_value_t = 728.0)]
        wavelength: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximum-likelihood tomography of the two path sectors.
    Tomo {
        #[command(flatten)]
        noise: NoiseArgs,
        /// Mean counts for a perfectly matching projector.
        #[arg(long, default_value_t = DEFAULT_MEAN_TOTAL)]
        counts: f64,
        /// Bootstrap replicas (0 disables error bars).
        #[arg(long, default_value_t = DEFAULT_REPLICAS)]
        replicas: usize,
        /// Use expected counts instead of Poisson draws.
        #[arg(long)]
        noiseless: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit the noise model to a correlation table.
    Calibrate {
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// Noiseless state (default).
    #[arg(long, conflicts_with_all = ["noise", "calibrated"])]
    pub ideal: bool,
    /// Explicit noise parameters, e.g. `v=0.9,mu=0.89,z=0.002`.
    #[arg(long, value_name = "v=..,mu=..[,z=..]", value_parser = parse_noise, conflicts_with = "calibrated")]
    pub noise: Option<NoiseParams>,
    /// Noise parameters fitted to the correlation table.
    #[arg(long)]
    pub calibrated: bool,
    /// Correlation table used by `--calibrated` (bundled table when omitted).
    #[arg(long, value_name = "PATH", requires = "calibrated")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file, written atomically; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Parses `v=0.9,mu=0.89[,z=0.002]`.
pub fn parse_noise(text: &str) -> std::result::Result<NoiseParams, String> {
    let (mut v, mut mu, mut z) = (None, None, 0.0);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        let value: f64 = value.trim().parse().map_err(|_| format!("`{value}` is not a number"))?;
        match key.trim() {
            "v" | "v_pol" => v = Some(value),
            "mu" | "mu_mom" => mu = Some(value),
            "z" | "z_err" => z = value,
            other => return Err(format!("unknown noise parameter `{other}`")),
        }
    }
    let v = v.ok_or("missing v")?;
    let mu = mu.ok_or("missing mu")?;
    NoiseParams::new(v, mu, z).map_err(|e| e.to_string())
}

/// The noise source selected on the command line.
#[derive(Debug, Clone)]
pub enum NoiseSource {
    Ideal,
    Params(NoiseParams),
    Calibrated { table: Option<PathBuf>, calibration: Box<Calibration> },
    Table(PathBuf),
}

impl NoiseSource {
    fn from_args(args: &NoiseArgs) -> Result<Self> {
        if let Some(p) = args.noise {
            return Ok(NoiseSource::Params(p));
        }
        if args.calibrated {
            let entries = read_table(args.table.as_deref())?;
            let calibration = calibrate_noise(&entries)?;
            return Ok(NoiseSource::Calibrated { table: args.table.clone(), calibration: Box::new(calibration) });
        }
        Ok(NoiseSource::Ideal)
    }

    pub fn params(&self) -> Option<NoiseParams> {
        match self {
            NoiseSource::Ideal => Some(NoiseParams::IDEAL),
            NoiseSource::Params(p) => Some(*p),
            NoiseSource::Calibrated { calibration, .. } => Some(calibration.params),
            NoiseSource::Table(_) => None,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            NoiseSource::Ideal => "ideal",
            NoiseSource::Params(_) => "noise",
            NoiseSource::Calibrated { .. } => "calibrated",
            NoiseSource::Table(_) => "table",
        }
    }

    fn state(&self) -> Result<DensityMatrix> {
        match self.params() {
            Some(p) => noisy_cluster(&p),
            None => Err(Error::InvalidArgument("no model state in table mode".into())),
        }
    }
}

fn read_table(path: Option<&Path>) -> Result<Vec<TableEntry>> {
    match path {
        Some(p) => load_table(p),
        None => Ok(table1()),
    }
}

/// Everything that identifies a run; written into every output header.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub noise: NoiseSource,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn header(&self) -> Value {
        let mut h = json!({
            "tool": "cluster4",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "noise_source": self.noise.label(),
        });
        if let Some(p) = self.noise.params() {
            h["v_pol"] = json!(p.v_pol);
            h["mu_mom"] = json!(p.mu_mom);
            h["z_err"] = json!(p.z_err);
        }
        match &self.noise {
            NoiseSource::Table(path) => h["table"] = json!(path.display().to_string()),
            NoiseSource::Calibrated { table, .. } => {
                h["table"] = json!(table.as_ref().map_or("bundled".to_string(), |p| p.display().to_string()))
            }
            _ => {}
        }
        h
    }

    fn header_lines(&self) -> String {
        let mut out = String::new();
        if let Value::Object(map) = self.header() {
            for (k, v) in map {
                let v = match v {
                    Value::String(s) => s,
                    other => other.to_string(),
                };
                let _ = writeln!(out, "# {k} = {v}");
            }
        }
        out
    }
}

/// A command result in all three output formats.
pub struct Output {
    pub json: Value,
    pub csv: String,
    pub text: String,
}

impl Output {
    fn render(&self, config: &RunConfig) -> Result<String> {
        Ok(match config.format {
            Format::Json => {
                let doc = json!({ "header": config.header(), "result": self.json });
                serde_json::to_string_pretty(&doc)? + "\n"
            }
            Format::Csv => config.header_lines() + &self.csv,
            Format::Table => config.header_lines() + &self.text,
        })
    }
}

/// Writes to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct AmplitudeRow {
    state: &'static str,
    index: usize,
    bits: String,
    re: f64,
    im: f64,
}

fn amplitude_rows(name: &'static str, s: &StateVector) -> Vec<AmplitudeRow> {
    (0..s.dim())
        .map(|i| AmplitudeRow {
            state: name,
            index: i,
            bits: format!("{i:04b}"),
            re: s.amplitude(i).re,
            im: s.amplitude(i).im,
        })
        .collect()
}

fn ket_text(name: &str, s: &StateVector) -> String {
    let mut out = format!("{name}:\n");
    for i in 0..s.dim() {
        let a = s.amplitude(i);
        if a.norm() > 1e-12 {
            let _ = writeln!(out, "  |{i:04b}>  {:+.6} {:+.6}i", a.re, a.im);
        }
    }
    out
}

pub fn cmd_state(config: &RunConfig, logical: bool) -> Result<Output> {
    let params = config.noise.params().unwrap_or(NoiseParams::IDEAL);
    if params == NoiseParams::IDEAL {
        let xi = hyperentangled_state();
        let c4 = cluster_state();
        let mut states = vec![("Xi", xi), ("C4", c4.clone())];
        if logical {
            states.push(("phi4", logical_map(&c4)));
        }
        let checks = stabilizer_check(&c4);
        let mut text = String::from("slot order: q1 = B pol, q2 = A pol, q3 = A path, q4 = B path\n\n");
        for (name, s) in &states {
            text += &ket_text(name, s);
        }
        text += "\nstabilizers of C4:\n";
        for r in &checks {
            let _ = writeln!(text, "  {:<18} eigenvalue {:+}  residual {:.1e}", r.observable, r.eigenvalue, r.residual);
        }
        let rows: Vec<AmplitudeRow> = states.iter().flat_map(|(n, s)| amplitude_rows(n, s)).collect();
        let json_states: serde_json::Map<String, Value> = states
            .iter()
            .map(|(n, s)| {
                let amps: Vec<[f64; 2]> = s.amplitudes().iter().map(|a| [a.re, a.im]).collect();
                (n.to_string(), json!(amps))
            })
            .collect();
        return Ok(Output {
            json: json!({ "states": json_states, "stabilizers": checks }),
            csv: csv_string(&rows)?,
            text,
        });
    }

    let rho = noisy_cluster(&params)?;
    let w = witness(&rho)?;
    let pw = projector_witness(&rho);
    let summary = json!({
        "trace": rho.trace(),
        "purity": rho.purity(),
        "min_eigenvalue": rho.min_eigenvalue(),
        "fidelity_c4": pw.fidelity,
        "witness": w.value,
        "projector_witness": pw.value,
        "diagonal": rho.diagonal(),
    });
    let mut text = String::new();
    let _ = writeln!(text, "trace            {:.12}", rho.trace());
    let _ = writeln!(text, "purity           {:.6}", rho.purity());
    let _ = writeln!(text, "min eigenvalue   {:+.3e}", rho.min_eigenvalue());
    let _ = writeln!(text, "fidelity with C4 {:.6}", pw.fidelity);
    let _ = writeln!(text, "Tr[W rho]        {:+.6}", w.value);
    let _ = writeln!(text, "Tr[W~ rho]       {:+.6}", pw.value);
    text += "diagonal:\n";
    for (i, p) in rho.diagonal().iter().enumerate() {
        let _ = writeln!(text, "  |{i:04b}>  {p:.6}");
    }
    #[derive(Serialize)]
    struct DiagRow {
        index: usize,
        bits: String,
        probability: f64,
    }
    let rows: Vec<DiagRow> =
        rho.diagonal().iter().enumerate().map(|(i, &p)| DiagRow { index: i, bits: format!("{i:04b}"), probability: p }).collect();
    Ok(Output { json: summary, csv: csv_string(&rows)?, text })
}

pub fn cmd_verify(config: &RunConfig, counts: Option<f64>) -> Result<Output> {
    let report = match &config.noise {
        NoiseSource::Table(path) => verify_all(&load_table(path)?)?,
        source => {
            let rho = source.state()?;
            match counts {
                Some(n) => verify_all(&simulate_table_counts(&rho, n, config.seed)?)?,
                None => verify_all(&rho)?,
            }
        }
    };
    let mut text = report.to_text();
    if let NoiseSource::Calibrated { calibration, .. } = &config.noise {
        let _ = writeln!(text, "max |model - table| over calibration = {:.4}", calibration.max_abs_residual());
    }
    Ok(Output { json: serde_json::to_value(&report)?, csv: csv_string(&report.rows)?, text })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_scan(config: &RunConfig, from: f64, to: f64, step: f64, bandwidth: f64, wavelength: f64) -> Result<Output> {
    if !(step > 0.0) || !(to > from) {
        return Err(Error::InvalidArgument(format!("empty delay range {from}..{to} step {step}")));
    }
    let envelope = coherence_envelope(bandwidth, wavelength)?;
    let scan = DelayScan { envelope, pair: OutputPair::LeftRight, ..DelayScan::default() };
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    let delays: Vec<f64> = (0..n).map(|k| from + k as f64 * step).collect();
    let rho = config.noise.state()?;
    let rows = scan.rows(&rho, &delays);
    let summary = scan.summary(&rho, &rows);

    let mut csv = Vec::new();
    write_scan_csv(&rows, &mut csv)?;
    let mut text = String::new();
    let _ = writeln!(text, "visibility H     {:.4}", summary.visibility_h);
    let _ = writeln!(text, "visibility V     {:.4}", summary.visibility_v);
    let _ = writeln!(text, "average          {:.4}", summary.average_visibility);
    match summary.fwhm_um {
        Some(f) => {
            let _ = writeln!(text, "FWHM             {f:.2} um ({:.1} fs)", f / crate::apparatus::C_UM_PER_FS);
        }
        None => text += "FWHM             not resolved in scan range\n",
    }
    let _ = writeln!(text, "coherence time   {:.1} fs", summary.coherence_time_fs);
    let _ = writeln!(text, "\n{:>12} {:>12} {:>12}", "delta_x_um", "rate_H", "rate_V");
    for r in &rows {
        let _ = writeln!(text, "{:>12.2} {:>12.2} {:>12.2}", r.delta_x_um, r.rate_h, r.rate_v);
    }
    Ok(Output {
        json: json!({ "summary": summary, "rows": rows }),
        csv: String::from_utf8(csv).expect("csv output is utf-8"),
        text,
    })
}

pub fn cmd_tomo(config: &RunConfig, mean_total: f64, replicas: usize, statistics: CountStatistics) -> Result<Output> {
    let rho = config.noise.state()?;
    let mut sectors = reconstruct_sectors_with(&rho, mean_total, config.seed, statistics)?;
    if replicas > 0 {
        for s in sectors.iter_mut() {
            s.bootstrap(replicas, config.seed)?;
        }
    }

    #[derive(Serialize)]
    struct EntryRow<'a> {
        sector: &'a str,
        row: usize,
        col: usize,
        re: f64,
        im: f64,
        sigma_re: Option<f64>,
        sigma_im: Option<f64>,
    }
    let mut rows = Vec::new();
    let mut text = String::from("basis order |HH>, |HV>, |VH>, |VV> with photon B first\n");
    for s in &sectors {
        let r = &s.result;
        let m = r.rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                rows.push(EntryRow {
                    sector: &s.sector_name,
                    row: i,
                    col: j,
                    re: m[(i, j)].re,
                    im: m[(i, j)].im,
                    sigma_re: r.sigma_re.as_ref().map(|v| v[i][j]),
                    sigma_im: r.sigma_im.as_ref().map(|v| v[i][j]),
                });
            }
        }
        let _ = writeln!(text, "\nsector {} (probability {:.4})", s.sector_name, s.probability);
        let fid = r.fidelity.unwrap_or(f64::NAN);
        match r.fidelity_sigma {
            Some(sig) => {
                let _ = writeln!(text, "  F({}) = {fid:.4} ± {sig:.4}", r.target.as_deref().unwrap_or("?"));
            }
            None => {
                let _ = writeln!(text, "  F({}) = {fid:.4}", r.target.as_deref().unwrap_or("?"));
            }
        }
        let _ = writeln!(text, "  iterations {}  converged {}", r.iterations, r.converged);
        text += "  Re rho:\n";
        for i in 0..4 {
            let _ = writeln!(text, "    {}", (0..4).map(|j| format!("{:+.4}", m[(i, j)].re)).collect::<Vec<_>>().join(" "));
        }
        for w in &r.warnings {
            let _ = writeln!(text, "  warning: {w}");
        }
    }
    if replicas > 0 {
        text += "\nerror bars: Poisson bootstrap only (wave-plate setting errors not included)\n";
    }
    let json = json!({
        "mean_total": mean_total,
        "statistics": statistics,
        "replicas": replicas,
        "sectors": sectors.iter().map(|s| json!({
            "sector": s.sector_name,
            "probability": s.probability,
            "result": s.result,
        })).collect::<Vec<_>>(),
    });
    Ok(Output { json, csv: csv_string(&rows)?, text })
}

pub fn cmd_calibrate(table: Option<&Path>) -> Result<Output> {
    let entries = read_table(table)?;
    let cal = calibrate_noise(&entries)?;
    let mut text = String::new();
    let p = cal.params;
    let _ = writeln!(text, "v_pol  = {:.6}\nmu_mom = {:.6}\nz_err  = {:.6}", p.v_pol, p.mu_mom, p.z_err);
    let _ = writeln!(text, "iterations {}  converged {}  cost {:.3e}", cal.iterations, cal.converged, cal.cost);
    let _ = writeln!(text, "\n{:<18} {:>8} {:>8} {:>9}", "Observable", "table", "model", "residual");
    for r in &cal.residuals {
        let _ = writeln!(text, "{:<18} {:>8.4} {:>8.4} {:>+9.4}", r.observable, r.target, r.model, r.residual);
    }
    let _ = writeln!(text, "max |residual| = {:.4}", cal.max_abs_residual());
    Ok(Output { json: serde_json::to_value(&cal)?, csv: csv_string(&cal.residuals)?, text })
}

fn dispatch(cli: Cli) -> Result<(RunConfig, Output)> {
    let (config, output) = match cli.command {
        Command::State { noise, logical, output } => {
            let config = config_for("state", NoiseSource::from_args(&noise)?, output);
            let out = cmd_state(&config, logical)?;
            (config, out)
        }
        Command::Verify { noise, from_table, counts, output } => {
            let source = match from_table {
                Some(path) => NoiseSource::Table(path),
                None => NoiseSource::from_args(&noise)?,
            };
            let config = config_for("verify", source, output);
            let out = cmd_verify(&config, counts)?;
            (config, out)
        }
        Command::Scan { noise, from, to, step, bandwidth, wavelength, output } => {
            let config = config_for("scan", NoiseSource::from_args(&noise)?, output);
            let out = cmd_scan(&config, from, to, step, bandwidth, wavelength)?;
            (config, out)
        }
        Command::Tomo { noise, counts, replicas, noiseless, output } => {
            let config = config_for("tomo", NoiseSource::from_args(&noise)?, output);
            let statistics = if noiseless { CountStatistics::Noiseless } else { CountStatistics::Poisson };
            let out = cmd_tomo(&config, counts, replicas, statistics)?;
            (config, out)
        }
        Command::Calibrate { table, output } => {
            let entries = read_table(table.as_deref())?;
            let calibration = Box::new(calibrate_noise(&entries)?);
            let config = config_for("calibrate", NoiseSource::Calibrated { table: table.clone(), calibration }, output);
            let out = cmd_calibrate(table.as_deref())?;
            (config, out)
        }
    };
    Ok((config, output))
}

fn config_for(command: &'static str, noise: NoiseSource, output: OutputArgs) -> RunConfig {
    RunConfig { command, noise, seed: output.seed, out: output.out, format: output.format }
}

/// Runs a parsed command line and writes its output.
pub fn execute(cli: Cli) -> Result<String> {
    let (config, output) = dispatch(cli)?;
    let rendered = output.render(&config)?;
    match &config.out {
        Some(path) => {
            write_atomic(path, &rendered)?;
            Ok(String::new())
        }
        None => Ok(rendered),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_flag_parsing() {
        let p = parse_noise("v=0.9,mu=0.8").unwrap();
        assert_eq!((p.v_pol, p.mu_mom, p.z_err), (0.9, 0.8, 0.0));
        let p = parse_noise("v=0.9, mu=0.8, z=0.01").unwrap();
        assert_eq!(p.z_err, 0.01);
        assert!(parse_noise("v=0.9").is_err());
        assert!(parse_noise("v=1.2,mu=0.5").is_err());
        assert!(parse_noise("v=0.9,mu=0.5,q=1").is_err());
    }

    #[test]
    fn exclusive_noise_sources() {
        assert!(Cli::try_parse_from(["cluster4", "state", "--ideal", "--calibrated"]).is_err());
        assert!(Cli::try_parse_from(["cluster4", "state", "--ideal", "--noise", "v=1,mu=1"]).is_err());
        assert!(Cli::try_parse_from(["cluster4", "verify", "--from-table", "t.json", "--ideal"]).is_err());
        assert!(Cli::try_parse_from(["cluster4", "state", "--table", "t.json"]).is_err());
        assert!(Cli::try_parse_from(["cluster4", "scan", "--from", "-20", "--to", "20"]).is_ok());
    }

    #[test]
    fn header_carries_seed_and_params() {
        let cli = Cli::try_parse_from(["cluster4", "verify", "--noise", "v=0.9,mu=0.8", "--seed", "17", "--format", "json"])
            .unwrap();
        let text = execute(cli).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["header"]["seed"], 17);
        assert_eq!(doc["header"]["v_pol"], 0.9);
        assert_eq!(doc["header"]["version"], env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn empty_scan_range() {
        let cli = Cli::try_parse_from(["cluster4", "scan", "--from", "10", "--to", "-10"]).unwrap();
        assert!(execute(cli).is_err());
    }
}
