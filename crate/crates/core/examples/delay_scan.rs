//! Coincidence rate of the `l'_A r'_B` outputs versus path delay, for both
//! polarization channels.

use cluster4::apparatus::{coherence_envelope, DelayScan, PolarizationChannel, C_UM_PER_FS};
use cluster4::states::{calibrate_noise, cluster_state, noisy_cluster, table1};

fn main() -> cluster4::Result<()> {
    let scan = DelayScan { envelope: coherence_envelope(6.0, 728.0)?, ..DelayScan::default() };
    let ideal = cluster_state().to_density();
    let measured = noisy_cluster(&calibrate_noise(&table1())?.params)?;

    let delays: Vec<f64> = (-30..=30).map(|k| f64::from(k) * 5.0).collect();
    let rows = scan.rows(&measured, &delays);
    println!("{:>8} {:>9} {:>9}", "dx (um)", "rate H", "rate V");
    for r in rows.iter().step_by(3) {
        let bar = "#".repeat((r.rate_h / 100.0) as usize);
        println!("{:>8.1} {:>9.1} {:>9.1}  {bar}", r.delta_x_um, r.rate_h, r.rate_v);
    }

    let s = scan.summary(&measured, &rows);
    println!("\nvisibility H {:.3}, V {:.3}, average {:.3}", s.visibility_h, s.visibility_v, s.average_visibility);
    if let Some(w) = s.fwhm_um {
        println!("FWHM {w:.1} um = {:.0} fs", w / C_UM_PER_FS);
    }
    println!("ideal state: visibility H {:.3}", scan.visibility(&ideal, PolarizationChannel::H));
    Ok(())
}
