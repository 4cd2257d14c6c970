//! Simulated coincidence counts written to CSV, read back and turned into
//! correlation values with Poisson error bars.

use cluster4::states::{calibrate_noise, noisy_cluster, table1};
use cluster4::tomo::{read_counts_csv, write_counts_csv};
use cluster4::verify::{avn, simulate_table_counts, witness, CountsSet};

fn main() -> cluster4::Result<()> {
    let rho = noisy_cluster(&calibrate_noise(&table1())?.params)?;
    let set = simulate_table_counts(&rho, 4000.0, 7)?;

    let mut csv = Vec::new();
    write_counts_csv(&set.records, &mut csv)?;
    let text = String::from_utf8_lossy(&csv);
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... {} records\n", set.records.len());

    let back = CountsSet::new(read_counts_csv(&csv[..])?);
    let w = witness(&back)?;
    let s = avn(&back)?;
    println!("W = {:+.4} +- {:.4} (fidelity bound {:.3})", w.value, w.sigma, w.fidelity_bound);
    println!("S = {:.4} +- {:.4}", s.value, s.sigma);
    if let Some(k) = s.sigmas_above_classical {
        println!("{k:.1} sigma above the local bound");
    }
    Ok(())
}
