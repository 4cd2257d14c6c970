//! Maximum-likelihood tomography of the polarization state in each path
//! sector of the calibrated cluster state, with bootstrap error bars.

use cluster4::states::{calibrate_noise, noisy_cluster, sector_polarization_state, table1};
use cluster4::tomo::{reconstruct_sectors, DEFAULT_MEAN_TOTAL};

fn main() -> cluster4::Result<()> {
    let rho = noisy_cluster(&calibrate_noise(&table1())?.params)?;
    for mut s in reconstruct_sectors(&rho, DEFAULT_MEAN_TOTAL, 1)? {
        s.bootstrap(100, 2)?;
        let r = &s.result;
        let exact = sector_polarization_state(&rho, s.sector)?.fidelity_pure(&s.sector.target());
        println!("sector {} (probability {:.3})", s.sector_name, s.probability);
        println!(
            "  fidelity {:.4} +- {:.4} (model {exact:.4}), {} iterations, converged {}",
            r.fidelity.unwrap_or(f64::NAN),
            r.fidelity_sigma.unwrap_or(f64::NAN),
            r.iterations,
            r.converged
        );
        println!("  Re rho:");
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| format!("{:+.3}", r.rho.matrix()[(i, j)].re)).collect();
            println!("    {}", row.join(" "));
        }
    }
    Ok(())
}
