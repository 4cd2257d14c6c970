//! Fits the three noise parameters to the correlation table and shows the
//! per-observable residuals.

use cluster4::states::{calibrate_noise, noisy_cluster, table1};
use cluster4::verify::witness;

fn main() -> cluster4::Result<()> {
    let cal = calibrate_noise(&table1())?;
    let p = cal.params;
    println!("v_pol = {:.4}  mu_mom = {:.4}  z_err = {:.4}", p.v_pol, p.mu_mom, p.z_err);
    println!("cost {:.3e} after {} iterations (converged: {})\n", cal.cost, cal.iterations, cal.converged);

    println!("{:<12} {:>8} {:>8} {:>8}", "observable", "table", "model", "diff");
    for r in &cal.residuals {
        println!("{:<12} {:>8.4} {:>8.4} {:>+8.4}", r.observable, r.target, r.model, r.residual);
    }
    println!("max |diff| = {:.4}", cal.max_abs_residual());

    let rho = noisy_cluster(&p)?;
    let w = witness(&rho)?;
    println!("\nmodel state: W = {:+.4}, fidelity bound {:.4}, fidelity {:.4}", w.value, w.fidelity_bound, rho.fidelity_pure(&cluster4::states::cluster_state()));
    Ok(())
}
