//! Wave-plate angles and beam-splitter use for every correlation in the
//! table, checked against the direct expectation value.

use cluster4::apparatus::{outcome_probabilities, setting_for};
use cluster4::states::{cluster_state, TABLE_OBSERVABLES};
use cluster4::PauliString;

fn main() -> cluster4::Result<()> {
    let rho = cluster_state().to_density();
    println!("{:<16} {:>20} {:>20} {:>8} {:>8}", "observable", "Alice (qwp, hwp, BS)", "Bob (qwp, hwp, BS)", "parity", "direct");
    for name in TABLE_OBSERVABLES {
        let obs = PauliString::of(name);
        let plan = setting_for(&obs)?;
        let fmt = |a: &cluster4::apparatus::PhotonAnalyzer| {
            format!("{:6.1} {:6.1} {:>5}", a.theta_q.to_degrees(), a.theta_h.to_degrees(), if a.bs_present { "yes" } else { "no" })
        };
        let parity = plan.expectation_from(&outcome_probabilities(&rho, &plan.setting));
        println!("{name:<16} {:>20} {:>20} {parity:>+8.4} {:>+8.4}", fmt(&plan.setting.alice), fmt(&plan.setting.bob), rho.expectation(&obs));
    }
    Ok(())
}
