//! Builds the hyperentangled state, applies the controlled-phase gate and
//! prints the amplitudes together with the stabilizer check.

use cluster4::states::{apply_hw_cp, hyperentangled_state, logical_map, reference_linear_cluster};
use cluster4::verify::stabilizer_check;
use cluster4::StateVector;

fn print_amplitudes(name: &str, state: &StateVector) {
    println!("{name}:");
    for (k, a) in state.amplitudes().iter().enumerate() {
        if a.norm() > 1e-12 {
            println!("  |{k:04b}>  {:+.4}{:+.4}i", a.re, a.im);
        }
    }
}

fn main() {
    let xi = hyperentangled_state();
    let c4 = apply_hw_cp(&xi);
    print_amplitudes("hyperentangled", &xi);
    print_amplitudes("cluster", &c4);

    let phi = logical_map(&c4);
    print_amplitudes("logical basis", &phi);
    let overlap = phi.amplitudes().dotc(reference_linear_cluster().amplitudes()).norm();
    println!("overlap with the textbook linear cluster: {overlap:.12}");

    println!("\nstabilizers (slot order q1 q2 q3 q4 = B pol, A pol, A path, B path):");
    for r in stabilizer_check(&c4) {
        println!("  {:<12} <O> = {:+.6}  residual {:.1e}", r.observable, r.expectation, r.residual);
    }
}
