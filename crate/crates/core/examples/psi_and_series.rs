//! The interference functional Ψ and its Taylor jets.
//!
//! Prints Ψ(1/2, y) next to its closed form √y·arctan(√y), then the jet of
//! Ψ(2/3, 1/t) about t = 2 with its derivatives.

use uav_irs_noma::special::{derivative_at, psi, psi_recip_jet, QuadratureSpec};

fn main() -> uav_irs_noma::Result<()> {
    let q = QuadratureSpec::default();
    println!("{:>10} {:>20} {:>20}", "y", "psi(1/2, y)", "sqrt(y) atan(sqrt(y))");
    for y in [1e-3, 0.1, 0.5, 1.0, 10.0, 1e3] {
        let exact = f64::sqrt(y) * f64::sqrt(y).atan();
        println!("{y:>10} {:>20.15} {exact:>20.15}", psi(0.5, y, &q)?);
    }

    let jet = psi_recip_jet(2.0 / 3.0, 2.0, 5, &q)?;
    println!("\njet of psi(2/3, 1/t) about t = 2:");
    for k in 0..=jet.order() {
        println!("  d^{k}/dt^{k} = {:+.12e}", derivative_at(&jet, k)?);
    }
    let t = 2.1;
    println!("  truncated series at t = {t}: {:.12}, direct: {:.12}", jet.eval(t), psi(2.0 / 3.0, 1.0 / t, &q)?);
    Ok(())
}
