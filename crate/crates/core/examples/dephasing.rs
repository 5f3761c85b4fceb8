//! Ensemble dephasing from the trap's virtual magnetic field.

use raqm::physics::{coherence_vs_acceptance, dephasing_envelope, fit_envelope_time, DephasingParams, Ellipticity, UM};
use raqm::physics::AddressingParams;

fn main() -> raqm::Result<()> {
    let d = DephasingParams::default();
    let positions = AddressingParams::default().acceptance_positions();
    for t_us in [0.0, 250.0, 500.0, 1000.0, 1500.0] {
        println!("envelope at {t_us:6.0} us: {:.4}", dephasing_envelope(t_us * 1e-6, &positions, &d)?);
    }
    println!("envelope 1/e time: {:.3} ms", fit_envelope_time(&positions, &d)? * 1e3);

    let large = DephasingParams { ellipticity: Ellipticity::Large, ..d };
    for w in [2.0, 6.0, 14.0] {
        println!(
            "acceptance width {w:4} um: {:.2} ms (small ellipticity), {:.2} ms (large)",
            coherence_vs_acceptance(w * UM, 6.0 * UM, &d)? * 1e3,
            coherence_vs_acceptance(w * UM, 6.0 * UM, &large)? * 1e3
        );
    }
    Ok(())
}
