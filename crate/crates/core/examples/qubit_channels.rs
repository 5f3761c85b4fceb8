//! Polarization qubits and the noise channels applied to stored photons.

use raqm::node::PayloadNoise;
use raqm::qubit::{NamedPolarization, PolarizationQubit};

fn main() -> raqm::Result<()> {
    let (p, a) = PayloadNoise::default().channel()?;
    println!("payload channel: depolarize p = {p:.4}, coherence factor a = {a:.4}");

    for pol in NamedPolarization::ALL {
        let out = pol.state().depolarize(p)?.dephase_amplitude(if pol.is_circular() { 1.0 } else { a })?;
        println!("{pol}: fidelity after storage {:.4}, bloch {:?}", out.fidelity(pol)?, out.bloch().map(|c| (c * 1e4).round() / 1e4));
    }

    // half a Larmor period turns H into V
    let h = NamedPolarization::H.state();
    let rate = 2.0 * std::f64::consts::PI * 30e3;
    let v = h.apply_larmor(0.5 / 30e3, rate)?;
    println!("H after half a Larmor period: F(V) = {:.6}", v.fidelity(NamedPolarization::V)?);

    let mix = PolarizationQubit::mixture([(0.9, &h), (0.1, &PolarizationQubit::maximally_mixed())]).unwrap();
    println!("90/10 mixture with noise: F(H) = {:.3}", mix.fidelity(NamedPolarization::H)?);
    Ok(())
}
