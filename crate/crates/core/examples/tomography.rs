//! Simulated polarization tomography with Wilson intervals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use raqm::qubit::{NamedPolarization, PolarizationQubit};
use raqm::tomography::{fidelity_estimate, measure, reconstruct, Basis, TomographyCounts};

fn main() -> raqm::Result<()> {
    let truth = PolarizationQubit::from_bloch([0.9, 0.1, 0.05])?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = TomographyCounts::default();
    for b in Basis::ALL {
        let (p, m) = measure(&truth, b, 5000, &mut rng);
        counts.set(b, p, m);
    }
    let est = fidelity_estimate(&counts, NamedPolarization::H)?;
    println!("true F(H) = {:.4}", truth.fidelity(NamedPolarization::H)?);
    println!("estimate {:.4}, 68% [{:.4}, {:.4}], 95% [{:.4}, {:.4}]", est.value, est.ci68.0, est.ci68.1, est.ci95.0, est.ci95.1);
    let rho = reconstruct(&counts)?;
    let b = rho.bloch();
    println!("reconstructed bloch [{:.3}, {:.3}, {:.3}], trace distance {:.4}", b[0], b[1], b[2], rho.trace_distance(&truth));
    Ok(())
}
