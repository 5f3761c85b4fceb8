//! Random access on a two-atom register, with the audit log of every state change.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use raqm::node::{NodeModel, ReadOutcome, Register};
use raqm::physics::UM;
use raqm::qubit::NamedPolarization;

fn main() -> raqm::Result<()> {
    let model = NodeModel::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut stored = 0;
    for trial in 0..20 {
        let mut reg = Register::pair(&model, 10.0 * UM)?.with_audit();
        reg.prepare(&mut rng);
        reg.write("A", NamedPolarization::R, 0.0, &mut rng)?;
        reg.write("B", NamedPolarization::H, 50e-6, &mut rng)?;
        let a = reg.read("A", 133.3e-6, &mut rng)?;
        let b = reg.read("B", 183.3e-6, &mut rng)?;
        if let (ReadOutcome::Photon(qa), ReadOutcome::Photon(qb)) = (&a, &b) {
            stored += 1;
            println!(
                "trial {trial}: both photons, F_A = {:.3}, F_B = {:.3}",
                qa.fidelity(NamedPolarization::R)?,
                qb.fidelity(NamedPolarization::H)?
            );
            print!("{}", reg.audit_text());
        }
    }
    println!("{stored}/20 trials retrieved both qubits");
    Ok(())
}
