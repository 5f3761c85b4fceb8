//! Markov chain for repeated write-read cycles on one atom.

use raqm::chain::{chain_analytics, chain_slopes};
use raqm::node::MarkovParams;
use raqm::qubit::NamedPolarization;

fn main() -> raqm::Result<()> {
    let points = chain_analytics(10, &MarkovParams::default(), NamedPolarization::R)?;
    for p in &points {
        println!("trial {:2}: efficiency {:.4}  fidelity {:.4}", p.trial, p.efficiency, p.fidelity);
    }
    let s = chain_slopes(&points).unwrap();
    println!("slopes: {:.3} pp/trial (efficiency), {:.3} pp/trial (fidelity)", s.efficiency_pp, s.fidelity_pp);

    // no way out of mF=0
    let sticky = MarkovParams { p_return_center: 1.0, p_to_edge: 0.0, p_branch_back: 1.0, ..Default::default() };
    let flat = chain_slopes(&chain_analytics(10, &sticky, NamedPolarization::R)?).unwrap();
    println!("absorbing mF=0: {:.2e} pp/trial", flat.efficiency_pp);
    Ok(())
}
