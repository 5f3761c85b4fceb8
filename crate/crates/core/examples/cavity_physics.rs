//! Cavity coupling, efficiencies, scattering and node capacity.

use raqm::physics::*;

fn main() -> raqm::Result<()> {
    let c = CavityParams::default();
    let p = AddressingParams::default();
    let calib = EfficiencyCalib::default_for(&c, &p);
    println!("cooperativity at g0: {:.3}", c.cooperativity(c.g0));

    println!("x_um  g/g0   eta    write  read");
    for x_um in [0.0, 3.0, 6.0, 10.0, 15.0, 20.0] {
        let g = cavity_coupling(x_um * UM, &c);
        println!(
            "{x_um:4.0}  {:.3}  {:.3}  {:.3}  {:.3}",
            g / c.g0,
            memory_efficiency(g, &c, &calib)?,
            write_efficiency(g, &c, &calib)?,
            read_efficiency(g, &c, &calib)?
        );
    }

    let det = DetuningModel::default();
    for d in [-20.0, -50.0, -100.0, -200.0] {
        println!("scattering at {d} MHz: {:.2e}", scattering_prob(d * MHZ, &det)?);
    }
    for d in [1.25, 2.5, 4.0, 6.0] {
        println!("cross-illumination at {d} um: {:.2e}", stirap_crossillumination_prob(d * UM, &p));
    }

    println!("node capacity at 20 % efficiency: {}", node_capacity(0.20, &c, &p, &calib)?);
    Ok(())
}
