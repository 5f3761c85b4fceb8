//! Exact enumeration of the reuse Markov chain over repeated write-read cycles on one atom.
//!
//! States are mF=0 (C), either edge state (E, lumped by symmetry) and scrambled (S).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::node::{MarkovParams, NodeModel, PayloadNoise};
use crate::physics::PositionDistribution;
use crate::qubit::NamedPolarization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainPoint {
    pub trial: usize,
    pub efficiency: f64,
    /// Fidelity conditioned on a photon being emitted.
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSlopes {
    /// Percentage points per trial.
    pub efficiency_pp: f64,
    pub fidelity_pp: f64,
}

/// Per-position step data for one write-read cycle.
#[derive(Debug, Clone, Copy)]
struct Cycle {
    eff: [f64; 3],
    fid: [f64; 3],
    /// transition[from][to]
    transition: [[f64; 3]; 3],
}

/// The reuse chain, optionally averaged over atom positions and started from a mixed distribution.
#[derive(Debug, Clone)]
pub struct ReuseChain {
    markov: MarkovParams,
    scatter: f64,
    read_eff: f64,
    fid_center: f64,
    fid_edge: f64,
    /// (weight, coupling scale, initial distribution)
    components: Vec<(f64, f64, [f64; 3])>,
}

impl ReuseChain {
    /// Unit coupling scale, atom starting in mF=0.
    pub fn pure(markov: &MarkovParams, noise: &PayloadNoise, input: NamedPolarization) -> Result<Self> {
        markov.validate()?;
        let (fc, fe) = payload_fidelities(markov, noise, input)?;
        Ok(Self {
            markov: *markov,
            scatter: markov.p_scatter_write,
            read_eff: markov.read_eff(),
            fid_center: fc,
            fid_edge: fe,
            components: vec![(1.0, 1.0, [1.0, 0.0, 0.0])],
        })
    }

    /// Chain matching a register built from `model`, with the atom at a position drawn from
    /// `positions`; `initial(k)` gives the start distribution for coupling scale k.
    pub fn for_model<F>(model: &NodeModel, input: NamedPolarization, positions: &PositionDistribution, initial: F) -> Result<Self>
    where
        F: Fn(f64) -> [f64; 3],
    {
        let (fc, fe) = payload_fidelities(&model.markov, &model.noise, input)?;
        let components = positions
            .quadrature(48)
            .into_iter()
            .map(|(w, x)| {
                let k = model.coupling_scale(x);
                (w, k, initial(k))
            })
            .collect();
        Ok(Self {
            markov: model.markov,
            scatter: model.addressed_scatter(),
            read_eff: model.markov.read_eff(),
            fid_center: fc,
            fid_edge: fe,
            components,
        })
    }

    fn cycle(&self, k: f64) -> Cycle {
        let m = &self.markov;
        let wc = (m.p_store() * k).min(1.0);
        let we = (m.edge_store() * k).min(1.0);
        let r = (self.read_eff * k).min(1.0);
        let leak = self.scatter * (1.0 - m.p_branch_back);
        let mut t = [[0.0; 3]; 3];
        // C: stored then read (0.85 back), or scattered to either edge state
        t[0][1] = wc * m.p_to_edge + leak;
        t[0][0] = 1.0 - t[0][1];
        // E: stored then read (edge-origin return), or scattered to C with half the leak
        t[1][0] = we * m.p_edge_return_center + 0.5 * leak;
        t[1][1] = 1.0 - t[1][0];
        // S: the read always lands in F=1
        t[2][0] = m.p_return_center;
        t[2][1] = m.p_to_edge;
        Cycle {
            eff: [wc * r, we * r, m.eff_from_edge],
            fid: [self.fid_center, self.fid_edge, 0.5],
            transition: t,
        }
    }

    /// Efficiency and conditioned fidelity for trials 1..=n.
    pub fn run(&self, n: usize) -> Result<Vec<ChainPoint>> {
        if n == 0 {
            return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
        }
        let mut eff = vec![0.0; n];
        let mut fid_w = vec![0.0; n];
        for (w, k, init) in &self.components {
            let c = self.cycle(*k);
            let mut p = *init;
            for i in 0..n {
                for s in 0..3 {
                    eff[i] += w * p[s] * c.eff[s];
                    fid_w[i] += w * p[s] * c.eff[s] * c.fid[s];
                }
                let mut next = [0.0; 3];
                for from in 0..3 {
                    for to in 0..3 {
                        next[to] += p[from] * c.transition[from][to];
                    }
                }
                p = next;
            }
        }
        Ok((0..n)
            .map(|i| ChainPoint {
                trial: i + 1,
                efficiency: eff[i],
                fidelity: if eff[i] > 0.0 { fid_w[i] / eff[i] } else { 0.0 },
            })
            .collect())
    }
}

/// Payload fidelities for an mF=0 start and an edge start.
fn payload_fidelities(markov: &MarkovParams, noise: &PayloadNoise, input: NamedPolarization) -> Result<(f64, f64)> {
    let (p, a) = noise.channel()?;
    let shrink = if input.is_circular() { 1.0 - p } else { (1.0 - p) * a };
    let edge = (2.0 * markov.fid_from_edge - 1.0) / (1.0 - p);
    Ok((0.5 * (1.0 + shrink), 0.5 * (1.0 + shrink * edge)))
}

/// Exact per-trial efficiency and conditioned fidelity for an atom starting in mF=0 at unit coupling.
pub fn chain_analytics(n_trials: usize, params: &MarkovParams, input: NamedPolarization) -> Result<Vec<ChainPoint>> {
    ReuseChain::pure(params, &PayloadNoise::default(), input)?.run(n_trials)
}

/// Least-squares slopes over the points, in percentage points per trial.
pub fn chain_slopes(points: &[ChainPoint]) -> Option<ChainSlopes> {
    let x: Vec<f64> = points.iter().map(|p| p.trial as f64).collect();
    let e: Vec<f64> = points.iter().map(|p| 100.0 * p.efficiency).collect();
    let f: Vec<f64> = points.iter().map(|p| 100.0 * p.fidelity).collect();
    Some(ChainSlopes { efficiency_pp: fit_line(&x, &e, None)?.slope, fidelity_pp: fit_line(&x, &f, None)?.slope })
}

/// Start distribution of the cycling atom in the extended pattern: a failed preparation leaves it
/// scrambled, and the other atom's write may scatter onto it.
pub fn extended_initial(model: &NodeModel, k_other: f64) -> [f64; 3] {
    let q = model.p_prepare_fail;
    let w = (model.markov.p_store() * k_other).min(1.0);
    let hit = (1.0 - w) * model.unaddressed_scatter();
    [(1.0 - q) * (1.0 - hit), 0.0, q + (1.0 - q) * hit]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_trial_matches_center_efficiency() {
        let pts = chain_analytics(10, &MarkovParams::default(), NamedPolarization::R).unwrap();
        assert!((pts[0].efficiency - 0.26).abs() < 1e-12);
        for w in pts.windows(2) {
            assert!(w[1].efficiency <= w[0].efficiency + 1e-15);
        }
    }

    #[test]
    fn slopes_within_window() {
        let pts = chain_analytics(10, &MarkovParams::default(), NamedPolarization::R).unwrap();
        let s = chain_slopes(&pts).unwrap();
        assert!((s.efficiency_pp + 0.29).abs() <= 0.10, "{s:?}");
        assert!((s.fidelity_pp + 0.44).abs() <= 0.10, "{s:?}");
    }

    #[test]
    fn all_absorbing_variant_is_constant() {
        let m = MarkovParams { p_return_center: 1.0, p_to_edge: 0.0, p_branch_back: 1.0, ..Default::default() };
        let pts = chain_analytics(10, &m, NamedPolarization::H).unwrap();
        for p in &pts {
            assert!((p.efficiency - pts[0].efficiency).abs() < 1e-15);
            assert!((p.fidelity - pts[0].fidelity).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(chain_analytics(0, &MarkovParams::default(), NamedPolarization::R).is_err());
        let bad = MarkovParams { p_to_edge: 0.5, ..Default::default() };
        assert!(matches!(chain_analytics(3, &bad, NamedPolarization::R), Err(Error::Parameter(_))));
    }

    #[test]
    fn enumeration_matches_brute_force_paths() {
        // independent oracle: explicit sum over every C/E/S path of length 3
        let m = MarkovParams::default();
        let chain = ReuseChain::pure(&m, &PayloadNoise::default(), NamedPolarization::R).unwrap();
        let c = chain.cycle(1.0);
        let mut eff3 = 0.0;
        for b in 0..3 {
            for s in 0..3 {
                eff3 += c.transition[0][b] * c.transition[b][s] * c.eff[s];
            }
        }
        let pts = chain.run(3).unwrap();
        assert!((pts[2].efficiency - eff3).abs() < 1e-15);
    }
}
