//! Simulated polarization tomography: basis measurements, reconstruction and fidelity intervals.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::qubit::{NamedPolarization, PolarizationQubit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    HV,
    DA,
    RL,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::HV, Basis::DA, Basis::RL];

    pub fn plus(self) -> NamedPolarization {
        match self {
            Self::HV => NamedPolarization::H,
            Self::DA => NamedPolarization::D,
            Self::RL => NamedPolarization::R,
        }
    }

    /// Basis containing `p`, and whether `p` is its plus outcome.
    pub fn of(p: NamedPolarization) -> (Self, bool) {
        use NamedPolarization::*;
        match p {
            H => (Self::HV, true),
            V => (Self::HV, false),
            D => (Self::DA, true),
            A => (Self::DA, false),
            R => (Self::RL, true),
            L => (Self::RL, false),
        }
    }

    fn index(self) -> usize {
        match self {
            Self::HV => 0,
            Self::DA => 1,
            Self::RL => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TomographyCounts {
    /// (n_plus, n_minus) for HV, DA, RL.
    pub counts: [(u64, u64); 3],
    /// Attempts behind these counts, for efficiency estimates.
    pub total_attempts: u64,
}

impl TomographyCounts {
    pub fn get(&self, b: Basis) -> (u64, u64) {
        self.counts[b.index()]
    }

    pub fn add(&mut self, b: Basis, plus: bool) {
        let c = &mut self.counts[b.index()];
        if plus {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }

    pub fn set(&mut self, b: Basis, n_plus: u64, n_minus: u64) {
        self.counts[b.index()] = (n_plus, n_minus);
    }

    pub fn detected(&self) -> u64 {
        self.counts.iter().map(|(p, m)| p + m).sum()
    }

    pub fn merge(&mut self, other: &Self) {
        for i in 0..3 {
            self.counts[i].0 += other.counts[i].0;
            self.counts[i].1 += other.counts[i].1;
        }
        self.total_attempts += other.total_attempts;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub ci68: (f64, f64),
    pub ci95: (f64, f64),
    pub n_effective: u64,
}

/// Born-rule sampling of `shots` projective measurements in `basis`.
pub fn measure<R: Rng + ?Sized>(rho: &PolarizationQubit, basis: Basis, shots: u64, rng: &mut R) -> (u64, u64) {
    let p = rho.probability(basis.plus()).clamp(0.0, 1.0);
    let n_plus = Binomial::new(shots, p).expect("probability in [0,1]").sample(rng);
    (n_plus, shots - n_plus)
}

/// One projective measurement decided by a single uniform draw.
pub fn measure_once(rho: &PolarizationQubit, basis: Basis, u: f64) -> bool {
    u < rho.probability(basis.plus())
}

/// Linear inversion from the three Stokes components, projected into the Bloch ball.
pub fn reconstruct(counts: &TomographyCounts) -> Result<PolarizationQubit> {
    let mut v = [0.0; 3];
    for b in Basis::ALL {
        let (p, m) = counts.get(b);
        if p + m == 0 {
            return Err(Error::InsufficientData(format!("no shots in basis {b:?}")));
        }
        v[b.index()] = (p as f64 - m as f64) / (p + m) as f64;
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm > 1.0 {
        v = v.map(|c| c / norm);
    }
    PolarizationQubit::from_bloch(v)
}

/// Wilson score interval for k successes in n trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided normal quantile for the given coverage.
pub fn z_for(coverage: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + 0.5 * coverage)
}

/// Fidelity from the target's own basis: n_target / (n_target + n_orthogonal).
pub fn fidelity_estimate(counts: &TomographyCounts, target: NamedPolarization) -> Result<FidelityEstimate> {
    let (basis, plus) = Basis::of(target);
    let (p, m) = counts.get(basis);
    let (k, n) = if plus { (p, p + m) } else { (m, p + m) };
    proportion_estimate(k, n)
}

/// Point estimate with one-sigma (z = 1) and 95 % Wilson intervals.
pub fn proportion_estimate(k: u64, n: u64) -> Result<FidelityEstimate> {
    if n == 0 {
        return Err(Error::InsufficientData("no shots in the target basis".into()));
    }
    let value = k as f64 / n as f64;
    Ok(FidelityEstimate { value, ci68: wilson(k, n, 1.0), ci95: wilson(k, n, z_for(0.95)), n_effective: n })
}
