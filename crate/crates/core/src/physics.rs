//! Calibrated closed-form models of the two-atom cavity node.
//!
//! All quantities are SI: angular frequencies in rad/s, lengths in meters,
//! times in seconds, magnetic fields in tesla.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::fit_gaussian_decay;

const TWO_PI: f64 = 2.0 * PI;
pub const MHZ: f64 = TWO_PI * 1e6;
pub const UM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    pub g0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub mode_waist: f64,
}

impl Default for CavityParams {
    fn default() -> Self {
        Self { g0: 4.9 * MHZ, kappa: 2.7 * MHZ, gamma: 3.0 * MHZ, mode_waist: 30.0 * UM }
    }
}

impl CavityParams {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, val) in [("g0", self.g0), ("kappa", self.kappa), ("gamma", self.gamma), ("mode_waist", self.mode_waist)] {
            if !(val > 0.0 && val.is_finite()) {
                v.push(format!("cavity.{name} must be positive (got {val})"));
            }
        }
        v
    }

    /// Single-atom cooperativity g^2 / (2 kappa gamma).
    pub fn cooperativity(&self, g: f64) -> f64 {
        g * g / (2.0 * self.kappa * self.gamma)
    }

    /// 2C/(2C+1), the per-pass transfer factor of a cavity-assisted STIRAP.
    pub fn transfer_factor(&self, g: f64) -> f64 {
        let c2 = 2.0 * self.cooperativity(g);
        c2 / (c2 + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AddressingParams {
    pub intensity_fwhm_x: f64,
    pub ellipticity_ratio: f64,
    pub stirap_fwhm_x: f64,
    pub readout_duration: f64,
    pub switch_delay: f64,
    pub min_distance: f64,
    /// Accepted interatomic distances (lower, upper).
    pub acceptance_distance_range: (f64, f64),
}

impl Default for AddressingParams {
    fn default() -> Self {
        Self {
            intensity_fwhm_x: 1.96 * UM,
            ellipticity_ratio: 3.0,
            stirap_fwhm_x: 2.5 * UM,
            readout_duration: 8e-6,
            switch_delay: 40e-6,
            min_distance: 6.0 * UM,
            acceptance_distance_range: (6.0 * UM, 20.0 * UM),
        }
    }
}

impl AddressingParams {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.intensity_fwhm_x > 0.0) {
            v.push("addressing.intensity_fwhm must be positive".into());
        }
        if self.intensity_fwhm_x > self.stirap_fwhm_x {
            v.push(format!(
                "addressing: intensity FWHM {:.3} um exceeds STIRAP FWHM {:.3} um",
                self.intensity_fwhm_x / UM,
                self.stirap_fwhm_x / UM
            ));
        }
        if !(self.ellipticity_ratio > 0.0) {
            v.push("addressing.ellipticity_ratio must be positive".into());
        }
        if self.min_distance < 3.0 * self.intensity_fwhm_x - 1e-12 {
            v.push(format!(
                "addressing: min_distance {:.3} um is below three times the beam FWHM ({:.3} um)",
                self.min_distance / UM,
                3.0 * self.intensity_fwhm_x / UM
            ));
        }
        let (lo, hi) = self.acceptance_distance_range;
        if (lo - self.min_distance).abs() > 1e-12 {
            v.push("addressing: acceptance range must start at min_distance".into());
        }
        if !(hi >= lo) {
            v.push("addressing: acceptance range upper bound below lower bound".into());
        }
        if !(self.readout_duration > 0.0) || !(self.switch_delay > 0.0) {
            v.push("addressing: durations must be positive".into());
        }
        v
    }

    /// Atom positions implied by the acceptance range: |x| uniform, atoms mirrored at +-d/2.
    pub fn acceptance_positions(&self) -> PositionDistribution {
        let (lo, hi) = self.acceptance_distance_range;
        PositionDistribution::uniform(0.5 * lo, 0.5 * hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningModel {
    pub ref_detuning: f64,
    pub ref_scatter_prob: f64,
    pub validity_floor: f64,
}

impl Default for DetuningModel {
    fn default() -> Self {
        Self { ref_detuning: -100.0 * MHZ, ref_scatter_prob: 0.0015, validity_floor: 10.0 * MHZ }
    }
}

impl DetuningModel {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.ref_detuning < 0.0) {
            v.push("detuning: reference detuning must be negative".into());
        }
        if !(self.ref_scatter_prob > 0.0 && self.ref_scatter_prob < 1.0) {
            v.push("detuning: reference scatter probability must be in (0,1)".into());
        }
        if !(self.validity_floor > 0.0) {
            v.push("detuning: validity floor must be positive".into());
        }
        v
    }

    /// (ref_detuning / detuning)^2, the factor every incoherent scattering probability scales by.
    pub fn scatter_scale(&self, detuning: f64) -> Result<f64> {
        if !(detuning.abs() >= self.validity_floor) {
            return Err(Error::ModelValidity(format!(
                "|detuning| = 2pi*{:.3} MHz is below the validity floor 2pi*{:.3} MHz",
                detuning.abs() / MHZ,
                self.validity_floor / MHZ
            )));
        }
        Ok((self.ref_detuning / detuning).powi(2))
    }
}

/// Unaddressed-atom scattering probability per input photon, scaling as detuning^-2.
pub fn scattering_prob(detuning: f64, model: &DetuningModel) -> Result<f64> {
    Ok((model.ref_scatter_prob * model.scatter_scale(detuning)?).min(1.0))
}

fn fwhm_gauss(d: f64, fwhm: f64) -> f64 {
    (-4.0 * LN_2 * (d / fwhm).powi(2)).exp()
}

/// Separable Gaussian intensity of the addressing beam, 1 at its center.
pub fn beam_relative_intensity(dx: f64, dy: f64, p: &AddressingParams) -> f64 {
    fwhm_gauss(dx, p.intensity_fwhm_x) * fwhm_gauss(dy, p.ellipticity_ratio * p.intensity_fwhm_x)
}

/// Probability that a control pulse aimed at one atom drives the atom `distance` away.
pub fn stirap_crossillumination_prob(distance: f64, p: &AddressingParams) -> f64 {
    fwhm_gauss(distance.abs(), p.stirap_fwhm_x)
}

/// Coupling g(x) = g0 exp(-x^2/w0^2).
pub fn cavity_coupling(x: f64, c: &CavityParams) -> f64 {
    c.g0 * (-(x / c.mode_waist).powi(2)).exp()
}

/// Where an ensemble of atoms sits along the addressing axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PositionDistribution {
    Fixed(f64),
    /// Uniform over [lo, hi] (signed positions).
    Uniform { lo: f64, hi: f64 },
}

impl PositionDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        if hi - lo <= 0.0 {
            Self::Fixed(lo)
        } else {
            Self::Uniform { lo, hi }
        }
    }

    pub fn mirrored(&self) -> Self {
        match *self {
            Self::Fixed(x) => Self::Fixed(-x),
            Self::Uniform { lo, hi } => Self::Uniform { lo: -hi, hi: -lo },
        }
    }

    /// Expectation of `f` by composite Simpson quadrature.
    pub fn expect<T, F>(&self, f: F) -> T
    where
        F: Fn(f64) -> T,
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
    {
        match *self {
            Self::Fixed(x) => f(x),
            Self::Uniform { lo, hi } => {
                let n = 2048usize;
                let h = (hi - lo) / n as f64;
                let mut acc = f(lo) + f(hi);
                for k in 1..n {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    acc = acc + f(lo + k as f64 * h) * w;
                }
                acc * (1.0 / (3.0 * n as f64))
            }
        }
    }

    /// Gauss-Legendre nodes and weights (weights sum to one).
    pub fn quadrature(&self, n: usize) -> Vec<(f64, f64)> {
        match *self {
            Self::Fixed(x) => vec![(1.0, x)],
            Self::Uniform { lo, hi } => gauss_legendre(n)
                .into_iter()
                .map(|(node, w)| (0.5 * w, lo + 0.5 * (node + 1.0) * (hi - lo)))
                .collect(),
        }
    }
}

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Efficiency calibration: anchors plus the derived normalization constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyCalib {
    /// Coherent storage efficiency at g = g0.
    pub write_anchor: f64,
    /// Combined write-read efficiency averaged over the acceptance positions.
    pub combined_mean: f64,
    /// RMS of the transfer factor over the acceptance positions.
    pub transfer_rms: f64,
    /// Transfer factor at g0.
    pub transfer_center: f64,
}

impl EfficiencyCalib {
    pub fn calibrate(c: &CavityParams, p: &AddressingParams, write_anchor: f64, combined_mean: f64) -> Self {
        let positions = p.acceptance_positions();
        let mean_sq = positions.expect(|x| c.transfer_factor(cavity_coupling(x, c)).powi(2));
        Self {
            write_anchor,
            combined_mean,
            transfer_rms: mean_sq.sqrt(),
            transfer_center: c.transfer_factor(c.g0),
        }
    }

    pub fn default_for(c: &CavityParams, p: &AddressingParams) -> Self {
        Self::calibrate(c, p, 0.38, 0.26)
    }

    /// eta_max in eta(g) = eta_max [2C/(2C+1)]^2.
    pub fn eta_max(&self) -> f64 {
        self.combined_mean / self.transfer_rms.powi(2)
    }

    /// Transfer factor relative to its acceptance RMS; efficiencies in the register scale with it.
    pub fn coupling_scale(&self, g: f64, c: &CavityParams) -> f64 {
        c.transfer_factor(g) / self.transfer_rms
    }
}

/// Combined write-read efficiency at coupling `g`.
pub fn memory_efficiency(g: f64, c: &CavityParams, calib: &EfficiencyCalib) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::InvalidArgument(format!("coupling must be positive (got {g})")));
    }
    Ok((calib.eta_max() * c.transfer_factor(g).powi(2)).clamp(0.0, 1.0))
}

/// Write-in component, pinned to `write_anchor` at g0.
pub fn write_efficiency(g: f64, c: &CavityParams, calib: &EfficiencyCalib) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::InvalidArgument(format!("coupling must be positive (got {g})")));
    }
    Ok((calib.write_anchor * c.transfer_factor(g) / calib.transfer_center).clamp(0.0, 1.0))
}

/// Read-out component: combined / write.
pub fn read_efficiency(g: f64, c: &CavityParams, calib: &EfficiencyCalib) -> Result<f64> {
    Ok((memory_efficiency(g, c, calib)? / write_efficiency(g, c, calib)?).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ellipticity {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DephasingParams {
    pub guiding_field: f64,
    pub phase_rate: f64,
    pub ellipticity: Ellipticity,
    pub trap_waist: f64,
    pub virtual_field_small: f64,
    pub virtual_field_large: f64,
    /// Upper bound reported by the coherence-time helpers.
    pub coherence_cap: f64,
}

impl Default for DephasingParams {
    fn default() -> Self {
        Self {
            guiding_field: 44e-7,
            phase_rate: TWO_PI * 30e3,
            ellipticity: Ellipticity::Small,
            trap_waist: 30.0 * UM,
            virtual_field_small: 6.2e-7,
            virtual_field_large: 12.4e-7,
            coherence_cap: 0.1,
        }
    }
}

impl DephasingParams {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.phase_rate > 0.0) {
            v.push("dephasing.phase_rate must be positive".into());
        }
        if !(self.guiding_field > 0.0) {
            v.push("dephasing.guiding_field must be positive".into());
        }
        if !(self.virtual_field_small >= 0.0 && self.virtual_field_large >= 0.0) {
            v.push("dephasing: virtual field scales must be non-negative".into());
        }
        if !(self.trap_waist > 0.0) || !(self.coherence_cap > 0.0) {
            v.push("dephasing: trap waist and coherence cap must be positive".into());
        }
        v
    }

    pub fn virtual_field_scale(&self) -> f64 {
        match self.ellipticity {
            Ellipticity::Small => self.virtual_field_small,
            Ellipticity::Large => self.virtual_field_large,
        }
    }

    /// Phase-rate shift produced by the virtual field at position x (before mean removal).
    pub fn virtual_shift(&self, x: f64) -> f64 {
        let per_tesla = self.phase_rate / self.guiding_field;
        per_tesla * self.virtual_field_scale() * (-2.0 * (x / self.trap_waist).powi(2)).exp()
    }

    /// Local phase rate: nominal rate plus the shift relative to its ensemble mean, so the
    /// ensemble oscillates at `phase_rate` on average.
    pub fn local_phase_rate(&self, x: f64, ensemble: &PositionDistribution) -> f64 {
        self.phase_rate + self.virtual_shift(x) - ensemble.expect(|y| self.virtual_shift(y))
    }
}

/// Ensemble mean of exp(i (delta_omega(x) - mean) t).
pub fn dephasing_characteristic(t: f64, positions: &PositionDistribution, d: &DephasingParams) -> Complex64 {
    let mean = positions.expect(|x| d.virtual_shift(x));
    positions.expect(|x| Complex64::from_polar(1.0, (d.virtual_shift(x) - mean) * t))
}

/// |E[exp(i delta_omega(x) t)]| over the position ensemble.
pub fn dephasing_envelope(t: f64, positions: &PositionDistribution, d: &DephasingParams) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    Ok(dephasing_characteristic(t, positions, d).norm().min(1.0))
}

/// Gaussian 1/e time fitted to the envelope for an acceptance range
/// [min_distance, min_distance + range_width], capped at `d.coherence_cap`.
///
/// The fit window runs from 0 to the first time the envelope reaches e^-2, which makes
/// the result scale exactly with 1/virtual_field_scale.
pub fn coherence_vs_acceptance(range_width: f64, min_distance: f64, d: &DephasingParams) -> Result<f64> {
    if !(range_width >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative range width {range_width}")));
    }
    let positions = PositionDistribution::uniform(0.5 * min_distance, 0.5 * (min_distance + range_width));
    fit_envelope_time(&positions, d)
}

/// Gaussian 1/e time of the envelope for an arbitrary position ensemble.
pub fn fit_envelope_time(positions: &PositionDistribution, d: &DephasingParams) -> Result<f64> {
    let cap = d.coherence_cap;
    let target = (-2.0f64).exp();
    let env = |t: f64| dephasing_characteristic(t, positions, d).norm();
    // geometric bracketing of the e^-2 crossing
    let mut lo = 0.0;
    let mut hi = 1e-6;
    while env(hi) > target {
        lo = hi;
        hi *= 1.25;
        if lo > 2.0 * cap {
            return Ok(cap);
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if env(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_cut = 0.5 * (lo + hi);
    let n = 64;
    let ts: Vec<f64> = (0..=n).map(|k| t_cut * k as f64 / n as f64).collect();
    let ys: Vec<f64> = ts.iter().map(|t| env(*t)).collect();
    let fit = fit_gaussian_decay(&ts, &ys, 0.0, Some(1.0))
        .ok_or_else(|| Error::InvalidState("envelope fit failed".into()))?;
    Ok(fit.tau.min(cap))
}

/// Atoms with spacing `p.min_distance` that fit in the region where the
/// combined efficiency is at least `min_efficiency` (one cell of width min_distance each).
pub fn node_capacity(min_efficiency: f64, c: &CavityParams, p: &AddressingParams, calib: &EfficiencyCalib) -> Result<usize> {
    if !(min_efficiency > 0.0 && min_efficiency < 1.0) {
        return Err(Error::InvalidArgument(format!("min_efficiency {min_efficiency} outside (0,1)")));
    }
    let half = efficient_half_width(min_efficiency, c, calib)?;
    Ok(((2.0 * half) / p.min_distance + 1e-9).floor() as usize)
}

/// Largest |x| with memory_efficiency(g(x)) >= min_efficiency (0 if even the center fails).
pub fn efficient_half_width(min_efficiency: f64, c: &CavityParams, calib: &EfficiencyCalib) -> Result<f64> {
    let eff = |x: f64| memory_efficiency(cavity_coupling(x, c), c, calib);
    if eff(0.0)? < min_efficiency {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, c.mode_waist);
    while eff(hi)? >= min_efficiency {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 * c.mode_waist {
            return Ok(hi);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eff(mid)? >= min_efficiency {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
