//! Single polarization qubits.
//!
//! States are 2x2 density matrices in the circular basis: index 0 is |R> (sigma+),
//! index 1 is |L> (sigma-). The same type carries the photonic qubit and the
//! stored Zeeman superposition |F=2, mF=+1>, |F=2, mF=-1>.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for trace, hermiticity and positivity checks.
pub const STATE_TOL: f64 = 1e-9;

/// Nominal phase rate of the stored superposition (twice the Larmor frequency).
pub const DEFAULT_PHASE_RATE: f64 = 2.0 * std::f64::consts::PI * 30.0e3;

/// The six tomography eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedPolarization {
    R,
    L,
    H,
    V,
    D,
    A,
}

impl NamedPolarization {
    pub const ALL: [NamedPolarization; 6] = [Self::R, Self::L, Self::H, Self::V, Self::D, Self::A];

    /// Amplitudes over (|R>, |L>).
    pub fn amplitudes(self) -> [Complex64; 2] {
        let s = FRAC_1_SQRT_2;
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            Self::R => [re(1.0), re(0.0)],
            Self::L => [re(0.0), re(1.0)],
            Self::H => [re(s), re(s)],
            Self::V => [re(s), re(-s)],
            Self::D => [re(s), Complex64::new(0.0, s)],
            Self::A => [re(s), Complex64::new(0.0, -s)],
        }
    }

    pub fn orthogonal(self) -> Self {
        match self {
            Self::R => Self::L,
            Self::L => Self::R,
            Self::H => Self::V,
            Self::V => Self::H,
            Self::D => Self::A,
            Self::A => Self::D,
        }
    }

    pub fn is_circular(self) -> bool {
        matches!(self, Self::R | Self::L)
    }

    pub fn state(self) -> PolarizationQubit {
        PolarizationQubit::pure(self.amplitudes())
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "R" | "r" => Some(Self::R),
            "L" | "l" => Some(Self::L),
            "H" | "h" => Some(Self::H),
            "V" | "v" => Some(Self::V),
            "D" | "d" => Some(Self::D),
            "A" | "a" => Some(Self::A),
            _ => None,
        }
    }
}

impl fmt::Display for NamedPolarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::R => "R",
            Self::L => "L",
            Self::H => "H",
            Self::V => "V",
            Self::D => "D",
            Self::A => "A",
        };
        f.write_str(s)
    }
}

/// Density matrix of one polarization qubit in the (R, L) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationQubit {
    rho: [[Complex64; 2]; 2],
}

impl PolarizationQubit {
    /// Builds a state from raw matrix elements, checking the density-matrix invariants.
    pub fn from_matrix(rho: [[Complex64; 2]; 2]) -> Result<Self> {
        let q = Self { rho };
        q.validate()?;
        Ok(q)
    }

    /// |psi><psi| for normalized amplitudes over (|R>, |L>).
    pub fn pure(psi: [Complex64; 2]) -> Self {
        let n = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        let a = psi[0] / n;
        let b = psi[1] / n;
        Self {
            rho: [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]],
        }
    }

    pub fn maximally_mixed() -> Self {
        let h = Complex64::new(0.5, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self { rho: [[h, z], [z, h]] }
    }

    /// State with Bloch vector (x, y, z), where +x = H, +y = D, +z = R.
    /// Vectors longer than one are rejected.
    pub fn from_bloch(v: [f64; 3]) -> Result<Self> {
        let [x, y, z] = v;
        let r2 = x * x + y * y + z * z;
        if !r2.is_finite() || r2 > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("Bloch vector norm {} > 1", r2.sqrt())));
        }
        Ok(Self::from_bloch_unchecked(v))
    }

    pub(crate) fn from_bloch_unchecked([x, y, z]: [f64; 3]) -> Self {
        Self {
            rho: [
                [Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
                [Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
            ],
        }
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.rho
    }

    pub fn bloch(&self) -> [f64; 3] {
        let c = self.rho[1][0];
        [2.0 * c.re, 2.0 * c.im, (self.rho[0][0] - self.rho[1][1]).re]
    }

    pub fn trace(&self) -> f64 {
        (self.rho[0][0] + self.rho[1][1]).re
    }

    /// Eigenvalues in ascending order (Hermitian part).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.rho[0][0].re;
        let d = self.rho[1][1].re;
        let b = 0.5 * (self.rho[0][1] + self.rho[1][0].conj());
        let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let mid = 0.5 * (a + d);
        [mid - half_gap, mid + half_gap]
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.rho[0][0] + self.rho[1][1];
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        for i in 0..2 {
            for j in 0..2 {
                if (self.rho[i][j] - self.rho[j][i].conj()).norm() > STATE_TOL {
                    return Err(Error::InvalidState("matrix is not Hermitian".into()));
                }
            }
        }
        let min = self.eigenvalues()[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    /// Overlap <psi|rho|psi> with a named pure state.
    pub fn fidelity(&self, target: NamedPolarization) -> Result<f64> {
        self.validate()?;
        Ok(self.overlap(target.amplitudes()))
    }

    pub(crate) fn overlap(&self, psi: [Complex64; 2]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += psi[i].conj() * self.rho[i][j] * psi[j];
            }
        }
        acc.re.clamp(0.0, 1.0)
    }

    /// Relative phase exp(i*phase_rate*duration) between the R and L components.
    pub fn apply_larmor(&self, duration: f64, phase_rate: f64) -> Result<Self> {
        if !(duration >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative duration {duration}")));
        }
        Ok(self.rotate_phase(phase_rate * duration))
    }

    /// Applies diag(1, e^{i phi}); any sign of phi.
    pub(crate) fn rotate_phase(&self, phi: f64) -> Self {
        let e = Complex64::from_polar(1.0, phi);
        let mut rho = self.rho;
        rho[0][1] *= e.conj();
        rho[1][0] *= e;
        Self { rho }
    }

    /// (1-p) rho + p I/2.
    pub fn depolarize(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("depolarizing probability {p} outside [0,1]")));
        }
        let mixed = Self::maximally_mixed();
        let mut rho = self.rho;
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] = self.rho[i][j] * (1.0 - p) + mixed.rho[i][j] * p;
            }
        }
        Ok(Self { rho })
    }

    /// Scales the R/L coherences by `factor`.
    pub fn dephase_amplitude(&self, factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidArgument(format!("dephasing factor {factor} outside [0,1]")));
        }
        let mut rho = self.rho;
        rho[0][1] *= factor;
        rho[1][0] *= factor;
        Ok(Self { rho })
    }

    /// Probability of the `+` outcome of a projective measurement onto `plus`.
    pub fn probability(&self, plus: NamedPolarization) -> f64 {
        self.overlap(plus.amplitudes())
    }

    /// Trace distance 0.5*||rho - sigma||_1 (half the Bloch-vector distance).
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let a = self.bloch();
        let b = other.bloch();
        0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Weighted mixture of states; weights need not be normalized.
    pub fn mixture<'a, I>(parts: I) -> Option<Self>
    where
        I: IntoIterator<Item = (f64, &'a PolarizationQubit)>,
    {
        let mut acc = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut total = 0.0;
        for (w, q) in parts {
            total += w;
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += q.rho[i][j] * w;
                }
            }
        }
        if total <= 0.0 {
            return None;
        }
        for row in acc.iter_mut() {
            for v in row.iter_mut() {
                *v /= total;
            }
        }
        Some(Self { rho: acc })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use NamedPolarization::*;

    const PERIOD: f64 = 1.0 / 30.0e3;

    fn close(a: &PolarizationQubit, b: &PolarizationQubit, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a.matrix()[i][j] - b.matrix()[i][j]).norm() < tol))
    }

    #[test]
    fn named_states_are_orthogonal_pairs() {
        for p in NamedPolarization::ALL {
            let f = p.state().fidelity(p).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
            assert!(p.state().fidelity(p.orthogonal()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        assert!((H.state().fidelity(H).unwrap() - 1.0).abs() < 1e-12);
        assert!(H.state().fidelity(V).unwrap().abs() < 1e-12);
        let f = PolarizationQubit::maximally_mixed().fidelity(R).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_rejects_invalid_state() {
        let z = Complex64::new(0.0, 0.0);
        let bad = PolarizationQubit { rho: [[Complex64::new(0.7, 0.0), z], [z, Complex64::new(0.7, 0.0)]] };
        assert!(matches!(bad.fidelity(R), Err(Error::InvalidState(_))));
        let neg = PolarizationQubit {
            rho: [[Complex64::new(1.2, 0.0), z], [z, Complex64::new(-0.2, 0.0)]],
        };
        assert!(neg.fidelity(R).is_err());
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let psi = H.amplitudes();
        let phase = Complex64::from_polar(1.0, 1.234);
        let q = PolarizationQubit::pure([psi[0] * phase, psi[1] * phase]);
        assert!((q.fidelity(H).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn larmor_examples() {
        let r = R.state().apply_larmor(12.3e-6, DEFAULT_PHASE_RATE).unwrap();
        assert!(close(&r, &R.state(), 1e-12));

        // The phase after one period, computed directly, is 2*pi.
        let phi = DEFAULT_PHASE_RATE * PERIOD;
        assert!((phi - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        let full = H.state().apply_larmor(PERIOD, DEFAULT_PHASE_RATE).unwrap();
        assert!(close(&full, &H.state(), 1e-9));

        let half = H.state().apply_larmor(0.5 * PERIOD, DEFAULT_PHASE_RATE).unwrap();
        assert!(close(&half, &V.state(), 1e-9));
        assert!((half.fidelity(V).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn larmor_rejects_negative_duration() {
        assert!(matches!(
            H.state().apply_larmor(-1e-6, DEFAULT_PHASE_RATE),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn depolarize_examples() {
        let h = H.state();
        assert!(close(&h.depolarize(0.0).unwrap(), &h, 1e-15));
        assert!(close(&h.depolarize(1.0).unwrap(), &PolarizationQubit::maximally_mixed(), 1e-15));
        // (1-p)*1 + p*0.5 at p = 0.5
        assert!((h.depolarize(0.5).unwrap().fidelity(H).unwrap() - 0.75).abs() < 1e-12);
        assert!(h.depolarize(1.5).is_err());
        assert!(h.depolarize(-0.1).is_err());
    }

    #[test]
    fn dephase_examples() {
        let h = H.state();
        assert!(close(&h.dephase_amplitude(1.0).unwrap(), &h, 1e-15));
        assert!(close(&h.dephase_amplitude(0.0).unwrap(), &PolarizationQubit::maximally_mixed(), 1e-15));
        // (1 + factor)/2 for an equatorial pure state
        assert!((h.dephase_amplitude(0.9).unwrap().fidelity(H).unwrap() - 0.95).abs() < 1e-12);
        assert!(h.dephase_amplitude(1.01).is_err());
    }

    #[test]
    fn bloch_round_trip_and_rejection() {
        let q = PolarizationQubit::from_bloch([0.3, -0.2, 0.5]).unwrap();
        let b = q.bloch();
        assert!((b[0] - 0.3).abs() < 1e-12 && (b[1] + 0.2).abs() < 1e-12 && (b[2] - 0.5).abs() < 1e-12);
        assert!(PolarizationQubit::from_bloch([1.0, 1.0, 0.0]).is_err());
        assert_eq!(D.state().bloch().map(|v| v.round()), [0.0, 1.0, 0.0]);
    }

    fn arb_state() -> impl Strategy<Value = PolarizationQubit> {
        (0.0..1.0f64, 0.0..std::f64::consts::PI, 0.0..(2.0 * std::f64::consts::PI)).prop_map(|(r, th, ph)| {
            PolarizationQubit::from_bloch_unchecked([
                r * th.sin() * ph.cos(),
                r * th.sin() * ph.sin(),
                r * th.cos(),
            ])
        })
    }

    proptest! {
        #[test]
        fn channels_preserve_trace_and_positivity(q in arb_state(), p in 0.0..=1.0f64, f in 0.0..=1.0f64, t in 0.0..1e-3f64) {
            for out in [q.depolarize(p).unwrap(), q.dephase_amplitude(f).unwrap(), q.apply_larmor(t, DEFAULT_PHASE_RATE).unwrap()] {
                prop_assert!((out.trace() - 1.0).abs() < STATE_TOL);
                prop_assert!(out.eigenvalues()[0] >= -STATE_TOL);
                prop_assert!(out.validate().is_ok());
            }
        }

        #[test]
        fn larmor_composes(q in arb_state(), t1 in 0.0..1e-3f64, t2 in 0.0..1e-3f64) {
            let a = q.apply_larmor(t1, DEFAULT_PHASE_RATE).unwrap().apply_larmor(t2, DEFAULT_PHASE_RATE).unwrap();
            let b = q.apply_larmor(t1 + t2, DEFAULT_PHASE_RATE).unwrap();
            prop_assert!(close(&a, &b, 1e-9));
        }

        #[test]
        fn larmor_keeps_populations(q in arb_state(), t in 0.0..1e-3f64) {
            let out = q.apply_larmor(t, DEFAULT_PHASE_RATE).unwrap();
            prop_assert!((out.matrix()[0][0] - q.matrix()[0][0]).norm() < 1e-12);
        }

        #[test]
        fn orthogonal_fidelities_sum_to_one(q in arb_state()) {
            for p in NamedPolarization::ALL {
                let s = q.fidelity(p).unwrap() + q.fidelity(p.orthogonal()).unwrap();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn noise_commutes_with_larmor_on_diagonal_states(z in -1.0..1.0f64, p in 0.0..=1.0f64, f in 0.0..=1.0f64, t in 0.0..1e-3f64) {
            let q = PolarizationQubit::from_bloch_unchecked([0.0, 0.0, z]);
            let a = q.depolarize(p).unwrap().apply_larmor(t, DEFAULT_PHASE_RATE).unwrap();
            let b = q.apply_larmor(t, DEFAULT_PHASE_RATE).unwrap().depolarize(p).unwrap();
            prop_assert!(close(&a, &b, 1e-12));
            let a = q.dephase_amplitude(f).unwrap().apply_larmor(t, DEFAULT_PHASE_RATE).unwrap();
            let b = q.apply_larmor(t, DEFAULT_PHASE_RATE).unwrap().dephase_amplitude(f).unwrap();
            prop_assert!(close(&a, &b, 1e-12));
        }
    }
}
