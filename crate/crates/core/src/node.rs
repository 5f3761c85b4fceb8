//! The atom register: preparation, stochastic write/read and the audit trail.
//!
//! Every operation consumes a fixed number of uniform draws regardless of the
//! branch taken, so two runs that differ only in a probability stay paired draw-for-draw.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::{
    cavity_coupling, AddressingParams, CavityParams, DephasingParams, DetuningModel, EfficiencyCalib,
    PositionDistribution,
};
use crate::qubit::{NamedPolarization, PolarizationQubit};

/// Uniform draws consumed by one write.
pub const WRITE_DRAWS: usize = 2;
/// Uniform draws consumed by one read.
pub const READ_DRAWS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Origin {
    Center,
    Edge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AtomInternalState {
    ReadyCenter,
    ReadyEdgePlus,
    ReadyEdgeMinus,
    Holding { qubit: PolarizationQubit, since: f64, origin: Origin },
    Scrambled,
}

impl AtomInternalState {
    pub fn is_ready(&self) -> bool {
        matches!(self, Self::ReadyCenter | Self::ReadyEdgePlus | Self::ReadyEdgeMinus)
    }

    pub fn is_holding(&self) -> bool {
        matches!(self, Self::Holding { .. })
    }

    fn tag(&self) -> &'static str {
        match self {
            Self::ReadyCenter => "C",
            Self::ReadyEdgePlus => "E+",
            Self::ReadyEdgeMinus => "E-",
            Self::Holding { .. } => "H",
            Self::Scrambled => "S",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSlot {
    pub id: String,
    pub position_x: f64,
    pub coupling: f64,
    /// Transfer factor relative to its acceptance-range RMS.
    pub coupling_scale: f64,
    pub local_phase_rate: f64,
    pub state: AtomInternalState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum WriteOutcome {
    Stored,
    NoInteraction,
    Reflected,
    ScatteredAddressed,
    ScatteredUnaddressed(String),
}

impl fmt::Display for WriteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Stored => f.write_str("stored"),
            Self::NoInteraction => f.write_str("no-interaction"),
            Self::Reflected => f.write_str("reflected"),
            Self::ScatteredAddressed => f.write_str("scattered-addressed"),
            Self::ScatteredUnaddressed(t) => write!(f, "scattered-unaddressed:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReadOutcome {
    Photon(PolarizationQubit),
    NoPhoton,
}

impl ReadOutcome {
    pub fn photon(&self) -> Option<&PolarizationQubit> {
        match self {
            Self::Photon(q) => Some(q),
            Self::NoPhoton => None,
        }
    }
}

/// Outcome-tree and reuse-chain probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovParams {
    pub p_return_center: f64,
    pub p_to_edge: f64,
    /// Combined write-read efficiency for an atom starting in an edge state.
    pub eff_from_edge: f64,
    pub fid_from_edge: f64,
    pub p_no_interaction: f64,
    pub p_scatter_write: f64,
    pub p_branch_back: f64,
    /// Fraction of the interacting remainder that is stored rather than reflected.
    pub store_share: f64,
    /// Combined write-read efficiency for an atom starting in mF=0, at unit coupling scale.
    pub eff_from_center: f64,
    /// Probability that a read of an edge-origin payload leaves the atom in mF=0.
    pub p_edge_return_center: f64,
}

impl Default for MarkovParams {
    fn default() -> Self {
        Self {
            p_return_center: 0.85,
            p_to_edge: 0.15,
            eff_from_edge: 0.14,
            fid_from_edge: 0.76,
            p_no_interaction: 0.33,
            p_scatter_write: 0.003,
            p_branch_back: 0.75,
            store_share: 0.5,
            eff_from_center: 0.26,
            p_edge_return_center: 0.5,
        }
    }
}

impl MarkovParams {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_return_center", self.p_return_center),
            ("p_to_edge", self.p_to_edge),
            ("eff_from_edge", self.eff_from_edge),
            ("fid_from_edge", self.fid_from_edge),
            ("p_no_interaction", self.p_no_interaction),
            ("p_scatter_write", self.p_scatter_write),
            ("p_branch_back", self.p_branch_back),
            ("store_share", self.store_share),
            ("eff_from_center", self.eff_from_center),
            ("p_edge_return_center", self.p_edge_return_center),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("{name} = {p} is not a probability")));
            }
        }
        if (self.p_return_center + self.p_to_edge - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter("p_return_center + p_to_edge must equal 1".into()));
        }
        if self.p_no_interaction + self.p_scatter_write > 1.0 {
            return Err(Error::Parameter("p_no_interaction + p_scatter_write exceeds 1".into()));
        }
        if self.eff_from_center > self.p_store() + 1e-12 {
            return Err(Error::Parameter(format!(
                "eff_from_center {} exceeds the storage probability {}",
                self.eff_from_center,
                self.p_store()
            )));
        }
        if self.fid_from_edge < 0.5 {
            return Err(Error::Parameter("fid_from_edge below 0.5".into()));
        }
        Ok(())
    }

    pub fn p_store(&self) -> f64 {
        (1.0 - self.p_no_interaction - self.p_scatter_write) * self.store_share
    }

    pub fn p_reflect(&self) -> f64 {
        (1.0 - self.p_no_interaction - self.p_scatter_write) * (1.0 - self.store_share)
    }

    /// Read-out probability of a payload at unit coupling scale.
    pub fn read_eff(&self) -> f64 {
        if self.p_store() > 0.0 {
            self.eff_from_center / self.p_store()
        } else {
            0.0
        }
    }

    /// Storage probability for an edge-state atom at unit coupling scale.
    pub fn edge_store(&self) -> f64 {
        let r = self.read_eff();
        if r > 0.0 {
            (self.eff_from_edge / r).min(1.0)
        } else {
            0.0
        }
    }
}

/// Write-channel imperfections of the stored payload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayloadNoise {
    pub circular_fidelity: f64,
    pub linear_fidelity: f64,
}

impl Default for PayloadNoise {
    fn default() -> Self {
        Self { circular_fidelity: 0.985, linear_fidelity: 0.96 }
    }
}

impl PayloadNoise {
    pub const IDEAL: Self = Self { circular_fidelity: 1.0, linear_fidelity: 1.0 };

    /// (depolarizing probability, coherence factor) realizing the two fidelities.
    pub fn channel(&self) -> Result<(f64, f64)> {
        let p = 2.0 * (1.0 - self.circular_fidelity);
        if !(0.0..=1.0).contains(&p) || p >= 1.0 {
            return Err(Error::Parameter(format!("circular fidelity {} outside (0.5, 1]", self.circular_fidelity)));
        }
        let a = (2.0 * self.linear_fidelity - 1.0) / (1.0 - p);
        if !(0.0..=1.0 + 1e-12).contains(&a) {
            return Err(Error::Parameter(format!(
                "linear fidelity {} not reachable with circular fidelity {}",
                self.linear_fidelity, self.circular_fidelity
            )));
        }
        Ok((p, a.min(1.0)))
    }
}

/// Everything a register needs, with derived constants cached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeModel {
    pub cavity: CavityParams,
    pub addressing: AddressingParams,
    pub calib: EfficiencyCalib,
    pub markov: MarkovParams,
    pub noise: PayloadNoise,
    pub dephasing: DephasingParams,
    pub detuning_model: DetuningModel,
    pub detuning: f64,
    /// Probability that optical pumping fails and leaves every atom scrambled.
    pub p_prepare_fail: f64,
    /// Remove the deterministic Larmor phase at the nominal rate (analysis frame).
    pub larmor_compensation: bool,
    /// Ignore the position dependence of the coupling (coupling scale 1 everywhere).
    pub uniform_coupling: bool,
    /// Stray control light on neighbouring atoms during every pulse.
    pub crossillumination: bool,
    scatter_scale: f64,
    mean_virtual_shift: f64,
    depolarize_p: f64,
    coherence: f64,
    edge_depolarize_p: f64,
}

impl NodeModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        cavity: CavityParams,
        addressing: AddressingParams,
        markov: MarkovParams,
        noise: PayloadNoise,
        dephasing: DephasingParams,
        detuning_model: DetuningModel,
        detuning: f64,
        p_prepare_fail: f64,
    ) -> Result<Self> {
        markov.validate()?;
        if !(0.0..=1.0).contains(&p_prepare_fail) {
            return Err(Error::Parameter(format!("p_prepare_fail {p_prepare_fail} is not a probability")));
        }
        let mut problems = cavity.validate();
        problems.extend(addressing.validate());
        problems.extend(detuning_model.validate());
        problems.extend(dephasing.validate());
        if !problems.is_empty() {
            return Err(Error::Parameter(problems.join("; ")));
        }
        let scatter_scale = detuning_model.scatter_scale(detuning)?;
        let (depolarize_p, coherence) = noise.channel()?;
        let edge_shrink = (2.0 * markov.fid_from_edge - 1.0) / (1.0 - depolarize_p);
        if edge_shrink > 1.0 + 1e-12 {
            return Err(Error::Parameter("fid_from_edge exceeds the circular payload fidelity".into()));
        }
        let calib = EfficiencyCalib::default_for(&cavity, &addressing);
        let ensemble = addressing.acceptance_positions();
        let mean_virtual_shift = ensemble.expect(|x| dephasing.virtual_shift(x));
        let model = Self {
            cavity,
            addressing,
            calib,
            markov,
            noise,
            dephasing,
            detuning_model,
            detuning,
            p_prepare_fail,
            larmor_compensation: true,
            uniform_coupling: false,
            crossillumination: true,
            scatter_scale,
            mean_virtual_shift,
            depolarize_p,
            coherence,
            edge_depolarize_p: 1.0 - edge_shrink.min(1.0),
        };
        if model.write_budget_excess(1.0 + 1e-9) > 0.0 {
            return Err(Error::ModelValidity(format!(
                "write outcome probabilities exceed 1 at detuning 2pi*{:.2} MHz",
                detuning / crate::physics::MHZ
            )));
        }
        Ok(model)
    }

    /// Paper defaults at the reference detuning.
    pub fn reference() -> Self {
        let dm = DetuningModel::default();
        Self::new(
            CavityParams::default(),
            AddressingParams::default(),
            MarkovParams::default(),
            PayloadNoise::default(),
            DephasingParams::default(),
            dm,
            dm.ref_detuning,
            0.05,
        )
        .expect("reference parameters are valid")
    }

    /// Same model at another detuning.
    pub fn with_detuning(&self, detuning: f64) -> Result<Self> {
        let mut m = Self::new(
            self.cavity,
            self.addressing,
            self.markov,
            self.noise,
            self.dephasing,
            self.detuning_model,
            detuning,
            self.p_prepare_fail,
        )?;
        m.calib = self.calib;
        m.larmor_compensation = self.larmor_compensation;
        m.uniform_coupling = self.uniform_coupling;
        m.crossillumination = self.crossillumination;
        Ok(m)
    }

    /// Rebuilds the derived constants after editing public fields.
    pub fn rebuilt(&self) -> Result<Self> {
        self.with_detuning(self.detuning)
    }

    /// Unaddressed-atom scattering probability per photon.
    pub fn unaddressed_scatter(&self) -> f64 {
        (self.detuning_model.ref_scatter_prob * self.scatter_scale).min(1.0)
    }

    /// Addressed-atom scattering probability per write.
    pub fn addressed_scatter(&self) -> f64 {
        (self.markov.p_scatter_write * self.scatter_scale).min(1.0)
    }

    pub fn coupling_scale(&self, x: f64) -> f64 {
        if self.uniform_coupling {
            1.0
        } else {
            self.calib.coupling_scale(cavity_coupling(x, &self.cavity), &self.cavity)
        }
    }

    pub fn local_phase_rate(&self, x: f64) -> f64 {
        self.dephasing.phase_rate + self.dephasing.virtual_shift(x) - self.mean_virtual_shift
    }

    /// Storage probability for an atom in `state` at coupling scale `k`.
    pub fn store_prob(&self, state: &AtomInternalState, k: f64) -> f64 {
        match state {
            AtomInternalState::ReadyCenter => (self.markov.p_store() * k).min(1.0),
            AtomInternalState::ReadyEdgePlus | AtomInternalState::ReadyEdgeMinus => {
                (self.markov.edge_store() * k).min(1.0)
            }
            _ => 0.0,
        }
    }

    /// Emission probability for a read of a Holding atom at coupling scale `k`.
    pub fn read_prob(&self, k: f64) -> f64 {
        (self.markov.read_eff() * k).min(1.0)
    }

    /// Emission probability when reading a scrambled atom.
    pub fn scrambled_emit_prob(&self) -> f64 {
        self.markov.eff_from_edge
    }

    /// Amount by which the worst-case write tree overshoots `limit` (0 when valid).
    fn write_budget_excess(&self, limit: f64) -> f64 {
        let k_max = self.coupling_scale(0.0);
        let w = self.markov.p_store() * k_max;
        let others = 4.0;
        let total = w.min(1.0)
            + self.addressed_scatter()
            + others * (1.0 - w.min(1.0)) * self.unaddressed_scatter()
            + self.markov.p_no_interaction;
        (total - limit).max(0.0)
    }

    fn payload(&self, input: NamedPolarization, origin: Origin) -> PolarizationQubit {
        let mut q = input.state().depolarize(self.depolarize_p).expect("validated at construction");
        q = q.dephase_amplitude(self.coherence).expect("coherence factor validated at construction");
        if origin == Origin::Edge {
            q = q.depolarize(self.edge_depolarize_p).expect("validated at construction");
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub time_us: f64,
    pub atom: String,
    pub op: String,
    pub outcome: String,
}

impl fmt::Display for AuditEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}\t{}\t{}\t{}", self.time_us, self.atom, self.op, self.outcome)
    }
}

/// Header line of the audit-log text format.
pub const AUDIT_HEADER: &str = "# time_us\tatom\top\toutcome";

/// The atoms of one node, owned by one trial.
#[derive(Debug, Clone)]
pub struct Register {
    atoms: Vec<AtomSlot>,
    model: NodeModel,
    log: Option<Vec<AuditEntry>>,
}

impl Register {
    /// Atoms at the given positions, all freshly prepared in mF=0.
    pub fn new(model: &NodeModel, atoms: &[(&str, f64)]) -> Result<Self> {
        let mut slots = Vec::with_capacity(atoms.len());
        for (id, x) in atoms {
            if slots.iter().any(|s: &AtomSlot| s.id == *id) {
                return Err(Error::InvalidArgument(format!("duplicate atom label `{id}`")));
            }
            slots.push(AtomSlot {
                id: id.to_string(),
                position_x: *x,
                coupling: cavity_coupling(*x, &model.cavity),
                coupling_scale: model.coupling_scale(*x),
                local_phase_rate: model.local_phase_rate(*x),
                state: AtomInternalState::ReadyCenter,
            });
        }
        Ok(Self { atoms: slots, model: model.clone(), log: None })
    }

    /// Two atoms A and B at +-d/2.
    pub fn pair(model: &NodeModel, distance: f64) -> Result<Self> {
        Self::new(model, &[("A", -0.5 * distance), ("B", 0.5 * distance)])
    }

    pub fn with_audit(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn model(&self) -> &NodeModel {
        &self.model
    }

    pub fn atoms(&self) -> &[AtomSlot] {
        &self.atoms
    }

    pub fn audit(&self) -> &[AuditEntry] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a.id == label)
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn slot(&self, label: &str) -> Result<&AtomSlot> {
        Ok(&self.atoms[self.index_of(label)?])
    }

    pub fn state(&self, label: &str) -> Result<&AtomInternalState> {
        Ok(&self.slot(label)?.state)
    }

    pub fn set_state(&mut self, label: &str, state: AtomInternalState) -> Result<()> {
        let i = self.index_of(label)?;
        self.atoms[i].state = state;
        Ok(())
    }

    fn record(&mut self, t: f64, atom: &str, op: &str, outcome: String) {
        if let Some(log) = self.log.as_mut() {
            log.push(AuditEntry { time_us: t * 1e6, atom: atom.to_string(), op: op.to_string(), outcome });
        }
    }

    /// Optical pumping of one atom to mF=0.
    pub fn initialize(&mut self, label: &str) -> Result<()> {
        let i = self.index_of(label)?;
        let from = self.atoms[i].state.tag();
        self.atoms[i].state = AtomInternalState::ReadyCenter;
        self.record(0.0, label, "init", format!("{from}->C"));
        Ok(())
    }

    /// Prepares every atom; with probability p_prepare_fail the whole register ends up scrambled.
    /// Consumes one uniform draw. Returns false on a failed preparation.
    pub fn prepare<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let u: f64 = rng.random();
        let ok = u >= self.model.p_prepare_fail;
        let state = if ok { AtomInternalState::ReadyCenter } else { AtomInternalState::Scrambled };
        for a in &mut self.atoms {
            a.state = state.clone();
        }
        self.record(0.0, "*", "prepare", if ok { "C".into() } else { "S".into() });
        ok
    }

    pub fn write<R: Rng + ?Sized>(&mut self, target: &str, input: NamedPolarization, t: f64, rng: &mut R) -> Result<WriteOutcome> {
        let u = [rng.random::<f64>(), rng.random::<f64>()];
        self.write_with(target, input, t, u)
    }

    /// Write driven by explicit uniforms: u[0] selects the outcome, u[1] the scattering branch.
    pub fn write_with(&mut self, target: &str, input: NamedPolarization, t: f64, u: [f64; WRITE_DRAWS]) -> Result<WriteOutcome> {
        let ti = self.index_of(target)?;
        let m = &self.model;
        let slot = &self.atoms[ti];
        let w = m.store_prob(&slot.state, slot.coupling_scale);
        let p_sc = m.addressed_scatter();
        let x = m.unaddressed_scatter();
        let mut edge = w;
        let outcome = if u[0] < edge {
            WriteOutcome::Stored
        } else if u[0] < {
            edge += p_sc;
            edge
        } {
            WriteOutcome::ScatteredAddressed
        } else {
            let mut hit = None;
            for (j, other) in self.atoms.iter().enumerate() {
                if j == ti || !other.state.is_ready() {
                    continue;
                }
                edge += (1.0 - w) * x;
                if u[0] < edge {
                    hit = Some(other.id.clone());
                    break;
                }
            }
            match hit {
                Some(id) => WriteOutcome::ScatteredUnaddressed(id),
                None if u[0] < edge + m.markov.p_no_interaction => WriteOutcome::NoInteraction,
                None => WriteOutcome::Reflected,
            }
        };
        match &outcome {
            WriteOutcome::Stored => {
                let origin = if slot.state == AtomInternalState::ReadyCenter { Origin::Center } else { Origin::Edge };
                let qubit = self.model.payload(input, origin);
                self.atoms[ti].state = AtomInternalState::Holding { qubit, since: t, origin };
            }
            WriteOutcome::ScatteredAddressed => {
                let next = scatter_branch(&self.atoms[ti].state, self.model.markov.p_branch_back, u[1]);
                self.atoms[ti].state = next;
            }
            WriteOutcome::ScatteredUnaddressed(id) => {
                let j = self.index_of(id)?;
                self.atoms[j].state = AtomInternalState::Scrambled;
            }
            WriteOutcome::NoInteraction | WriteOutcome::Reflected => {}
        }
        self.record(t, target, &format!("write:{input}"), outcome.to_string());
        Ok(outcome)
    }

    pub fn read<R: Rng + ?Sized>(&mut self, target: &str, t: f64, rng: &mut R) -> Result<ReadOutcome> {
        let u = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
        self.read_with(target, t, u)
    }

    /// Read driven by explicit uniforms: u[0] emission/scattering, u[1] return branch, u[2] edge sign.
    pub fn read_with(&mut self, target: &str, t: f64, u: [f64; READ_DRAWS]) -> Result<ReadOutcome> {
        self.read_scaled(target, t, u, 1.0, "read")
    }

    /// A read whose emission probability is multiplied by `drive`. With drive < 1 (stray control light)
    /// only a Holding atom that actually emits is affected; otherwise the atom is left untouched.
    pub(crate) fn read_scaled(&mut self, target: &str, t: f64, u: [f64; READ_DRAWS], drive: f64, op: &str) -> Result<ReadOutcome> {
        let ti = self.index_of(target)?;
        let slot = &self.atoms[ti];
        let (emit_p, origin) = match &slot.state {
            AtomInternalState::Holding { since, origin, .. } => {
                if t < *since {
                    return Err(Error::Causality { write_us: since * 1e6, read_us: t * 1e6 });
                }
                (self.model.read_prob(slot.coupling_scale), Some(*origin))
            }
            AtomInternalState::Scrambled => (self.model.scrambled_emit_prob(), None),
            _ => {
                self.record(t, target, op, "no-photon".into());
                return Ok(ReadOutcome::NoPhoton);
            }
        };
        if drive < 1.0 && (origin.is_none() || u[0] >= drive * emit_p) {
            return Ok(ReadOutcome::NoPhoton);
        }
        let v = u[0];
        let emitted = v < drive * emit_p;
        let photon = if emitted {
            match &slot.state {
                AtomInternalState::Holding { qubit, since, .. } => {
                    let dt = t - since;
                    let mut rate = slot.local_phase_rate;
                    if self.model.larmor_compensation {
                        rate -= self.model.dephasing.phase_rate;
                    }
                    Some(qubit.rotate_phase(rate * dt))
                }
                _ => Some(PolarizationQubit::maximally_mixed()),
            }
        } else {
            None
        };
        // failed read: the control pulse may scatter onto a ready neighbour
        let mut scattered = None;
        if !emitted && op == "read" {
            let x = self.model.unaddressed_scatter();
            let mut edge = emit_p;
            for (j, other) in self.atoms.iter().enumerate() {
                if j == ti || !other.state.is_ready() {
                    continue;
                }
                edge += (1.0 - emit_p) * x;
                if v < edge {
                    scattered = Some(j);
                    break;
                }
            }
        }
        let p_center = match origin {
            Some(Origin::Edge) => self.model.markov.p_edge_return_center,
            _ => self.model.markov.p_return_center,
        };
        let next = if u[1] < p_center {
            AtomInternalState::ReadyCenter
        } else if u[2] < 0.5 {
            AtomInternalState::ReadyEdgePlus
        } else {
            AtomInternalState::ReadyEdgeMinus
        };
        self.atoms[ti].state = next;
        let mut outcome = if emitted { "photon".to_string() } else { "no-photon".to_string() };
        if let Some(j) = scattered {
            self.atoms[j].state = AtomInternalState::Scrambled;
            outcome.push_str(&format!(",scattered:{}", self.atoms[j].id));
        }
        self.record(t, target, op, outcome);
        Ok(match photon {
            Some(q) => ReadOutcome::Photon(q),
            None => ReadOutcome::NoPhoton,
        })
    }

    /// Stores `input` in `target` if it is ready, bypassing the outcome tree (stray-photon capture).
    pub(crate) fn capture(&mut self, target: &str, input: NamedPolarization, t: f64) -> Result<bool> {
        let i = self.index_of(target)?;
        let origin = match self.atoms[i].state {
            AtomInternalState::ReadyCenter => Origin::Center,
            AtomInternalState::ReadyEdgePlus | AtomInternalState::ReadyEdgeMinus => Origin::Edge,
            _ => return Ok(false),
        };
        let qubit = self.model.payload(input, origin);
        self.atoms[i].state = AtomInternalState::Holding { qubit, since: t, origin };
        self.record(t, target, &format!("capture:{input}"), "stored".into());
        Ok(true)
    }

    /// Audit log as text, header included.
    pub fn audit_text(&self) -> String {
        let mut s = String::from(AUDIT_HEADER);
        s.push('\n');
        for e in self.audit() {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}

/// Post-scattering state: back to where it was with `p_back`, otherwise evenly to the other two F=1 states.
fn scatter_branch(state: &AtomInternalState, p_back: f64, u: f64) -> AtomInternalState {
    use AtomInternalState::*;
    if u < p_back {
        return state.clone();
    }
    let second = u >= p_back + 0.5 * (1.0 - p_back);
    match state {
        ReadyCenter => if second { ReadyEdgeMinus } else { ReadyEdgePlus },
        ReadyEdgePlus => if second { ReadyEdgeMinus } else { ReadyCenter },
        ReadyEdgeMinus => if second { ReadyEdgePlus } else { ReadyCenter },
        other => other.clone(),
    }
}

/// Probability of every write outcome for `target` in the register's current state.
pub fn write_outcome_probs(reg: &Register, target: &str) -> Result<Vec<(WriteOutcome, f64)>> {
    let ti = reg.index_of(target)?;
    let m = reg.model();
    let slot = &reg.atoms()[ti];
    let w = m.store_prob(&slot.state, slot.coupling_scale);
    let x = m.unaddressed_scatter();
    let mut out = vec![(WriteOutcome::Stored, w), (WriteOutcome::ScatteredAddressed, m.addressed_scatter())];
    for (j, other) in reg.atoms().iter().enumerate() {
        if j != ti && other.state.is_ready() {
            out.push((WriteOutcome::ScatteredUnaddressed(other.id.clone()), (1.0 - w) * x));
        }
    }
    out.push((WriteOutcome::NoInteraction, m.markov.p_no_interaction));
    let used: f64 = out.iter().map(|(_, p)| p).sum();
    out.push((WriteOutcome::Reflected, 1.0 - used));
    Ok(out)
}

/// Acceptance-range position ensemble of one atom (|x| uniform, sign irrelevant).
pub fn acceptance_ensemble(addressing: &AddressingParams) -> PositionDistribution {
    addressing.acceptance_positions()
}
