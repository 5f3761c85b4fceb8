//! TOML configuration: node parameters with unit-suffixed keys, plus run, scenario and sweep settings.
//!
//! Angular frequencies are written as ordinary frequencies (`g0_mhz = 4.9` means g0 = 2pi * 4.9 MHz).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::node::{MarkovParams, NodeModel, PayloadNoise};
use crate::physics::{
    AddressingParams, CavityParams, DephasingParams, DetuningModel, EfficiencyCalib, Ellipticity, MHZ, UM,
};
use crate::protocol::{PatternTiming, TimingRules};

const KHZ: f64 = 2.0 * std::f64::consts::PI * 1e3;
const MG: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    pub g0_mhz: f64,
    pub kappa_mhz: f64,
    pub gamma_mhz: f64,
    pub mode_waist_um: f64,
}

impl Default for CavitySection {
    fn default() -> Self {
        Self { g0_mhz: 4.9, kappa_mhz: 2.7, gamma_mhz: 3.0, mode_waist_um: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AddressingSection {
    pub intensity_fwhm_um: f64,
    pub ellipticity_ratio: f64,
    pub stirap_fwhm_um: f64,
    pub min_distance_um: f64,
    pub max_distance_um: f64,
    pub crossillumination: bool,
}

impl Default for AddressingSection {
    fn default() -> Self {
        Self {
            intensity_fwhm_um: 1.96,
            ellipticity_ratio: 3.0,
            stirap_fwhm_um: 2.5,
            min_distance_um: 6.0,
            max_distance_um: 20.0,
            crossillumination: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetuningSection {
    pub detuning_mhz: f64,
    pub ref_detuning_mhz: f64,
    pub ref_scatter_prob: f64,
    pub validity_floor_mhz: f64,
}

impl Default for DetuningSection {
    fn default() -> Self {
        Self { detuning_mhz: -100.0, ref_detuning_mhz: -100.0, ref_scatter_prob: 0.0015, validity_floor_mhz: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EfficiencySection {
    /// Storage efficiency at the cavity center (physics model anchor).
    pub write_anchor: f64,
    /// Combined efficiency averaged over the acceptance positions.
    pub combined_mean: f64,
    /// Use the position-dependent coupling; false pins every atom to the mean.
    pub position_dependent: bool,
}

impl Default for EfficiencySection {
    fn default() -> Self {
        Self { write_anchor: 0.38, combined_mean: 0.26, position_dependent: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarkovSection {
    pub p_return_center: f64,
    pub p_to_edge: f64,
    pub eff_from_edge: f64,
    pub fid_from_edge: f64,
    pub p_no_interaction: f64,
    pub p_scatter_write: f64,
    pub p_branch_back: f64,
    pub store_share: f64,
    pub p_edge_return_center: f64,
    pub p_prepare_fail: f64,
}

impl Default for MarkovSection {
    fn default() -> Self {
        let m = MarkovParams::default();
        Self {
            p_return_center: m.p_return_center,
            p_to_edge: m.p_to_edge,
            eff_from_edge: m.eff_from_edge,
            fid_from_edge: m.fid_from_edge,
            p_no_interaction: m.p_no_interaction,
            p_scatter_write: m.p_scatter_write,
            p_branch_back: m.p_branch_back,
            store_share: m.store_share,
            p_edge_return_center: m.p_edge_return_center,
            p_prepare_fail: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PayloadSection {
    pub circular_fidelity: f64,
    pub linear_fidelity: f64,
}

impl Default for PayloadSection {
    fn default() -> Self {
        let p = PayloadNoise::default();
        Self { circular_fidelity: p.circular_fidelity, linear_fidelity: p.linear_fidelity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EllipticitySetting {
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DephasingSection {
    pub guiding_field_mg: f64,
    pub phase_rate_khz: f64,
    pub ellipticity: EllipticitySetting,
    pub trap_waist_um: f64,
    pub virtual_field_small_mg: f64,
    pub virtual_field_large_mg: f64,
    pub coherence_cap_ms: f64,
    pub larmor_compensation: bool,
}

impl Default for DephasingSection {
    fn default() -> Self {
        Self {
            guiding_field_mg: 44.0,
            phase_rate_khz: 30.0,
            ellipticity: EllipticitySetting::Small,
            trap_waist_um: 30.0,
            virtual_field_small_mg: 6.2,
            virtual_field_large_mg: 12.4,
            coherence_cap_ms: 100.0,
            larmor_compensation: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingSection {
    pub switch_delay_us: f64,
    pub min_storage_us: f64,
    pub rephase_period_us: f64,
    pub write_duration_us: f64,
    pub read_duration_us: f64,
    /// Pattern slots in rephasing periods.
    pub second_write_periods: f64,
    pub first_read_periods: f64,
    pub second_read_periods: f64,
    pub cycle_period_periods: f64,
    pub cycle_storage_periods: f64,
}

impl Default for TimingSection {
    fn default() -> Self {
        let t = PatternTiming::default();
        Self {
            switch_delay_us: 40.0,
            min_storage_us: 100.0,
            rephase_period_us: 1e3 / 30.0,
            write_duration_us: 8.0,
            read_duration_us: 8.0,
            second_write_periods: t.second_write,
            first_read_periods: t.first_read,
            second_read_periods: t.second_read,
            cycle_period_periods: t.cycle_period,
            cycle_storage_periods: t.cycle_storage,
        }
    }
}

/// Every calibrated parameter of the node.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodeConfig {
    pub cavity: CavitySection,
    pub addressing: AddressingSection,
    pub detuning: DetuningSection,
    pub efficiency: EfficiencySection,
    pub markov: MarkovSection,
    pub payload: PayloadSection,
    pub dephasing: DephasingSection,
    pub timing: TimingSection,
}

impl NodeConfig {
    pub fn cavity(&self) -> CavityParams {
        let c = &self.cavity;
        CavityParams { g0: c.g0_mhz * MHZ, kappa: c.kappa_mhz * MHZ, gamma: c.gamma_mhz * MHZ, mode_waist: c.mode_waist_um * UM }
    }

    pub fn addressing(&self) -> AddressingParams {
        let a = &self.addressing;
        AddressingParams {
            intensity_fwhm_x: a.intensity_fwhm_um * UM,
            ellipticity_ratio: a.ellipticity_ratio,
            stirap_fwhm_x: a.stirap_fwhm_um * UM,
            readout_duration: self.timing.read_duration_us * 1e-6,
            switch_delay: self.timing.switch_delay_us * 1e-6,
            min_distance: a.min_distance_um * UM,
            acceptance_distance_range: (a.min_distance_um * UM, a.max_distance_um * UM),
        }
    }

    pub fn detuning_model(&self) -> DetuningModel {
        let d = &self.detuning;
        DetuningModel {
            ref_detuning: d.ref_detuning_mhz * MHZ,
            ref_scatter_prob: d.ref_scatter_prob,
            validity_floor: d.validity_floor_mhz * MHZ,
        }
    }

    pub fn markov(&self) -> MarkovParams {
        let m = &self.markov;
        MarkovParams {
            p_return_center: m.p_return_center,
            p_to_edge: m.p_to_edge,
            eff_from_edge: m.eff_from_edge,
            fid_from_edge: m.fid_from_edge,
            p_no_interaction: m.p_no_interaction,
            p_scatter_write: m.p_scatter_write,
            p_branch_back: m.p_branch_back,
            store_share: m.store_share,
            eff_from_center: self.efficiency.combined_mean,
            p_edge_return_center: m.p_edge_return_center,
        }
    }

    pub fn dephasing(&self) -> DephasingParams {
        let d = &self.dephasing;
        DephasingParams {
            guiding_field: d.guiding_field_mg * MG,
            phase_rate: d.phase_rate_khz * KHZ,
            ellipticity: match d.ellipticity {
                EllipticitySetting::Small => Ellipticity::Small,
                EllipticitySetting::Large => Ellipticity::Large,
            },
            trap_waist: d.trap_waist_um * UM,
            virtual_field_small: d.virtual_field_small_mg * MG,
            virtual_field_large: d.virtual_field_large_mg * MG,
            coherence_cap: d.coherence_cap_ms * 1e-3,
        }
    }

    pub fn timing(&self) -> TimingRules {
        let t = &self.timing;
        TimingRules {
            switch_delay: t.switch_delay_us * 1e-6,
            min_storage: t.min_storage_us * 1e-6,
            rephase_period: t.rephase_period_us * 1e-6,
            write_duration: t.write_duration_us * 1e-6,
            read_duration: t.read_duration_us * 1e-6,
        }
    }

    pub fn pattern_timing(&self) -> PatternTiming {
        let t = &self.timing;
        PatternTiming {
            second_write: t.second_write_periods,
            first_read: t.first_read_periods,
            second_read: t.second_read_periods,
            cycle_period: t.cycle_period_periods,
            cycle_storage: t.cycle_storage_periods,
        }
    }

    pub fn calib(&self) -> EfficiencyCalib {
        EfficiencyCalib::calibrate(&self.cavity(), &self.addressing(), self.efficiency.write_anchor, self.efficiency.combined_mean)
    }

    pub fn model(&self) -> Result<NodeModel> {
        let p = &self.payload;
        let mut m = NodeModel::new(
            self.cavity(),
            self.addressing(),
            self.markov(),
            PayloadNoise { circular_fidelity: p.circular_fidelity, linear_fidelity: p.linear_fidelity },
            self.dephasing(),
            self.detuning_model(),
            self.detuning.detuning_mhz * MHZ,
            self.markov.p_prepare_fail,
        )?;
        m.calib = self.calib();
        m.larmor_compensation = self.dephasing.larmor_compensation;
        m.uniform_coupling = !self.efficiency.position_dependent;
        m.crossillumination = self.addressing.crossillumination;
        Ok(m)
    }

    /// Every invariant violation, without running anything.
    pub fn problems(&self) -> Vec<String> {
        let mut v = self.cavity().validate();
        v.extend(self.addressing().validate());
        v.extend(self.detuning_model().validate());
        v.extend(self.dephasing().validate());
        v.extend(self.timing().validate());
        if let Err(e) = self.markov().validate() {
            v.push(e.to_string());
        }
        if !(0.0..=1.0).contains(&self.markov.p_prepare_fail) {
            v.push(format!("markov.p_prepare_fail = {} is not a probability", self.markov.p_prepare_fail));
        }
        let p = &self.payload;
        if let Err(e) = (PayloadNoise { circular_fidelity: p.circular_fidelity, linear_fidelity: p.linear_fidelity }).channel() {
            v.push(e.to_string());
        }
        if !(self.efficiency.write_anchor > 0.0 && self.efficiency.write_anchor <= 1.0) {
            v.push("efficiency.write_anchor must be in (0,1]".into());
        }
        if v.is_empty() {
            if let Err(e) = self.model() {
                v.push(e.to_string());
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    Table1,
    Coherence,
    Reuse,
    DetuningSweep,
    DistanceSweep,
    AcceptanceSweep,
    Capacity,
    Retry,
}

impl ScenarioId {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::Coherence => "coherence",
            Self::Reuse => "reuse",
            Self::DetuningSweep => "detuning-sweep",
            Self::DistanceSweep => "distance-sweep",
            Self::AcceptanceSweep => "acceptance-sweep",
            Self::Capacity => "capacity",
            Self::Retry => "retry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Target-basis proportion.
    Basis,
    /// Linear-inversion reconstruction projected into the Bloch ball.
    Reconstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scenario: ScenarioId,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default = "default_estimator")]
    pub estimator: Estimator,
    /// Write the audit log of the first trial of every cell.
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_trials() -> u64 {
    100_000
}
fn default_seed() -> u64 {
    20_240_601
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}
fn default_estimator() -> Estimator {
    Estimator::Basis
}

/// Scenario knobs; each scenario reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub patterns: Vec<String>,
    /// Input pairs as "A/B", e.g. "R/L".
    pub inputs: Vec<String>,
    pub storage_us: Vec<f64>,
    pub coherence_inputs: Vec<String>,
    pub detunings_mhz: Vec<f64>,
    /// Detuning used as the scattering-free reference in the detuning sweep.
    pub reference_detuning_mhz: f64,
    pub distances_um: Vec<f64>,
    pub acceptance_widths_um: Vec<f64>,
    pub reuse_cycles: usize,
    pub reuse_inputs: String,
    pub retry_max_attempts: usize,
    pub retry_trials: u64,
    pub min_efficiency: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let period = 1e3 / 30.0;
        Self {
            patterns: vec!["AWBWARBR".into(), "AWBWBRAR".into()],
            inputs: vec!["R/R".into(), "R/L".into(), "H/H".into(), "H/V".into()],
            storage_us: (0..=15).map(|k| (2 * k) as f64 * period).collect(),
            coherence_inputs: vec!["H".into(), "R".into()],
            detunings_mhz: vec![-20.0, -30.0, -50.0, -75.0, -100.0, -150.0, -200.0],
            reference_detuning_mhz: -1e5,
            distances_um: vec![2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0],
            acceptance_widths_um: vec![0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 14.0, 20.0],
            reuse_cycles: 10,
            reuse_inputs: "H/R".into(),
            retry_max_attempts: 1000,
            retry_trials: 20_000,
            min_efficiency: 0.20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Dotted path into the configuration, e.g. "node.detuning.detuning_mhz".
    pub parameter: String,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
    /// Trials per point (defaults to run.trials).
    #[serde(default)]
    pub trials: Option<u64>,
}

impl SweepSection {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match (self.start, self.stop, self.steps) {
            (Some(a), Some(b), Some(n)) => {
                if !self.values.is_empty() {
                    return Err(Error::Config("sweep: give either values or start/stop/steps".into()));
                }
                if n < 2 {
                    return Err(Error::Config("sweep: steps must be at least 2".into()));
                }
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
            (None, None, None) => self.values.clone(),
            _ => return Err(Error::Config("sweep: start, stop and steps go together".into())),
        };
        if pts.is_empty() {
            return Err(Error::Config("sweep: no values".into()));
        }
        if pts.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep: values must be finite".into()));
        }
        Ok(pts)
    }
}

/// A complete run configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub run: RunSection,
    #[serde(default)]
    pub node: NodeConfig,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioId) -> Self {
        Self {
            run: RunSection {
                scenario,
                trials: default_trials(),
                seed: default_seed(),
                out_dir: None,
                format: OutputFormat::Csv,
                estimator: Estimator::Basis,
                trace: false,
                workers: None,
            },
            node: NodeConfig::default(),
            scenario: ScenarioSection::default(),
            sweep: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_error(text, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    /// Copy with the dotted `path` set to `value`; the result is re-parsed so unknown paths fail.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut tree = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut cur = &mut tree;
        for part in path.split('.') {
            cur = cur
                .get_mut(part)
                .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{path}`")))?;
        }
        *cur = match cur {
            serde_json::Value::Number(n) if n.is_u64() || n.is_i64() => {
                if value.fract() != 0.0 {
                    return Err(Error::Config(format!("parameter `{path}` takes integers")));
                }
                serde_json::json!(value as i64)
            }
            serde_json::Value::Number(_) => serde_json::json!(value),
            _ => return Err(Error::Config(format!("parameter `{path}` is not numeric"))),
        };
        serde_json::from_value(tree).map_err(|e| Error::Config(format!("sweep parameter `{path}`: {e}")))
    }

    /// Everything `validate` checks: parameter invariants and scenario settings.
    pub fn problems(&self) -> Vec<String> {
        let mut v = self.node.problems();
        if self.run.trials == 0 {
            v.push("run.trials must be at least 1".into());
        }
        for p in &self.scenario.patterns {
            if crate::protocol::Pattern::parse(p).is_none() {
                v.push(format!("scenario.patterns: unknown pattern `{p}`"));
            }
        }
        for i in self.scenario.inputs.iter().chain(std::iter::once(&self.scenario.reuse_inputs)) {
            if parse_input_pair(i).is_none() {
                v.push(format!("scenario: bad input pair `{i}` (expected e.g. \"R/L\")"));
            }
        }
        for i in &self.scenario.coherence_inputs {
            if crate::qubit::NamedPolarization::parse(i).is_none() {
                v.push(format!("scenario.coherence_inputs: unknown polarization `{i}`"));
            }
        }
        if self.scenario.storage_us.iter().any(|t| !(*t >= 0.0)) {
            v.push("scenario.storage_us must be non-negative".into());
        }
        if self.scenario.retry_max_attempts == 0 {
            v.push("scenario.retry_max_attempts must be at least 1".into());
        }
        if let Some(s) = &self.sweep {
            if let Err(e) = s.points() {
                v.push(e.to_string());
            } else if let Err(e) = self.with_parameter(&s.parameter, s.points().unwrap()[0]) {
                v.push(e.to_string());
            }
        }
        v
    }
}

pub fn parse_input_pair(s: &str) -> Option<(crate::qubit::NamedPolarization, crate::qubit::NamedPolarization)> {
    let (a, b) = s.split_once('/')?;
    Some((crate::qubit::NamedPolarization::parse(a.trim())?, crate::qubit::NamedPolarization::parse(b.trim())?))
}

fn config_error(text: &str, e: toml::de::Error) -> Error {
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
    Error::Parse { line, message: e.message().to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build_the_reference_model() {
        let c = NodeConfig::default();
        assert!(c.problems().is_empty(), "{:?}", c.problems());
        let m = c.model().unwrap();
        let r = NodeModel::reference();
        assert!((m.markov.p_store() - r.markov.p_store()).abs() < 1e-15);
        assert!((m.unaddressed_scatter() - r.unaddressed_scatter()).abs() < 1e-15);
        assert!((m.cavity.g0 - r.cavity.g0).abs() < 1e-6);
        assert!((m.dephasing.phase_rate - r.dephasing.phase_rate).abs() < 1e-9);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let text = "[run]\nscenario = \"table1\"\n\n[node.cavity]\ng0 = 4.9\n";
        match ScenarioConfig::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_flags_spacing_and_probabilities() {
        let mut c = NodeConfig::default();
        c.addressing.min_distance_um = 2.0;
        assert!(c.problems().iter().any(|p| p.contains("three times")));
        let mut c = NodeConfig::default();
        c.markov.p_branch_back = 1.3;
        assert!(c.problems().iter().any(|p| p.contains("p_branch_back")));
    }

    #[test]
    fn parameter_patching() {
        let c = ScenarioConfig::new(ScenarioId::Table1);
        let d = c.with_parameter("node.detuning.detuning_mhz", -200.0).unwrap();
        assert_eq!(d.node.detuning.detuning_mhz, -200.0);
        let t = c.with_parameter("run.trials", 10.0).unwrap();
        assert_eq!(t.run.trials, 10);
        assert!(c.with_parameter("node.nope", 1.0).is_err());
        assert!(c.with_parameter("run.trials", 1.5).is_err());
    }

    #[test]
    fn round_trip_through_toml() {
        let c = ScenarioConfig::new(ScenarioId::Coherence);
        let back = ScenarioConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn sweep_points() {
        let s = SweepSection { parameter: "x".into(), values: vec![], start: Some(0.0), stop: Some(1.0), steps: Some(5), trials: None };
        assert_eq!(s.points().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = SweepSection { steps: Some(1), ..s };
        assert!(s.points().is_err());
    }
}
